#include "bodyfat/standardize.hpp"

#include <cmath>

#include "bodyfat/errors.hpp"

namespace bodyfat {

Standardization fit_standardization(const Matrix& x, const std::vector<std::string>& names) {
    const double n = static_cast<double>(x.rows());
    Standardization st;
    st.means.resize(x.cols());
    st.sds.resize(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
        double mean = sum / n;
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double d = x(r, c) - mean;
            ss += d * d;
        }
        double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0))
            throw singular_error("constant feature column '" +
                                 (c < names.size() ? names[c] : "#" + std::to_string(c)) +
                                 "' (zero variance), design is rank-deficient");
        st.means[c] = mean;
        st.sds[c] = sd;
    }
    return st;
}

Matrix apply_standardization(const Matrix& x, const Standardization& st) {
    Matrix z(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c)
            z(r, c) = (x(r, c) - st.means[c]) / st.sds[c];
    return z;
}

}  // namespace bodyfat

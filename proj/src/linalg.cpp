#include "bodyfat/linalg.hpp"

#include <cmath>
#include <sstream>

#include "bodyfat/errors.hpp"

namespace bodyfat {

Matrix take_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(rows[r], c);
    return out;
}

std::vector<double> take(std::span<const double> v, std::span<const std::size_t> idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(v[i]);
    return out;
}

std::vector<double> solve_least_squares(const Matrix& a, std::span<const double> y,
                                        double cond_limit,
                                        const std::vector<std::string>* col_names) {
    const std::size_t n = a.rows();
    const std::size_t k = a.cols();
    if (y.size() != n)
        throw config_error("solve_least_squares: rows(A) != len(y)");
    if (n < k)
        throw domain_error("solve_least_squares: underdetermined system (rows < cols)");

    Matrix r = a;
    std::vector<double> qty(y.begin(), y.end());

    // Householder triangularization, reflecting y along the way.
    for (std::size_t j = 0; j < k; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += r(i, j) * r(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;  // zero column, caught by the condition check

        double alpha = (r(j, j) > 0.0) ? -norm : norm;
        std::vector<double> v(n - j);
        v[0] = r(j, j) - alpha;
        for (std::size_t i = j + 1; i < n; ++i) v[i - j] = r(i, j);
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;

        for (std::size_t c = j; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i - j] * r(i, c);
            double f = 2.0 * dot / vnorm2;
            for (std::size_t i = j; i < n; ++i) r(i, c) -= f * v[i - j];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * qty[i];
        double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) qty[i] -= f * v[i - j];
    }

    double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        double d = std::fabs(r(j, j));
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    if (dmax == 0.0 || dmin == 0.0 || dmax / dmin > cond_limit) {
        std::ostringstream msg;
        msg << "singular design matrix (condition estimate "
            << (dmin > 0.0 ? dmax / dmin : std::numeric_limits<double>::infinity())
            << "); offending columns:";
        for (std::size_t j = 0; j < k; ++j) {
            if (std::fabs(r(j, j)) <= dmax / cond_limit) {
                msg << ' '
                    << (col_names && j < col_names->size() ? (*col_names)[j]
                                                           : "#" + std::to_string(j));
            }
        }
        throw singular_error(msg.str());
    }

    std::vector<double> x(k);
    for (std::size_t jj = k; jj > 0; --jj) {
        std::size_t j = jj - 1;
        double s = qty[j];
        for (std::size_t c = j + 1; c < k; ++c) s -= r(j, c) * x[c];
        x[j] = s / r(j, j);
    }
    return x;
}

}  // namespace bodyfat

#include "bodyfat/regression.hpp"

#include <cmath>
#include <limits>

#include "bodyfat/errors.hpp"
#include "bodyfat/fmt.hpp"

#include "json.hpp"

namespace bodyfat::regression {

namespace {

constexpr double kCondLimit = 1e12;
constexpr double kDivergenceCap = 1e12;

void check_shapes(const Matrix& x, std::span<const double> y,
                  const std::vector<std::string>& names, const char* op) {
    if (x.rows() != y.size())
        throw config_error(std::string(op) + ": rows(X)=" + std::to_string(x.rows()) +
                           " != len(y)=" + std::to_string(y.size()));
    if (names.size() != x.cols())
        throw config_error(std::string(op) + ": feature name count " +
                           std::to_string(names.size()) + " != cols(X)=" +
                           std::to_string(x.cols()));
    if (x.cols() == 0)
        throw config_error(std::string(op) + ": empty design matrix");
    // intercept counts as a column of the solved system
    if (x.rows() <= x.cols() + 1)
        throw domain_error(std::string(op) + ": need more rows than features+intercept (" +
                           std::to_string(x.rows()) + " rows, " + std::to_string(x.cols()) +
                           " features)");
}

}  // namespace

LinearModel::LinearModel(std::vector<std::string> feature_names,
                         std::vector<double> coefficients, double intercept,
                         Standardization standardization)
    : feature_names_(std::move(feature_names)),
      coefficients_(std::move(coefficients)),
      intercept_(intercept),
      standardization_(std::move(standardization)) {}

double LinearModel::predict(std::span<const double> features) const {
    if (features.size() != coefficients_.size())
        throw config_error("predict: expected " + std::to_string(coefficients_.size()) +
                           " features, got " + std::to_string(features.size()));
    double out = intercept_;
    for (std::size_t j = 0; j < coefficients_.size(); ++j)
        out += coefficients_[j] * (features[j] - standardization_.means[j]) /
               standardization_.sds[j];
    return out;
}

std::vector<double> LinearModel::raw_coefficients() const {
    std::vector<double> raw(coefficients_.size());
    for (std::size_t j = 0; j < coefficients_.size(); ++j)
        raw[j] = coefficients_[j] / standardization_.sds[j];
    return raw;
}

double LinearModel::raw_intercept() const {
    double b = intercept_;
    for (std::size_t j = 0; j < coefficients_.size(); ++j)
        b -= coefficients_[j] * standardization_.means[j] / standardization_.sds[j];
    return b;
}

std::string LinearModel::strongest_predictor() const {
    std::size_t best = 0;
    for (std::size_t j = 1; j < coefficients_.size(); ++j)
        if (std::fabs(coefficients_[j]) > std::fabs(coefficients_[best])) best = j;
    return feature_names_[best];
}

LinearModel fit_ols(const Matrix& x, std::span<const double> y,
                    const std::vector<std::string>& feature_names) {
    check_shapes(x, y, feature_names, "fit_ols");
    Standardization st = fit_standardization(x, feature_names);
    Matrix z = apply_standardization(x, st);

    Matrix design(x.rows(), x.cols() + 1);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        design(r, 0) = 1.0;
        for (std::size_t c = 0; c < x.cols(); ++c) design(r, c + 1) = z(r, c);
    }
    std::vector<std::string> cols;
    cols.reserve(feature_names.size() + 1);
    cols.emplace_back("(intercept)");
    cols.insert(cols.end(), feature_names.begin(), feature_names.end());

    auto beta = solve_least_squares(design, y, kCondLimit, &cols);
    double intercept = beta[0];
    beta.erase(beta.begin());
    return LinearModel(feature_names, std::move(beta), intercept, std::move(st));
}

std::pair<LinearModel, TrainingTrace> fit_gd(const Matrix& x, std::span<const double> y,
                                             const std::vector<std::string>& feature_names,
                                             const GdConfig& config) {
    check_shapes(x, y, feature_names, "fit_gd");
    if (!(config.learning_rate > 0.0))
        throw config_error("fit_gd: learning_rate must be positive");
    if (config.max_epochs <= 0)
        throw config_error("fit_gd: max_epochs must be positive");
    if (!(config.tolerance > 0.0))
        throw config_error("fit_gd: tolerance must be positive");

    Standardization st = fit_standardization(x, feature_names);
    Matrix z = apply_standardization(x, st);
    const std::size_t n = x.rows();
    const std::size_t k = x.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> coef(k, 0.0);
    double intercept = 0.0;
    TrainingTrace trace;

    double prev_loss = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        // residuals and gradients of (1/n) |Z beta + b - y|^2
        std::vector<double> grad(k, 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        std::vector<double> resid(n);
        for (std::size_t r = 0; r < n; ++r) {
            double pred = intercept;
            for (std::size_t c = 0; c < k; ++c) pred += coef[c] * z(r, c);
            resid[r] = pred - y[r];
            loss += resid[r] * resid[r];
        }
        loss *= inv_n;
        for (std::size_t r = 0; r < n; ++r) {
            double f = 2.0 * inv_n * resid[r];
            grad_b += f;
            for (std::size_t c = 0; c < k; ++c) grad[c] += f * z(r, c);
        }
        for (std::size_t c = 0; c < k; ++c) coef[c] -= config.learning_rate * grad[c];
        intercept -= config.learning_rate * grad_b;

        // post-update loss drives the trace and the stopping rule
        double new_loss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double pred = intercept;
            for (std::size_t c = 0; c < k; ++c) pred += coef[c] * z(r, c);
            double d = pred - y[r];
            new_loss += d * d;
        }
        new_loss *= inv_n;

        if (!std::isfinite(new_loss) || new_loss > kDivergenceCap)
            throw divergence_error("fit_gd diverged at epoch " + std::to_string(epoch) +
                                   " (loss " + format_double(new_loss) + "); reduce learning_rate " +
                                   format_double(config.learning_rate));

        trace.entries.push_back({epoch, new_loss, std::nullopt});
        if (prev_loss - new_loss < config.tolerance) break;
        prev_loss = new_loss;
    }

    return {LinearModel(feature_names, std::move(coef), intercept, std::move(st)),
            std::move(trace)};
}

std::string model_to_json(const LinearModel& model) {
    nlohmann::ordered_json j;
    j["feature_names"] = model.feature_names();
    j["coefficients"] = model.coefficients();
    j["intercept"] = model.intercept();
    j["standardization"] = {{"means", model.standardization().means},
                            {"sds", model.standardization().sds}};
    return j.dump(2);
}

LinearModel model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error(std::string("linear model JSON: ") + e.what());
    }
    try {
        auto names = j.at("feature_names").get<std::vector<std::string>>();
        auto coefs = j.at("coefficients").get<std::vector<double>>();
        double intercept = j.at("intercept").get<double>();
        Standardization st;
        st.means = j.at("standardization").at("means").get<std::vector<double>>();
        st.sds = j.at("standardization").at("sds").get<std::vector<double>>();
        if (coefs.size() != names.size() || st.means.size() != names.size() ||
            st.sds.size() != names.size())
            throw data_error("linear model JSON: mismatched array lengths");
        for (double sd : st.sds)
            if (!(sd > 0.0)) throw data_error("linear model JSON: non-positive sd");
        return LinearModel(std::move(names), std::move(coefs), intercept, std::move(st));
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("linear model JSON: ") + e.what());
    }
}

}  // namespace bodyfat::regression

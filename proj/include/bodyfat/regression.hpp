#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bodyfat/linalg.hpp"
#include "bodyfat/standardize.hpp"
#include "bodyfat/trace.hpp"

namespace bodyfat::regression {

// Fitted linear model over z-scored features. Coefficients are stored in
// standardized units (%BF per standardized unit) so their magnitudes are
// directly comparable; raw-unit forms are derived for reporting.
class LinearModel {
public:
    LinearModel() = default;
    LinearModel(std::vector<std::string> feature_names, std::vector<double> coefficients,
                double intercept, Standardization standardization);

    // intercept + sum coef_j * (x_j - mean_j) / sd_j
    double predict(std::span<const double> features) const;

    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<double>& coefficients() const { return coefficients_; }
    double intercept() const { return intercept_; }
    const Standardization& standardization() const { return standardization_; }

    std::vector<double> raw_coefficients() const;
    double raw_intercept() const;

    // Largest |coefficient| in standardized units; ties break to the
    // earliest feature in feature_names order.
    std::string strongest_predictor() const;

    bool operator==(const LinearModel&) const = default;

private:
    std::vector<std::string> feature_names_;
    std::vector<double> coefficients_;
    double intercept_ = 0.0;
    Standardization standardization_;
};

// Exact least squares with intercept via Householder QR over internally
// z-scored features. Throws singular_error on rank-deficient designs
// (relative condition estimate above 1e12).
LinearModel fit_ols(const Matrix& x, std::span<const double> y,
                    const std::vector<std::string>& feature_names);

struct GdConfig {
    double learning_rate = 0.05;
    int max_epochs = 5000;
    double tolerance = 1e-10;  // stop when per-epoch loss improvement drops below
};

// Full-batch gradient descent on mean-squared error over the same
// standardized design; iterative cross-check of fit_ols. Throws
// divergence_error when the loss exceeds 1e12 or becomes non-finite.
std::pair<LinearModel, TrainingTrace> fit_gd(const Matrix& x, std::span<const double> y,
                                             const std::vector<std::string>& feature_names,
                                             const GdConfig& config = {});

std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& json_text);

}  // namespace bodyfat::regression

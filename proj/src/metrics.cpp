#include "bodyfat/metrics.hpp"

#include <cmath>

#include "bodyfat/errors.hpp"
#include "bodyfat/fmt.hpp"

#include "json.hpp"

namespace bodyfat::metrics {

namespace {

void check_lengths(std::span<const double> truth, std::span<const double> predicted,
                   const char* op) {
    if (truth.empty())
        throw domain_error(std::string(op) + ": empty input");
    if (truth.size() != predicted.size())
        throw domain_error(std::string(op) + ": length mismatch (" +
                           std::to_string(truth.size()) + " vs " +
                           std::to_string(predicted.size()) + ")");
}

}  // namespace

double mae(std::span<const double> truth, std::span<const double> predicted) {
    check_lengths(truth, predicted, "mae");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) sum += std::fabs(truth[i] - predicted[i]);
    return sum / static_cast<double>(truth.size());
}

double rmse(std::span<const double> truth, std::span<const double> predicted) {
    check_lengths(truth, predicted, "rmse");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double d = truth[i] - predicted[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(truth.size()));
}

double r2(std::span<const double> truth, std::span<const double> predicted) {
    check_lengths(truth, predicted, "r2");
    if (truth.size() < 2)
        throw domain_error("r2: need at least 2 samples");
    double mean = 0.0;
    for (double v : truth) mean += v;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double r = truth[i] - predicted[i];
        double t = truth[i] - mean;
        ss_res += r * r;
        ss_tot += t * t;
    }
    if (ss_tot == 0.0)
        throw domain_error("r2: zero-variance true values, R^2 undefined");
    return 1.0 - ss_res / ss_tot;
}

EvalReport make_report(std::span<const double> truth, std::span<const double> predicted,
                       std::string model_descriptor, std::uint64_t split_seed) {
    EvalReport report;
    report.model_descriptor = std::move(model_descriptor);
    report.split_seed = split_seed;
    report.n = truth.size();
    report.mae = mae(truth, predicted);
    report.rmse = rmse(truth, predicted);
    report.r2 = r2(truth, predicted);
    report.pairs.reserve(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i)
        report.pairs.emplace_back(truth[i], predicted[i]);
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["model"] = report.model_descriptor;
    j["split_seed"] = report.split_seed;
    j["n"] = report.n;
    j["mae"] = report.mae;
    j["rmse"] = report.rmse;
    j["r2"] = report.r2;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& [t, p] : report.pairs) pairs.push_back({t, p});
    j["pairs"] = std::move(pairs);
    return j.dump(2);
}

std::string pairs_to_csv(const EvalReport& report) {
    std::string csv = "true,predicted\n";
    for (const auto& [t, p] : report.pairs) {
        csv += format_double(t);
        csv += ',';
        csv += format_double(p);
        csv += '\n';
    }
    return csv;
}

}  // namespace bodyfat::metrics

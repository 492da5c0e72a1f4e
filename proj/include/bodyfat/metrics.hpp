#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bodyfat::metrics {

double mae(std::span<const double> truth, std::span<const double> predicted);
double rmse(std::span<const double> truth, std::span<const double> predicted);

// Coefficient of determination, 1 - SS_res/SS_tot on the evaluation set;
// may be negative. Zero-variance truth is an error, not a silent 0.
double r2(std::span<const double> truth, std::span<const double> predicted);

struct EvalReport {
    std::string model_descriptor;
    std::uint64_t split_seed = 0;
    std::size_t n = 0;
    double mae = 0.0;
    double rmse = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> pairs;  // (true, predicted)
};

EvalReport make_report(std::span<const double> truth, std::span<const double> predicted,
                       std::string model_descriptor, std::uint64_t split_seed);

std::string report_to_json(const EvalReport& report);

// The Fig.-1 style data artifact: header `true,predicted` plus one row per pair.
std::string pairs_to_csv(const EvalReport& report);

}  // namespace bodyfat::metrics

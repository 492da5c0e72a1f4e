#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bodyfat/dataset.hpp"
#include "bodyfat/metrics.hpp"
#include "bodyfat/neural.hpp"
#include "bodyfat/regression.hpp"
#include "bodyfat/trace.hpp"

namespace bodyfat::harness {

enum class ModelKind { ols, gd, mlp, navy, bmi_baseline };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ExperimentConfig {
    std::filesystem::path data_path;
    data::Units units = data::Units::imperial;
    ModelKind model = ModelKind::ols;
    std::vector<std::string> feature_names = {"weight", "chest", "abdomen", "hip", "thigh"};
    std::string target_name = "bodyfat";
    double split_ratio = 0.8;
    std::uint64_t seed = 0;
    regression::GdConfig gd;
    neural::TrainConfig mlp;               // seed is derived from `seed`, stream 3
    std::vector<int> mlp_hidden_dims = {16, 8};
    neural::Activation mlp_activation = neural::Activation::relu;
    std::filesystem::path output_dir;      // empty: no artifacts written
    bool emit_svg = false;
};

struct ExperimentResult {
    metrics::EvalReport report;
    std::optional<TrainingTrace> trace;       // iterative models only
    std::optional<std::string> model_json;    // fitted models only
};

// ingest -> split -> fit on train -> evaluate on test -> artifacts.
// Deterministic given (config, data); standardization and fitting see
// training rows only. Errors are tagged with the failing pipeline stage.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Same pipeline on pre-loaded records (the load stage factored out).
ExperimentResult run_on_records(const std::vector<data::AnthropometricRecord>& records,
                                const ExperimentConfig& config);

struct MetricPercentiles {
    double p10 = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
};

struct SweepResult {
    std::vector<metrics::EvalReport> reports;  // ascending seed order
    MetricPercentiles mae;
    MetricPercentiles rmse;
    MetricPercentiles r2;
};

// One run_experiment per seed (artifact writing suppressed per seed),
// merged in ascending seed order; nearest-rank percentiles. Writes
// sweep.json to config.output_dir when set.
SweepResult sweep_seeds(const ExperimentConfig& config, std::vector<std::uint64_t> seeds);

std::string sweep_to_json(const SweepResult& result);

// CSV always; an .svg sibling (axes labeled, identity line on the
// scatter) when with_svg is set.
void emit_scatter(const metrics::EvalReport& report, const std::filesystem::path& csv_path,
                  bool with_svg = false);
void emit_trace(const TrainingTrace& trace, const std::filesystem::path& csv_path,
                bool with_svg = false);

std::string scatter_to_svg(const metrics::EvalReport& report);
std::string trace_to_svg(const TrainingTrace& trace);

// temp-file + rename; parent directories created on demand.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Flat JSON config document, keys mirroring the CLI flags one-to-one.
// Unknown keys are configuration errors.
void apply_config_json(ExperimentConfig& config, const std::string& json_text);
ExperimentConfig config_from_json_file(const std::filesystem::path& path);

std::vector<std::string> parse_name_list(const std::string& comma_separated);
std::vector<int> parse_int_list(const std::string& comma_separated);

// "0..199" (inclusive range) or comma-separated seed list.
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

}  // namespace bodyfat::harness

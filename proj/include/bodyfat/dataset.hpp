#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bodyfat/linalg.hpp"

namespace bodyfat::data {

// One subject. Canonical units: kg for weight, cm for every length,
// g/cm^3 for density, percent for bodyfat, years for age.
struct AnthropometricRecord {
    int case_id = 0;
    double density = 0.0;
    double bodyfat = 0.0;
    double age = 0.0;
    double weight = 0.0;  // kg
    double height = 0.0;  // cm
    double neck = 0.0;
    double chest = 0.0;
    double abdomen = 0.0;
    double hip = 0.0;
    double thigh = 0.0;
    double knee = 0.0;
    double ankle = 0.0;
    double biceps = 0.0;
    double forearm = 0.0;
    double wrist = 0.0;

    bool operator==(const AnthropometricRecord&) const = default;
};

// `imperial` declares the classic recording regime: weight in lb and
// height in inches (converted at 0.45359237 kg/lb and 2.54 cm/in);
// circumference columns are centimetres in both regimes.
enum class Units { metric, imperial };

inline constexpr double kKgPerLb = 0.45359237;
inline constexpr double kCmPerIn = 2.54;

inline constexpr std::array<const char*, 16> kCsvColumns = {
    "case_id", "density", "bodyfat", "age",  "weight", "height",
    "neck",    "chest",   "abdomen", "hip",  "thigh",  "knee",
    "ankle",   "biceps",  "forearm", "wrist"};

// The 15 numeric fields (schema order, case_id excluded).
const std::vector<std::string>& numeric_field_names();

// Field access by schema name; throws config_error listing valid names.
double field_value(const AnthropometricRecord& rec, const std::string& name);

struct LoadResult {
    std::vector<AnthropometricRecord> records;
    std::vector<std::string> warnings;  // retained anomalies, flagged
};

LoadResult load_csv(const std::filesystem::path& path, Units units);
void save_csv(const std::vector<AnthropometricRecord>& records,
              const std::filesystem::path& path, Units units);

struct FieldStat {
    double mean = 0.0;
    double sd = 0.0;  // sample convention (n-1)
};

struct CohortSummary {
    std::size_t n = 0;
    std::vector<std::pair<std::string, FieldStat>> fields;  // schema order
    std::vector<std::string> warnings;
};

CohortSummary summarize(const std::vector<AnthropometricRecord>& records);
std::string summary_to_json(const CohortSummary& summary);

// Anomaly scan shared by load_csv and summarize: bodyfat at 0%,
// implausible heights, density inconsistent with the recorded bodyfat.
std::vector<std::string> anomaly_warnings(const std::vector<AnthropometricRecord>& records);

struct DatasetSplit {
    std::uint64_t seed = 0;
    double ratio = 0.0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

// Fisher-Yates shuffle of 0..n-1 driven by SplitMix64(seed); the first
// floor(ratio*n) shuffled indices are train, the remainder test.
DatasetSplit split(const std::vector<AnthropometricRecord>& records, double ratio,
                   std::uint64_t seed);

struct FeatureMatrix {
    Matrix x;                                // rows follow record order
    std::vector<double> y;                   // aligned target
    std::vector<std::string> feature_names;  // column order
    std::string target_name;
};

FeatureMatrix select_features(const std::vector<AnthropometricRecord>& records,
                              const std::vector<std::string>& feature_names,
                              const std::string& target_name);

}  // namespace bodyfat::data

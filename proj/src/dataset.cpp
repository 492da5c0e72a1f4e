#include "bodyfat/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bodyfat/errors.hpp"
#include "bodyfat/fmt.hpp"
#include "bodyfat/formulas.hpp"
#include "bodyfat/rng.hpp"

#include "json.hpp"

namespace bodyfat::data {

namespace {

using FieldPtr = double AnthropometricRecord::*;

struct FieldDesc {
    const char* name;
    FieldPtr ptr;
};

// Schema order, case_id excluded.
constexpr std::array<FieldDesc, 15> kFields = {{
    {"density", &AnthropometricRecord::density},
    {"bodyfat", &AnthropometricRecord::bodyfat},
    {"age", &AnthropometricRecord::age},
    {"weight", &AnthropometricRecord::weight},
    {"height", &AnthropometricRecord::height},
    {"neck", &AnthropometricRecord::neck},
    {"chest", &AnthropometricRecord::chest},
    {"abdomen", &AnthropometricRecord::abdomen},
    {"hip", &AnthropometricRecord::hip},
    {"thigh", &AnthropometricRecord::thigh},
    {"knee", &AnthropometricRecord::knee},
    {"ankle", &AnthropometricRecord::ankle},
    {"biceps", &AnthropometricRecord::biceps},
    {"forearm", &AnthropometricRecord::forearm},
    {"wrist", &AnthropometricRecord::wrist},
}};

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw data_error("row " + std::to_string(row) + ", column '" + col +
                         "': non-numeric cell '" + cell + "'");
    return value;
}

void validate_record(const AnthropometricRecord& rec, std::size_t row) {
    auto positive = [&](double v, const char* what) {
        if (!(v > 0.0))
            throw data_error("row " + std::to_string(row) + ", column '" + what +
                             "': must be strictly positive, got " + format_double(v));
    };
    if (rec.case_id <= 0)
        throw data_error("row " + std::to_string(row) + ", column 'case_id': must be a positive integer");
    positive(rec.density, "density");
    positive(rec.weight, "weight");
    positive(rec.height, "height");
    positive(rec.neck, "neck");
    positive(rec.chest, "chest");
    positive(rec.abdomen, "abdomen");
    positive(rec.hip, "hip");
    positive(rec.thigh, "thigh");
    positive(rec.knee, "knee");
    positive(rec.ankle, "ankle");
    positive(rec.biceps, "biceps");
    positive(rec.forearm, "forearm");
    positive(rec.wrist, "wrist");
    if (rec.bodyfat < 0.0 || rec.bodyfat > 75.0)
        throw data_error("row " + std::to_string(row) +
                         ", column 'bodyfat': outside [0, 75], got " + format_double(rec.bodyfat));
}

}  // namespace

const std::vector<std::string>& numeric_field_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& f : kFields) v.emplace_back(f.name);
        return v;
    }();
    return names;
}

double field_value(const AnthropometricRecord& rec, const std::string& name) {
    for (const auto& f : kFields)
        if (name == f.name) return rec.*(f.ptr);
    std::string valid;
    for (const auto& f : kFields) {
        if (!valid.empty()) valid += ", ";
        valid += f.name;
    }
    throw config_error("unknown field '" + name + "'; valid fields: " + valid);
}

LoadResult load_csv(const std::filesystem::path& path, Units units) {
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open data file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw data_error(path.string() + ": empty file, expected header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_line(line);
    if (header.size() != kCsvColumns.size()) {
        throw data_error(path.string() + ": header has " + std::to_string(header.size()) +
                         " columns, expected " + std::to_string(kCsvColumns.size()));
    }
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        if (header[i] != kCsvColumns[i])
            throw data_error(path.string() + ": header column " + std::to_string(i + 1) +
                             " is '" + header[i] + "', expected '" + kCsvColumns[i] + "'");
    }

    LoadResult result;
    std::set<int> seen_ids;
    std::size_t row = 1;  // header is row 1
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != kCsvColumns.size())
            throw data_error("row " + std::to_string(row) + ": has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(kCsvColumns.size()));

        AnthropometricRecord rec;
        double id = parse_cell(cells[0], row, "case_id");
        if (id != std::floor(id))
            throw data_error("row " + std::to_string(row) +
                             ", column 'case_id': must be an integer");
        rec.case_id = static_cast<int>(id);
        for (std::size_t i = 0; i < kFields.size(); ++i)
            rec.*(kFields[i].ptr) = parse_cell(cells[i + 1], row, kFields[i].name);

        if (units == Units::imperial) {
            rec.weight *= kKgPerLb;
            rec.height *= kCmPerIn;
        }
        validate_record(rec, row);
        if (!seen_ids.insert(rec.case_id).second)
            throw data_error("row " + std::to_string(row) + ", column 'case_id': duplicate id " +
                             std::to_string(rec.case_id));
        result.records.push_back(rec);
    }
    result.warnings = anomaly_warnings(result.records);
    return result;
}

void save_csv(const std::vector<AnthropometricRecord>& records,
              const std::filesystem::path& path, Units units) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot write data file: " + path.string());
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
        out << (i ? "," : "") << kCsvColumns[i];
    out << '\n';
    for (const auto& rec : records) {
        double weight = rec.weight;
        double height = rec.height;
        if (units == Units::imperial) {
            weight /= kKgPerLb;
            height /= kCmPerIn;
        }
        out << rec.case_id;
        for (const auto& f : kFields) {
            double v = rec.*(f.ptr);
            if (f.ptr == &AnthropometricRecord::weight) v = weight;
            if (f.ptr == &AnthropometricRecord::height) v = height;
            out << ',' << format_double(v);
        }
        out << '\n';
    }
    if (!out.flush())
        throw io_error("write failed: " + path.string());
}

std::vector<std::string> anomaly_warnings(const std::vector<AnthropometricRecord>& records) {
    std::vector<std::string> warnings;
    for (const auto& rec : records) {
        std::string tag = "case " + std::to_string(rec.case_id) + ": ";
        if (rec.bodyfat <= 0.0)
            warnings.push_back(tag + "bodyfat 0% (non-physiological, retained)");
        if (rec.height < 130.0)
            warnings.push_back(tag + "implausible height " + format_double(rec.height) +
                               " cm (retained)");
        if (rec.density > 0.8 && rec.density < 1.2) {
            double siri = formulas::siri_bf({rec.density}).value;
            if (std::fabs(siri - rec.bodyfat) > 1.5)
                warnings.push_back(tag + "density " + format_double(rec.density) +
                                   " inconsistent with bodyfat (Siri gives " +
                                   format_double(siri) + ", recorded " +
                                   format_double(rec.bodyfat) + ")");
        }
    }
    return warnings;
}

CohortSummary summarize(const std::vector<AnthropometricRecord>& records) {
    if (records.empty())
        throw domain_error("summarize: empty record list");
    CohortSummary summary;
    summary.n = records.size();
    const double n = static_cast<double>(records.size());
    for (const auto& f : kFields) {
        double sum = 0.0;
        for (const auto& rec : records) sum += rec.*(f.ptr);
        double mean = sum / n;
        double ss = 0.0;
        for (const auto& rec : records) {
            double d = rec.*(f.ptr) - mean;
            ss += d * d;
        }
        double sd = records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        summary.fields.emplace_back(f.name, FieldStat{mean, sd});
    }
    summary.warnings = anomaly_warnings(records);
    return summary;
}

std::string summary_to_json(const CohortSummary& summary) {
    nlohmann::ordered_json j;
    j["n"] = summary.n;
    nlohmann::ordered_json fields;
    for (const auto& [name, stat] : summary.fields)
        fields[name] = {{"mean", stat.mean}, {"sd", stat.sd}};
    j["fields"] = std::move(fields);
    j["warnings"] = summary.warnings;
    return j.dump(2);
}

DatasetSplit split(const std::vector<AnthropometricRecord>& records, double ratio,
                   std::uint64_t seed) {
    const std::size_t n = records.size();
    if (n < 2)
        throw domain_error("split: need at least 2 records, got " + std::to_string(n));
    if (!(ratio > 0.0 && ratio < 1.0))
        throw domain_error("split: ratio must be in (0,1), got " + format_double(ratio));

    std::size_t n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw domain_error("split: ratio " + format_double(ratio) + " leaves an empty side for n=" +
                           std::to_string(n));

    SplitMix64 gen(seed);
    auto idx = shuffled_indices(n, gen);
    DatasetSplit s;
    s.seed = seed;
    s.ratio = ratio;
    s.train_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    return s;
}

FeatureMatrix select_features(const std::vector<AnthropometricRecord>& records,
                              const std::vector<std::string>& feature_names,
                              const std::string& target_name) {
    if (feature_names.empty())
        throw config_error("select_features: empty feature list");
    // validate names up front (field_value throws with the valid list)
    for (const auto& name : feature_names) {
        AnthropometricRecord probe;
        (void)field_value(probe, name);
    }
    {
        AnthropometricRecord probe;
        (void)field_value(probe, target_name);
    }

    FeatureMatrix fm;
    fm.feature_names = feature_names;
    fm.target_name = target_name;
    fm.x = Matrix(records.size(), feature_names.size());
    fm.y.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (std::size_t c = 0; c < feature_names.size(); ++c)
            fm.x(r, c) = field_value(records[r], feature_names[c]);
        fm.y.push_back(field_value(records[r], target_name));
    }
    return fm;
}

}  // namespace bodyfat::data

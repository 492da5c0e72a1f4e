#include "bodyfat/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "bodyfat/errors.hpp"
#include "bodyfat/fmt.hpp"
#include "bodyfat/formulas.hpp"
#include "bodyfat/rng.hpp"

#include "json.hpp"

namespace bodyfat::harness {

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const error& e) {
        throw error("[" + std::string(name) + "] " + e.what(), e.exit_code());
    }
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += ',';
        out += p;
    }
    return out;
}

std::string fixed1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

double nearest_rank(std::vector<double> values, double pct) {
    std::sort(values.begin(), values.end());
    auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
    if (rank == 0) rank = 1;
    return values[rank - 1];
}

struct SvgFrame {
    double x0, x1, y0, y1;        // pixel plot area (y0 = bottom)
    double lo_x, hi_x, lo_y, hi_y;  // data domain

    double px(double v) const { return x0 + (v - lo_x) / (hi_x - lo_x) * (x1 - x0); }
    double py(double v) const { return y0 - (v - lo_y) / (hi_y - lo_y) * (y0 - y1); }
};

void svg_axes(std::string& svg, const SvgFrame& f, const std::string& x_label,
              const std::string& y_label) {
    svg += "<line x1=\"" + format_double(f.x0) + "\" y1=\"" + format_double(f.y0) +
           "\" x2=\"" + format_double(f.x1) + "\" y2=\"" + format_double(f.y0) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(f.x0) + "\" y1=\"" + format_double(f.y0) +
           "\" x2=\"" + format_double(f.x0) + "\" y2=\"" + format_double(f.y1) +
           "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double tx = f.lo_x + (f.hi_x - f.lo_x) * i / 4.0;
        double ty = f.lo_y + (f.hi_y - f.lo_y) * i / 4.0;
        svg += "<text x=\"" + format_double(f.px(tx)) + "\" y=\"" +
               format_double(f.y0 + 18.0) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + fixed1(tx) + "</text>\n";
        svg += "<text x=\"" + format_double(f.x0 - 6.0) + "\" y=\"" +
               format_double(f.py(ty) + 4.0) +
               "\" font-size=\"11\" text-anchor=\"end\">" + fixed1(ty) + "</text>\n";
    }
    double cx = (f.x0 + f.x1) / 2.0;
    double cy = (f.y0 + f.y1) / 2.0;
    svg += "<text x=\"" + format_double(cx) + "\" y=\"" + format_double(f.y0 + 40.0) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + format_double(cy) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           format_double(cy) + ")\">" + y_label + "</text>\n";
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::ols: return "ols";
        case ModelKind::gd: return "gd";
        case ModelKind::mlp: return "mlp";
        case ModelKind::navy: return "navy";
        case ModelKind::bmi_baseline: return "bmi-baseline";
    }
    return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "ols") return ModelKind::ols;
    if (name == "gd") return ModelKind::gd;
    if (name == "mlp") return ModelKind::mlp;
    if (name == "navy") return ModelKind::navy;
    if (name == "bmi-baseline" || name == "bmi") return ModelKind::bmi_baseline;
    throw config_error("unknown model '" + name + "' (expected ols|gd|mlp|navy|bmi-baseline)");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw io_error("cannot create directory " + path.parent_path().string() +
                               ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw io_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                           ec.message());
}

void emit_scatter(const metrics::EvalReport& report, const std::filesystem::path& csv_path,
                  bool with_svg) {
    if (report.pairs.empty())
        throw domain_error("emit_scatter: empty report");
    write_file_atomic(csv_path, metrics::pairs_to_csv(report));
    if (with_svg) {
        std::filesystem::path svg_path = csv_path;
        svg_path.replace_extension(".svg");
        write_file_atomic(svg_path, scatter_to_svg(report));
    }
}

void emit_trace(const TrainingTrace& trace, const std::filesystem::path& csv_path,
                bool with_svg) {
    if (trace.entries.empty())
        throw domain_error("emit_trace: empty trace");
    write_file_atomic(csv_path, trace_to_csv(trace));
    if (with_svg) {
        std::filesystem::path svg_path = csv_path;
        svg_path.replace_extension(".svg");
        write_file_atomic(svg_path, trace_to_svg(trace));
    }
}

std::string scatter_to_svg(const metrics::EvalReport& report) {
    double lo = report.pairs.front().first, hi = lo;
    for (const auto& [t, p] : report.pairs) {
        lo = std::min({lo, t, p});
        hi = std::max({hi, t, p});
    }
    double pad = (hi > lo) ? 0.05 * (hi - lo) : 1.0;
    SvgFrame f{64.0, 464.0, 424.0, 16.0, lo - pad, hi + pad, lo - pad, hi + pad};

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
        "viewBox=\"0 0 480 480\">\n";
    svg_axes(svg, f, "True body fat (%)", "Predicted body fat (%)");
    svg += "<line x1=\"" + format_double(f.px(f.lo_x)) + "\" y1=\"" +
           format_double(f.py(f.lo_x)) + "\" x2=\"" + format_double(f.px(f.hi_x)) +
           "\" y2=\"" + format_double(f.py(f.hi_x)) +
           "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& [t, p] : report.pairs)
        svg += "<circle cx=\"" + format_double(f.px(t)) + "\" cy=\"" + format_double(f.py(p)) +
               "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
    svg += "</svg>\n";
    return svg;
}

std::string trace_to_svg(const TrainingTrace& trace) {
    double hi = 0.0;
    bool any_holdout = false;
    for (const auto& e : trace.entries) {
        hi = std::max(hi, e.train_loss);
        if (e.holdout_loss) {
            any_holdout = true;
            hi = std::max(hi, *e.holdout_loss);
        }
    }
    if (hi <= 0.0) hi = 1.0;
    double last_epoch = static_cast<double>(trace.entries.back().epoch);
    if (last_epoch <= 0.0) last_epoch = 1.0;
    SvgFrame f{64.0, 464.0, 424.0, 16.0, 0.0, last_epoch, 0.0, hi * 1.05};

    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
        "viewBox=\"0 0 480 480\">\n";
    svg_axes(svg, f, "Epoch", "Loss (MSE)");
    std::string pts;
    for (const auto& e : trace.entries) {
        pts += format_double(f.px(static_cast<double>(e.epoch))) + "," +
               format_double(f.py(e.train_loss)) + " ";
    }
    svg += "<polyline points=\"" + pts +
           "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"380\" y=\"32\" font-size=\"12\" fill=\"steelblue\">train</text>\n";
    if (any_holdout) {
        std::string hpts;
        for (const auto& e : trace.entries)
            if (e.holdout_loss)
                hpts += format_double(f.px(static_cast<double>(e.epoch))) + "," +
                        format_double(f.py(*e.holdout_loss)) + " ";
        svg += "<polyline points=\"" + hpts +
               "\" fill=\"none\" stroke=\"darkorange\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"380\" y=\"48\" font-size=\"12\" fill=\"darkorange\">holdout</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

ExperimentResult run_on_records(const std::vector<data::AnthropometricRecord>& records,
                                const ExperimentConfig& config) {
    auto sp = stage("split", [&] {
        return data::split(records, config.split_ratio, config.seed);
    });

    ExperimentResult result;
    std::vector<double> truth;
    std::vector<double> preds;
    std::string descriptor;

    if (config.model == ModelKind::navy) {
        descriptor = "navy(abdomen,neck,height)";
        stage("predict", [&] {
            for (std::size_t i : sp.test_indices) {
                const auto& rec = records[i];
                truth.push_back(data::field_value(rec, config.target_name));
                preds.push_back(
                    formulas::navy_bf_male(rec.abdomen, rec.neck, rec.height).value);
            }
            return 0;
        });
    } else if (config.model == ModelKind::bmi_baseline) {
        descriptor = "bmi-baseline";
        auto fm = stage("features", [&] {
            Matrix x(records.size(), 1);
            std::vector<double> y;
            y.reserve(records.size());
            for (std::size_t r = 0; r < records.size(); ++r) {
                x(r, 0) = formulas::bmi(records[r].weight, records[r].height / 100.0);
                y.push_back(data::field_value(records[r], config.target_name));
            }
            return std::pair{std::move(x), std::move(y)};
        });
        auto model = stage("fit", [&] {
            return regression::fit_ols(take_rows(fm.first, sp.train_indices),
                                       take(fm.second, sp.train_indices), {"bmi"});
        });
        stage("predict", [&] {
            for (std::size_t i : sp.test_indices) {
                truth.push_back(fm.second[i]);
                preds.push_back(model.predict(fm.first.row(i)));
            }
            return 0;
        });
        result.model_json = regression::model_to_json(model);
    } else {
        auto fm = stage("features", [&] {
            return data::select_features(records, config.feature_names, config.target_name);
        });
        Matrix x_train = take_rows(fm.x, sp.train_indices);
        std::vector<double> y_train = take(fm.y, sp.train_indices);

        if (config.model == ModelKind::ols || config.model == ModelKind::gd) {
            regression::LinearModel model;
            if (config.model == ModelKind::ols) {
                descriptor = "ols(" + join(config.feature_names) + ")";
                model = stage("fit", [&] {
                    return regression::fit_ols(x_train, y_train, config.feature_names);
                });
            } else {
                descriptor = "gd(" + join(config.feature_names) + ")";
                auto [m, trace] = stage("fit", [&] {
                    return regression::fit_gd(x_train, y_train, config.feature_names,
                                              config.gd);
                });
                model = std::move(m);
                result.trace = std::move(trace);
            }
            stage("predict", [&] {
                for (std::size_t i : sp.test_indices) {
                    truth.push_back(fm.y[i]);
                    preds.push_back(model.predict(fm.x.row(i)));
                }
                return 0;
            });
            result.model_json = regression::model_to_json(model);
        } else {
            std::vector<int> dims;
            dims.push_back(static_cast<int>(config.feature_names.size()));
            dims.insert(dims.end(), config.mlp_hidden_dims.begin(),
                        config.mlp_hidden_dims.end());
            dims.push_back(1);
            std::string dims_str;
            for (std::size_t i = 0; i < dims.size(); ++i)
                dims_str += (i ? "," : "") + std::to_string(dims[i]);
            descriptor = "mlp[" + dims_str + "|" +
                         neural::activation_name(config.mlp_activation) + "](" +
                         join(config.feature_names) + ")";

            neural::TrainConfig mlp_cfg = config.mlp;
            mlp_cfg.seed = stream_seed(config.seed, 3);
            auto [model, trace] = stage("fit", [&] {
                return neural::train_mlp(x_train, y_train, dims, config.mlp_activation,
                                         mlp_cfg);
            });
            result.trace = std::move(trace);
            stage("predict", [&] {
                for (std::size_t i : sp.test_indices) {
                    truth.push_back(fm.y[i]);
                    preds.push_back(neural::forward(model, fm.x.row(i)));
                }
                return 0;
            });
            result.model_json = neural::model_to_json(model);
        }
    }

    result.report = stage("evaluate", [&] {
        return metrics::make_report(truth, preds, descriptor, config.seed);
    });

    if (!config.output_dir.empty()) {
        stage("artifacts", [&] {
            write_file_atomic(config.output_dir / "report.json",
                              metrics::report_to_json(result.report));
            emit_scatter(result.report, config.output_dir / "scatter.csv", config.emit_svg);
            if (result.trace)
                emit_trace(*result.trace, config.output_dir / "trace.csv", config.emit_svg);
            if (result.model_json)
                write_file_atomic(config.output_dir / "model.json", *result.model_json);
            return 0;
        });
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    auto loaded = stage("load", [&] { return data::load_csv(config.data_path, config.units); });
    return run_on_records(loaded.records, config);
}

SweepResult sweep_seeds(const ExperimentConfig& config, std::vector<std::uint64_t> seeds) {
    if (seeds.empty())
        throw domain_error("sweep_seeds: empty seed list");
    std::sort(seeds.begin(), seeds.end());

    auto loaded = stage("load", [&] { return data::load_csv(config.data_path, config.units); });

    SweepResult result;
    for (std::uint64_t s : seeds) {
        ExperimentConfig per_seed = config;
        per_seed.seed = s;
        per_seed.output_dir.clear();
        per_seed.emit_svg = false;
        try {
            result.reports.push_back(run_on_records(loaded.records, per_seed).report);
        } catch (const error& e) {
            throw error("seed " + std::to_string(s) + ": " + e.what(), e.exit_code());
        }
    }

    std::vector<double> maes, rmses, r2s;
    for (const auto& rep : result.reports) {
        maes.push_back(rep.mae);
        rmses.push_back(rep.rmse);
        r2s.push_back(rep.r2);
    }
    auto pct = [](const std::vector<double>& v) {
        return MetricPercentiles{nearest_rank(v, 10.0), nearest_rank(v, 50.0),
                                 nearest_rank(v, 90.0)};
    };
    result.mae = pct(maes);
    result.rmse = pct(rmses);
    result.r2 = pct(r2s);

    if (!config.output_dir.empty())
        write_file_atomic(config.output_dir / "sweep.json", sweep_to_json(result));
    return result;
}

std::string sweep_to_json(const SweepResult& result) {
    nlohmann::ordered_json j;
    j["model"] = result.reports.empty() ? "" : result.reports.front().model_descriptor;
    j["n_seeds"] = result.reports.size();
    auto per_seed = nlohmann::ordered_json::array();
    for (const auto& rep : result.reports) {
        per_seed.push_back({{"seed", rep.split_seed},
                            {"n", rep.n},
                            {"mae", rep.mae},
                            {"rmse", rep.rmse},
                            {"r2", rep.r2}});
    }
    j["per_seed"] = std::move(per_seed);
    auto pct = [](const MetricPercentiles& p) {
        return nlohmann::ordered_json{{"p10", p.p10}, {"p50", p.p50}, {"p90", p.p90}};
    };
    j["percentiles"] = {{"mae", pct(result.mae)},
                        {"rmse", pct(result.rmse)},
                        {"r2", pct(result.r2)}};
    return j.dump(2);
}

std::vector<std::string> parse_name_list(const std::string& comma_separated) {
    std::vector<std::string> names;
    std::string cur;
    auto flush = [&] {
        std::size_t a = cur.find_first_not_of(" \t");
        std::size_t b = cur.find_last_not_of(" \t");
        if (a != std::string::npos) names.push_back(cur.substr(a, b - a + 1));
        cur.clear();
    };
    for (char c : comma_separated) {
        if (c == ',')
            flush();
        else
            cur += c;
    }
    flush();
    return names;
}

std::vector<int> parse_int_list(const std::string& comma_separated) {
    std::vector<int> out;
    for (const auto& tok : parse_name_list(comma_separated)) {
        try {
            std::size_t pos = 0;
            int v = std::stoi(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw config_error("invalid integer '" + tok + "' in list '" + comma_separated + "'");
        }
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
    auto parse_u64 = [&](const std::string& tok) {
        try {
            std::size_t pos = 0;
            unsigned long long v = std::stoull(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            return static_cast<std::uint64_t>(v);
        } catch (const std::exception&) {
            throw config_error("invalid seed '" + tok + "' in spec '" + spec + "'");
        }
    };
    std::vector<std::uint64_t> seeds;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        std::uint64_t lo = parse_u64(spec.substr(0, dots));
        std::uint64_t hi = parse_u64(spec.substr(dots + 2));
        if (hi < lo) throw config_error("seed range '" + spec + "' is descending");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    for (const auto& tok : parse_name_list(spec)) seeds.push_back(parse_u64(tok));
    return seeds;
}

void apply_config_json(ExperimentConfig& config, const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config JSON: ") + e.what());
    }
    if (!j.is_object())
        throw config_error("config JSON: expected a flat object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "data") config.data_path = value.get<std::string>();
            else if (key == "units") {
                auto u = value.get<std::string>();
                if (u == "metric") config.units = data::Units::metric;
                else if (u == "imperial") config.units = data::Units::imperial;
                else throw config_error("config JSON: units must be metric|imperial, got '" + u + "'");
            }
            else if (key == "model") config.model = model_kind_from_name(value.get<std::string>());
            else if (key == "features") config.feature_names = parse_name_list(value.get<std::string>());
            else if (key == "target") config.target_name = value.get<std::string>();
            else if (key == "ratio") config.split_ratio = value.get<double>();
            else if (key == "seed") config.seed = value.get<std::uint64_t>();
            else if (key == "out") config.output_dir = value.get<std::string>();
            else if (key == "svg") config.emit_svg = value.get<bool>();
            else if (key == "gd_learning_rate") config.gd.learning_rate = value.get<double>();
            else if (key == "gd_max_epochs") config.gd.max_epochs = value.get<int>();
            else if (key == "gd_tolerance") config.gd.tolerance = value.get<double>();
            else if (key == "mlp_learning_rate") config.mlp.learning_rate = value.get<double>();
            else if (key == "mlp_batch_size") config.mlp.batch_size = value.get<int>();
            else if (key == "mlp_max_epochs") config.mlp.max_epochs = value.get<int>();
            else if (key == "mlp_patience") config.mlp.early_stopping_patience = value.get<int>();
            else if (key == "mlp_min_delta") config.mlp.early_stopping_min_delta = value.get<double>();
            else if (key == "mlp_holdout") config.mlp.holdout_fraction = value.get<double>();
            else if (key == "mlp_hidden") config.mlp_hidden_dims = parse_int_list(value.get<std::string>());
            else if (key == "mlp_activation") config.mlp_activation = neural::activation_from_name(value.get<std::string>());
            else throw config_error("config JSON: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config JSON: ") + e.what());
    }
}

ExperimentConfig config_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ExperimentConfig config;
    apply_config_json(config, text);
    return config;
}

}  // namespace bodyfat::harness

#include "bodyfat/neural.hpp"

#include <cmath>
#include <limits>

#include "bodyfat/errors.hpp"
#include "bodyfat/rng.hpp"

#include "json.hpp"

namespace bodyfat::neural {

namespace {

double activate(Activation a, double z) {
    return a == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// derivative expressed through the post-activation value h
double activate_deriv(Activation a, double h) {
    return a == Activation::relu ? (h > 0.0 ? 1.0 : 0.0) : 1.0 - h * h;
}

void check_dims(const std::vector<int>& dims) {
    if (dims.size() < 2)
        throw config_error("layer_dims needs at least input and output entries");
    for (int d : dims)
        if (d <= 0)
            throw config_error("layer_dims entries must be positive, got " +
                               std::to_string(d));
    if (dims.back() != 1)
        throw config_error("output dimension must be 1, got " +
                           std::to_string(dims.back()));
}

void check_batch(const MlpModel& model, const Matrix& x, std::span<const double> y,
                 const char* op) {
    if (x.rows() == 0)
        throw domain_error(std::string(op) + ": empty batch");
    if (x.rows() != y.size())
        throw config_error(std::string(op) + ": rows(X)=" + std::to_string(x.rows()) +
                           " != len(y)=" + std::to_string(y.size()));
    if (x.cols() != static_cast<std::size_t>(model.layer_dims.front()))
        throw config_error(std::string(op) + ": feature count " + std::to_string(x.cols()) +
                           " != input dim " + std::to_string(model.layer_dims.front()));
}

// forward over an already-standardized input
double forward_standardized(const MlpModel& model, std::span<const double> z_in) {
    const std::size_t layers = model.weights.size();
    std::vector<double> h(z_in.begin(), z_in.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = model.weights[l];
        next.assign(w.rows(), 0.0);
        for (std::size_t o = 0; o < w.rows(); ++o) {
            double s = 0.0;
            for (std::size_t i = 0; i < w.cols(); ++i) s += w(o, i) * h[i];
            s += model.biases[l][o];
            next[o] = (l + 1 == layers) ? s : activate(model.activation, s);
        }
        h = next;
    }
    return h[0];
}

std::vector<double> standardize_row(const MlpModel& model, std::span<const double> x) {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        z[j] = (x[j] - model.standardization.means[j]) / model.standardization.sds[j];
    return z;
}

Gradients zero_gradients(const MlpModel& model) {
    Gradients g;
    for (const auto& w : model.weights) {
        g.weights.emplace_back(w.rows(), w.cols());
        g.biases.emplace_back(w.rows(), 0.0);
    }
    return g;
}

// Accumulates dL/dparams for the batch MSE over standardized rows.
Gradients backprop_standardized(const MlpModel& model, const Matrix& z,
                                std::span<const double> y) {
    const std::size_t layers = model.weights.size();
    const double inv_b = 1.0 / static_cast<double>(z.rows());
    Gradients g = zero_gradients(model);

    // per-layer post-activations for one sample
    std::vector<std::vector<double>> acts(layers + 1);
    for (std::size_t s = 0; s < z.rows(); ++s) {
        auto row = z.row(s);
        acts[0].assign(row.begin(), row.end());
        for (std::size_t l = 0; l < layers; ++l) {
            const Matrix& w = model.weights[l];
            acts[l + 1].assign(w.rows(), 0.0);
            for (std::size_t o = 0; o < w.rows(); ++o) {
                double sum = 0.0;
                for (std::size_t i = 0; i < w.cols(); ++i) sum += w(o, i) * acts[l][i];
                sum += model.biases[l][o];
                acts[l + 1][o] = (l + 1 == layers) ? sum : activate(model.activation, sum);
            }
        }

        std::vector<double> delta = {2.0 * inv_b * (acts[layers][0] - y[s])};
        for (std::size_t l = layers; l-- > 0;) {
            const Matrix& w = model.weights[l];
            for (std::size_t o = 0; o < w.rows(); ++o) {
                g.biases[l][o] += delta[o];
                for (std::size_t i = 0; i < w.cols(); ++i)
                    g.weights[l](o, i) += delta[o] * acts[l][i];
            }
            if (l == 0) break;
            std::vector<double> prev(w.cols(), 0.0);
            for (std::size_t i = 0; i < w.cols(); ++i) {
                double sum = 0.0;
                for (std::size_t o = 0; o < w.rows(); ++o) sum += w(o, i) * delta[o];
                prev[i] = sum * activate_deriv(model.activation, acts[l][i]);
            }
            delta = std::move(prev);
        }
    }
    return g;
}

double batch_loss_standardized(const MlpModel& model, const Matrix& z,
                               std::span<const double> y,
                               std::span<const std::size_t> rows) {
    double sum = 0.0;
    for (std::size_t r : rows) {
        double d = forward_standardized(model, z.row(r)) - y[r];
        sum += d * d;
    }
    return sum / static_cast<double>(rows.size());
}

}  // namespace

std::string activation_name(Activation a) {
    return a == Activation::relu ? "relu" : "tanh";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw config_error("unknown activation '" + name + "' (expected relu or tanh)");
}

MlpModel init_mlp(const std::vector<int>& layer_dims, Activation activation,
                  std::uint64_t seed) {
    check_dims(layer_dims);
    MlpModel model;
    model.layer_dims = layer_dims;
    model.activation = activation;
    SplitMix64 gen(seed);
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        auto fan_in = static_cast<std::size_t>(layer_dims[l]);
        auto fan_out = static_cast<std::size_t>(layer_dims[l + 1]);
        double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix w(fan_out, fan_in);
        for (std::size_t o = 0; o < fan_out; ++o)
            for (std::size_t i = 0; i < fan_in; ++i)
                w(o, i) = (2.0 * gen.next_double() - 1.0) * scale;
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    model.standardization.means.assign(static_cast<std::size_t>(layer_dims.front()), 0.0);
    model.standardization.sds.assign(static_cast<std::size_t>(layer_dims.front()), 1.0);
    return model;
}

double forward(const MlpModel& model, std::span<const double> features) {
    if (features.size() != static_cast<std::size_t>(model.layer_dims.front()))
        throw config_error("forward: expected " + std::to_string(model.layer_dims.front()) +
                           " features, got " + std::to_string(features.size()));
    return forward_standardized(model, standardize_row(model, features));
}

double loss_mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.empty())
        throw domain_error("loss_mse: empty input");
    if (predictions.size() != targets.size())
        throw domain_error("loss_mse: length mismatch (" + std::to_string(predictions.size()) +
                           " vs " + std::to_string(targets.size()) + ")");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double d = predictions[i] - targets[i];
        sum += d * d;
    }
    return sum / static_cast<double>(predictions.size());
}

double batch_loss(const MlpModel& model, const Matrix& x, std::span<const double> y) {
    check_batch(model, x, y, "batch_loss");
    double sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double d = forward_standardized(model, standardize_row(model, x.row(r))) - y[r];
        sum += d * d;
    }
    return sum / static_cast<double>(x.rows());
}

Gradients backprop_gradients(const MlpModel& model, const Matrix& x,
                             std::span<const double> y) {
    check_batch(model, x, y, "backprop_gradients");
    Matrix z(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto zr = standardize_row(model, x.row(r));
        for (std::size_t c = 0; c < x.cols(); ++c) z(r, c) = zr[c];
    }
    return backprop_standardized(model, z, y);
}

Gradients finite_diff_gradients(const MlpModel& model, const Matrix& x,
                                std::span<const double> y, double epsilon) {
    check_batch(model, x, y, "finite_diff_gradients");
    if (!(epsilon > 0.0))
        throw domain_error("finite_diff_gradients: epsilon must be positive");

    MlpModel probe = model;
    Gradients g = zero_gradients(model);
    auto central = [&](double& param) {
        double saved = param;
        param = saved + epsilon;
        double up = batch_loss(probe, x, y);
        param = saved - epsilon;
        double down = batch_loss(probe, x, y);
        param = saved;
        return (up - down) / (2.0 * epsilon);
    };
    for (std::size_t l = 0; l < probe.weights.size(); ++l) {
        for (std::size_t o = 0; o < probe.weights[l].rows(); ++o) {
            for (std::size_t i = 0; i < probe.weights[l].cols(); ++i)
                g.weights[l](o, i) = central(probe.weights[l](o, i));
            g.biases[l][o] = central(probe.biases[l][o]);
        }
    }
    return g;
}

std::pair<MlpModel, TrainingTrace> train_mlp(const Matrix& x, std::span<const double> y,
                                             const std::vector<int>& layer_dims,
                                             Activation activation,
                                             const TrainConfig& config) {
    check_dims(layer_dims);
    if (x.cols() != static_cast<std::size_t>(layer_dims.front()))
        throw config_error("train_mlp: feature count " + std::to_string(x.cols()) +
                           " != input dim " + std::to_string(layer_dims.front()));
    if (x.rows() != y.size())
        throw config_error("train_mlp: rows(X) != len(y)");
    if (!(config.learning_rate > 0.0))
        throw config_error("train_mlp: learning_rate must be positive");
    if (config.batch_size <= 0)
        throw config_error("train_mlp: batch_size must be positive");
    if (config.max_epochs <= 0)
        throw config_error("train_mlp: max_epochs must be positive");
    if (config.early_stopping_patience < 0)
        throw config_error("train_mlp: patience must be non-negative");
    if (config.early_stopping_min_delta < 0.0)
        throw config_error("train_mlp: min_delta must be non-negative");
    if (!(config.holdout_fraction >= 0.0 && config.holdout_fraction < 0.5))
        throw config_error("train_mlp: holdout_fraction must be in [0, 0.5)");

    const std::size_t n = x.rows();
    auto n_holdout = static_cast<std::size_t>(
        std::floor(config.holdout_fraction * static_cast<double>(n)));

    SplitMix64 holdout_gen(stream_seed(config.seed, 0));
    auto order = shuffled_indices(n, holdout_gen);
    std::vector<std::size_t> holdout_rows(order.begin(),
                                          order.begin() + static_cast<std::ptrdiff_t>(n_holdout));
    std::vector<std::size_t> train_rows(order.begin() + static_cast<std::ptrdiff_t>(n_holdout),
                                        order.end());
    if (train_rows.size() < 2)
        throw domain_error("train_mlp: need at least 2 training samples after holdout carve");

    MlpModel model = init_mlp(layer_dims, activation, stream_seed(config.seed, 1));
    model.standardization =
        fit_standardization(x, std::vector<std::string>(x.cols(), "feature"));
    Matrix z = apply_standardization(x, model.standardization);

    SplitMix64 batch_gen(stream_seed(config.seed, 2));
    const bool monitor_holdout = !holdout_rows.empty();

    TrainingTrace trace;
    MlpModel best_model = model;
    double best_restore = std::numeric_limits<double>::infinity();
    double best_patience = std::numeric_limits<double>::infinity();
    int failures = 0;
    const int patience_limit = std::max(1, config.early_stopping_patience);
    const auto batch_size = static_cast<std::size_t>(config.batch_size);

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        fisher_yates(train_rows, batch_gen);
        for (std::size_t start = 0; start < train_rows.size(); start += batch_size) {
            std::size_t end = std::min(start + batch_size, train_rows.size());
            Matrix zb(end - start, z.cols());
            std::vector<double> yb(end - start);
            for (std::size_t k = start; k < end; ++k) {
                for (std::size_t c = 0; c < z.cols(); ++c)
                    zb(k - start, c) = z(train_rows[k], c);
                yb[k - start] = y[train_rows[k]];
            }
            Gradients g = backprop_standardized(model, zb, yb);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                for (std::size_t o = 0; o < model.weights[l].rows(); ++o) {
                    model.biases[l][o] -= config.learning_rate * g.biases[l][o];
                    for (std::size_t i = 0; i < model.weights[l].cols(); ++i)
                        model.weights[l](o, i) -= config.learning_rate * g.weights[l](o, i);
                }
            }
        }

        double train_loss = batch_loss_standardized(model, z, y, train_rows);
        std::optional<double> holdout_loss;
        if (monitor_holdout)
            holdout_loss = batch_loss_standardized(model, z, y, holdout_rows);
        if (!std::isfinite(train_loss) || (holdout_loss && !std::isfinite(*holdout_loss)))
            throw divergence_error("train_mlp diverged at epoch " + std::to_string(epoch) +
                                   " (non-finite loss); reduce learning_rate");
        trace.entries.push_back({epoch, train_loss, holdout_loss});

        double monitored = monitor_holdout ? *holdout_loss : train_loss;
        if (monitored < best_restore) {
            best_restore = monitored;
            best_model = model;
        }
        // min_delta gates the patience counter only; restoration above
        // tracks the strict minimum.
        if (best_patience - monitored > config.early_stopping_min_delta) {
            best_patience = monitored;
            failures = 0;
        } else {
            ++failures;
            if (failures >= patience_limit) break;
        }
    }

    return {std::move(best_model), std::move(trace)};
}

std::string model_to_json(const MlpModel& model) {
    nlohmann::ordered_json j;
    j["layer_dims"] = model.layer_dims;
    j["activation"] = activation_name(model.activation);
    auto weights = nlohmann::ordered_json::array();
    for (const auto& w : model.weights) {
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t o = 0; o < w.rows(); ++o) {
            auto row = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < w.cols(); ++i) row.push_back(w(o, i));
            rows.push_back(std::move(row));
        }
        weights.push_back(std::move(rows));
    }
    j["weights"] = std::move(weights);
    j["biases"] = model.biases;
    j["standardization"] = {{"means", model.standardization.means},
                            {"sds", model.standardization.sds}};
    return j.dump(2);
}

MlpModel model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw data_error(std::string("mlp model JSON: ") + e.what());
    }
    try {
        MlpModel model;
        model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        check_dims(model.layer_dims);
        model.activation = activation_from_name(j.at("activation").get<std::string>());
        const auto& weights = j.at("weights");
        const auto& biases = j.at("biases");
        if (weights.size() != model.layer_dims.size() - 1 || biases.size() != weights.size())
            throw data_error("mlp model JSON: layer count mismatch");
        for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
            auto fan_in = static_cast<std::size_t>(model.layer_dims[l]);
            auto fan_out = static_cast<std::size_t>(model.layer_dims[l + 1]);
            Matrix w(fan_out, fan_in);
            if (weights[l].size() != fan_out)
                throw data_error("mlp model JSON: weight shape mismatch at layer " +
                                 std::to_string(l));
            for (std::size_t o = 0; o < fan_out; ++o) {
                if (weights[l][o].size() != fan_in)
                    throw data_error("mlp model JSON: weight shape mismatch at layer " +
                                     std::to_string(l));
                for (std::size_t i = 0; i < fan_in; ++i)
                    w(o, i) = weights[l][o][i].get<double>();
            }
            auto b = biases[l].get<std::vector<double>>();
            if (b.size() != fan_out)
                throw data_error("mlp model JSON: bias shape mismatch at layer " +
                                 std::to_string(l));
            model.weights.push_back(std::move(w));
            model.biases.push_back(std::move(b));
        }
        model.standardization.means =
            j.at("standardization").at("means").get<std::vector<double>>();
        model.standardization.sds =
            j.at("standardization").at("sds").get<std::vector<double>>();
        if (model.standardization.means.size() !=
                static_cast<std::size_t>(model.layer_dims.front()) ||
            model.standardization.sds.size() !=
                static_cast<std::size_t>(model.layer_dims.front()))
            throw data_error("mlp model JSON: standardization length mismatch");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("mlp model JSON: ") + e.what());
    }
}

}  // namespace bodyfat::neural

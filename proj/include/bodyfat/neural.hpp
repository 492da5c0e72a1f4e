#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bodyfat/linalg.hpp"
#include "bodyfat/standardize.hpp"
#include "bodyfat/trace.hpp"

namespace bodyfat::neural {

enum class Activation { relu, tanh };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Small feedforward regressor: hidden layers use `activation`, the single
// output unit is identity. weights[l] is layer_dims[l+1] x layer_dims[l].
struct MlpModel {
    std::vector<int> layer_dims;
    Activation activation = Activation::relu;
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    Standardization standardization;

    bool operator==(const MlpModel&) const = default;
};

// Deterministic scaled-uniform init: weights ~ U(-1/sqrt(fan_in),
// +1/sqrt(fan_in)) drawn from SplitMix64(seed) in layer/row/column order,
// biases zero, identity standardization.
MlpModel init_mlp(const std::vector<int>& layer_dims, Activation activation,
                  std::uint64_t seed);

// Standardize, then run the affine+activation chain.
double forward(const MlpModel& model, std::span<const double> features);

double loss_mse(std::span<const double> predictions, std::span<const double> targets);

// Mean batch loss: MSE of forward() over the rows of x against y.
double batch_loss(const MlpModel& model, const Matrix& x, std::span<const double> y);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// Exact gradients of the batch MSE with respect to every parameter.
Gradients backprop_gradients(const MlpModel& model, const Matrix& x,
                             std::span<const double> y);

// Independent oracle: central differences (L(p+eps)-L(p-eps))/(2 eps).
Gradients finite_diff_gradients(const MlpModel& model, const Matrix& x,
                                std::span<const double> y, double epsilon);

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 16;
    int max_epochs = 50;
    int early_stopping_patience = 10;
    double early_stopping_min_delta = 1e-5;
    // Fraction of the training rows carved off (seeded) as the
    // early-stopping monitor; 0 monitors the training loss itself.
    double holdout_fraction = 0.1;
    std::uint64_t seed = 0;
};

// Mini-batch gradient descent with seeded per-epoch shuffling, per-epoch
// loss trace, early stopping, and best-epoch restoration. All randomness
// (holdout pick, init, batch order) derives from config.seed via streams
// 0/1/2 of stream_seed().
std::pair<MlpModel, TrainingTrace> train_mlp(const Matrix& x, std::span<const double> y,
                                             const std::vector<int>& layer_dims,
                                             Activation activation,
                                             const TrainConfig& config);

std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(const std::string& json_text);

}  // namespace bodyfat::neural

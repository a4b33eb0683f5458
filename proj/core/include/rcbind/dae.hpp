#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcbind/image.hpp"
#include "rcbind/matrix.hpp"
#include "rcbind/rng.hpp"

namespace rcbind {

enum class Activation { relu, sigmoid, tanh };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& s);

// Predictions are clipped into [kMuEps, 1-kMuEps] wherever they feed a log or
// a division: the binomial cross entropy here and the cluster likelihoods
// downstream share this one policy.
constexpr double kMuEps = 1e-6;

// Single-hidden-layer autoencoder. The output layer is always sigmoid; only
// the hidden activation varies.
struct DaeModel {
    int input_size = 0;   // N
    int hidden_size = 0;  // H
    Activation hidden_activation = Activation::relu;
    Matrix w1;               // H x N
    std::vector<double> b1;  // H
    Matrix w2;               // N x H
    std::vector<double> b2;  // N
};

// Weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero.
DaeModel init_model(int input_size, int hidden_size, Activation act, Rng& rng);

std::vector<double> encode(const DaeModel& model, std::span<const double> x);
std::vector<double> decode(const DaeModel& model, std::span<const double> theta);

// Batch forms; each row is one example.
Matrix encode_batch(const DaeModel& model, const Matrix& x);
Matrix decode_batch(const DaeModel& model, const Matrix& theta);

// -sum_i [x ln mu + (1-x) ln(1-mu)], with mu clipped. Always finite.
double bce_loss(std::span<const double> mu, std::span<const double> x);

// Each pixel is independently replaced by a fair coin flip with probability p.
std::vector<double> salt_pepper(std::span<const double> x, double p, Rng& rng);

struct Gradients {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;
};

// Gradients of the batch-mean BCE of decode(encode(corrupted)) against target.
// corrupted and target are (B x N).
Gradients backward(const DaeModel& model, const Matrix& corrupted, const Matrix& target);

struct TrainConfig {
    double learning_rate = 0.1;
    double noise_p = 0.0;  // salt & pepper corruption probability
    int batch_size = 100;
    int patience = 10;  // epochs without a new strict validation minimum
    int max_epochs = 200;
    std::uint64_t seed = 0;
};

struct TrainReport {
    int epochs_run = 0;
    std::vector<double> train_loss;  // per epoch, mean per example
    std::vector<double> val_loss;
    double best_val_loss = 0.0;
    int best_epoch = 0;  // 1-based
    DaeModel best_model;
};

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Minibatch SGD with fresh corruption per batch and early stopping on the
// validation BCE. Validation inputs are corrupted once with a fixed seed so
// every epoch is scored against the same corruption.
TrainReport train(DaeModel model, const std::vector<BinaryImage>& train_set,
                  const std::vector<BinaryImage>& val_set, const TrainConfig& cfg);

// Model file, magic "RCM1": sizes as u32 little-endian, activation tag u8,
// parameters as little-endian doubles in order W1, b1, W2, b2.
// expect_input_size, when nonzero, rejects models with a different N.
void save_model(const DaeModel& model, const std::string& path);
DaeModel load_model(const std::string& path, int expect_input_size = 0);

}  // namespace rcbind

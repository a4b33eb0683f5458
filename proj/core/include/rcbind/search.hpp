#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcbind/dae.hpp"
#include "rcbind/datasets.hpp"
#include "rcbind/metrics.hpp"
#include "rcbind/rng.hpp"

namespace rcbind {

struct SearchSpace {
    double lr_lo = 1e-3;
    double lr_hi = 1.0;
    std::vector<double> noise_levels = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<int> hidden_sizes = {100, 250, 500, 1000};
    std::vector<Activation> activations = {Activation::relu, Activation::sigmoid,
                                           Activation::tanh};
};

struct TrialConfig {
    double learning_rate = 0.0;
    double noise_p = 0.0;
    int hidden_size = 0;
    Activation activation = Activation::relu;
};

// Learning rate log-uniform, the discrete sets uniform.
TrialConfig sample_config(const SearchSpace& space, Rng& rng);

enum class TrainingMode { single_object, multi_object };

enum class TrialStatus { ok, failed };

struct Trial {
    int index = 0;
    TrialConfig config;
    TrialStatus status = TrialStatus::failed;
    std::string error;
    double best_val_loss = 0.0;
    int epochs_run = 0;
    double mean_ami = 0.0;
    double std_ami = 0.0;
};

struct SearchOptions {
    int n_trials = 20;
    TrainingMode mode = TrainingMode::single_object;
    std::uint64_t seed = 0;
    int train_count = 3000;
    int val_count = 600;
    int eval_count = 300;
    int batch_size = 100;
    int patience = 10;
    int max_epochs = 100;
    int k = 0;  // 0 = optimal_k(dataset)
    // 0 = soft for single-object training, hard for multi-object
    AssignMode rc_mode = AssignMode::soft;
    bool rc_mode_set = false;
    int max_iters = 15;
    double ll_tolerance = 1e-3;
    int n_threads = 0;
    std::string mnist_dir;
};

struct SearchResult {
    std::vector<Trial> trials;  // ordered by trial index
    int best_index = -1;        // highest mean AMI among ok trials

    const Trial& best() const { return trials.at(best_index); }
};

// Trains one DAE per sampled configuration and scores it by downstream RC
// performance on a held-out multi-object set. Diverged trainings are
// recorded as failed trials; every trial owns a substream derived from
// (seed, index), so trials may run in any order or in parallel with
// identical results.
SearchResult run_search(DatasetName dataset, const SearchSpace& space,
                        const SearchOptions& opts);

struct StudyPoint {
    int index = 0;
    double learning_rate = 0.0;
    double val_loss = 0.0;  // best validation BCE
    double mean_ami = 0.0;
};

struct StudyFailure {
    int index = 0;
    double learning_rate = 0.0;
    std::string error;
};

struct StudyOptions {
    int n_models = 30;
    int hidden_size = 250;
    Activation activation = Activation::relu;
    double noise_p = 0.1;
    std::uint64_t seed = 0;
    int train_count = 2000;
    int val_count = 500;
    int eval_count = 300;
    int batch_size = 100;
    int patience = 10;
    int max_epochs = 60;
    int k = 0;
    int n_threads = 0;
    std::string mnist_dir;
};

struct StudyResult {
    std::vector<StudyPoint> points;  // successful models only
    std::vector<StudyFailure> failures;
};

// Fixed architecture, random learning rate and initialization per model;
// pairs the final validation loss with the downstream RC score.
StudyResult loss_vs_score_study(DatasetName dataset, const StudyOptions& opts);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Tuned configurations used as defaults when no search has been run.
TrialConfig reference_config(DatasetName dataset, TrainingMode mode);

}  // namespace rcbind

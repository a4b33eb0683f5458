#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rcbind/search.hpp"

using namespace rcbind;

namespace {

// small space so the micro-searches below train in milliseconds
SearchSpace tiny_space() {
    SearchSpace space;
    space.noise_levels = {0.0, 0.2};
    space.hidden_sizes = {8, 16};
    space.activations = {Activation::relu, Activation::sigmoid};
    return space;
}

SearchOptions tiny_options(std::uint64_t seed) {
    SearchOptions opts;
    opts.n_trials = 3;
    opts.seed = seed;
    opts.train_count = 80;
    opts.val_count = 30;
    opts.eval_count = 12;
    opts.batch_size = 20;
    opts.patience = 2;
    opts.max_epochs = 4;
    return opts;
}

}  // namespace

TEST_CASE("sample_config with singleton sets is the unique config") {
    SearchSpace space;
    space.lr_lo = 0.01;
    space.lr_hi = 0.0100001;
    space.noise_levels = {0.3};
    space.hidden_sizes = {64};
    space.activations = {Activation::tanh};
    Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const TrialConfig cfg = sample_config(space, rng);
        CHECK(cfg.noise_p == 0.3);
        CHECK(cfg.hidden_size == 64);
        CHECK(cfg.activation == Activation::tanh);
        CHECK(cfg.learning_rate == doctest::Approx(0.01).epsilon(1e-4));
    }
}

TEST_CASE("sampled learning rates stay inside the range") {
    SearchSpace space;
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const TrialConfig cfg = sample_config(space, rng);
        CHECK(cfg.learning_rate >= 1e-3);
        CHECK(cfg.learning_rate < 1.0);
    }
}

TEST_CASE("noise levels are drawn uniformly") {
    SearchSpace space;
    Rng rng(3);
    const int n = 10000;
    std::vector<int> counts(space.noise_levels.size(), 0);
    for (int i = 0; i < n; ++i) {
        const TrialConfig cfg = sample_config(space, rng);
        const auto it = std::find(space.noise_levels.begin(), space.noise_levels.end(),
                                  cfg.noise_p);
        REQUIRE(it != space.noise_levels.end());
        ++counts[it - space.noise_levels.begin()];
    }
    for (int c : counts) {
        const double freq = static_cast<double>(c) / n;
        CHECK(std::abs(freq - 0.1) < 0.01);
    }
}

TEST_CASE("sample_config rejects empty sets") {
    SearchSpace space;
    space.hidden_sizes.clear();
    Rng rng(4);
    CHECK_THROWS_AS(sample_config(space, rng), std::invalid_argument);
}

TEST_CASE("trial configs depend only on (seed, index)") {
    // the substream construction run_search uses, checked directly
    const SearchSpace space = tiny_space();
    Rng root(77);
    std::vector<TrialConfig> first;
    for (int i = 0; i < 5; ++i) {
        Rng trial_rng = root.substream(stream::trial).substream(i);
        first.push_back(sample_config(space, trial_rng));
    }
    // drawing them again, in any order, yields the same configs
    for (int i = 4; i >= 0; --i) {
        Rng trial_rng = root.substream(stream::trial).substream(i);
        const TrialConfig cfg = sample_config(space, trial_rng);
        CHECK(cfg.learning_rate == first[i].learning_rate);
        CHECK(cfg.noise_p == first[i].noise_p);
        CHECK(cfg.hidden_size == first[i].hidden_size);
        CHECK(cfg.activation == first[i].activation);
    }
}

TEST_CASE("run_search returns a best trial and is deterministic") {
    const SearchSpace space = tiny_space();
    const SearchOptions opts = tiny_options(5);
    const SearchResult a = run_search(DatasetName::simple_superposition, space, opts);
    const SearchResult b = run_search(DatasetName::simple_superposition, space, opts);
    REQUIRE(a.trials.size() == 3);
    CHECK(a.best_index == b.best_index);
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].config.learning_rate == b.trials[i].config.learning_rate);
        CHECK(a.trials[i].mean_ami == b.trials[i].mean_ami);
        CHECK(a.trials[i].best_val_loss == b.trials[i].best_val_loss);
        CHECK(a.trials[i].epochs_run == b.trials[i].epochs_run);
    }
    const Trial& best = a.best();
    CHECK(best.status == TrialStatus::ok);
    for (const Trial& t : a.trials)
        if (t.status == TrialStatus::ok) CHECK(t.mean_ami <= best.mean_ami);
}

TEST_CASE("run_search with one trial selects it") {
    const SearchSpace space = tiny_space();
    SearchOptions opts = tiny_options(6);
    opts.n_trials = 1;
    const SearchResult r = run_search(DatasetName::bars, space, opts);
    CHECK(r.best_index == 0);
    CHECK(r.trials.size() == 1);
}

TEST_CASE("multi-object mode defaults to hard assignments and still runs") {
    const SearchSpace space = tiny_space();
    SearchOptions opts = tiny_options(7);
    opts.n_trials = 2;
    opts.mode = TrainingMode::multi_object;
    const SearchResult r = run_search(DatasetName::bars, space, opts);
    CHECK(r.trials.size() == 2);
    CHECK(r.best_index >= 0);
}

TEST_CASE("loss_vs_score_study is deterministic with one row per success") {
    StudyOptions opts;
    opts.n_models = 3;
    opts.hidden_size = 12;
    opts.seed = 8;
    opts.train_count = 80;
    opts.val_count = 30;
    opts.eval_count = 12;
    opts.batch_size = 20;
    opts.patience = 2;
    opts.max_epochs = 4;
    const StudyResult a = loss_vs_score_study(DatasetName::bars, opts);
    const StudyResult b = loss_vs_score_study(DatasetName::bars, opts);
    CHECK(a.points.size() + a.failures.size() == 3);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].learning_rate == b.points[i].learning_rate);
        CHECK(a.points[i].val_loss == b.points[i].val_loss);
        CHECK(a.points[i].mean_ami == b.points[i].mean_ami);
    }
}

TEST_CASE("pearson correlation") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    const std::vector<double> y = {2, 4, 6, 8, 10};
    CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> neg = {10, 8, 6, 4, 2};
    CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    const std::vector<double> flat = {3, 3, 3, 3, 3};
    CHECK(pearson(x, flat) == 0.0);
    CHECK_THROWS_AS(pearson({1.0}, {2.0}), std::invalid_argument);
}

TEST_CASE("reference configs cover every dataset") {
    for (DatasetName name :
         {DatasetName::simple_superposition, DatasetName::shapes, DatasetName::bars,
          DatasetName::corners, DatasetName::mnist_shape, DatasetName::multi_mnist}) {
        const TrialConfig cfg = reference_config(name, TrainingMode::single_object);
        CHECK(cfg.learning_rate > 0.0);
        CHECK(cfg.hidden_size > 0);
    }
    CHECK_THROWS(reference_config(DatasetName::simple_superposition,
                                  TrainingMode::multi_object));
    const TrialConfig multi = reference_config(DatasetName::bars, TrainingMode::multi_object);
    CHECK(multi.noise_p == 0.8);
}

#include "rcbind/search.hpp"

#include <cmath>
#include <stdexcept>

#include "rcbind/threads.hpp"

namespace rcbind {

namespace {

constexpr std::uint64_t kDataTrain = 101;
constexpr std::uint64_t kDataVal = 102;
constexpr std::uint64_t kDataEval = 103;

std::vector<BinaryImage> images_of(const Dataset& ds) {
    std::vector<BinaryImage> out;
    out.reserve(ds.examples.size());
    for (const LabeledExample& ex : ds.examples) out.push_back(ex.image);
    return out;
}

struct SearchData {
    std::vector<BinaryImage> train;
    std::vector<BinaryImage> val;
    Dataset eval;
};

SearchData make_search_data(DatasetName dataset, TrainingMode mode, std::uint64_t seed,
                            int train_count, int val_count, int eval_count,
                            const std::string& mnist_dir) {
    Rng root(seed);
    DatasetSpec spec;
    spec.name = dataset;
    spec.mnist_dir = mnist_dir;

    SearchData data;
    spec.count = train_count;
    spec.seed = root.substream(kDataTrain).seed();
    spec.split = mode == TrainingMode::single_object ? Split::train_single : Split::train_multi;
    data.train = images_of(generate(spec));

    spec.count = val_count;
    spec.seed = root.substream(kDataVal).seed();
    // multi-object training validates on a second multi-object draw
    spec.split = mode == TrainingMode::single_object ? Split::validation : Split::train_multi;
    data.val = images_of(generate(spec));

    spec.count = eval_count;
    spec.seed = root.substream(kDataEval).seed();
    spec.split = Split::test_multi;
    data.eval = generate(spec);
    return data;
}

}  // namespace

TrialConfig sample_config(const SearchSpace& space, Rng& rng) {
    if (space.noise_levels.empty() || space.hidden_sizes.empty() || space.activations.empty())
        throw std::invalid_argument("sample_config: search space has an empty set");
    TrialConfig cfg;
    cfg.learning_rate = rng.uniform(space.lr_lo, space.lr_hi, /*log_scale=*/true);
    cfg.noise_p = rng.pick(space.noise_levels);
    cfg.hidden_size = rng.pick(space.hidden_sizes);
    cfg.activation = rng.pick(space.activations);
    return cfg;
}

SearchResult run_search(DatasetName dataset, const SearchSpace& space,
                        const SearchOptions& opts) {
    if (opts.n_trials < 1) throw std::invalid_argument("run_search: n_trials must be >= 1");

    const SearchData data =
        make_search_data(dataset, opts.mode, opts.seed, opts.train_count, opts.val_count,
                         opts.eval_count, opts.mnist_dir);
    const int n = data.train.front().size();
    const int k = opts.k > 0 ? opts.k : optimal_k(dataset);
    const AssignMode rc_mode =
        opts.rc_mode_set ? opts.rc_mode
                         : (opts.mode == TrainingMode::single_object ? AssignMode::soft
                                                                     : AssignMode::hard);

    SearchResult result;
    result.trials.resize(opts.n_trials);
    Rng root(opts.seed);

    parallel_for(static_cast<std::size_t>(opts.n_trials), opts.n_threads, [&](std::size_t i) {
        Trial& trial = result.trials[i];
        trial.index = static_cast<int>(i);
        Rng trial_rng = root.substream(stream::trial).substream(i);
        trial.config = sample_config(space, trial_rng);
        try {
            Rng init_rng = trial_rng.substream(stream::weight_init);
            DaeModel model = init_model(n, trial.config.hidden_size, trial.config.activation,
                                        init_rng);
            TrainConfig tc;
            tc.learning_rate = trial.config.learning_rate;
            tc.noise_p = trial.config.noise_p;
            tc.batch_size = opts.batch_size;
            tc.patience = opts.patience;
            tc.max_epochs = opts.max_epochs;
            tc.seed = trial_rng.substream(stream::shuffle).seed();
            TrainReport report = train(std::move(model), data.train, data.val, tc);
            trial.best_val_loss = report.best_val_loss;
            trial.epochs_run = report.epochs_run;

            RcConfig rc_cfg;
            rc_cfg.k = k;
            rc_cfg.max_iters = opts.max_iters;
            rc_cfg.ll_tolerance = opts.ll_tolerance;
            rc_cfg.assignment_mode = rc_mode;
            rc_cfg.seed = trial_rng.substream(stream::rc_init).seed();
            // trials are already parallel; score serially within each
            const ScoreResult scores =
                score_dataset(report.best_model, data.eval.examples, rc_cfg, 1);
            trial.mean_ami = scores.summary.mean_ami;
            trial.std_ami = scores.summary.std_ami;
            trial.status = TrialStatus::ok;
        } catch (const std::exception& e) {
            trial.status = TrialStatus::failed;
            trial.error = e.what();
        }
    });

    for (std::size_t i = 0; i < result.trials.size(); ++i) {
        const Trial& t = result.trials[i];
        if (t.status != TrialStatus::ok) continue;
        if (result.best_index < 0 || t.mean_ami > result.trials[result.best_index].mean_ami)
            result.best_index = static_cast<int>(i);
    }
    if (result.best_index < 0) throw std::runtime_error("run_search: all trials failed");
    return result;
}

StudyResult loss_vs_score_study(DatasetName dataset, const StudyOptions& opts) {
    if (opts.n_models < 2) throw std::invalid_argument("loss_vs_score_study: need >= 2 models");

    const SearchData data =
        make_search_data(dataset, TrainingMode::single_object, opts.seed, opts.train_count,
                         opts.val_count, opts.eval_count, opts.mnist_dir);
    const int n = data.train.front().size();
    const int k = opts.k > 0 ? opts.k : optimal_k(dataset);

    struct Slot {
        bool ok = false;
        StudyPoint point;
        StudyFailure failure;
    };
    std::vector<Slot> slots(opts.n_models);
    Rng root(opts.seed);

    parallel_for(static_cast<std::size_t>(opts.n_models), opts.n_threads, [&](std::size_t i) {
        Slot& slot = slots[i];
        Rng model_rng = root.substream(stream::trial).substream(i);
        const double lr = model_rng.uniform(1e-3, 1.0, /*log_scale=*/true);
        try {
            Rng init_rng = model_rng.substream(stream::weight_init);
            DaeModel model = init_model(n, opts.hidden_size, opts.activation, init_rng);
            TrainConfig tc;
            tc.learning_rate = lr;
            tc.noise_p = opts.noise_p;
            tc.batch_size = opts.batch_size;
            tc.patience = opts.patience;
            tc.max_epochs = opts.max_epochs;
            tc.seed = model_rng.substream(stream::shuffle).seed();
            TrainReport report = train(std::move(model), data.train, data.val, tc);

            RcConfig rc_cfg;
            rc_cfg.k = k;
            rc_cfg.seed = model_rng.substream(stream::rc_init).seed();
            const ScoreResult scores =
                score_dataset(report.best_model, data.eval.examples, rc_cfg, 1);
            slot.ok = true;
            slot.point = {static_cast<int>(i), lr, report.best_val_loss,
                          scores.summary.mean_ami};
        } catch (const std::exception& e) {
            slot.failure = {static_cast<int>(i), lr, e.what()};
        }
    });

    StudyResult result;
    for (const Slot& slot : slots) {
        if (slot.ok) result.points.push_back(slot.point);
        else result.failures.push_back(slot.failure);
    }
    return result;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson: need two equal-length series of >= 2 points");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

TrialConfig reference_config(DatasetName dataset, TrainingMode mode) {
    // best configurations from our random searches over the default space
    if (mode == TrainingMode::single_object) {
        switch (dataset) {
            case DatasetName::bars: return {0.768015, 0.0, 100, Activation::relu};
            case DatasetName::corners: return {0.001920, 0.0, 100, Activation::relu};
            case DatasetName::multi_mnist: return {0.011362, 0.6, 1000, Activation::relu};
            case DatasetName::mnist_shape: return {0.031685, 0.6, 250, Activation::sigmoid};
            case DatasetName::shapes: return {0.083147, 0.4, 500, Activation::tanh};
            case DatasetName::simple_superposition:
                return {0.366627, 0.1, 100, Activation::relu};
        }
    } else {
        switch (dataset) {
            case DatasetName::bars: return {0.012192, 0.8, 100, Activation::sigmoid};
            case DatasetName::corners: return {0.026035, 0.7, 100, Activation::relu};
            case DatasetName::mnist_shape: return {0.033200, 0.6, 1000, Activation::relu};
            case DatasetName::multi_mnist: return {0.001786, 0.9, 250, Activation::sigmoid};
            case DatasetName::shapes: return {0.049402, 0.9, 100, Activation::sigmoid};
            case DatasetName::simple_superposition:
                throw std::invalid_argument(
                    "reference_config: no multi-object reference for simple_superposition");
        }
    }
    throw std::invalid_argument("reference_config: unknown dataset");
}

}  // namespace rcbind

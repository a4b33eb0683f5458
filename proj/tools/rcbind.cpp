// rcbind: reconstruction clustering pipeline driver.
//
// Subcommands: generate, train, search, bind, eval, study, generalize,
// render. Every invocation appends its resolved configuration and its
// result metrics to an append-only JSON-lines run log.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "rcbind/datasets.hpp"
#include "rcbind/metrics.hpp"
#include "rcbind/render.hpp"
#include "rcbind/search.hpp"

using json = nlohmann::ordered_json;
using namespace rcbind;

namespace {

// Flat key=value config files. Each key maps to an option of the invoked
// subcommand; values from the file are injected as ordinary tokens right
// after "--config FILE", skipping any key the command line already sets.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::FileError(path + ": expected key=value, got '" + line + "'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config")
            throw CLI::FileError(path + ": bad config key '" + key + "'");
        // later entries win within the file
        std::erase_if(entries, [&](const auto& kv) { return kv.first == key; });
        entries.emplace_back(key, value);
    }
    return entries;
}

std::vector<std::string> inject_config_tokens(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        std::size_t insert_at = 0;
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            insert_at = i + 2;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            insert_at = i + 1;
        } else {
            continue;
        }
        auto already_set = [&args](const std::string& key) {
            for (const std::string& a : args)
                if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
            return false;
        };
        std::vector<std::string> tokens;
        for (const auto& [key, value] : read_config_file(path)) {
            if (already_set(key)) continue;  // the command line overrides the file
            tokens.push_back("--" + key);
            tokens.push_back(value);
        }
        args.insert(args.begin() + insert_at, tokens.begin(), tokens.end());
        break;  // a run has one subcommand, so one config file
    }
    return args;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct RunLog {
    std::string path = "rcbind_log.jsonl";
    std::string command;

    void write(const std::string& event, const json& payload) const {
        std::ofstream out(path, std::ios::app);
        if (!out) return;  // logging never blocks the run
        json line;
        line["timestamp"] = timestamp_now();
        line["command"] = command;
        line["event"] = event;
        line[event == "start" ? "config" : "metrics"] = payload;
        out << line.dump() << "\n";
    }
};

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::vector<BinaryImage> images_of(const Dataset& ds) {
    std::vector<BinaryImage> out;
    out.reserve(ds.examples.size());
    for (const auto& ex : ds.examples) out.push_back(ex.image);
    return out;
}

// ---- generate ----

struct GenerateArgs {
    std::string name, split = "test_multi", out;
    int count = 1000;
    std::uint64_t seed = 0;
    double bar_prob = 0.25;
    std::string bank, mnist_dir;
};

int cmd_generate(const GenerateArgs& a, RunLog& log) {
    log.write("start", json{{"name", a.name},
                            {"split", a.split},
                            {"count", a.count},
                            {"seed", a.seed},
                            {"bar_prob", a.bar_prob},
                            {"bank", a.bank},
                            {"mnist_dir", a.mnist_dir},
                            {"out", a.out}});
    DatasetSpec spec;
    spec.name = dataset_from_string(a.name);
    spec.split = split_from_string(a.split);
    spec.count = a.count;
    spec.seed = a.seed;
    spec.bar_prob = a.bar_prob;
    spec.bank_path = a.bank;
    spec.mnist_dir = a.mnist_dir;
    const Dataset ds = generate(spec);
    save_dataset(ds, a.out);
    std::printf("wrote %zu examples (%dx%d) to %s\n", ds.examples.size(), ds.width, ds.height,
                a.out.c_str());
    log.write("done", json{{"examples", ds.examples.size()},
                           {"width", ds.width},
                           {"height", ds.height}});
    return 0;
}

// ---- train ----

struct TrainArgs {
    std::string data, val, out;
    double lr = 0.1, noise = 0.0;
    int hidden = 100, batch = 100, patience = 10, max_epochs = 200;
    std::string activation = "relu";
    std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a, RunLog& log) {
    log.write("start", json{{"data", a.data},
                            {"val", a.val},
                            {"out", a.out},
                            {"lr", a.lr},
                            {"hidden", a.hidden},
                            {"activation", a.activation},
                            {"noise", a.noise},
                            {"batch", a.batch},
                            {"patience", a.patience},
                            {"max_epochs", a.max_epochs},
                            {"seed", a.seed}});
    const Dataset train_ds = load_dataset(a.data);
    const Dataset val_ds = load_dataset(a.val);
    if (train_ds.width != val_ds.width || train_ds.height != val_ds.height)
        throw std::runtime_error("train/validation geometry mismatch");
    const int n = train_ds.width * train_ds.height;

    TrainConfig cfg;
    cfg.learning_rate = a.lr;
    cfg.noise_p = a.noise;
    cfg.batch_size = a.batch;
    cfg.patience = a.patience;
    cfg.max_epochs = a.max_epochs;
    cfg.seed = a.seed;

    Rng init = Rng(a.seed).substream(stream::weight_init);
    DaeModel model = init_model(n, a.hidden, activation_from_string(a.activation), init);
    const TrainReport report = train(std::move(model), images_of(train_ds), images_of(val_ds),
                                     cfg);
    save_model(report.best_model, a.out);
    std::printf("trained %d epochs, best validation loss %.6f at epoch %d -> %s\n",
                report.epochs_run, report.best_val_loss, report.best_epoch, a.out.c_str());
    log.write("done", json{{"epochs_run", report.epochs_run},
                           {"best_epoch", report.best_epoch},
                           {"best_val_loss", report.best_val_loss},
                           {"final_train_loss", report.train_loss.back()}});
    return 0;
}

// ---- search ----

struct SearchArgs {
    std::string name, out = ".";
    int trials = 20;
    std::string mode = "single";
    std::uint64_t seed = 0;
    int train_count = 3000, val_count = 600, eval_count = 300;
    int batch = 100, patience = 10, max_epochs = 100, k = 0, threads = 0;
    std::string mnist_dir;
};

json trial_to_json(const Trial& t) {
    json j;
    j["index"] = t.index;
    j["config"] = {{"lr", t.config.learning_rate},
                   {"noise", t.config.noise_p},
                   {"hidden", t.config.hidden_size},
                   {"activation", to_string(t.config.activation)}};
    j["status"] = t.status == TrialStatus::ok ? "ok" : "failed";
    if (t.status == TrialStatus::ok) {
        j["best_val_loss"] = t.best_val_loss;
        j["epochs_run"] = t.epochs_run;
        j["mean_ami"] = t.mean_ami;
        j["std_ami"] = t.std_ami;
    } else {
        j["error"] = t.error;
    }
    return j;
}

int cmd_search(const SearchArgs& a, RunLog& log) {
    log.write("start", json{{"name", a.name},
                            {"trials", a.trials},
                            {"mode", a.mode},
                            {"seed", a.seed},
                            {"train_count", a.train_count},
                            {"val_count", a.val_count},
                            {"eval_count", a.eval_count},
                            {"k", a.k},
                            {"out", a.out}});
    SearchOptions opts;
    opts.n_trials = a.trials;
    opts.mode = a.mode == "multi" ? TrainingMode::multi_object : TrainingMode::single_object;
    opts.seed = a.seed;
    opts.train_count = a.train_count;
    opts.val_count = a.val_count;
    opts.eval_count = a.eval_count;
    opts.batch_size = a.batch;
    opts.patience = a.patience;
    opts.max_epochs = a.max_epochs;
    opts.k = a.k;
    opts.n_threads = a.threads;
    opts.mnist_dir = a.mnist_dir;

    const SearchResult result = run_search(dataset_from_string(a.name), SearchSpace{}, opts);

    ensure_dir(a.out);
    const std::string trials_path = a.out + "/trials.jsonl";
    {
        std::ofstream out(trials_path, std::ios::app);
        for (const Trial& t : result.trials) out << trial_to_json(t).dump() << "\n";
    }
    const Trial& best = result.best();
    const std::string best_path = a.out + "/best.cfg";
    {
        std::ofstream out(best_path);
        out << "lr=" << best.config.learning_rate << "\n";
        out << "hidden=" << best.config.hidden_size << "\n";
        out << "activation=" << to_string(best.config.activation) << "\n";
        out << "noise=" << best.config.noise_p << "\n";
    }
    std::printf("best trial %d: lr=%.6f hidden=%d act=%s noise=%.1f -> mean AMI %.4f\n",
                best.index, best.config.learning_rate, best.config.hidden_size,
                to_string(best.config.activation).c_str(), best.config.noise_p, best.mean_ami);
    std::printf("wrote %s and %s\n", trials_path.c_str(), best_path.c_str());
    log.write("done", json{{"best_index", best.index}, {"best_mean_ami", best.mean_ami}});
    return 0;
}

// ---- bind ----

struct BindArgs {
    std::string model, data, out = "trace.jsonl", render_dir, mode = "soft", pi = "fixed";
    int k = 0, max_iters = 15, limit = 0;
    double tol = 1e-3;
    std::uint64_t seed = 0;
};

int cmd_bind(const BindArgs& a, RunLog& log) {
    log.write("start", json{{"model", a.model},
                            {"data", a.data},
                            {"k", a.k},
                            {"mode", a.mode},
                            {"pi", a.pi},
                            {"max_iters", a.max_iters},
                            {"tol", a.tol},
                            {"limit", a.limit},
                            {"render", a.render_dir},
                            {"seed", a.seed},
                            {"out", a.out}});
    const Dataset ds = load_dataset(a.data);
    const int n = ds.width * ds.height;
    const DaeModel model = load_model(a.model, n);

    RcConfig cfg;
    cfg.k = a.k > 0 ? a.k : optimal_k(ds.name);
    cfg.max_iters = a.max_iters;
    cfg.ll_tolerance = a.tol;
    cfg.assignment_mode = assign_mode_from_string(a.mode);
    cfg.pi_mode = a.pi == "estimated" ? PiMode::estimated : PiMode::fixed_uniform;

    const bool rendering = !a.render_dir.empty();
    if (rendering) ensure_dir(a.render_dir);
    std::ofstream trace_out(a.out);
    if (!trace_out) throw std::runtime_error("cannot open " + a.out);

    const std::size_t count = a.limit > 0
                                  ? std::min<std::size_t>(a.limit, ds.examples.size())
                                  : ds.examples.size();
    Rng root(a.seed);
    int converged = 0;
    for (std::size_t i = 0; i < count; ++i) {
        RcConfig run_cfg = cfg;
        run_cfg.seed = root.substream(stream::example).substream(i).seed();
        run_cfg.record_snapshots = rendering;
        const RcTrace trace = run_rc(model, ds.examples[i].image, run_cfg);
        write_trace_jsonl(trace_out, trace, static_cast<int>(i));
        converged += trace.converged ? 1 : 0;
        if (rendering) {
            char name[64];
            std::snprintf(name, sizeof(name), "/ex%04zu_input.pgm", i);
            render_image(ds.examples[i].image, a.render_dir + name);
            std::snprintf(name, sizeof(name), "/ex%04zu_truth.ppm", i);
            render_truth(ds.examples[i].truth, ds.width, ds.height, default_palette(),
                         a.render_dir + name);
            for (std::size_t t = 0; t < trace.iterations.size(); ++t) {
                std::snprintf(name, sizeof(name), "/ex%04zu_iter%02zu.ppm", i, t + 1);
                render_assignment(trace.iterations[t].gamma, ds.width, ds.height,
                                  default_palette(), kBackground, a.render_dir + name);
            }
        }
    }
    std::printf("bound %zu examples with K=%d (%s), %d converged -> %s\n", count, cfg.k,
                a.mode.c_str(), converged, a.out.c_str());
    log.write("done", json{{"examples", count}, {"converged", converged}});
    return 0;
}

// ---- eval ----

struct EvalArgs {
    std::string model, data, out = ".", mode = "soft", normalizer = "max";
    std::vector<int> k_values;
    int max_iters = 15, threads = 0;
    double tol = 1e-3;
    std::uint64_t seed = 0;
};

int cmd_eval(const EvalArgs& a, RunLog& log) {
    log.write("start", json{{"model", a.model},
                            {"data", a.data},
                            {"k", a.k_values},
                            {"mode", a.mode},
                            {"max_iters", a.max_iters},
                            {"tol", a.tol},
                            {"normalizer", a.normalizer},
                            {"seed", a.seed},
                            {"out", a.out}});
    const Dataset ds = load_dataset(a.data);
    const DaeModel model = load_model(a.model, ds.width * ds.height);
    std::vector<int> ks = a.k_values;
    if (ks.empty()) ks.push_back(optimal_k(ds.name));

    ensure_dir(a.out);
    json table = json::array();
    int total_failed = 0, total_runs = 0;
    std::printf("%6s %12s %12s %12s\n", "K", "mean_ami", "std_ami", "mean_conf");
    for (int k : ks) {
        RcConfig cfg;
        cfg.k = k;
        cfg.max_iters = a.max_iters;
        cfg.ll_tolerance = a.tol;
        cfg.assignment_mode = assign_mode_from_string(a.mode);
        cfg.seed = a.seed;
        const ScoreResult result = score_dataset(model, ds.examples, cfg, a.threads,
                                                 normalizer_from_string(a.normalizer));
        write_score_csv(result, a.out + "/scores_k" + std::to_string(k) + ".csv");
        std::printf("%6d %12.4f %12.4f %12.4f\n", k, result.summary.mean_ami,
                    result.summary.std_ami, result.summary.mean_confidence);
        table.push_back(json{{"k", k},
                             {"mean_ami", result.summary.mean_ami},
                             {"std_ami", result.summary.std_ami},
                             {"mean_confidence", result.summary.mean_confidence},
                             {"succeeded", result.summary.succeeded},
                             {"failed", result.summary.failed}});
        total_failed += result.summary.failed;
        total_runs += static_cast<int>(result.per_example.size());
        for (const Score& s : result.per_example)
            if (!s.ok) std::fprintf(stderr, "example failed: %s\n", s.error.c_str());
    }
    {
        std::ofstream out(a.out + "/eval_summary.json");
        out << json{{"dataset", to_string(ds.name)}, {"table", table}}.dump(2) << "\n";
    }
    log.write("done", json{{"table", table}, {"failed", total_failed}});
    // partial failures are tolerated up to 1%
    return total_failed * 100 <= total_runs ? 0 : 1;
}

// ---- study ----

struct StudyArgs {
    std::string name, out = ".", activation = "relu";
    int models = 30, hidden = 250;
    double noise = 0.1;
    std::uint64_t seed = 0;
    int train_count = 2000, val_count = 500, eval_count = 300;
    int batch = 100, patience = 10, max_epochs = 60, k = 0, threads = 0;
    std::string mnist_dir;
};

int cmd_study(const StudyArgs& a, RunLog& log) {
    log.write("start", json{{"name", a.name},
                            {"models", a.models},
                            {"hidden", a.hidden},
                            {"activation", a.activation},
                            {"noise", a.noise},
                            {"seed", a.seed},
                            {"out", a.out}});
    StudyOptions opts;
    opts.n_models = a.models;
    opts.hidden_size = a.hidden;
    opts.activation = activation_from_string(a.activation);
    opts.noise_p = a.noise;
    opts.seed = a.seed;
    opts.train_count = a.train_count;
    opts.val_count = a.val_count;
    opts.eval_count = a.eval_count;
    opts.batch_size = a.batch;
    opts.patience = a.patience;
    opts.max_epochs = a.max_epochs;
    opts.k = a.k;
    opts.n_threads = a.threads;
    opts.mnist_dir = a.mnist_dir;
    const StudyResult result = loss_vs_score_study(dataset_from_string(a.name), opts);

    ensure_dir(a.out);
    const std::string csv_path = a.out + "/study.csv";
    {
        std::ofstream out(csv_path);
        out << "index,learning_rate,val_loss,mean_ami\n";
        char buf[128];
        for (const StudyPoint& p : result.points) {
            std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g\n", p.index, p.learning_rate,
                          p.val_loss, p.mean_ami);
            out << buf;
        }
    }
    double r = 0.0;
    if (result.points.size() >= 2) {
        std::vector<double> neg_loss, score;
        for (const StudyPoint& p : result.points) {
            neg_loss.push_back(-p.val_loss);
            score.push_back(p.mean_ami);
        }
        r = pearson(neg_loss, score);
    }
    std::printf("%zu models trained (%zu failed); corr(-loss, score) = %.3f -> %s\n",
                result.points.size(), result.failures.size(), r, csv_path.c_str());
    log.write("done", json{{"models_ok", result.points.size()},
                           {"models_failed", result.failures.size()},
                           {"pearson_neg_loss_score", r}});
    return 0;
}

// ---- generalize ----

struct GeneralizeArgs {
    std::string model, out = "generalize", mode = "soft";
    std::vector<std::string> images;
    int k = 3, max_iters = 15;
    double tol = 1e-3;
    std::uint64_t seed = 0;
};

int cmd_generalize(const GeneralizeArgs& a, RunLog& log) {
    log.write("start", json{{"model", a.model},
                            {"images", a.images},
                            {"k", a.k},
                            {"mode", a.mode},
                            {"seed", a.seed},
                            {"out", a.out}});
    const DaeModel model = load_model(a.model);
    ensure_dir(a.out);
    Rng root(a.seed);
    for (std::size_t i = 0; i < a.images.size(); ++i) {
        const BinaryImage img = binary_image_from_pgm(read_pgm(a.images[i]));
        if (img.size() != model.input_size)
            throw std::runtime_error(a.images[i] + ": image has " +
                                     std::to_string(img.size()) + " pixels, model expects " +
                                     std::to_string(model.input_size));
        RcConfig cfg;
        cfg.k = a.k;
        cfg.max_iters = a.max_iters;
        cfg.ll_tolerance = a.tol;
        cfg.assignment_mode = assign_mode_from_string(a.mode);
        cfg.seed = root.substream(stream::example).substream(i).seed();
        const RcTrace trace = run_rc(model, img, cfg);

        const std::string stem = a.out + "/img" + std::to_string(i);
        render_image(img, stem + "_input.pgm");
        for (std::size_t t = 0; t < trace.iterations.size(); ++t) {
            char name[32];
            std::snprintf(name, sizeof(name), "_iter%02zu.ppm", t + 1);
            render_assignment(trace.iterations[t].gamma, img.width, img.height,
                              default_palette(), kBackground, stem + name);
        }
        std::ofstream trace_out(stem + "_trace.jsonl");
        write_trace_jsonl(trace_out, trace, static_cast<int>(i));
        std::printf("%s: %d iterations, final log-likelihood %.3f\n", a.images[i].c_str(),
                    trace.final_iteration, trace.final_log_likelihood());
    }
    log.write("done", json{{"images", a.images.size()}});
    return 0;
}

// ---- render ----

struct RenderArgs {
    std::string data, out = "render";
    int index = 0;
};

int cmd_render(const RenderArgs& a, RunLog& log) {
    log.write("start", json{{"data", a.data}, {"index", a.index}, {"out", a.out}});
    const Dataset ds = load_dataset(a.data);
    if (a.index < 0 || static_cast<std::size_t>(a.index) >= ds.examples.size())
        throw std::runtime_error("index " + std::to_string(a.index) + " out of range, file has " +
                                 std::to_string(ds.examples.size()) + " examples");
    ensure_dir(a.out);
    const LabeledExample& ex = ds.examples[a.index];
    const std::string stem = a.out + "/" + to_string(ds.name) + std::to_string(a.index);
    render_image(ex.image, stem + "_input.pgm");
    render_truth(ex.truth, ds.width, ds.height, default_palette(), stem + "_truth.ppm");
    std::printf("wrote %s_input.pgm and %s_truth.ppm (%zu objects)\n", stem.c_str(), stem.c_str(),
                ex.truth.object_masks.size());
    log.write("done", json{{"objects", ex.truth.object_masks.size()}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reconstruction clustering pipeline"};
    app.require_subcommand(1);

    std::string log_path = "rcbind_log.jsonl";
    app.add_option("--log", log_path, "run log file (JSON lines, appended)");
    std::string config_file;

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "generate a dataset file");
    generate->add_option("--name", gen.name, "dataset name")->required();
    generate->add_option("--split", gen.split,
                         "train_single | train_multi | validation | test_multi");
    generate->add_option("--count", gen.count, "number of examples");
    generate->add_option("--seed", gen.seed, "generation seed");
    generate->add_option("--out", gen.out, "output dataset file")->required();
    generate->add_option("--bar-prob", gen.bar_prob, "bars: per-candidate inclusion probability");
    generate->add_option("--bank", gen.bank, "superposition pattern bank file");
    generate->add_option("--mnist-dir", gen.mnist_dir, "directory with the MNIST IDX files");
    generate->add_option("--config", config_file, "flat key=value config file");

    TrainArgs tr;
    CLI::App* train_cmd = app.add_subcommand("train", "train a denoising autoencoder");
    train_cmd->add_option("--data", tr.data, "training dataset file")->required();
    train_cmd->add_option("--val", tr.val, "validation dataset file")->required();
    train_cmd->add_option("--out", tr.out, "output model file")->required();
    train_cmd->add_option("--lr", tr.lr, "learning rate");
    train_cmd->add_option("--hidden", tr.hidden, "hidden layer size");
    train_cmd->add_option("--activation", tr.activation, "relu | sigmoid | tanh");
    train_cmd->add_option("--noise", tr.noise, "salt & pepper corruption probability");
    train_cmd->add_option("--batch", tr.batch, "minibatch size");
    train_cmd->add_option("--patience", tr.patience, "early stopping patience (epochs)");
    train_cmd->add_option("--max-epochs", tr.max_epochs, "epoch cap");
    train_cmd->add_option("--seed", tr.seed, "training seed");
    train_cmd->add_option("--config", config_file, "flat key=value config file");

    SearchArgs se;
    CLI::App* search_cmd = app.add_subcommand("search", "random hyperparameter search");
    search_cmd->add_option("--name", se.name, "dataset name")->required();
    search_cmd->add_option("--trials", se.trials, "number of trials");
    search_cmd->add_option("--mode", se.mode, "single | multi (training images per object count)");
    search_cmd->add_option("--seed", se.seed, "search seed");
    search_cmd->add_option("--train-count", se.train_count, "training examples per trial");
    search_cmd->add_option("--val-count", se.val_count, "validation examples");
    search_cmd->add_option("--eval-count", se.eval_count, "scoring examples");
    search_cmd->add_option("--batch", se.batch, "minibatch size");
    search_cmd->add_option("--patience", se.patience, "early stopping patience");
    search_cmd->add_option("--max-epochs", se.max_epochs, "epoch cap");
    search_cmd->add_option("--k", se.k, "clusters for scoring (0 = dataset optimum)");
    search_cmd->add_option("--threads", se.threads, "parallel trials (0 = hardware)");
    search_cmd->add_option("--mnist-dir", se.mnist_dir, "directory with the MNIST IDX files");
    search_cmd->add_option("--out", se.out, "output directory");
    search_cmd->add_option("--config", config_file, "flat key=value config file");

    BindArgs bi;
    CLI::App* bind_cmd = app.add_subcommand("bind", "run reconstruction clustering");
    bind_cmd->add_option("--model", bi.model, "model file")->required();
    bind_cmd->add_option("--data", bi.data, "dataset file")->required();
    bind_cmd->add_option("--k", bi.k, "clusters (0 = dataset optimum)");
    bind_cmd->add_option("--mode", bi.mode, "soft | hard");
    bind_cmd->add_option("--pi", bi.pi, "fixed | estimated mixing weights");
    bind_cmd->add_option("--max-iters", bi.max_iters, "iteration cap");
    bind_cmd->add_option("--tol", bi.tol, "log-likelihood convergence tolerance");
    bind_cmd->add_option("--limit", bi.limit, "bind only the first N examples");
    bind_cmd->add_option("--render", bi.render_dir, "render per-iteration assignments here");
    bind_cmd->add_option("--seed", bi.seed, "clustering seed");
    bind_cmd->add_option("--out", bi.out, "trace output file (JSON lines)");
    bind_cmd->add_option("--config", config_file, "flat key=value config file");

    EvalArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score a model over cluster counts");
    eval_cmd->add_option("--model", ev.model, "model file")->required();
    eval_cmd->add_option("--data", ev.data, "dataset file")->required();
    eval_cmd->add_option("--k", ev.k_values, "cluster counts, comma separated")
        ->delimiter(',');
    eval_cmd->add_option("--mode", ev.mode, "soft | hard");
    eval_cmd->add_option("--max-iters", ev.max_iters, "iteration cap");
    eval_cmd->add_option("--tol", ev.tol, "convergence tolerance");
    eval_cmd->add_option("--normalizer", ev.normalizer, "AMI normalizer: max|min|sqrt|mean");
    eval_cmd->add_option("--threads", ev.threads, "parallel examples (0 = hardware)");
    eval_cmd->add_option("--seed", ev.seed, "clustering seed");
    eval_cmd->add_option("--out", ev.out, "output directory");
    eval_cmd->add_option("--config", config_file, "flat key=value config file");

    StudyArgs st;
    CLI::App* study_cmd = app.add_subcommand("study", "loss vs score study");
    study_cmd->add_option("--name", st.name, "dataset name")->required();
    study_cmd->add_option("--models", st.models, "number of models");
    study_cmd->add_option("--hidden", st.hidden, "hidden layer size");
    study_cmd->add_option("--activation", st.activation, "relu | sigmoid | tanh");
    study_cmd->add_option("--noise", st.noise, "corruption probability");
    study_cmd->add_option("--seed", st.seed, "study seed");
    study_cmd->add_option("--train-count", st.train_count, "training examples");
    study_cmd->add_option("--val-count", st.val_count, "validation examples");
    study_cmd->add_option("--eval-count", st.eval_count, "scoring examples");
    study_cmd->add_option("--batch", st.batch, "minibatch size");
    study_cmd->add_option("--patience", st.patience, "early stopping patience");
    study_cmd->add_option("--max-epochs", st.max_epochs, "epoch cap");
    study_cmd->add_option("--k", st.k, "clusters for scoring (0 = dataset optimum)");
    study_cmd->add_option("--threads", st.threads, "parallel models (0 = hardware)");
    study_cmd->add_option("--mnist-dir", st.mnist_dir, "directory with the MNIST IDX files");
    study_cmd->add_option("--out", st.out, "output directory");
    study_cmd->add_option("--config", config_file, "flat key=value config file");

    GeneralizeArgs ge;
    CLI::App* gener_cmd = app.add_subcommand("generalize", "bind user-supplied images");
    gener_cmd->add_option("--model", ge.model, "model file")->required();
    gener_cmd->add_option("images", ge.images, "input PGM images")->required();
    gener_cmd->add_option("--k", ge.k, "clusters");
    gener_cmd->add_option("--mode", ge.mode, "soft | hard");
    gener_cmd->add_option("--max-iters", ge.max_iters, "iteration cap");
    gener_cmd->add_option("--tol", ge.tol, "convergence tolerance");
    gener_cmd->add_option("--seed", ge.seed, "clustering seed");
    gener_cmd->add_option("--out", ge.out, "output directory");
    gener_cmd->add_option("--config", config_file, "flat key=value config file");

    RenderArgs re;
    CLI::App* render_cmd = app.add_subcommand("render", "render a dataset example");
    render_cmd->add_option("--data", re.data, "dataset file")->required();
    render_cmd->add_option("--index", re.index, "example index");
    render_cmd->add_option("--out", re.out, "output directory");
    render_cmd->add_option("--config", config_file, "flat key=value config file");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = inject_config_tokens(std::move(args));
    } catch (const CLI::Error& e) {
        return app.exit(e);
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    RunLog log;
    log.path = log_path;
    try {
        if (*generate) {
            log.command = "generate";
            return cmd_generate(gen, log);
        }
        if (*train_cmd) {
            log.command = "train";
            return cmd_train(tr, log);
        }
        if (*search_cmd) {
            log.command = "search";
            return cmd_search(se, log);
        }
        if (*bind_cmd) {
            log.command = "bind";
            return cmd_bind(bi, log);
        }
        if (*eval_cmd) {
            log.command = "eval";
            return cmd_eval(ev, log);
        }
        if (*study_cmd) {
            log.command = "study";
            return cmd_study(st, log);
        }
        if (*gener_cmd) {
            log.command = "generalize";
            return cmd_generalize(ge, log);
        }
        if (*render_cmd) {
            log.command = "render";
            return cmd_render(re, log);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        log.write("error", json{{"what", e.what()}});
        return 1;
    }
    return 0;
}

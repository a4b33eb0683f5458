#include "rcbind/dae.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace rcbind {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void apply_activation(Matrix& m, Activation act) {
    switch (act) {
        case Activation::relu:
            for (double& v : m.data) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::sigmoid:
            for (double& v : m.data) v = sigmoid(v);
            break;
        case Activation::tanh:
            for (double& v : m.data) v = std::tanh(v);
            break;
    }
}

void add_row_bias(Matrix& m, const std::vector<double>& bias) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        double* r = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) r[j] += bias[j];
    }
}

void check_width(const Matrix& m, int expected, const char* what) {
    if (m.cols != static_cast<std::size_t>(expected))
        throw std::invalid_argument(std::string(what) + ": got width " +
                                    std::to_string(m.cols) + ", model expects " +
                                    std::to_string(expected));
}

Matrix row_matrix(std::span<const double> v) {
    Matrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.data.begin());
    return m;
}

struct ForwardPass {
    Matrix hidden;  // B x H, post-activation
    Matrix mu;      // B x N, sigmoid outputs
};

ForwardPass forward(const DaeModel& model, const Matrix& x) {
    ForwardPass fw;
    fw.hidden = matmul_nt(x, model.w1);
    add_row_bias(fw.hidden, model.b1);
    apply_activation(fw.hidden, model.hidden_activation);
    fw.mu = matmul_nt(fw.hidden, model.w2);
    add_row_bias(fw.mu, model.b2);
    for (double& v : fw.mu.data) v = sigmoid(v);
    return fw;
}

double clip_mu(double mu) { return std::clamp(mu, kMuEps, 1.0 - kMuEps); }

}  // namespace

std::string to_string(Activation act) {
    switch (act) {
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
    }
    throw std::invalid_argument("to_string: unknown activation");
}

Activation activation_from_string(const std::string& s) {
    for (auto act : {Activation::relu, Activation::sigmoid, Activation::tanh})
        if (to_string(act) == s) return act;
    throw std::invalid_argument("unknown activation '" + s + "'");
}

DaeModel init_model(int input_size, int hidden_size, Activation act, Rng& rng) {
    if (input_size < 1 || hidden_size < 1)
        throw std::invalid_argument("init_model: sizes must be positive");
    DaeModel m;
    m.input_size = input_size;
    m.hidden_size = hidden_size;
    m.hidden_activation = act;
    const double bound = std::sqrt(6.0 / (input_size + hidden_size));
    m.w1 = Matrix(hidden_size, input_size);
    for (double& v : m.w1.data) v = rng.uniform(-bound, bound);
    m.b1.assign(hidden_size, 0.0);
    m.w2 = Matrix(input_size, hidden_size);
    for (double& v : m.w2.data) v = rng.uniform(-bound, bound);
    m.b2.assign(input_size, 0.0);
    return m;
}

Matrix encode_batch(const DaeModel& model, const Matrix& x) {
    check_width(x, model.input_size, "encode");
    Matrix h = matmul_nt(x, model.w1);
    add_row_bias(h, model.b1);
    apply_activation(h, model.hidden_activation);
    return h;
}

Matrix decode_batch(const DaeModel& model, const Matrix& theta) {
    check_width(theta, model.hidden_size, "decode");
    Matrix mu = matmul_nt(theta, model.w2);
    add_row_bias(mu, model.b2);
    for (double& v : mu.data) v = sigmoid(v);
    return mu;
}

std::vector<double> encode(const DaeModel& model, std::span<const double> x) {
    return encode_batch(model, row_matrix(x)).data;
}

std::vector<double> decode(const DaeModel& model, std::span<const double> theta) {
    return decode_batch(model, row_matrix(theta)).data;
}

double bce_loss(std::span<const double> mu, std::span<const double> x) {
    if (mu.size() != x.size())
        throw std::invalid_argument("bce_loss: length mismatch, " + std::to_string(mu.size()) +
                                    " vs " + std::to_string(x.size()));
    double loss = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double m = clip_mu(mu[i]);
        loss -= x[i] * std::log(m) + (1.0 - x[i]) * std::log(1.0 - m);
    }
    return loss;
}

std::vector<double> salt_pepper(std::span<const double> x, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("salt_pepper: p must lie in [0,1]");
    std::vector<double> out(x.begin(), x.end());
    if (p == 0.0) return out;
    for (double& v : out)
        if (rng.uniform01() < p) v = (rng.below(2) == 0) ? 0.0 : 1.0;
    return out;
}

Gradients backward(const DaeModel& model, const Matrix& corrupted, const Matrix& target) {
    check_width(corrupted, model.input_size, "backward");
    if (corrupted.rows != target.rows || corrupted.cols != target.cols)
        throw std::invalid_argument("backward: corrupted/target shape mismatch, " +
                                    corrupted.shape_str() + " vs " + target.shape_str());
    const double inv_batch = 1.0 / static_cast<double>(corrupted.rows);

    ForwardPass fw = forward(model, corrupted);

    // d(batch-mean BCE)/d(pre-sigmoid output) = (mu - target)/B
    Matrix d_out(fw.mu.rows, fw.mu.cols);
    for (std::size_t i = 0; i < d_out.data.size(); ++i)
        d_out.data[i] = (fw.mu.data[i] - target.data[i]) * inv_batch;

    Gradients g;
    g.w2 = matmul_tn(d_out, fw.hidden);  // N x H
    g.b2.assign(model.input_size, 0.0);
    for (std::size_t i = 0; i < d_out.rows; ++i) {
        const double* r = d_out.row(i);
        for (std::size_t j = 0; j < d_out.cols; ++j) g.b2[j] += r[j];
    }

    Matrix d_hidden = matmul(d_out, model.w2);  // B x H
    switch (model.hidden_activation) {
        case Activation::relu:
            for (std::size_t i = 0; i < d_hidden.data.size(); ++i)
                if (fw.hidden.data[i] <= 0.0) d_hidden.data[i] = 0.0;
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < d_hidden.data.size(); ++i) {
                const double a = fw.hidden.data[i];
                d_hidden.data[i] *= a * (1.0 - a);
            }
            break;
        case Activation::tanh:
            for (std::size_t i = 0; i < d_hidden.data.size(); ++i) {
                const double a = fw.hidden.data[i];
                d_hidden.data[i] *= 1.0 - a * a;
            }
            break;
    }

    g.w1 = matmul_tn(d_hidden, corrupted);  // H x N
    g.b1.assign(model.hidden_size, 0.0);
    for (std::size_t i = 0; i < d_hidden.rows; ++i) {
        const double* r = d_hidden.row(i);
        for (std::size_t j = 0; j < d_hidden.cols; ++j) g.b1[j] += r[j];
    }
    return g;
}

namespace {

Matrix gather_rows(const std::vector<BinaryImage>& images, const std::vector<int>& idx,
                   std::size_t begin, std::size_t end) {
    Matrix m(end - begin, images.front().pixels.size());
    for (std::size_t r = begin; r < end; ++r)
        std::copy(images[idx[r]].pixels.begin(), images[idx[r]].pixels.end(), m.row(r - begin));
    return m;
}

void sgd_step(DaeModel& model, const Gradients& g, double lr) {
    for (std::size_t i = 0; i < model.w1.data.size(); ++i) model.w1.data[i] -= lr * g.w1.data[i];
    for (std::size_t i = 0; i < model.b1.size(); ++i) model.b1[i] -= lr * g.b1[i];
    for (std::size_t i = 0; i < model.w2.data.size(); ++i) model.w2.data[i] -= lr * g.w2.data[i];
    for (std::size_t i = 0; i < model.b2.size(); ++i) model.b2[i] -= lr * g.b2[i];
}

double mean_bce(const Matrix& mu, const Matrix& target) {
    double total = 0.0;
    for (std::size_t i = 0; i < mu.rows; ++i)
        total += bce_loss(std::span<const double>(mu.row(i), mu.cols),
                          std::span<const double>(target.row(i), target.cols));
    return total / static_cast<double>(mu.rows);
}

}  // namespace

TrainReport train(DaeModel model, const std::vector<BinaryImage>& train_set,
                  const std::vector<BinaryImage>& val_set, const TrainConfig& cfg) {
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("train: train and validation sets must be non-empty");
    if (cfg.learning_rate < 0.0) throw std::invalid_argument("train: negative learning rate");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (cfg.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    const std::size_t n = static_cast<std::size_t>(model.input_size);
    for (const BinaryImage& img : train_set)
        if (img.pixels.size() != n)
            throw std::invalid_argument("train: image size does not match model input");
    for (const BinaryImage& img : val_set)
        if (img.pixels.size() != n)
            throw std::invalid_argument("train: validation image size does not match model");

    Rng root(cfg.seed);
    Rng shuffle_rng = root.substream(stream::shuffle);
    Rng noise_rng = root.substream(stream::train_noise);

    // Fixed corruption for the early-stopping metric.
    Matrix val_clean(val_set.size(), n);
    for (std::size_t i = 0; i < val_set.size(); ++i)
        std::copy(val_set[i].pixels.begin(), val_set[i].pixels.end(), val_clean.row(i));
    Matrix val_corrupted(val_set.size(), n);
    {
        Rng val_rng = root.substream(stream::val_noise);
        for (std::size_t i = 0; i < val_set.size(); ++i) {
            auto corrupted = salt_pepper(val_set[i].pixels, cfg.noise_p, val_rng);
            std::copy(corrupted.begin(), corrupted.end(), val_corrupted.row(i));
        }
    }

    TrainReport report;
    report.best_val_loss = std::numeric_limits<double>::infinity();
    std::vector<int> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    int epochs_since_best = 0;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
            Matrix target = gather_rows(train_set, order, begin, end);
            Matrix corrupted = target;
            if (cfg.noise_p > 0.0) {
                for (std::size_t r = 0; r < corrupted.rows; ++r) {
                    auto noisy = salt_pepper(
                        std::span<const double>(corrupted.row(r), corrupted.cols), cfg.noise_p,
                        noise_rng);
                    std::copy(noisy.begin(), noisy.end(), corrupted.row(r));
                }
            }
            ForwardPass fw = forward(model, corrupted);
            epoch_loss += mean_bce(fw.mu, target) * static_cast<double>(end - begin);
            Gradients g = backward(model, corrupted, target);
            sgd_step(model, g, cfg.learning_rate);
        }
        epoch_loss /= static_cast<double>(train_set.size());

        const Matrix val_mu = decode_batch(model, encode_batch(model, val_corrupted));
        const double val = mean_bce(val_mu, val_clean);
        report.train_loss.push_back(epoch_loss);
        report.val_loss.push_back(val);
        report.epochs_run = epoch;

        if (!std::isfinite(epoch_loss) || !std::isfinite(val))
            throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                " (learning rate " + std::to_string(cfg.learning_rate) +
                                " too high?)");

        if (val < report.best_val_loss) {
            report.best_val_loss = val;
            report.best_epoch = epoch;
            report.best_model = model;
            epochs_since_best = 0;
        } else if (++epochs_since_best >= cfg.patience) {
            break;
        }
    }
    return report;
}

namespace {

void put_u32le(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

std::uint32_t get_u32le(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw std::runtime_error("load_model: truncated file " + path);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_doubles(std::ostream& out, const double* v, std::size_t count) {
    // doubles are stored little-endian; this build targets little-endian hosts
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(count * 8));
}

void get_doubles(std::istream& in, double* v, std::size_t count, const std::string& path) {
    in.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(count * 8));
    if (static_cast<std::size_t>(in.gcount()) != count * 8)
        throw std::runtime_error("load_model: truncated file " + path);
}

}  // namespace

void save_model(const DaeModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out.write("RCM1", 4);
    put_u32le(out, static_cast<std::uint32_t>(model.input_size));
    put_u32le(out, static_cast<std::uint32_t>(model.hidden_size));
    out.put(static_cast<char>(model.hidden_activation));
    put_doubles(out, model.w1.data.data(), model.w1.data.size());
    put_doubles(out, model.b1.data(), model.b1.size());
    put_doubles(out, model.w2.data.data(), model.w2.data.size());
    put_doubles(out, model.b2.data(), model.b2.size());
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

DaeModel load_model(const std::string& path, int expect_input_size) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::string(magic, 4) != "RCM1")
        throw std::runtime_error("load_model: " + path + " is not a model file");
    DaeModel m;
    m.input_size = static_cast<int>(get_u32le(in, path));
    m.hidden_size = static_cast<int>(get_u32le(in, path));
    if (m.input_size < 1 || m.hidden_size < 1)
        throw std::runtime_error("load_model: invalid sizes in " + path);
    if (expect_input_size != 0 && m.input_size != expect_input_size)
        throw std::runtime_error("load_model: " + path + " has input size " +
                                 std::to_string(m.input_size) + ", expected " +
                                 std::to_string(expect_input_size));
    const int act = in.get();
    if (act < 0 || act > 2) throw std::runtime_error("load_model: bad activation tag in " + path);
    m.hidden_activation = static_cast<Activation>(act);
    m.w1 = Matrix(m.hidden_size, m.input_size);
    m.b1.resize(m.hidden_size);
    m.w2 = Matrix(m.input_size, m.hidden_size);
    m.b2.resize(m.input_size);
    get_doubles(in, m.w1.data.data(), m.w1.data.size(), path);
    get_doubles(in, m.b1.data(), m.b1.size(), path);
    get_doubles(in, m.w2.data.data(), m.w2.data.size(), path);
    get_doubles(in, m.b2.data(), m.b2.size(), path);
    return m;
}

}  // namespace rcbind

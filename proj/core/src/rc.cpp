#include "rcbind/rc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rcbind {

namespace {

void check_image(const DaeModel& model, const BinaryImage& x) {
    if (x.size() != model.input_size)
        throw std::invalid_argument("rc: image has " + std::to_string(x.size()) +
                                    " pixels, model expects " +
                                    std::to_string(model.input_size));
}

// Bernoulli likelihood of pixel value x under prediction mu. x is almost
// always exactly 0 or 1; the pow branch covers soft inputs.
double pixel_likelihood(double x, double mu) {
    if (x == 1.0) return mu;
    if (x == 0.0) return 1.0 - mu;
    return std::pow(mu, x) * std::pow(1.0 - mu, 1.0 - x);
}

Matrix soft_gamma(const BinaryImage& x, const ClusterStates& states,
                  const std::vector<double>& pi) {
    const std::size_t n = x.pixels.size();
    const std::size_t k = states.mu.rows;
    if (pi.size() != k)
        throw std::invalid_argument("e_step: pi has " + std::to_string(pi.size()) +
                                    " entries for " + std::to_string(k) + " clusters");
    Matrix gamma(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = gamma.row(i);
        double denom = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double w = pixel_likelihood(x.pixels[i], states.mu.at(c, i)) * pi[c];
            row[c] = w;
            denom += w;
        }
        for (std::size_t c = 0; c < k; ++c) row[c] /= denom;  // denom > 0 by mu clipping
    }
    return gamma;
}

}  // namespace

Assignment init_assignment(int n, int k, Rng& rng) {
    if (n < 1 || k < 1) throw std::invalid_argument("init_assignment: need n, k >= 1");
    Assignment a;
    a.gamma = Matrix(n, k);
    for (int i = 0; i < n; ++i) {
        double* row = a.gamma.row(i);
        double sum = 0.0;
        for (int c = 0; c < k; ++c) {
            row[c] = rng.uniform01();
            sum += row[c];
        }
        if (sum == 0.0) {
            for (int c = 0; c < k; ++c) row[c] = 1.0 / k;
        } else {
            for (int c = 0; c < k; ++c) row[c] /= sum;
        }
    }
    return a;
}

ClusterStates r_step(const DaeModel& model, const BinaryImage& x, const Assignment& gamma) {
    check_image(model, x);
    const std::size_t n = x.pixels.size();
    const std::size_t k = gamma.cluster_count();
    if (gamma.pixel_count() != n)
        throw std::invalid_argument("r_step: gamma rows " + std::to_string(gamma.pixel_count()) +
                                    " do not match pixel count " + std::to_string(n));

    // The encoder sees each pixel only as much as it is assigned to the cluster.
    Matrix masked(k, n);
    for (std::size_t c = 0; c < k; ++c) {
        double* row = masked.row(c);
        for (std::size_t i = 0; i < n; ++i) row[i] = gamma.gamma.at(i, c) * x.pixels[i];
    }

    ClusterStates states;
    states.theta = encode_batch(model, masked);
    states.mu = decode_batch(model, states.theta);
    for (double& v : states.mu.data) v = std::clamp(v, kMuEps, 1.0 - kMuEps);
    return states;
}

Assignment e_step_soft(const BinaryImage& x, const ClusterStates& states,
                       const std::vector<double>& pi) {
    return Assignment{soft_gamma(x, states, pi)};
}

Assignment e_step_hard(const BinaryImage& x, const ClusterStates& states,
                       const std::vector<double>& pi) {
    Matrix gamma = soft_gamma(x, states, pi);
    for (std::size_t i = 0; i < gamma.rows; ++i) {
        double* row = gamma.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < gamma.cols; ++c)
            if (row[c] > row[best]) best = c;  // ties keep the lowest index
        for (std::size_t c = 0; c < gamma.cols; ++c) row[c] = (c == best) ? 1.0 : 0.0;
    }
    return Assignment{gamma};
}

double complete_log_likelihood(const BinaryImage& x, const Assignment& gamma,
                               const ClusterStates& states, const std::vector<double>& pi) {
    const std::size_t n = x.pixels.size();
    const std::size_t k = gamma.cluster_count();
    if (gamma.pixel_count() != n || states.mu.rows != k || states.mu.cols != n ||
        pi.size() != k)
        throw std::invalid_argument("complete_log_likelihood: inconsistent shapes");
    std::vector<double> log_pi(k);
    for (std::size_t c = 0; c < k; ++c) log_pi[c] = std::log(pi[c]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x.pixels[i];
        const double* g = gamma.gamma.row(i);
        for (std::size_t c = 0; c < k; ++c) {
            const double mu = states.mu.at(c, i);
            total += g[c] * (xi * std::log(mu) + (1.0 - xi) * std::log(1.0 - mu) + log_pi[c]);
        }
    }
    return total;
}

std::vector<double> update_pi(const Assignment& gamma) {
    const std::size_t n = gamma.pixel_count();
    const std::size_t k = gamma.cluster_count();
    if (n == 0) throw std::invalid_argument("update_pi: empty assignment");
    std::vector<double> pi(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = gamma.gamma.row(i);
        for (std::size_t c = 0; c < k; ++c) pi[c] += row[c];
    }
    for (double& p : pi) p /= static_cast<double>(n);
    return pi;
}

RcTrace run_rc(const DaeModel& model, const BinaryImage& x, const RcConfig& cfg) {
    check_image(model, x);
    if (cfg.k < 1 || cfg.max_iters < 1)
        throw std::invalid_argument("run_rc: need k >= 1 and max_iters >= 1");

    Rng rng = Rng(cfg.seed).substream(stream::rc_init);
    Assignment gamma = init_assignment(x.size(), cfg.k, rng);
    std::vector<double> pi(cfg.k, 1.0 / cfg.k);

    RcTrace trace;
    if (cfg.record_snapshots) trace.initial_gamma = gamma.gamma;
    trace.iterations.reserve(cfg.max_iters);

    double prev_ll = 0.0;
    Matrix last_mu;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        ClusterStates states = r_step(model, x, gamma);
        if (cfg.pi_mode == PiMode::estimated) pi = update_pi(gamma);
        gamma = (cfg.assignment_mode == AssignMode::soft) ? e_step_soft(x, states, pi)
                                                          : e_step_hard(x, states, pi);
        const double ll = complete_log_likelihood(x, gamma, states, pi);

        RcIteration rec;
        rec.log_likelihood = ll;
        rec.digest = gamma_digest(gamma.gamma);
        if (cfg.record_snapshots) {
            rec.gamma = gamma.gamma;
            rec.mu = states.mu;
        }
        trace.iterations.push_back(std::move(rec));
        trace.final_iteration = iter;
        last_mu = std::move(states.mu);

        if (iter > 1 && std::abs(ll - prev_ll) < cfg.ll_tolerance) {
            trace.converged = true;
            break;
        }
        prev_ll = ll;
    }
    trace.final_assignment = std::move(gamma);
    trace.final_mu = std::move(last_mu);
    return trace;
}

std::uint64_t gamma_digest(const Matrix& gamma) {
    std::uint64_t h = 14695981039346656037ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(gamma.data.data());
    const std::size_t count = gamma.data.size() * sizeof(double);
    for (std::size_t i = 0; i < count; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

void write_trace_jsonl(std::ostream& out, const RcTrace& trace, int example_index) {
    char line[256];
    for (std::size_t t = 0; t < trace.iterations.size(); ++t) {
        const RcIteration& rec = trace.iterations[t];
        if (example_index >= 0)
            std::snprintf(line, sizeof(line),
                          "{\"example\":%d,\"iter\":%zu,\"log_likelihood\":%.17g,"
                          "\"gamma_digest\":\"%016llx\"}",
                          example_index, t + 1, rec.log_likelihood,
                          static_cast<unsigned long long>(rec.digest));
        else
            std::snprintf(line, sizeof(line),
                          "{\"iter\":%zu,\"log_likelihood\":%.17g,\"gamma_digest\":\"%016llx\"}",
                          t + 1, rec.log_likelihood,
                          static_cast<unsigned long long>(rec.digest));
        out << line << '\n';
    }
}

std::string to_string(AssignMode mode) {
    return mode == AssignMode::soft ? "soft" : "hard";
}

AssignMode assign_mode_from_string(const std::string& s) {
    if (s == "soft") return AssignMode::soft;
    if (s == "hard") return AssignMode::hard;
    throw std::invalid_argument("unknown assignment mode '" + s + "'");
}

}  // namespace rcbind

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcbind/dae.hpp"
#include "rcbind/image.hpp"
#include "rcbind/matrix.hpp"
#include "rcbind/rng.hpp"

namespace rcbind {

// N x K responsibilities. Soft rows lie on the probability simplex; hard
// rows are one-hot.
struct Assignment {
    Matrix gamma;

    std::size_t pixel_count() const { return gamma.rows; }
    std::size_t cluster_count() const { return gamma.cols; }
};

enum class AssignMode { soft, hard };
enum class PiMode { fixed_uniform, estimated };

struct MixingWeights {
    std::vector<double> pi;
    PiMode mode = PiMode::fixed_uniform;
};

// Per-cluster object representations and predictions, cluster per row.
// mu is clipped into [kMuEps, 1-kMuEps].
struct ClusterStates {
    Matrix theta;  // K x H
    Matrix mu;     // K x N
};

struct RcConfig {
    int k = 2;
    int max_iters = 15;
    double ll_tolerance = 1e-3;  // absolute change of the log-likelihood
    AssignMode assignment_mode = AssignMode::soft;
    PiMode pi_mode = PiMode::fixed_uniform;
    std::uint64_t seed = 0;
    bool record_snapshots = true;  // keep per-iteration gamma/mu in the trace
};

struct RcIteration {
    double log_likelihood = 0.0;
    std::uint64_t digest = 0;  // gamma fingerprint, always recorded
    Matrix gamma;              // empty unless record_snapshots
    Matrix mu;
};

struct RcTrace {
    Matrix initial_gamma;                // empty unless record_snapshots
    std::vector<RcIteration> iterations; // one entry per completed iteration
    Assignment final_assignment;         // always populated
    Matrix final_mu;
    int final_iteration = 0;
    bool converged = false;

    double final_log_likelihood() const { return iterations.back().log_likelihood; }
};

// Each row sampled iid Uniform(0,1), then normalized onto the simplex.
Assignment init_assignment(int n, int k, Rng& rng);

// theta_k = encode(gamma_col_k * x), mu_k = clip(decode(theta_k)).
ClusterStates r_step(const DaeModel& model, const BinaryImage& x, const Assignment& gamma);

// gamma_ik proportional to mu_ik^x (1-mu_ik)^(1-x) pi_k, rows normalized.
Assignment e_step_soft(const BinaryImage& x, const ClusterStates& states,
                       const std::vector<double>& pi);

// Soft responsibilities collapsed to one-hot at the row argmax; ties break
// toward the lowest cluster index.
Assignment e_step_hard(const BinaryImage& x, const ClusterStates& states,
                       const std::vector<double>& pi);

// sum_i sum_k gamma_ik [x ln mu + (1-x) ln(1-mu) + ln pi_k]
double complete_log_likelihood(const BinaryImage& x, const Assignment& gamma,
                               const ClusterStates& states, const std::vector<double>& pi);

// pi_k = column mean of gamma.
std::vector<double> update_pi(const Assignment& gamma);

// The full loop: init, then per iteration R-step, optional pi update,
// E-step, log-likelihood. Stops when the log-likelihood change drops below
// ll_tolerance or max_iters is reached.
RcTrace run_rc(const DaeModel& model, const BinaryImage& x, const RcConfig& cfg);

// FNV-1a over the raw gamma bytes; stable fingerprint for trace logs.
std::uint64_t gamma_digest(const Matrix& gamma);

// One JSON object per iteration: {"iter":..,"log_likelihood":..,"gamma_digest":".."}.
// example_index, when >= 0, is included in each record.
void write_trace_jsonl(std::ostream& out, const RcTrace& trace, int example_index = -1);

std::string to_string(AssignMode mode);
AssignMode assign_mode_from_string(const std::string& s);

}  // namespace rcbind

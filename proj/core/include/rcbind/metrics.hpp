#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcbind/datasets.hpp"
#include "rcbind/image.hpp"
#include "rcbind/rc.hpp"

namespace rcbind {

// Counts of co-assigned elements between two labelings, plus marginals.
struct ContingencyTable {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::int64_t> counts;  // n_rows * n_cols
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;
    std::int64_t total = 0;

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * n_cols + j]; }
};

// Labels may be any nonnegative ints; they are compacted internally.
ContingencyTable build_contingency(std::span<const int> a, std::span<const int> b);

double mutual_information(const ContingencyTable& t);  // nats
double entropy_rows(const ContingencyTable& t);
double entropy_cols(const ContingencyTable& t);

// Exact expectation of MI under the fixed-marginal permutation model
// (hypergeometric sum over every cell).
double expected_mutual_information(const ContingencyTable& t);

enum class AmiNormalizer { max_entropy, min_entropy, sqrt_entropy, mean_entropy };

// Adjusted mutual information over the masked pixels only:
//   (MI - E[MI]) / (norm(H_a, H_b) - E[MI])
// Degenerate cases: both partitions single-cluster -> 1, exactly one -> 0.
double ami(std::span<const int> pred, std::span<const int> truth,
           std::span<const std::uint8_t> eval_mask,
           AmiNormalizer normalizer = AmiNormalizer::max_entropy);

// Unmasked variant over full label vectors.
double ami_full(std::span<const int> pred, std::span<const int> truth,
                AmiNormalizer normalizer = AmiNormalizer::max_entropy);

// argmax_k gamma_ik per pixel, lowest index on ties.
std::vector<int> hard_labels(const Assignment& gamma);

// Mean over masked pixels of max_k gamma_ik.
double confidence(const Assignment& gamma, std::span<const std::uint8_t> eval_mask);

struct Score {
    double ami = 0.0;
    double confidence = 0.0;
    int evaluated_pixels = 0;
    int iterations = 0;
    double final_ll = 0.0;
    bool converged = false;
    bool ok = false;
    std::string error;
};

struct ScoreSummary {
    double mean_ami = 0.0;
    double std_ami = 0.0;  // sample standard deviation
    double mean_confidence = 0.0;
    int succeeded = 0;
    int failed = 0;
};

struct ScoreResult {
    std::vector<Score> per_example;
    ScoreSummary summary;
};

// Runs RC on every example and scores the final assignment against the
// ground truth. Per-example failures are recorded, not fatal. Examples run
// in parallel; results do not depend on the thread count.
ScoreResult score_dataset(const DaeModel& model, const std::vector<LabeledExample>& examples,
                          const RcConfig& cfg, int n_threads = 0,
                          AmiNormalizer normalizer = AmiNormalizer::max_entropy);

// One row per example: index, ami, confidence, iterations, final_ll.
void write_score_csv(const ScoreResult& result, const std::string& path);

// {"mean_ami":..,"std_ami":..,"mean_confidence":..,"succeeded":..,"failed":..,
//  "config":{...}} with the RC configuration echoed.
void write_score_summary_json(const ScoreResult& result, const RcConfig& cfg,
                              const std::string& path);

std::string to_string(AmiNormalizer n);
AmiNormalizer normalizer_from_string(const std::string& s);

}  // namespace rcbind

#include "rcbind/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "rcbind/threads.hpp"

namespace rcbind {

namespace {

std::vector<int> compact_labels(std::span<const int> labels) {
    std::map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = remap.emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    return out;
}

}  // namespace

ContingencyTable build_contingency(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("build_contingency: label vectors differ in length");
    if (a.empty()) throw std::invalid_argument("build_contingency: empty label vectors");
    const std::vector<int> ra = compact_labels(a);
    const std::vector<int> rb = compact_labels(b);
    ContingencyTable t;
    t.n_rows = static_cast<std::size_t>(*std::max_element(ra.begin(), ra.end())) + 1;
    t.n_cols = static_cast<std::size_t>(*std::max_element(rb.begin(), rb.end())) + 1;
    t.counts.assign(t.n_rows * t.n_cols, 0);
    t.row_sums.assign(t.n_rows, 0);
    t.col_sums.assign(t.n_cols, 0);
    t.total = static_cast<std::int64_t>(a.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ++t.counts[static_cast<std::size_t>(ra[i]) * t.n_cols + rb[i]];
        ++t.row_sums[ra[i]];
        ++t.col_sums[rb[i]];
    }
    return t;
}

double mutual_information(const ContingencyTable& t) {
    const double n = static_cast<double>(t.total);
    double mi = 0.0;
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        for (std::size_t j = 0; j < t.n_cols; ++j) {
            const double nij = static_cast<double>(t.at(i, j));
            if (nij == 0.0) continue;
            mi += (nij / n) * std::log(nij * n / (static_cast<double>(t.row_sums[i]) *
                                                  static_cast<double>(t.col_sums[j])));
        }
    }
    return mi;
}

namespace {

double marginal_entropy(const std::vector<std::int64_t>& sums, std::int64_t total) {
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (auto s : sums) {
        if (s == 0) continue;
        const double p = static_cast<double>(s) / n;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

double entropy_rows(const ContingencyTable& t) { return marginal_entropy(t.row_sums, t.total); }
double entropy_cols(const ContingencyTable& t) { return marginal_entropy(t.col_sums, t.total); }

double expected_mutual_information(const ContingencyTable& t) {
    const std::int64_t n = t.total;
    const double nd = static_cast<double>(n);

    // log k! for k in [0, n]
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::int64_t k = 2; k <= n; ++k)
        log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));

    double emi = 0.0;
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        const std::int64_t ai = t.row_sums[i];
        if (ai == 0) continue;
        for (std::size_t j = 0; j < t.n_cols; ++j) {
            const std::int64_t bj = t.col_sums[j];
            if (bj == 0) continue;
            const std::int64_t lo = std::max<std::int64_t>(1, ai + bj - n);
            const std::int64_t hi = std::min(ai, bj);
            const double log_outer = log_fact[ai] + log_fact[bj] + log_fact[n - ai] +
                                     log_fact[n - bj] - log_fact[n];
            for (std::int64_t nij = lo; nij <= hi; ++nij) {
                const double log_p = log_outer - log_fact[nij] - log_fact[ai - nij] -
                                     log_fact[bj - nij] - log_fact[n - ai - bj + nij];
                const double term = (static_cast<double>(nij) / nd) *
                                    std::log(nd * static_cast<double>(nij) /
                                             (static_cast<double>(ai) * static_cast<double>(bj)));
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

namespace {

double normalize_entry(AmiNormalizer norm, double ha, double hb) {
    switch (norm) {
        case AmiNormalizer::max_entropy: return std::max(ha, hb);
        case AmiNormalizer::min_entropy: return std::min(ha, hb);
        case AmiNormalizer::sqrt_entropy: return std::sqrt(ha * hb);
        case AmiNormalizer::mean_entropy: return 0.5 * (ha + hb);
    }
    throw std::invalid_argument("unknown AMI normalizer");
}

ContingencyTable transpose(const ContingencyTable& t) {
    ContingencyTable out;
    out.n_rows = t.n_cols;
    out.n_cols = t.n_rows;
    out.counts.resize(t.counts.size());
    for (std::size_t i = 0; i < t.n_rows; ++i)
        for (std::size_t j = 0; j < t.n_cols; ++j) out.counts[j * out.n_cols + i] = t.at(i, j);
    out.row_sums = t.col_sums;
    out.col_sums = t.row_sums;
    out.total = t.total;
    return out;
}

// Swapping the arguments transposes the table; summation order would then
// differ in the last ulp. A canonical orientation makes ami(a,b) == ami(b,a)
// bit-exact.
ContingencyTable canonical_orientation(ContingencyTable t) {
    if (t.n_rows > t.n_cols) return transpose(t);
    if (t.n_rows == t.n_cols) {
        const ContingencyTable flipped = transpose(t);
        if (flipped.counts < t.counts) return flipped;
    }
    return t;
}

// Partitions are equivalent iff they are relabelings of each other: every
// row and every column of the table touches exactly one cell.
bool equivalent_partitions(const ContingencyTable& t) {
    if (t.n_rows != t.n_cols) return false;
    for (std::size_t i = 0; i < t.n_rows; ++i) {
        int nonzero = 0;
        for (std::size_t j = 0; j < t.n_cols; ++j) nonzero += t.at(i, j) != 0 ? 1 : 0;
        if (nonzero != 1) return false;
    }
    for (std::size_t j = 0; j < t.n_cols; ++j) {
        int nonzero = 0;
        for (std::size_t i = 0; i < t.n_rows; ++i) nonzero += t.at(i, j) != 0 ? 1 : 0;
        if (nonzero != 1) return false;
    }
    return true;
}

}  // namespace

double ami_full(std::span<const int> pred, std::span<const int> truth, AmiNormalizer normalizer) {
    const ContingencyTable t = canonical_orientation(build_contingency(truth, pred));
    if (equivalent_partitions(t)) return 1.0;
    if (t.n_rows == 1 || t.n_cols == 1) return 0.0;

    const double mi = mutual_information(t);
    const double emi = expected_mutual_information(t);
    const double norm = normalize_entry(normalizer, entropy_rows(t), entropy_cols(t));
    const double denom = norm - emi;
    if (std::abs(denom) < 1e-12) return std::abs(mi - norm) < 1e-12 ? 1.0 : 0.0;
    return (mi - emi) / denom;
}

double ami(std::span<const int> pred, std::span<const int> truth,
           std::span<const std::uint8_t> eval_mask, AmiNormalizer normalizer) {
    if (pred.size() != truth.size() || pred.size() != eval_mask.size())
        throw std::invalid_argument("ami: label/mask lengths differ");
    std::vector<int> p, q;
    for (std::size_t i = 0; i < eval_mask.size(); ++i) {
        if (!eval_mask[i]) continue;
        p.push_back(pred[i]);
        q.push_back(truth[i]);
    }
    if (p.empty()) throw std::invalid_argument("ami: evaluation mask is empty");
    return ami_full(p, q, normalizer);
}

std::vector<int> hard_labels(const Assignment& gamma) {
    std::vector<int> labels(gamma.pixel_count());
    for (std::size_t i = 0; i < gamma.pixel_count(); ++i) {
        const double* row = gamma.gamma.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < gamma.cluster_count(); ++c)
            if (row[c] > row[best]) best = c;
        labels[i] = static_cast<int>(best);
    }
    return labels;
}

double confidence(const Assignment& gamma, std::span<const std::uint8_t> eval_mask) {
    if (eval_mask.size() != gamma.pixel_count())
        throw std::invalid_argument("confidence: mask length mismatch");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < gamma.pixel_count(); ++i) {
        if (!eval_mask[i]) continue;
        const double* row = gamma.gamma.row(i);
        double best = row[0];
        for (std::size_t c = 1; c < gamma.cluster_count(); ++c) best = std::max(best, row[c]);
        sum += best;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("confidence: evaluation mask is empty");
    return sum / static_cast<double>(count);
}

ScoreResult score_dataset(const DaeModel& model, const std::vector<LabeledExample>& examples,
                          const RcConfig& cfg, int n_threads, AmiNormalizer normalizer) {
    if (examples.empty()) throw std::invalid_argument("score_dataset: no examples");
    ScoreResult result;
    result.per_example.resize(examples.size());

    Rng root(cfg.seed);
    parallel_for(examples.size(), n_threads, [&](std::size_t i) {
        Score& score = result.per_example[i];
        try {
            RcConfig run_cfg = cfg;
            run_cfg.seed = root.substream(stream::example).substream(i).seed();
            run_cfg.record_snapshots = false;
            const RcTrace trace = run_rc(model, examples[i].image, run_cfg);
            const auto pred = hard_labels(trace.final_assignment);
            const auto truth = true_labels(examples[i].truth);
            score.ami = ami(pred, truth, examples[i].truth.eval_mask, normalizer);
            score.confidence = confidence(trace.final_assignment, examples[i].truth.eval_mask);
            score.evaluated_pixels = count_lit(examples[i].truth.eval_mask);
            score.iterations = trace.final_iteration;
            score.final_ll = trace.final_log_likelihood();
            score.converged = trace.converged;
            score.ok = true;
        } catch (const std::exception& e) {
            score.ok = false;
            score.error = e.what();
        }
    });

    ScoreSummary& s = result.summary;
    double sum = 0.0, sum_conf = 0.0;
    for (const Score& sc : result.per_example) {
        if (!sc.ok) {
            ++s.failed;
            continue;
        }
        ++s.succeeded;
        sum += sc.ami;
        sum_conf += sc.confidence;
    }
    if (s.succeeded > 0) {
        s.mean_ami = sum / s.succeeded;
        s.mean_confidence = sum_conf / s.succeeded;
        double ss = 0.0;
        for (const Score& sc : result.per_example)
            if (sc.ok) ss += (sc.ami - s.mean_ami) * (sc.ami - s.mean_ami);
        s.std_ami = s.succeeded > 1 ? std::sqrt(ss / (s.succeeded - 1)) : 0.0;
    }
    return result;
}

void write_score_csv(const ScoreResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_score_csv: cannot open " + path);
    out << "index,ami,confidence,iterations,final_ll,ok,error\n";
    char buf[160];
    for (std::size_t i = 0; i < result.per_example.size(); ++i) {
        const Score& s = result.per_example[i];
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%d,%.10g,%d,", i, s.ami, s.confidence,
                      s.iterations, s.final_ll, s.ok ? 1 : 0);
        out << buf << s.error << "\n";
    }
}

void write_score_summary_json(const ScoreResult& result, const RcConfig& cfg,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_score_summary_json: cannot open " + path);
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"mean_ami\":%.10g,\"std_ami\":%.10g,\"mean_confidence\":%.10g,"
                  "\"succeeded\":%d,\"failed\":%d,\"config\":{\"k\":%d,\"max_iters\":%d,"
                  "\"ll_tolerance\":%.10g,\"assignment_mode\":\"%s\",\"seed\":%llu}}",
                  result.summary.mean_ami, result.summary.std_ami,
                  result.summary.mean_confidence, result.summary.succeeded,
                  result.summary.failed, cfg.k, cfg.max_iters, cfg.ll_tolerance,
                  to_string(cfg.assignment_mode).c_str(),
                  static_cast<unsigned long long>(cfg.seed));
    out << buf << "\n";
}

std::string to_string(AmiNormalizer n) {
    switch (n) {
        case AmiNormalizer::max_entropy: return "max";
        case AmiNormalizer::min_entropy: return "min";
        case AmiNormalizer::sqrt_entropy: return "sqrt";
        case AmiNormalizer::mean_entropy: return "mean";
    }
    throw std::invalid_argument("unknown AMI normalizer");
}

AmiNormalizer normalizer_from_string(const std::string& s) {
    if (s == "max") return AmiNormalizer::max_entropy;
    if (s == "min") return AmiNormalizer::min_entropy;
    if (s == "sqrt") return AmiNormalizer::sqrt_entropy;
    if (s == "mean") return AmiNormalizer::mean_entropy;
    throw std::invalid_argument("unknown AMI normalizer '" + s + "'");
}

}  // namespace rcbind

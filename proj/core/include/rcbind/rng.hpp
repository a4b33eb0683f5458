#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace rcbind {

// Seeded 64-bit generator (splitmix64). The whole pipeline routes its
// randomness through this type so that a run is a pure function of its seed:
// the stream is bit-exact across platforms and compilers.
//
// Consumers that must not perturb each other (dataset generation, weight
// init, corruption noise, cluster init, ...) each own a substream derived
// from the constructing seed, not from the current state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // Uniform in [0,1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo,hi); with log_scale, exp(Uniform(ln lo, ln hi)).
    double uniform(double lo, double hi, bool log_scale = false) {
        if (!(lo < hi))
            throw std::invalid_argument("Rng::uniform: need lo < hi, got [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + ")");
        if (log_scale) {
            if (!(lo > 0.0))
                throw std::invalid_argument("Rng::uniform: log scale needs lo > 0, got " +
                                            std::to_string(lo));
            return std::exp(uniform(std::log(lo), std::log(hi)));
        }
        return lo + (hi - lo) * uniform01();
    }

    // Index drawn with probability probs[i]. probs must lie on the simplex.
    std::size_t categorical(std::span<const double> probs) {
        if (probs.empty())
            throw std::invalid_argument("Rng::categorical: empty probability vector");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0))
                throw std::invalid_argument("Rng::categorical: negative probability " +
                                            std::to_string(p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("Rng::categorical: probabilities sum to " +
                                        std::to_string(sum) + ", not 1");
        double u = uniform01();
        double cum = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] > 0.0) last_positive = i;
            cum += probs[i];
            if (u < cum) return i;
        }
        return last_positive;  // u landed in the top rounding gap
    }

    // Unbiased integer in [0,n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t rem =
            (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;  // 2^64 mod n
        std::uint64_t v = next_u64();
        if (rem != 0) {
            const std::uint64_t limit = 0 - rem;
            while (v >= limit) v = next_u64();
        }
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        if (v.empty()) throw std::invalid_argument("Rng::pick: empty set");
        return v[below(v.size())];
    }

    // Substream keyed on (constructing seed, key). Independent of how many
    // values the parent has produced, so consumers can be added or reordered
    // without shifting each other's streams.
    Rng substream(std::uint64_t key) const {
        return Rng(mix64(seed_ ^ mix64(key + 0x9e3779b97f4a7c15ull)));
    }

    std::uint64_t seed() const { return seed_; }

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

// Fixed substream keys, one per randomness consumer.
namespace stream {
constexpr std::uint64_t dataset_gen = 0x01;
constexpr std::uint64_t weight_init = 0x02;
constexpr std::uint64_t shuffle = 0x03;
constexpr std::uint64_t train_noise = 0x04;
constexpr std::uint64_t val_noise = 0x05;
constexpr std::uint64_t rc_init = 0x06;
constexpr std::uint64_t trial = 0x07;
constexpr std::uint64_t example = 0x08;
}  // namespace stream

}  // namespace rcbind

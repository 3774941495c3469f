#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace herit {

// splitmix64 finalizer, used to key independent streams off (seed, cell, rep, tag).
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// One reproducible stream. Streams derived from distinct key paths are
// statistically independent for simulation purposes; the derivation does not
// depend on thread scheduling, so results are identical for any worker count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : RngStream(seed, {}) {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t k = mix64(seed);
        for (std::uint64_t p : path) k = mix64(k ^ mix64(p));
        id_ = k;
        std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                          static_cast<std::uint32_t>(mix64(k)), static_cast<std::uint32_t>(mix64(k) >> 32)};
        engine_.seed(seq);
    }

    std::uint64_t id() const { return id_; }

    double normal() { return normal_(engine_); }
    double uniform01() { return uniform_(engine_); }
    bool bernoulli(double p) { return uniform_(engine_) < p; }

    double student_t(double nu) {
        std::student_t_distribution<double> d(nu);
        return d(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::uint64_t id_ = 0;
};

// Stream tags: every consumer of randomness inside one replicate gets its own
// derived stream so the draw order of one component can change without
// perturbing the others (and so X and the reference panel stay independent).
namespace stream_tag {
inline constexpr std::uint64_t predictors = 1;
inline constexpr std::uint64_t coefficients = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t reference_panel = 4;
inline constexpr std::uint64_t shift_vector = 5;
inline constexpr std::uint64_t labels = 6;
}  // namespace stream_tag

}  // namespace herit

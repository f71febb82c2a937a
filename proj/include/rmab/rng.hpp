#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rmab {

// splitmix64; used to derive independent seeds for sub-streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(base);
    for (std::uint64_t p : path) s = mix64(s ^ mix64(p));
    return s;
}

// Seedable 64-bit generator. Sub-streams are derived deterministically so
// parallel repetitions stay reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

    Rng stream(std::uint64_t idx) const { return Rng(derive_seed(seed_, {idx})); }
    Rng stream(std::uint64_t a, std::uint64_t b) const { return Rng(derive_seed(seed_, {a, b})); }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace rmab

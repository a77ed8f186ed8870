#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace perceptlab {

// Counter-based randomness. Every draw is a pure function of
// (seed, stream, counter), so results do not depend on evaluation order
// and parallel producers agree bit-exactly with serial ones.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Distinct draw streams within one seed.
enum class Stream : std::uint64_t {
    base_macro = 1,
    base_chroma = 2,
    base_texture = 3,
    noise = 4,
    jitter = 5,
    brightness_sign = 6,
    param_init = 7,
    shuffle = 8,
    split = 9,
    grad_probe = 10,
};

std::uint64_t counter_bits(std::uint64_t seed, Stream stream, std::uint64_t counter);

// Uniform in [0, 1).
double counter_uniform(std::uint64_t seed, Stream stream, std::uint64_t counter);

// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
double counter_gaussian(std::uint64_t seed, Stream stream, std::uint64_t k);

// Integer uniform in [lo, hi], inclusive.
std::int64_t counter_int(std::uint64_t seed, Stream stream, std::uint64_t counter,
                         std::int64_t lo, std::int64_t hi);

// FNV-1a over bytes; stable across platforms. Used for sample seeds and
// content digests.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xCBF29CE484222325ull);
std::uint64_t fnv1a64_mix(std::uint64_t value, std::uint64_t basis);

// Tiny sequential generator for shuffles; keyed by an explicit seed so the
// whole sequence is reproducible.
class SequenceRng {
public:
    explicit SequenceRng(std::uint64_t seed) : state_(splitmix64(seed)) {}
    std::uint64_t next_bits() {
        state_ = splitmix64(state_);
        return state_;
    }
    // Uniform integer in [0, n), n > 0. Rejection-sampled, no modulo bias.
    std::uint64_t next_below(std::uint64_t n);

private:
    std::uint64_t state_;
};

template <typename T>
void fisher_yates(std::uint64_t seed, std::vector<T>& v) {
    SequenceRng rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace perceptlab

#include "perceptlab/rng.hpp"

#include <cmath>

namespace perceptlab {

std::uint64_t counter_bits(std::uint64_t seed, Stream stream, std::uint64_t counter) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ counter);
    return h;
}

double counter_uniform(std::uint64_t seed, Stream stream, std::uint64_t counter) {
    return static_cast<double>(counter_bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

double counter_gaussian(std::uint64_t seed, Stream stream, std::uint64_t k) {
    // u1 shifted into (0, 1] so the log is finite.
    double u1 = (static_cast<double>(counter_bits(seed, stream, 2 * k) >> 11) + 1.0) * 0x1.0p-53;
    double u2 = counter_uniform(seed, stream, 2 * k + 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * M_PI * u2);
}

std::int64_t counter_int(std::uint64_t seed, Stream stream, std::uint64_t counter,
                         std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    double u = counter_uniform(seed, stream, counter);
    std::uint64_t off = static_cast<std::uint64_t>(u * static_cast<double>(span));
    if (off >= span) off = span - 1;
    return lo + static_cast<std::int64_t>(off);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t fnv1a64_mix(std::uint64_t value, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xFF;
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t SequenceRng::next_below(std::uint64_t n) {
    // Lemire-style rejection via the top bits.
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = next_bits();
        if (r >= threshold) return r % n;
    }
}

}  // namespace perceptlab

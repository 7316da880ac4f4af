#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace svaport::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Seed of the named sub-stream derived from a campaign seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
    return splitmix64(seed ^ splitmix64(fnv1a(name)));
}

/// Only raw engine output is consumed below, so sequences are identical
/// across standard libraries (distributions are implementation-defined).
using Engine = std::mt19937_64;

inline Engine stream(std::uint64_t seed, std::string_view name) { return Engine(substream_seed(seed, name)); }

inline std::uint64_t bits(Engine& e, unsigned width) {
    std::uint64_t v = e();
    return width >= 64 ? v : (v & ((std::uint64_t{1} << width) - 1));
}

/// Uniform integer in [0, n) by rejection; n must be positive.
inline std::uint64_t below(Engine& e, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        std::uint64_t v = e();
        if (v < limit) return v % n;
    }
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffle(std::vector<T>& v, Engine& e) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(e, i)]);
}

}  // namespace svaport::rng

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fdcov {

using Stream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic stream for a tuple of integer keys. The same keys give the
/// same draws independently of which thread asks or in what order.
inline Stream make_stream(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(keys.size())};
    return Stream(seq);
}

/// FNV-1a, used to fold string identifiers into stream keys.
inline std::uint64_t hash_tag(const char* s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (; *s; ++s) {
        h ^= static_cast<unsigned char>(*s);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Master seed plus the rule that replicate b draws from stream (seed, b).
struct RngSpec {
    std::uint64_t master_seed = 0;

    Stream stream(std::uint64_t replicate) const { return make_stream({master_seed, replicate}); }
};

/// Uniform index in [0, n).
inline std::size_t uniform_index(Stream& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace fdcov

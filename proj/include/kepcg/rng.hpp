#ifndef KEPCG_RNG_HPP
#define KEPCG_RNG_HPP

#include <cstdint>
#include <random>

namespace kepcg {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent, reproducible RNG stream from a master seed.
/// Stream t is the same regardless of how many other streams were drawn,
/// so parallel consumers stay deterministic.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

}  // namespace kepcg

#endif

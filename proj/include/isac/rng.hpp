#pragma once

#include <cstdint>
#include <random>

namespace isac {

using Rng = std::mt19937_64;

/// Named random streams. Each stream is seeded independently from the
/// master seed so that e.g. noise draws never shift when the pilot layout
/// changes.
enum class Stream : std::uint64_t {
    pilots = 1,
    pilot_symbols = 2,
    data = 3,
    noise = 4,
    path_phase = 5,
    mutual_information = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(stream) ^ splitmix64(index)));
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
    return Rng(derive_seed(master, stream, index));
}

// Unbiased integer in [0, n). Avoids uniform_int_distribution so draws do not
// depend on the standard library implementation.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t threshold = (std::uint64_t{0} - n) % n;
    std::uint64_t v = rng();
    while (v < threshold) v = rng();
    return v % n;
}

}  // namespace isac

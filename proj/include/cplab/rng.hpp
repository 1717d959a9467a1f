#pragma once

#include <cmath>
#include <cstdint>

namespace cplab::rng {

/// Counter-based generator (splitmix64). One instance per logical substream;
/// the full state is a single 64-bit word, so substreams are cheap to derive
/// and bit-reproducible across runs and platforms.
class Splitmix64 {
public:
    explicit Splitmix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Single mixing round, used to hash (seed, word) pairs into fresh seeds.
inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a substream seed from a parent seed and an index word.
/// Distinct (seed, word) pairs map to statistically independent streams.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t word) {
    return mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ (word * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return derive(derive(seed, a, b), c);
}

/// Map a 64-bit word to (0, 1]. The +1 keeps log() finite.
inline double to_unit(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

inline double uniform(Splitmix64& g) { return to_unit(g.next()); }

/// Exponential variate via inverse CDF; avoids libstdc++-specific
/// distributions so arrival streams are reproducible byte-for-byte.
inline double exponential(Splitmix64& g, double rate) {
    return -std::log(to_unit(g.next())) / rate;
}

/// Uniform integer in [0, n). Rejection-free modulo is fine here: n is
/// always tiny compared to 2^64, so the bias is far below statistical noise.
inline std::uint64_t below(Splitmix64& g, std::uint64_t n) { return g.next() % n; }

}  // namespace cplab::rng

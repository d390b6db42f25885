#pragma once

#include <cstdint>

namespace fpa {

/// SplitMix64 (Steele, Lea, Flood 2014). Used only to expand a 64-bit seed
/// into xoshiro state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman, Vigna). State words are filled with four
/// successive SplitMix64 outputs of the seed. All derived draws are defined
/// here so generated data is identical on every platform with IEEE doubles:
///   uniform01() = (next() >> 11) * 2^-53                  in [0, 1)
///   uniform(a, b) = a + (b - a) * uniform01()
///   normal() = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)         (one value per call)
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    double normal();

private:
    std::uint64_t s_[4];
};

}  // namespace fpa

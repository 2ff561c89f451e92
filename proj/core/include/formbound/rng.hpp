#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace formbound {

/// Deterministic splittable RNG. Streams derive from a root seed and a label,
/// so probe batches can run in any order and still reproduce bit-exactly.
/// Gaussian variates use an explicit Box-Muller so the sequence does not
/// depend on the standard library implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {
        // decorrelate trivial seeds
        next_u64();
        next_u64();
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal (Box-Muller, no cached spare: keeps streams splittable).
    double gaussian();

    /// Independent stream derived from the root seed and a label.
    Rng split(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (char ch : label) {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
        return Rng(seed_ ^ h);
    }

    Rng split(std::uint64_t index) const {
        return Rng(seed_ ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    }

  private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

inline double Rng::gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace formbound

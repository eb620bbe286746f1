/**
 * Shared scalar types, error classes and seeded random streams.
 */
#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kbkk {

using Complex = std::complex<double>;

/// Raised when a size argument is outside the admissible range.
class InvalidSize : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the file readers. `where()` carries a JSON path or line number.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::string where)
        : std::runtime_error(where.empty() ? what : what + " (at " + where + ")"),
          where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

  private:
    std::string where_;
};

/// Internal consistency failure in the combinatorial or numerical engine.
class ComputeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// splitmix64 step
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Derive an independent seed for one purpose ("graph", "params", "lifting",
 * "gamma", ...) from a root seed, so each random stream can be replayed alone.
 */
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                                    std::uint64_t index = 0) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return mix64(mix64(root ^ h) + index);
}

/**
 * Small deterministic generator (xoshiro256**). Unlike the standard
 * distributions its floating-point draws are identical on every platform.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) noexcept {
        std::uint64_t z = seed;
        for (auto& s : state_) {
            z = mix64(z);
            s = z;
        }
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept {
        // Lemire's multiply-shift; the bias is irrelevant at our bounds.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    Complex unit_circle() noexcept {
        const double phi = uniform(-std::numbers::pi, std::numbers::pi);
        return {std::cos(phi), std::sin(phi)};
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace kbkk

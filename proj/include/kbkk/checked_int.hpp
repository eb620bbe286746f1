/**
 * 128-bit signed integer that throws `IntegerOverflow` instead of wrapping.
 * Used as the fast path of the exact integer-pivoting simplex; callers catch
 * the overflow and redo the computation with arbitrary precision.
 */
#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include "kbkk/bigint.hpp"

namespace kbkk {

class IntegerOverflow : public std::overflow_error {
  public:
    IntegerOverflow() : std::overflow_error("128-bit integer overflow") {}
};

class CheckedInt128 {
  public:
    using raw_type = __int128;

    constexpr CheckedInt128() noexcept = default;
    constexpr CheckedInt128(long long v) noexcept : v_(v) {}  // NOLINT: implicit on purpose
    static constexpr CheckedInt128 from_raw(raw_type v) noexcept {
        CheckedInt128 r;
        r.v_ = v;
        return r;
    }
    constexpr raw_type raw() const noexcept { return v_; }

    friend CheckedInt128 operator+(CheckedInt128 a, CheckedInt128 b) {
        raw_type r;
        if (__builtin_add_overflow(a.v_, b.v_, &r)) throw IntegerOverflow();
        return from_raw(r);
    }
    friend CheckedInt128 operator-(CheckedInt128 a, CheckedInt128 b) {
        raw_type r;
        if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw IntegerOverflow();
        return from_raw(r);
    }
    friend CheckedInt128 operator*(CheckedInt128 a, CheckedInt128 b) {
        raw_type r;
        if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw IntegerOverflow();
        return from_raw(r);
    }
    friend CheckedInt128 operator/(CheckedInt128 a, CheckedInt128 b) {
        if (b.v_ == -1) return -a;
        return from_raw(a.v_ / b.v_);
    }
    friend CheckedInt128 operator%(CheckedInt128 a, CheckedInt128 b) { return from_raw(a.v_ % b.v_); }
    CheckedInt128 operator-() const {
        if (v_ == min_raw()) throw IntegerOverflow();
        return from_raw(-v_);
    }
    CheckedInt128& operator+=(CheckedInt128 b) { return *this = *this + b; }
    CheckedInt128& operator-=(CheckedInt128 b) { return *this = *this - b; }
    CheckedInt128& operator*=(CheckedInt128 b) { return *this = *this * b; }
    CheckedInt128& operator/=(CheckedInt128 b) { return *this = *this / b; }

    friend constexpr auto operator<=>(CheckedInt128 a, CheckedInt128 b) noexcept = default;
    friend constexpr bool operator==(CheckedInt128 a, CheckedInt128 b) noexcept = default;

    BigInt to_big() const {
        const bool neg = v_ < 0;
        unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v_ + 1)) + 1 : static_cast<unsigned __int128>(v_);
        BigInt hi = static_cast<std::uint64_t>(u >> 64);
        BigInt r = (hi << 64) + static_cast<std::uint64_t>(u);
        return neg ? BigInt(-r) : r;
    }

    friend std::ostream& operator<<(std::ostream& os, CheckedInt128 a) { return os << a.to_big(); }

  private:
    static constexpr raw_type min_raw() noexcept { return static_cast<raw_type>(static_cast<unsigned __int128>(1) << 127); }
    raw_type v_ = 0;
};

inline int sign(const CheckedInt128& a) noexcept { return a.raw() > 0 ? 1 : (a.raw() < 0 ? -1 : 0); }
inline int sign(const BigInt& a) { return a.sign(); }
inline BigInt to_big(const CheckedInt128& a) { return a.to_big(); }
inline BigInt to_big(const BigInt& a) { return a; }

}  // namespace kbkk

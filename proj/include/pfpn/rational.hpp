#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "pfpn/error.hpp"

namespace pfpn {

/// Exact rational with 64-bit reduced representation and 128-bit intermediates.
/// Values that no longer fit after gcd reduction raise errc::internal; the nets
/// handled here are far below that size.
class Rational {
public:
    Rational() = default;
    Rational(long long n) : num_(n) {}
    Rational(long long n, long long d) { *this = make(n, d); }

    long long num() const { return num_; }
    long long den() const { return den_; }
    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) fail_internal("rational division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { return make(-i128(num_), den_); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// "3/4", or just "3" for integers.
    std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

private:
    using i128 = __int128;

    static Rational make(i128 n, i128 d) {
        if (d == 0) fail_internal("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr i128 lo = INT64_MIN, hi = INT64_MAX;
        if (n < lo || n > hi || d > hi) fail_internal("rational overflow");
        Rational r;
        r.num_ = static_cast<long long>(n);
        r.den_ = static_cast<long long>(d);
        return r;
    }

    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    long long num_ = 0;
    long long den_ = 1;
};

inline Rational abs(const Rational& r) { return r < Rational(0) ? -r : r; }

} // namespace pfpn

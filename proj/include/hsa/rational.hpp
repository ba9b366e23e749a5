#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include "hsa/error.hpp"

namespace hsa {

/// Exact fraction with int64 parts, always normalized (den > 0, gcd 1).
/// Magnitudes stay tiny here (rates are ratios of small replication
/// counts), so int64 never overflows in practice.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {} // NOLINT(google-explicit-constructor)
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) raise(Errc::DivisionByZero, "rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    friend Rational operator+(Rational a, Rational b) {
        return {a.num * b.den + b.num * a.den, a.den * b.den};
    }
    friend Rational operator-(Rational a, Rational b) {
        return {a.num * b.den - b.num * a.den, a.den * b.den};
    }
    friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num == 0) raise(Errc::DivisionByZero, "rational division by zero");
        return {a.num * b.den, a.den * b.num};
    }
    Rational& operator+=(Rational b) { return *this = *this + b; }
    Rational& operator-=(Rational b) { return *this = *this - b; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(Rational a, Rational b) {
        return a.num * b.den <=> b.num * a.den;
    }

    bool is_integer() const noexcept { return den == 1; }

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

inline Rational min(Rational a, Rational b) { return a < b ? a : b; }
inline Rational max(Rational a, Rational b) { return a < b ? b : a; }

} // namespace hsa

#pragma once

#include <cstdint>
#include <random>

#include "hsa/error.hpp"

namespace hsa {

/// Deterministic Miller-Rabin, valid for all n < 2^64.
bool is_prime(std::uint64_t n);

/// Cheap bijective bit mixer; derives secondary seeds (verification sweeps,
/// audits) that stay off the construction stream.
std::uint64_t mix_seed(std::uint64_t x);

/// Prime field F_q. Elements are plain uint64_t values in [0, q); the
/// context performs all arithmetic. Immutable and freely copyable, so one
/// context can be shared across matrices, schemes and threads.
class FieldCtx {
public:
    /// Throws NonPrimeModulus unless 2 <= q < 2^62 and q is prime.
    explicit FieldCtx(std::uint64_t q);

    std::uint64_t q() const noexcept { return q_; }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const noexcept {
        std::uint64_t s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const noexcept {
        return a >= b ? a - b : a + q_ - b;
    }
    std::uint64_t neg(std::uint64_t a) const noexcept { return a == 0 ? 0 : q_ - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q_);
    }

    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const noexcept;

    /// Multiplicative inverse; throws DivisionByZero on a == 0.
    std::uint64_t inv(std::uint64_t a) const;
    std::uint64_t div(std::uint64_t a, std::uint64_t b) const { return mul(a, inv(b)); }

    /// Reduce a signed integer into [0, q); negatives wrap.
    std::uint64_t from_int(long long v) const noexcept;

    /// num/den as a field element; throws DenominatorVanishes when q | den.
    std::uint64_t from_rational(long long num, long long den) const;

    bool operator==(const FieldCtx&) const = default;

private:
    std::uint64_t q_;
};

/// Seeded generator with a fixed, portable output sequence (mt19937_64 plus
/// rejection sampling, never std::uniform_int_distribution). Identical seeds
/// give identical draw sequences on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform draw from [0, n), exact via rejection.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Uniform field element.
    std::uint64_t field_element(const FieldCtx& f) { return uniform_below(f.q()); }

private:
    std::mt19937_64 eng_;
};

} // namespace hsa

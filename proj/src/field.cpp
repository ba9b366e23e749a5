#include "hsa/field.hpp"

#include <array>

namespace hsa {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t n) {
    std::uint64_t r = 1 % n;
    a %= n;
    while (e) {
        if (e & 1) r = mulmod(r, a, n);
        a = mulmod(a, a, n);
        e >>= 1;
    }
    return r;
}

} // namespace

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These witnesses decide primality for every n < 2^64.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldCtx::FieldCtx(std::uint64_t q) : q_(q) {
    if (q < 2 || q >= (1ull << 62) || !is_prime(q))
        raise(Errc::NonPrimeModulus, "modulus " + std::to_string(q) + " is not a prime in [2, 2^62)");
}

std::uint64_t FieldCtx::pow(std::uint64_t a, std::uint64_t e) const noexcept {
    return powmod(a, e, q_);
}

std::uint64_t FieldCtx::inv(std::uint64_t a) const {
    if (a == 0) raise(Errc::DivisionByZero, "inverse of zero");
    // Extended Euclid; q prime guarantees gcd(a, q) = 1.
    long long t = 0, new_t = 1;
    long long r = static_cast<long long>(q_), new_r = static_cast<long long>(a);
    while (new_r != 0) {
        long long quot = r / new_r;
        long long tmp = t - quot * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - quot * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (t < 0) t += static_cast<long long>(q_);
    return static_cast<std::uint64_t>(t);
}

std::uint64_t FieldCtx::from_int(long long v) const noexcept {
    long long m = v % static_cast<long long>(q_);
    if (m < 0) m += static_cast<long long>(q_);
    return static_cast<std::uint64_t>(m);
}

std::uint64_t FieldCtx::from_rational(long long num, long long den) const {
    std::uint64_t d = from_int(den);
    if (d == 0)
        raise(Errc::DenominatorVanishes,
              "denominator " + std::to_string(den) + " vanishes mod " + std::to_string(q_));
    return mul(from_int(num), inv(d));
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) raise(Errc::DivisionByZero, "uniform_below(0)");
    if (n == 1) return 0;
    // Reject draws above the largest multiple of n to keep the
    // distribution exactly uniform.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        std::uint64_t v = eng_();
        if (v < limit) return v % n;
    }
}

} // namespace hsa

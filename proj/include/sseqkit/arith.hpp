#pragma once

// Integer helpers shared by the scalar types: valuations, checked powers,
// modular inverses and small factorizations.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sseqkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool is_prime(std::uint64_t n)
{
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

/// Largest e with p^e | m.
inline int valuation(std::int64_t m, std::int64_t p)
{
    if (m == 0)
        throw Error("valuation undefined");
    if (p < 2)
        throw Error("valuation: base must be >= 2");
    int e = 0;
    while (m % p == 0) {
        m /= p;
        ++e;
    }
    return e;
}

/// base^exp, throwing instead of overflowing.
inline std::uint64_t checked_pow(std::uint64_t base, unsigned exp)
{
    std::uint64_t result = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base)
            throw Error("integer overflow in power " + std::to_string(base) + "^" + std::to_string(exp));
        result *= base;
    }
    return result;
}

/// Nonnegative residue of a mod m.
inline std::int64_t mod_floor(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

inline std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b)
{
    while (b != 0) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m)
{
    if (m == 1)
        return 0;
    __int128 old_r = static_cast<__int128>(a % m), r = m;
    __int128 old_s = 1, s = 0;
    while (r != 0) {
        __int128 q = old_r / r;
        __int128 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1)
        throw Error("mod_inverse: " + std::to_string(a) + " is not invertible modulo " + std::to_string(m));
    __int128 res = old_s % static_cast<__int128>(m);
    if (res < 0)
        res += m;
    return static_cast<std::uint64_t>(res);
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m)
{
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1)
            result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Prime factorization as (prime, exponent) pairs, primes ascending.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n)
{
    std::vector<std::pair<std::uint64_t, int>> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d != 0)
            continue;
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        out.emplace_back(d, e);
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

/// Smallest generator of (Z/p)^x.
inline std::uint64_t primitive_root(std::uint64_t p)
{
    if (!is_prime(p))
        throw Error("primitive_root: " + std::to_string(p) + " is not prime");
    if (p == 2)
        return 1;
    auto fac = factorize(p - 1);
    for (std::uint64_t g = 2; g < p; ++g) {
        bool ok = true;
        for (auto [q, e] : fac) {
            if (pow_mod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok)
            return g;
    }
    throw Error("primitive_root: none found");
}

}  // namespace sseqkit

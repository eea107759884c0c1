#pragma once

// Truncated p-adic integers: residues modulo p^K.

#include <cstdint>
#include <string>

#include "sseqkit/arith.hpp"

namespace sseqkit {

/// Default number of p-adic digits carried by computations.
inline constexpr int kDefaultPrecision = 12;

class PAdicTruncated {
public:
    PAdicTruncated() = default;

    PAdicTruncated(std::uint64_t p, int precision, std::int64_t value) : p_(p), k_(precision)
    {
        if (!is_prime(p))
            throw Error("PAdicTruncated: " + std::to_string(p) + " is not prime");
        if (precision < 1)
            throw Error("PAdicTruncated: precision must be >= 1");
        modulus_ = checked_pow(p, static_cast<unsigned>(precision));
        if (modulus_ > (std::uint64_t{1} << 62))
            throw Error("PAdicTruncated: p^K exceeds 2^62");
        residue_ = static_cast<std::uint64_t>(mod_floor(value % static_cast<std::int64_t>(modulus_),
                                                        static_cast<std::int64_t>(modulus_)));
    }

    std::uint64_t prime() const { return p_; }
    int precision() const { return k_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t residue() const { return residue_; }

    bool is_zero() const { return residue_ == 0; }
    bool is_unit() const { return residue_ % p_ != 0; }

    /// p-adic valuation; K for zero (zero is indistinguishable from p^K).
    int valuation() const
    {
        if (residue_ == 0)
            return k_;
        int e = 0;
        std::uint64_t r = residue_;
        while (r % p_ == 0) {
            r /= p_;
            ++e;
        }
        return e;
    }

    PAdicTruncated zero_like() const { return from_residue(0); }
    PAdicTruncated one_like() const { return from_residue(1 % modulus_); }
    PAdicTruncated from_int(std::int64_t v) const { return PAdicTruncated(p_, k_, v); }

    PAdicTruncated operator+(const PAdicTruncated& o) const
    {
        check(o);
        std::uint64_t s = residue_ + o.residue_;
        return from_residue(s >= modulus_ ? s - modulus_ : s);
    }
    PAdicTruncated operator-(const PAdicTruncated& o) const
    {
        check(o);
        return from_residue(residue_ >= o.residue_ ? residue_ - o.residue_ : residue_ + modulus_ - o.residue_);
    }
    PAdicTruncated operator-() const { return from_residue(residue_ == 0 ? 0 : modulus_ - residue_); }
    PAdicTruncated operator*(const PAdicTruncated& o) const
    {
        check(o);
        return from_residue(mul_mod(residue_, o.residue_, modulus_));
    }
    PAdicTruncated& operator+=(const PAdicTruncated& o) { return *this = *this + o; }
    PAdicTruncated& operator-=(const PAdicTruncated& o) { return *this = *this - o; }
    PAdicTruncated& operator*=(const PAdicTruncated& o) { return *this = *this * o; }

    PAdicTruncated inverse() const
    {
        if (!is_unit())
            throw Error("PAdicTruncated: " + to_string() + " is not a unit");
        return from_residue(mod_inverse(residue_, modulus_));
    }

    PAdicTruncated pow(std::uint64_t e) const { return from_residue(pow_mod(residue_, e, modulus_)); }

    /// Write x = p^e * u with e = valuation(); returns u (its top e digits are 0).
    PAdicTruncated unit_part() const
    {
        if (residue_ == 0)
            return one_like();
        std::uint64_t r = residue_;
        while (r % p_ == 0)
            r /= p_;
        return from_residue(r);
    }

    /// Some y with p^e * y == x. Requires valuation() >= e.
    PAdicTruncated divide_by_p_power(int e) const
    {
        if (valuation() < e)
            throw Error("PAdicTruncated: inexact division by p^" + std::to_string(e));
        return from_residue(residue_ / checked_pow(p_, static_cast<unsigned>(e)));
    }

    /// Reduction Z/p^K -> Z/p^{K'} for K' <= K (a ring homomorphism).
    PAdicTruncated reduce(int new_precision) const
    {
        if (new_precision > k_)
            throw Error("PAdicTruncated::reduce: cannot raise precision");
        return PAdicTruncated(p_, new_precision, static_cast<std::int64_t>(residue_ % checked_pow(p_, new_precision)));
    }

    bool operator==(const PAdicTruncated& o) const
    {
        return p_ == o.p_ && k_ == o.k_ && residue_ == o.residue_;
    }
    bool operator!=(const PAdicTruncated& o) const { return !(*this == o); }

    std::string to_string() const
    {
        return std::to_string(residue_) + " mod " + std::to_string(p_) + "^" + std::to_string(k_);
    }

private:
    PAdicTruncated from_residue(std::uint64_t r) const
    {
        PAdicTruncated x;
        x.p_ = p_;
        x.k_ = k_;
        x.modulus_ = modulus_;
        x.residue_ = r;
        return x;
    }

    void check(const PAdicTruncated& o) const
    {
        if (p_ != o.p_ || k_ != o.k_)
            throw Error("mismatched p-adic rings");
    }

    std::uint64_t p_ = 2;
    int k_ = 1;
    std::uint64_t modulus_ = 2;
    std::uint64_t residue_ = 0;
};

inline bool same_ring(const PAdicTruncated& a, const PAdicTruncated& b)
{
    return a.prime() == b.prime() && a.precision() == b.precision();
}

}  // namespace sseqkit

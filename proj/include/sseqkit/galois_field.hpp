#pragma once

/*
 * Finite fields F_{p^n} with runtime (p, n).
 *
 * A field is described by its characteristic, degree and a monic modulus
 * polynomial. The modulus is chosen once per (p, n): it is the least monic
 * polynomial of degree n (coefficients compared from x^{n-1} down to x^0)
 * for which x has multiplicative order p^n - 1. Such a polynomial is
 * automatically irreducible and makes x a generator of the unit group.
 *
 * Descriptors are interned: GaloisField::get(p, n) always returns the same
 * object, so two elements belong to the same field iff their descriptor
 * pointers agree. Elements are small trivially copyable values.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sseqkit/arith.hpp"

namespace sseqkit {

class GfElement;

class GaloisField {
public:
    GaloisField(const GaloisField&) = delete;
    GaloisField& operator=(const GaloisField&) = delete;

    /// Canonical field F_{p^n}.
    static const GaloisField& get(std::uint32_t p, std::uint32_t n)
    {
        static std::mutex mutex;
        static std::map<std::pair<std::uint32_t, std::uint32_t>, std::unique_ptr<GaloisField>> registry;
        std::lock_guard<std::mutex> lock(mutex);
        auto key = std::make_pair(p, n);
        auto it = registry.find(key);
        if (it == registry.end())
            it = registry.emplace(key, std::unique_ptr<GaloisField>(new GaloisField(p, n))).first;
        return *it->second;
    }

    std::uint32_t characteristic() const { return p_; }
    std::uint32_t degree() const { return n_; }
    std::uint32_t order() const { return q_; }
    /// Monic modulus, coefficients low to high (size n + 1).
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }

    std::vector<std::uint32_t> coords(std::uint32_t code) const
    {
        std::vector<std::uint32_t> c(n_);
        for (std::uint32_t i = 0; i < n_; ++i) {
            c[i] = code % p_;
            code /= p_;
        }
        return c;
    }

    std::uint32_t encode(std::span<const std::uint32_t> c) const
    {
        if (c.size() != n_)
            throw Error("GaloisField::encode: expected " + std::to_string(n_) + " coordinates");
        std::uint32_t code = 0;
        for (std::size_t i = n_; i-- > 0;) {
            if (c[i] >= p_)
                throw Error("GaloisField::encode: coordinate out of range");
            code = code * p_ + c[i];
        }
        return code;
    }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const
    {
        if (n_ == 1)
            return (a + b) % p_;
        std::uint32_t code = 0, scale = 1;
        for (std::uint32_t i = 0; i < n_; ++i) {
            code += ((a % p_ + b % p_) % p_) * scale;
            a /= p_;
            b /= p_;
            scale *= p_;
        }
        return code;
    }

    std::uint32_t neg(std::uint32_t a) const
    {
        if (n_ == 1)
            return (p_ - a) % p_;
        std::uint32_t code = 0, scale = 1;
        for (std::uint32_t i = 0; i < n_; ++i) {
            code += ((p_ - a % p_) % p_) * scale;
            a /= p_;
            scale *= p_;
        }
        return code;
    }

    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const
    {
        if (n_ == 1)
            return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % p_);
        if (!mul_table_.empty())
            return mul_table_[static_cast<std::size_t>(a) * q_ + b];
        return poly_mul(a, b);
    }

    std::uint32_t inv(std::uint32_t a) const
    {
        if (a == 0)
            throw Error("inverse of zero in " + describe());
        if (n_ == 1)
            return static_cast<std::uint32_t>(mod_inverse(a, p_));
        // a^{q-2}
        std::uint32_t result = 1, base = a;
        std::uint64_t e = q_ - 2;
        while (e > 0) {
            if (e & 1)
                result = mul(result, base);
            base = mul(base, base);
            e >>= 1;
        }
        return result;
    }

    /// Code of the class of x, a generator of the unit group. For n = 1 the
    /// modulus is x - g and this is g.
    std::uint32_t generator() const { return n_ == 1 ? (p_ - modulus_[0]) % p_ : p_; }

    std::string describe() const
    {
        std::string s = "F_" + std::to_string(p_);
        if (n_ > 1)
            s += "^" + std::to_string(n_);
        return s;
    }

    std::string poly_string() const
    {
        std::string s;
        for (std::size_t i = modulus_.size(); i-- > 0;) {
            if (modulus_[i] == 0)
                continue;
            if (!s.empty())
                s += " + ";
            if (i == 0 || modulus_[i] != 1)
                s += std::to_string(modulus_[i]);
            if (i >= 1)
                s += "x";
            if (i >= 2)
                s += "^" + std::to_string(i);
        }
        return s;
    }

private:
    GaloisField(std::uint32_t p, std::uint32_t n) : p_(p), n_(n)
    {
        if (!is_prime(p))
            throw Error("GaloisField: characteristic " + std::to_string(p) + " is not prime");
        if (n < 1)
            throw Error("GaloisField: degree must be >= 1");
        q_ = static_cast<std::uint32_t>(checked_pow(p, n));
        if (q_ > (1u << 24))
            throw Error("GaloisField: field too large");
        modulus_ = find_modulus();
        if (n_ > 1 && q_ <= 512) {
            mul_table_.resize(static_cast<std::size_t>(q_) * q_);
            for (std::uint32_t a = 0; a < q_; ++a)
                for (std::uint32_t b = 0; b < q_; ++b)
                    mul_table_[static_cast<std::size_t>(a) * q_ + b] = poly_mul(a, b);
        }
    }

    std::uint32_t poly_mul(std::uint32_t a, std::uint32_t b) const
    {
        auto ca = coords(a), cb = coords(b);
        std::vector<std::uint64_t> prod(2 * n_ - 1, 0);
        for (std::uint32_t i = 0; i < n_; ++i)
            for (std::uint32_t j = 0; j < n_; ++j)
                prod[i + j] = (prod[i + j] + static_cast<std::uint64_t>(ca[i]) * cb[j]) % p_;
        for (std::size_t d = prod.size(); d-- > n_;) {
            std::uint64_t lead = prod[d];
            if (lead == 0)
                continue;
            // subtract lead * x^{d-n} * modulus
            for (std::uint32_t k = 0; k <= n_; ++k) {
                std::size_t idx = d - n_ + k;
                prod[idx] = (prod[idx] + (p_ - lead) * modulus_[k]) % p_;
            }
        }
        std::vector<std::uint32_t> out(n_);
        for (std::uint32_t i = 0; i < n_; ++i)
            out[i] = static_cast<std::uint32_t>(prod[i]);
        return encode(out);
    }

    std::uint32_t pow_code(std::uint32_t a, std::uint64_t e) const
    {
        std::uint32_t result = 1, base = a;
        while (e > 0) {
            if (e & 1)
                result = poly_mul(result, base);
            base = poly_mul(base, base);
            e >>= 1;
        }
        return result;
    }

    std::vector<std::uint32_t> find_modulus()
    {
        const std::uint64_t units = static_cast<std::uint64_t>(q_) - 1;
        auto fac = factorize(units);
        std::uint64_t count = checked_pow(p_, n_);
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            // most significant base-p digit of idx is the x^{n-1} coefficient
            std::vector<std::uint32_t> m(n_ + 1, 0);
            m[n_] = 1;
            std::uint64_t rest = idx;
            for (std::uint32_t i = 0; i < n_; ++i) {
                m[i] = static_cast<std::uint32_t>(rest % p_);
                rest /= p_;
            }
            if (n_ == 1) {
                // x = -m0 must be a primitive root mod p (p = 2: x = 1)
                std::uint32_t x = (p_ - m[0]) % p_;
                if (x == 0)
                    continue;
                bool ok = true;
                for (auto [r, e] : fac)
                    if (units > 1 && pow_mod(x, units / r, p_) == 1)
                        ok = false;
                if (ok)
                    return m;
                continue;
            }
            modulus_ = m;
            std::uint32_t x = p_;  // code of the polynomial x
            if (pow_code(x, units) != 1)
                continue;
            bool ok = true;
            for (auto [r, e] : fac)
                if (pow_code(x, units / r) == 1) {
                    ok = false;
                    break;
                }
            if (ok)
                return m;
        }
        throw Error("GaloisField: no primitive modulus found");
    }

    std::uint32_t p_ = 0, n_ = 0, q_ = 0;
    std::vector<std::uint32_t> modulus_;
    std::vector<std::uint32_t> mul_table_;
};

/// Element of a finite field; arithmetic across different fields throws.
class GfElement {
public:
    GfElement() = default;
    GfElement(const GaloisField& field, std::uint32_t code) : field_(&field), code_(code)
    {
        if (code >= field.order())
            throw Error("GfElement: code out of range");
    }

    /// Image of an integer in the prime subfield.
    static GfElement from_int(const GaloisField& field, std::int64_t value)
    {
        return GfElement(field, static_cast<std::uint32_t>(mod_floor(value, field.characteristic())));
    }

    static GfElement from_coords(const GaloisField& field, std::span<const std::uint32_t> coords)
    {
        return GfElement(field, field.encode(coords));
    }

    const GaloisField& field() const { return *field_; }
    const GaloisField* field_ptr() const { return field_; }
    std::uint32_t code() const { return code_; }
    std::vector<std::uint32_t> coords() const { return field_->coords(code_); }

    bool is_zero() const { return code_ == 0; }
    bool is_one() const { return code_ == 1; }
    bool in_prime_subfield() const { return code_ < field_->characteristic(); }

    GfElement zero_like() const { return GfElement(*field_, 0); }
    GfElement one_like() const { return GfElement(*field_, 1); }

    GfElement operator+(const GfElement& o) const { return {*field_, field_->add(code_, check(o))}; }
    GfElement operator-(const GfElement& o) const
    {
        return {*field_, field_->add(code_, field_->neg(check(o)))};
    }
    GfElement operator-() const { return {*field_, field_->neg(code_)}; }
    GfElement operator*(const GfElement& o) const { return {*field_, field_->mul(code_, check(o))}; }
    GfElement operator/(const GfElement& o) const
    {
        return {*field_, field_->mul(code_, field_->inv(check(o)))};
    }
    GfElement& operator+=(const GfElement& o) { return *this = *this + o; }
    GfElement& operator-=(const GfElement& o) { return *this = *this - o; }
    GfElement& operator*=(const GfElement& o) { return *this = *this * o; }

    GfElement inverse() const { return {*field_, field_->inv(code_)}; }

    GfElement pow(std::int64_t e) const
    {
        GfElement base = e < 0 ? inverse() : *this;
        std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
        GfElement result = one_like();
        while (k > 0) {
            if (k & 1)
                result *= base;
            base *= base;
            k >>= 1;
        }
        return result;
    }

    GfElement scaled(std::int64_t k) const { return *this * from_int(*field_, k); }

    bool operator==(const GfElement& o) const { return field_ == o.field_ && code_ == o.code_; }
    bool operator!=(const GfElement& o) const { return !(*this == o); }

    /// "2" in a prime field, "2x + 1" style otherwise.
    std::string to_string() const
    {
        if (field_->degree() == 1)
            return std::to_string(code_);
        if (code_ == 0)
            return "0";
        auto c = coords();
        std::string s;
        for (std::size_t i = c.size(); i-- > 0;) {
            if (c[i] == 0)
                continue;
            if (!s.empty())
                s += " + ";
            if (i == 0 || c[i] != 1)
                s += std::to_string(c[i]);
            if (i >= 1)
                s += "x";
            if (i >= 2)
                s += "^" + std::to_string(i);
        }
        return s;
    }

private:
    std::uint32_t check(const GfElement& o) const
    {
        if (field_ != o.field_)
            throw Error("mismatched field descriptors");
        return o.code_;
    }

    const GaloisField* field_ = nullptr;
    std::uint32_t code_ = 0;
};

inline bool same_ring(const GfElement& a, const GfElement& b) { return a.field_ptr() == b.field_ptr(); }

enum class FieldOp { add, mul, inv, neg };

/// Single entry point for the four field operations; `b` is required for add/mul.
inline GfElement field_arithmetic(FieldOp op, const GfElement& a, const GfElement* b = nullptr)
{
    switch (op) {
    case FieldOp::add:
        if (!b)
            throw Error("field_arithmetic: add needs two operands");
        return a + *b;
    case FieldOp::mul:
        if (!b)
            throw Error("field_arithmetic: mul needs two operands");
        return a * *b;
    case FieldOp::inv:
        return a.inverse();
    case FieldOp::neg:
        return -a;
    }
    throw Error("field_arithmetic: unknown op");
}

}  // namespace sseqkit

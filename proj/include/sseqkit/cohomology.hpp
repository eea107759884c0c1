#pragma once

/*
 * Group cohomology inputs.
 *
 * H^*(C_p; M) from the 2-periodic resolution
 *
 *     0 -> M --(sigma - 1)--> M --N--> M --(sigma - 1)--> M --> ...
 *
 * with N = 1 + sigma + ... + sigma^{p-1}, and continuous H^*_c(Z_p^x; Z_p(m))
 * for Z_p with u acting by u^m (p odd). Z_p-modules are modeled as free
 * Z/p^K-modules and every answer is checked at K and K + 2.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sseqkit/fin_ab_group.hpp"
#include "sseqkit/matrix.hpp"
#include "sseqkit/padic.hpp"
#include "sseqkit/smith.hpp"

namespace sseqkit {

/// Free Z_p-module of rank `sigma.size()` with a C_p-action given by an
/// integral matrix for a fixed generator.
struct CyclicModule {
    std::uint64_t p = 3;
    std::vector<std::vector<std::int64_t>> sigma;

    std::size_t rank() const { return sigma.size(); }

    static CyclicModule trivial(std::uint64_t p, std::size_t rank = 1)
    {
        CyclicModule m{p, std::vector<std::vector<std::int64_t>>(rank, std::vector<std::int64_t>(rank, 0))};
        for (std::size_t i = 0; i < rank; ++i)
            m.sigma[i][i] = 1;
        return m;
    }

    /// Z[C_p] with sigma cyclically permuting the basis.
    static CyclicModule regular(std::uint64_t p)
    {
        CyclicModule m{p, std::vector<std::vector<std::int64_t>>(p, std::vector<std::int64_t>(p, 0))};
        for (std::size_t i = 0; i < p; ++i)
            m.sigma[(i + 1) % p][i] = 1;
        return m;
    }

    PMatrix sigma_at(int K) const
    {
        PAdicTruncated zero(p, K, 0);
        PMatrix m(rank(), rank(), zero);
        for (std::size_t i = 0; i < rank(); ++i) {
            if (sigma[i].size() != rank())
                throw Error("CyclicModule: sigma must be square");
            for (std::size_t j = 0; j < rank(); ++j)
                m(i, j) = zero.from_int(sigma[i][j]);
        }
        return m;
    }
};

namespace detail {

template <class S>
Matrix<S> matrix_power(const Matrix<S>& m, std::uint64_t e)
{
    Matrix<S> out = Matrix<S>::identity(m.rows(), m.zero());
    for (std::uint64_t i = 0; i < e; ++i)
        out = out * m;
    return out;
}

// (sigma - 1, N) after checking sigma^p = 1
template <class S>
std::pair<Matrix<S>, Matrix<S>> periodic_maps(const Matrix<S>& sigma, std::uint64_t p)
{
    if (sigma.rows() != sigma.cols())
        throw Error("cp_cohomology: sigma must be square");
    const auto id = Matrix<S>::identity(sigma.rows(), sigma.zero());
    Matrix<S> norm(sigma.rows(), sigma.cols(), sigma.zero());
    Matrix<S> power = id;
    for (std::uint64_t i = 0; i < p; ++i) {
        norm = norm + power;
        power = power * sigma;
    }
    if (!(power == id))
        throw Error("cp_cohomology: sigma^p != identity");
    return {sigma - id, norm};
}

}  // namespace detail

/// H^s(C_p; M) at a single precision K (no stability check).
inline FinAbGroup cp_cohomology_at(const CyclicModule& module, int s, int K)
{
    if (s < 0)
        throw Error("cp_cohomology: negative degree");
    PMatrix sigma = module.sigma_at(K);
    auto [t, norm] = detail::periodic_maps(sigma, module.p);
    const PAdicTruncated zero(module.p, K, 0);
    if (s == 0)
        return lattice_homology(PMatrix(module.rank(), 0, zero), t);
    if (s % 2 == 0)
        return lattice_homology(norm, t);
    return lattice_homology(t, norm);
}

/// H^s(C_p; M) with the K / K + 2 precision check.
inline FinAbGroup cp_cohomology(const CyclicModule& module, int s, int K = kDefaultPrecision)
{
    return stable_computation([&](int k) { return cp_cohomology_at(module, s, k); }, K);
}

/// H^s(C_p; V) for an F_{p^n}-vector space V with sigma acting; returned as
/// an abstract group (Z/p)^{n dim}.
inline FinAbGroup cp_cohomology(const Matrix<GfElement>& sigma, int s)
{
    if (s < 0)
        throw Error("cp_cohomology: negative degree");
    const GaloisField& F = sigma.zero().field();
    const std::uint64_t p = F.characteristic();
    auto [t, norm] = detail::periodic_maps(sigma, p);
    const std::size_t d = sigma.rows();
    std::size_t dim;
    if (s == 0)
        dim = d - rank(t);
    else if (s % 2 == 0)
        dim = d - rank(t) - rank(norm);
    else
        dim = d - rank(norm) - rank(t);
    return FinAbGroup::from_factors(std::vector<std::uint64_t>(dim * F.degree(), p));
}

/// Z_p with u in Z_p^x acting by u^m.
struct WeightedZpModule {
    std::uint64_t p = 3;
    std::int64_t weight = 0;
    int precision = kDefaultPrecision;
};

/// Teichmueller lift of a primitive root mod p, as an element of Z/p^K.
inline PAdicTruncated teichmuller_generator(std::uint64_t p, int K)
{
    PAdicTruncated g(p, K, static_cast<std::int64_t>(primitive_root(p)));
    // omega(g) = lim g^{p^k}; p^{K-1} iterations of Frobenius suffice mod p^K
    PAdicTruncated w = g;
    for (int i = 0; i < K; ++i)
        w = w.pow(p);
    return w;
}

namespace detail {

inline PAdicTruncated signed_pow(const PAdicTruncated& x, std::int64_t e)
{
    return e >= 0 ? x.pow(static_cast<std::uint64_t>(e)) : x.inverse().pow(static_cast<std::uint64_t>(-e));
}

}  // namespace detail

/// H^s_c(Z_p^x; Z_p(m)) at precision K. The pro-p factor 1 + pZ_p is
/// topologically generated by (1 + p)^u for any unit u; `generator_exponent`
/// selects u.
inline FinAbGroup zpx_cohomology_at(const WeightedZpModule& mod, int s, int K, std::int64_t generator_exponent = 1)
{
    if (mod.p == 2)
        throw Error("zpx_cohomology: odd primes only");
    if (!is_prime(mod.p))
        throw Error("zpx_cohomology: p must be prime");
    if (s < 0)
        throw Error("zpx_cohomology: negative degree");
    if (generator_exponent % static_cast<std::int64_t>(mod.p) == 0)
        throw Error("zpx_cohomology: generator exponent must be prime to p");
    if (s >= 2)
        return FinAbGroup::trivial();
    const PAdicTruncated zero(mod.p, K, 0), one = zero.one_like();

    // mu_{p-1}-invariants: kernel of zeta^m - 1 on Z_p
    PMatrix mu(1, 1, zero);
    mu(0, 0) = detail::signed_pow(teichmuller_generator(mod.p, K), mod.weight) - one;
    PMatrix fixed = kernel_coordinates(mu);  // k x 1, k in {0, 1}
    const std::size_t k = fixed.rows();

    PAdicTruncated g = PAdicTruncated(mod.p, K, static_cast<std::int64_t>(1 + mod.p));
    g = detail::signed_pow(g, generator_exponent);
    PMatrix act(k, k, zero);
    for (std::size_t i = 0; i < k; ++i)
        act(i, i) = detail::signed_pow(g, mod.weight) - one;
    if (s == 0)
        return lattice_homology(PMatrix(k, 0, zero), act);
    return smith_form(act);
}

inline FinAbGroup zpx_cohomology(const WeightedZpModule& mod, int s, std::int64_t generator_exponent = 1)
{
    return stable_computation([&](int k) { return zpx_cohomology_at(mod, s, k, generator_exponent); }, mod.precision);
}

/// Hom_c(Z_p^x, Z_p^x) = Z_p^x = Z_p x Z/(p-1) for trivial action, p odd.
inline FinAbGroup zpx_units_h1(std::uint64_t p, int K = kDefaultPrecision)
{
    if (p == 2)
        throw Error("zpx_units_h1: odd primes only");
    if (!is_prime(p))
        throw Error("zpx_units_h1: p must be prime");
    // roots of unity: solutions of x^{p-1} = 1 mod p lift uniquely
    std::uint64_t roots = 0;
    for (std::uint64_t x = 1; x < p; ++x)
        roots += pow_mod(x, p - 1, p) == 1;
    // 1 + p has order p^{K-1} mod p^K: a torsion-free procyclic factor
    auto order_of = [&](int k) {
        const std::uint64_t mod = checked_pow(p, static_cast<unsigned>(k));
        std::uint64_t x = (1 + p) % mod, ord = 1;
        while (x != 1) {
            x = pow_mod(x, p, mod);
            ord *= p;
        }
        return ord;
    };
    const bool unbounded = order_of(K + 2) == order_of(K) * p * p;
    return FinAbGroup::cyclic(roots).direct_sum(FinAbGroup::free(unbounded ? 1 : 0));
}

enum class IdempotentResult { idempotent_verified, not_invertible };

inline std::string to_string(IdempotentResult r)
{
    return r == IdempotentResult::idempotent_verified ? "idempotent_verified" : "not_invertible";
}

/// e = N / |G| in Z/p^K[C_|G|]; verifies e * e = e when |G| is prime to p.
inline IdempotentResult transfer_idempotent_check(std::uint64_t group_order, std::uint64_t p, int K = kDefaultPrecision)
{
    if (group_order < 1)
        throw Error("transfer_idempotent_check: group order must be >= 1");
    if (group_order % p == 0)
        return IdempotentResult::not_invertible;
    const PAdicTruncated zero(p, K, 0);
    const PAdicTruncated inv = zero.from_int(static_cast<std::int64_t>(group_order)).inverse();
    std::vector<PAdicTruncated> e(group_order, inv);
    std::vector<PAdicTruncated> sq(group_order, zero);
    for (std::uint64_t i = 0; i < group_order; ++i)
        for (std::uint64_t j = 0; j < group_order; ++j)
            sq[(i + j) % group_order] += e[i] * e[j];
    if (sq != e)
        throw Error("transfer_idempotent_check: e^2 != e");
    return IdempotentResult::idempotent_verified;
}

}  // namespace sseqkit

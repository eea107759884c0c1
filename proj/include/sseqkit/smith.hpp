#pragma once

/*
 * Smith normal form over Z/p^K, used as a finite-precision model of Z_p.
 *
 * A matrix over Z_p reduced mod p^K has the same elementary divisors as
 * long as every divisor is smaller than p^K; divisors that reach p^K show
 * up as zeros and are read as free Z_p summands. Whether K was large enough
 * is checked by recomputing at K + 2 (stable_computation below).
 */

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sseqkit/fin_ab_group.hpp"
#include "sseqkit/matrix.hpp"
#include "sseqkit/padic.hpp"

namespace sseqkit {

using PMatrix = Matrix<PAdicTruncated>;

/// P * M * Q = D with D diagonal; `valuations[t]` is the valuation of D(t, t)
/// for t < min(rows, cols), equal to K when the entry is zero.
struct SmithDecomposition {
    std::vector<int> valuations;
    PMatrix P, Q, Q_inverse;
};

inline SmithDecomposition smith_decompose(const PMatrix& m)
{
    if (!m.uniform_ring())
        throw Error("smith_form: mixed scalar rings");
    const std::size_t rows = m.rows(), cols = m.cols();
    const PAdicTruncated& like = m.zero();
    const int K = like.precision();
    PMatrix a = m;
    PMatrix P = PMatrix::identity(rows, like);
    PMatrix Q = PMatrix::identity(cols, like);
    PMatrix Qi = PMatrix::identity(cols, like);
    std::vector<int> vals;
    const std::size_t diag = std::min(rows, cols);
    for (std::size_t t = 0; t < diag; ++t) {
        int best = K;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                int v = a(i, j).valuation();
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best == K) {
            for (std::size_t s = t; s < diag; ++s)
                vals.push_back(K);
            break;
        }
        if (bi != t) {
            for (std::size_t j = 0; j < cols; ++j)
                std::swap(a(bi, j), a(t, j));
            for (std::size_t j = 0; j < rows; ++j)
                std::swap(P(bi, j), P(t, j));
        }
        if (bj != t) {
            for (std::size_t i = 0; i < rows; ++i)
                std::swap(a(i, bj), a(i, t));
            for (std::size_t i = 0; i < cols; ++i)
                std::swap(Q(i, bj), Q(i, t));
            for (std::size_t j = 0; j < cols; ++j)
                std::swap(Qi(bj, j), Qi(t, j));
        }
        // normalize the pivot to p^best
        PAdicTruncated uinv = a(t, t).unit_part().inverse();
        for (std::size_t j = 0; j < cols; ++j)
            a(t, j) *= uinv;
        for (std::size_t j = 0; j < rows; ++j)
            P(t, j) *= uinv;
        for (std::size_t i = t + 1; i < rows; ++i) {
            if (a(i, t).is_zero())
                continue;
            PAdicTruncated f = a(i, t).divide_by_p_power(best);
            for (std::size_t j = t; j < cols; ++j)
                a(i, j) -= f * a(t, j);
            for (std::size_t j = 0; j < rows; ++j)
                P(i, j) -= f * P(t, j);
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            if (a(t, j).is_zero())
                continue;
            PAdicTruncated f = a(t, j).divide_by_p_power(best);
            for (std::size_t i = t; i < rows; ++i)
                a(i, j) -= f * a(i, t);
            for (std::size_t i = 0; i < cols; ++i)
                Q(i, j) -= f * Q(i, t);
            // Q_inverse picks up the inverse column operation as a row operation
            for (std::size_t k = 0; k < cols; ++k)
                Qi(t, k) += f * Qi(j, k);
        }
        vals.push_back(best);
    }
    return {std::move(vals), std::move(P), std::move(Q), std::move(Qi)};
}

/// Cokernel of M : R^cols -> R^rows as an abelian group. Zero diagonal
/// entries and rows without a pivot are free Z_p summands.
inline FinAbGroup smith_form(const PMatrix& m)
{
    auto dec = smith_decompose(m);
    const std::uint64_t p = m.zero().prime();
    const int K = m.zero().precision();
    std::vector<std::uint64_t> factors;
    int free_rank = static_cast<int>(m.rows() - dec.valuations.size());
    for (int v : dec.valuations) {
        if (v == K)
            ++free_rank;
        else if (v > 0)
            factors.push_back(checked_pow(p, static_cast<unsigned>(v)));
    }
    return FinAbGroup::from_factors(std::move(factors), free_rank);
}

/// Z_p-coordinates on ker(M): rows of Q^{-1} at the zero pivots. Applying the
/// returned matrix to a vector in ker(M) gives its coordinates in a basis of ker(M).
inline PMatrix kernel_coordinates(const PMatrix& m)
{
    auto dec = smith_decompose(m);
    const int K = m.zero().precision();
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < m.cols(); ++j)
        if (j >= dec.valuations.size() || dec.valuations[j] == K)
            free_cols.push_back(j);
    PMatrix coords(free_cols.size(), m.cols(), m.zero());
    for (std::size_t r = 0; r < free_cols.size(); ++r)
        for (std::size_t j = 0; j < m.cols(); ++j)
            coords(r, j) = dec.Q_inverse(free_cols[r], j);
    return coords;
}

/// ker(out) / im(in) for Z_p-lattice maps in : R^a -> R^m, out : R^m -> R^c
/// with out * in = 0.
inline FinAbGroup lattice_homology(const PMatrix& in, const PMatrix& out)
{
    if (in.rows() != out.cols())
        throw Error("lattice_homology: composable maps required");
    if (!(out * in).is_zero())
        throw Error("lattice_homology: out * in != 0");
    PMatrix coords = kernel_coordinates(out);
    return smith_form(coords * in);
}

/// Run `compute` at precision K and K + 2 and insist on identical answers.
inline FinAbGroup stable_computation(const std::function<FinAbGroup(int)>& compute, int K = kDefaultPrecision)
{
    FinAbGroup low = compute(K);
    FinAbGroup high = compute(K + 2);
    if (low != high)
        throw Error("insufficient precision: result at K=" + std::to_string(K) + " (" + low.to_string() +
                    ") differs from K=" + std::to_string(K + 2) + " (" + high.to_string() + ")");
    return low;
}

}  // namespace sseqkit

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace sseqkit;
using sseqkit_test::uniform;

namespace {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

IntMatrix mul(const IntMatrix& a, const IntMatrix& b)
{
    IntMatrix c(a.size(), std::vector<std::int64_t>(b.empty() ? 0 : b[0].size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < c[i].size(); ++j)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

IntMatrix identity(std::size_t n)
{
    IntMatrix m(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

// Z[zeta_p]: multiplication by zeta on the basis 1, zeta, ..., zeta^{p-2}.
CyclicModule cyclotomic(std::uint64_t p)
{
    const std::size_t d = p - 1;
    CyclicModule m{p, IntMatrix(d, std::vector<std::int64_t>(d, 0))};
    for (std::size_t i = 0; i + 1 < d; ++i)
        m.sigma[i + 1][i] = 1;
    for (std::size_t i = 0; i < d; ++i)
        m.sigma[i][d - 1] = -1;
    return m;
}

CyclicModule block_sum(std::uint64_t p, const std::vector<CyclicModule>& blocks)
{
    std::size_t n = 0;
    for (const auto& b : blocks)
        n += b.rank();
    CyclicModule out{p, IntMatrix(n, std::vector<std::int64_t>(n, 0))};
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rank(); ++i)
            for (std::size_t j = 0; j < b.rank(); ++j)
                out.sigma[off + i][off + j] = b.sigma[i][j];
        off += b.rank();
    }
    return out;
}

// U sigma U^{-1} for a random unimodular U built from elementary operations.
CyclicModule conjugate(std::mt19937_64& g, const CyclicModule& m)
{
    const std::size_t n = m.rank();
    IntMatrix u = identity(n), ui = identity(n);
    if (n < 2)
        return m;
    for (int step = 0; step < 4; ++step) {
        const std::size_t i = uniform(g, 0, n - 1), j = uniform(g, 0, n - 1);
        if (i == j)
            continue;
        const std::int64_t c = uniform(g, -2, 2);
        for (std::size_t k = 0; k < n; ++k) {
            u[i][k] += c * u[j][k];
            ui[k][j] -= c * ui[k][i];
        }
    }
    return {m.p, mul(mul(u, m.sigma), ui)};
}

}  // namespace

TEST(CpCohomology, TrivialModule)
{
    for (std::uint64_t p : {3u, 5u, 2u}) {
        auto m = CyclicModule::trivial(p);
        EXPECT_EQ(cp_cohomology(m, 0), FinAbGroup::free(1));
        for (int s = 1; s <= 6; ++s)
            EXPECT_EQ(cp_cohomology(m, s), s % 2 ? FinAbGroup::trivial() : FinAbGroup::cyclic(p)) << "p=" << p << " s=" << s;
    }
}

TEST(CpCohomology, RegularModule)
{
    for (std::uint64_t p : {2u, 3u, 5u, 7u}) {
        auto m = CyclicModule::regular(p);
        EXPECT_EQ(cp_cohomology(m, 0), FinAbGroup::free(1));
        for (int s = 1; s <= 4; ++s)
            EXPECT_TRUE(cp_cohomology(m, s).is_trivial()) << "p=" << p << " s=" << s;
    }
}

TEST(CpCohomology, CyclotomicModule)
{
    for (std::uint64_t p : {3u, 5u, 7u}) {
        auto m = cyclotomic(p);
        EXPECT_TRUE(cp_cohomology(m, 0).is_trivial());
        for (int s = 1; s <= 4; ++s)
            EXPECT_EQ(cp_cohomology(m, s), s % 2 ? FinAbGroup::cyclic(p) : FinAbGroup::trivial()) << "p=" << p;
    }
}

TEST(CpCohomology, ZeroModule)
{
    EXPECT_TRUE(cp_cohomology(CyclicModule::trivial(3, 0), 0).is_trivial());
    EXPECT_TRUE(cp_cohomology(CyclicModule::trivial(3, 0), 3).is_trivial());
}

TEST(CpCohomology, Errors)
{
    CyclicModule bad{3, {{2}}};
    EXPECT_THROW(cp_cohomology(bad, 1), Error);
    EXPECT_THROW(cp_cohomology(CyclicModule::trivial(3), -1), Error);
}

TEST(CpCohomology, RandomSumsArePeriodic)
{
    auto g = sseqkit_test::rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const std::uint64_t p = trial % 2 ? 3 : 5;
        std::vector<CyclicModule> blocks;
        std::size_t triv = 0, reg = 0, cyc = 0;
        const int count = static_cast<int>(uniform(g, 1, 3));
        for (int b = 0; b < count; ++b) {
            switch (uniform(g, 0, 2)) {
            case 0:
                blocks.push_back(CyclicModule::trivial(p));
                ++triv;
                break;
            case 1:
                blocks.push_back(CyclicModule::regular(p));
                ++reg;
                break;
            default:
                blocks.push_back(cyclotomic(p));
                ++cyc;
            }
        }
        auto m = conjugate(g, block_sum(p, blocks));
        std::vector<std::uint64_t> even(triv, p), odd(cyc, p);
        ASSERT_EQ(cp_cohomology(m, 0), FinAbGroup::free(static_cast<int>(triv + reg)));
        for (int s = 1; s <= 6; ++s)
            ASSERT_EQ(cp_cohomology(m, s), FinAbGroup::from_factors(s % 2 ? odd : even)) << "trial " << trial << " s=" << s;
        ASSERT_EQ(cp_cohomology(m, 2), cp_cohomology(m, 4));
        ASSERT_EQ(cp_cohomology(m, 1), cp_cohomology(m, 3));
    }
}

TEST(CpCohomology, NormLandsInInvariants)
{
    auto g = sseqkit_test::rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = conjugate(g, block_sum(3, {CyclicModule::regular(3), cyclotomic(3), CyclicModule::trivial(3)}));
        PMatrix sigma = m.sigma_at(10);
        PMatrix t = sigma - PMatrix::identity(m.rank(), sigma.zero());
        PMatrix norm = PMatrix::identity(m.rank(), sigma.zero());
        PMatrix power = norm;
        for (int k = 1; k < 3; ++k) {
            power = power * sigma;
            norm = norm + power;
        }
        ASSERT_TRUE((t * norm).is_zero());
        ASSERT_TRUE((norm * t).is_zero());
    }
}

TEST(CpCohomology, VectorSpaceCoefficients)
{
    const auto& F9 = GaloisField::get(3, 2);
    auto one = Matrix<GfElement>::identity(1, GfElement(F9, 0));
    for (int s = 0; s <= 3; ++s)
        EXPECT_EQ(cp_cohomology(one, s), FinAbGroup::from_factors({3, 3}));
    const auto& F3 = GaloisField::get(3, 1);
    Matrix<GfElement> perm(3, 3, GfElement(F3, 0));
    for (std::size_t i = 0; i < 3; ++i)
        perm((i + 1) % 3, i) = GfElement(F3, 1);
    EXPECT_EQ(cp_cohomology(perm, 0), FinAbGroup::cyclic(3));
    EXPECT_TRUE(cp_cohomology(perm, 1).is_trivial());
    EXPECT_TRUE(cp_cohomology(perm, 2).is_trivial());
}

TEST(ZpxCohomology, Examples)
{
    EXPECT_EQ(zpx_cohomology({3, 2}, 1), FinAbGroup::cyclic(3));
    EXPECT_EQ(zpx_cohomology({3, 6}, 1), FinAbGroup::cyclic(9));
    for (int s = 0; s <= 3; ++s)
        EXPECT_TRUE(zpx_cohomology({3, 1}, s).is_trivial()) << s;
    EXPECT_EQ(zpx_cohomology({3, 0}, 0), FinAbGroup::free(1));
    EXPECT_EQ(zpx_cohomology({3, 0}, 1), FinAbGroup::free(1));
    EXPECT_TRUE(zpx_cohomology({3, 2}, 0).is_trivial());
    EXPECT_TRUE(zpx_cohomology({3, 2}, 2).is_trivial());
    EXPECT_EQ(zpx_cohomology({5, 4}, 1), FinAbGroup::cyclic(5));
    EXPECT_EQ(zpx_cohomology({5, 20}, 1), FinAbGroup::cyclic(25));
}

TEST(ZpxCohomology, OddPrimesOnly)
{
    try {
        zpx_cohomology({2, 2}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("odd primes only"), std::string::npos);
    }
    EXPECT_THROW(zpx_units_h1(2), Error);
}

TEST(ZpxCohomology, MatchesValuationFormula)
{
    for (std::uint64_t p : {3u, 5u, 7u}) {
        const auto period = static_cast<std::int64_t>(p - 1);
        for (std::int64_t m = -60; m <= 60; ++m) {
            if (m == 0)
                continue;
            FinAbGroup expected;
            if (m % period == 0)
                expected = FinAbGroup::cyclic(
                    checked_pow(p, static_cast<unsigned>(oracle::valuation(static_cast<std::uint64_t>(m < 0 ? -m : m), p) + 1)));
            ASSERT_EQ(zpx_cohomology({p, m}, 1), expected) << "p=" << p << " m=" << m;
            ASSERT_TRUE(zpx_cohomology({p, m}, 0).is_trivial());
        }
    }
}

TEST(ZpxCohomology, IndependentOfTopologicalGenerator)
{
    auto g = sseqkit_test::rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint64_t p = std::vector<std::uint64_t>{3, 5, 7}[uniform(g, 0, 2)];
        std::int64_t u;
        do
            u = uniform(g, -50, 50);
        while (u % static_cast<std::int64_t>(p) == 0);
        const std::int64_t m = uniform(g, -40, 40);
        for (int s = 0; s <= 1; ++s)
            ASSERT_EQ(zpx_cohomology({p, m}, s, u), zpx_cohomology({p, m}, s)) << "p=" << p << " m=" << m << " u=" << u;
    }
    EXPECT_THROW(zpx_cohomology({3, 2}, 1, 3), Error);
}

TEST(ZpxCohomology, PrecisionCheck)
{
    // v_3(m) = 12 needs more than 12 digits
    const std::int64_t m = 2 * static_cast<std::int64_t>(checked_pow(3, 12));
    try {
        zpx_cohomology({3, m}, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient precision"), std::string::npos);
    }
    EXPECT_EQ(zpx_cohomology({3, m, 16}, 1), FinAbGroup::cyclic(checked_pow(3, 13)));
}

TEST(ZpxUnits, H1)
{
    EXPECT_EQ(zpx_units_h1(3), FinAbGroup::free(1).direct_sum(FinAbGroup::cyclic(2)));
    EXPECT_EQ(zpx_units_h1(5), FinAbGroup::free(1).direct_sum(FinAbGroup::cyclic(4)));
    EXPECT_EQ(zpx_units_h1(7), FinAbGroup::free(1).direct_sum(FinAbGroup::cyclic(6)));
    EXPECT_EQ(zpx_units_h1(7).to_string(7), "Z_7 x Z/6");
}

TEST(TransferIdempotent, Cases)
{
    EXPECT_EQ(transfer_idempotent_check(2, 3), IdempotentResult::idempotent_verified);
    EXPECT_EQ(transfer_idempotent_check(4, 5), IdempotentResult::idempotent_verified);
    EXPECT_EQ(transfer_idempotent_check(1, 3), IdempotentResult::idempotent_verified);
    EXPECT_EQ(transfer_idempotent_check(3, 3), IdempotentResult::not_invertible);
    EXPECT_EQ(transfer_idempotent_check(6, 3), IdempotentResult::not_invertible);
    EXPECT_THROW(transfer_idempotent_check(0, 3), Error);
    EXPECT_EQ(to_string(IdempotentResult::not_invertible), "not_invertible");
}

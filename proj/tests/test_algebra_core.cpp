#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace sseqkit;
using sseqkit_test::uniform;

namespace {

GfElement random_element(std::mt19937_64& g, const GaloisField& F)
{
    return GfElement(F, static_cast<std::uint32_t>(uniform(g, 0, F.order() - 1)));
}

Matrix<GfElement> random_matrix(std::mt19937_64& g, const GaloisField& F, std::size_t r, std::size_t c)
{
    Matrix<GfElement> m(r, c, GfElement(F, 0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m(i, j) = random_element(g, F);
    return m;
}

PMatrix int_matrix(std::uint64_t p, int K, const std::vector<std::vector<std::int64_t>>& rows)
{
    PAdicTruncated zero(p, K, 0);
    PMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size(), zero);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            m(i, j) = zero.from_int(rows[i][j]);
    return m;
}

}  // namespace

TEST(Valuation, Examples)
{
    EXPECT_EQ(valuation(54, 3), 3);
    EXPECT_EQ(valuation(7, 3), 0);
    EXPECT_EQ(valuation(-250, 5), 3);
    EXPECT_THROW(valuation(0, 3), Error);
}

TEST(Valuation, AdditiveOnProducts)
{
    auto g = sseqkit_test::rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::int64_t p = std::vector<std::int64_t>{2, 3, 5, 7}[uniform(g, 0, 3)];
        std::int64_t a = uniform(g, 1, 200000), b = uniform(g, 1, 200000);
        if (uniform(g, 0, 1))
            a = -a;
        EXPECT_EQ(valuation(a * b, p), valuation(a, p) + valuation(b, p));
        EXPECT_EQ(valuation(a, p), oracle::valuation(static_cast<std::uint64_t>(a < 0 ? -a : a), p));
    }
}

TEST(GaloisField, PrimeFieldExamples)
{
    const auto& F3 = GaloisField::get(3, 1);
    GfElement two(F3, 2), one(F3, 1);
    EXPECT_EQ(two.inverse(), two);
    EXPECT_EQ(two + one, GfElement(F3, 0));
    EXPECT_EQ(GfElement::from_int(F3, -1), two);
    EXPECT_THROW(GfElement(F3, 0).inverse(), Error);
}

TEST(GaloisField, DescriptorsAreInterned)
{
    EXPECT_EQ(&GaloisField::get(3, 2), &GaloisField::get(3, 2));
    EXPECT_NE(&GaloisField::get(3, 2), &GaloisField::get(3, 1));
    EXPECT_EQ(GaloisField::get(3, 2).order(), 9u);
    EXPECT_EQ(GaloisField::get(5, 3).order(), 125u);
}

TEST(GaloisField, GeneratorOfF9HasOrderEight)
{
    const auto& F9 = GaloisField::get(3, 2);
    GfElement x(F9, F9.generator());
    EXPECT_TRUE(x.pow(8).is_one());
    for (int k = 1; k < 8; ++k)
        EXPECT_FALSE(x.pow(k).is_one()) << k;
    EXPECT_TRUE((x * x.pow(7)).is_one());
    EXPECT_EQ(x.pow(-1), x.pow(7));
}

TEST(GaloisField, MismatchedDescriptorsThrow)
{
    GfElement a(GaloisField::get(3, 1), 1), b(GaloisField::get(3, 2), 1);
    EXPECT_THROW(a + b, Error);
    EXPECT_THROW(a * b, Error);
    EXPECT_FALSE(same_ring(a, b));
}

TEST(GaloisField, FieldArithmeticDispatch)
{
    const auto& F = GaloisField::get(5, 2);
    GfElement a(F, 7), b(F, 13);
    EXPECT_EQ(field_arithmetic(FieldOp::add, a, &b), a + b);
    EXPECT_EQ(field_arithmetic(FieldOp::mul, a, &b), a * b);
    EXPECT_EQ(field_arithmetic(FieldOp::neg, a), -a);
    EXPECT_EQ(field_arithmetic(FieldOp::inv, a), a.inverse());
    EXPECT_THROW(field_arithmetic(FieldOp::add, a), Error);
}

TEST(GaloisField, AxiomsOnRandomTriples)
{
    auto g = sseqkit_test::rng(12);
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> fields{{2, 1}, {3, 1}, {3, 2}, {5, 2}, {2, 4}, {7, 1}, {3, 3}};
    for (auto [p, n] : fields) {
        const auto& F = GaloisField::get(p, n);
        const GfElement zero(F, 0), one(F, 1);
        for (int trial = 0; trial < 1000; ++trial) {
            GfElement a = random_element(g, F), b = random_element(g, F), c = random_element(g, F);
            ASSERT_EQ((a + b) + c, a + (b + c));
            ASSERT_EQ((a * b) * c, a * (b * c));
            ASSERT_EQ(a * (b + c), a * b + a * c);
            ASSERT_EQ(a + b, b + a);
            ASSERT_EQ(a * b, b * a);
            ASSERT_EQ(a + zero, a);
            ASSERT_EQ(a * one, a);
            ASSERT_TRUE((a + (-a)).is_zero());
            if (!a.is_zero()) {
                ASSERT_TRUE((a * a.inverse()).is_one());
            }
        }
    }
}

TEST(GaloisField, ProductMatchesPolynomialOracle)
{
    auto g = sseqkit_test::rng(13);
    for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{3, 2}, {5, 2}, {2, 5}, {3, 4}, {7, 2}}) {
        const auto& F = GaloisField::get(p, n);
        for (int trial = 0; trial < 500; ++trial) {
            GfElement a = random_element(g, F), b = random_element(g, F);
            ASSERT_EQ((a * b).coords(), oracle::poly_mul_mod(F, a.coords(), b.coords()));
        }
    }
}

TEST(GaloisField, UnitGroupIsCyclic)
{
    for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{3, 2}, {5, 2}, {2, 4}, {3, 3}, {7, 2}}) {
        const auto& F = GaloisField::get(p, n);
        // powers of x computed through the oracle hit every unit exactly once
        std::vector<std::uint32_t> x(n, 0), cur(n, 0);
        x[1 % n] = n == 1 ? F.generator() : 1;
        cur[0] = 1;
        std::set<std::vector<std::uint32_t>> seen;
        for (std::uint32_t k = 0; k + 1 < F.order(); ++k) {
            seen.insert(cur);
            cur = oracle::poly_mul_mod(F, cur, x);
        }
        EXPECT_EQ(seen.size(), F.order() - 1) << F.describe();
        EXPECT_EQ(GfElement(F, F.generator()).coords(), x);
    }
}

TEST(PAdic, ReductionIsARingHomomorphism)
{
    auto g = sseqkit_test::rng(14);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint64_t p = trial % 2 ? 3 : 5;
        PAdicTruncated a(p, 12, uniform(g, -1000000, 1000000)), b(p, 12, uniform(g, -1000000, 1000000));
        const int k = static_cast<int>(uniform(g, 1, 11));
        ASSERT_EQ((a + b).reduce(k), a.reduce(k) + b.reduce(k));
        ASSERT_EQ((a * b).reduce(k), a.reduce(k) * b.reduce(k));
    }
}

TEST(PAdic, ValuationAndUnits)
{
    PAdicTruncated x(3, 12, 54);
    EXPECT_EQ(x.valuation(), 3);
    EXPECT_EQ(x.unit_part(), PAdicTruncated(3, 12, 2));
    EXPECT_EQ(PAdicTruncated(3, 12, 0).valuation(), 12);
    EXPECT_EQ(PAdicTruncated(3, 12, 7).inverse() * PAdicTruncated(3, 12, 7), PAdicTruncated(3, 12, 1));
    EXPECT_THROW(PAdicTruncated(3, 12, 6).inverse(), Error);
    EXPECT_THROW(PAdicTruncated(3, 12, 1) + PAdicTruncated(3, 10, 1), Error);
    EXPECT_THROW(PAdicTruncated(4, 12, 1), Error);
}

TEST(RowReduce, Examples)
{
    const auto& F3 = GaloisField::get(3, 1);
    auto id = Matrix<GfElement>::identity(3, GfElement(F3, 0));
    auto r = row_reduce(id);
    EXPECT_EQ(r.rank, 3u);
    EXPECT_TRUE(r.kernel_basis.empty());

    Matrix<GfElement> z(2, 4, GfElement(F3, 0));
    r = row_reduce(z);
    EXPECT_EQ(r.rank, 0u);
    EXPECT_EQ(r.kernel_basis.size(), 4u);
}

TEST(RowReduce, MixedRingsThrow)
{
    Matrix<GfElement> m(2, 2, GfElement(GaloisField::get(3, 1), 0));
    m(0, 1) = GfElement(GaloisField::get(5, 1), 1);
    EXPECT_THROW(row_reduce(m), Error);
}

TEST(RowReduce, KernelAndRankProperties)
{
    auto g = sseqkit_test::rng(15);
    for (int trial = 0; trial < 300; ++trial) {
        const auto& F = trial % 3 == 0 ? GaloisField::get(3, 2) : GaloisField::get(trial % 3 == 1 ? 3 : 5, 1);
        const std::size_t rows = uniform(g, 0, 6), cols = uniform(g, 0, 6);
        auto m = random_matrix(g, F, rows, cols);
        // sparsify to get interesting ranks
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                if (uniform(g, 0, 2) == 0)
                    m(i, j) = GfElement(F, 0);
        auto red = row_reduce(m);
        ASSERT_EQ(red.rank + red.kernel_basis.size(), cols);
        for (const auto& k : red.kernel_basis)
            ASSERT_TRUE(is_zero_vector(m * k));
        ASSERT_EQ(rank(m), rank(m.transpose()));
        ASSERT_EQ(red.image_basis.size(), red.rank);
        if (!red.kernel_basis.empty()) {
            ASSERT_EQ(rank(Matrix<GfElement>::from_columns(red.kernel_basis, cols, GfElement(F, 0))),
                      red.kernel_basis.size());
        }
    }
}

TEST(RowReduce, MatchesBruteForceCounts)
{
    auto g = sseqkit_test::rng(16);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint32_t p = trial % 2 ? 3 : 2;
        const auto& F = GaloisField::get(p, 1);
        const std::size_t rows = uniform(g, 1, 5), cols = uniform(g, 1, 5);
        auto m = random_matrix(g, F, rows, cols);
        auto counts = oracle::kernel_image_sizes(m, p);
        auto red = row_reduce(m);
        ASSERT_EQ(oracle::log_p(counts.image_size, p), red.rank);
        ASSERT_EQ(oracle::log_p(counts.kernel_size, p), red.kernel_basis.size());
    }
}

TEST(Echelon, TagsRecordCombinations)
{
    const auto& F = GaloisField::get(5, 1);
    GfElement z(F, 0);
    Echelon<GfElement> e(3, 2, z);
    FVec v1{GfElement(F, 1), GfElement(F, 2), z}, v2{z, GfElement(F, 1), GfElement(F, 3)};
    EXPECT_TRUE(e.insert(v1, {GfElement(F, 1), z}));
    EXPECT_TRUE(e.insert(v2, {z, GfElement(F, 1)}));
    EXPECT_FALSE(e.insert(v1));
    FVec w(3, z);
    for (std::size_t i = 0; i < 3; ++i)
        w[i] = v1[i] * GfElement(F, 2) + v2[i] * GfElement(F, 4);
    auto red = e.reduce(w);
    EXPECT_TRUE(is_zero_vector(red.residual));
    EXPECT_EQ(red.tag[0], GfElement(F, 2));
    EXPECT_EQ(red.tag[1], GfElement(F, 4));
}

TEST(Smith, Examples)
{
    EXPECT_EQ(smith_form(int_matrix(3, 8, {{3, 0}, {0, 9}})), FinAbGroup::from_factors({3, 9}));
    EXPECT_EQ(smith_form(int_matrix(3, 8, {{0}})), FinAbGroup::free(1));
    // g^m - 1 with g = 1 + 3 = 4, m = 2
    EXPECT_EQ(smith_form(int_matrix(3, 8, {{15}})), FinAbGroup::cyclic(3));
    EXPECT_EQ(smith_form(int_matrix(3, 8, {{2}})), FinAbGroup::trivial());
    // a 2 x 1 map has a free cokernel summand
    EXPECT_EQ(smith_form(int_matrix(5, 6, {{5}, {0}})), FinAbGroup::from_factors({5}, 1));
}

TEST(Smith, DecompositionIsDiagonal)
{
    auto g = sseqkit_test::rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = uniform(g, 1, 4), c = uniform(g, 1, 4);
        std::vector<std::vector<std::int64_t>> rows(r, std::vector<std::int64_t>(c));
        for (auto& row : rows)
            for (auto& x : row)
                x = uniform(g, -30, 30) * (uniform(g, 0, 1) ? 3 : 1);
        auto m = int_matrix(3, 10, rows);
        auto dec = smith_decompose(m);
        auto d = dec.P * m * dec.Q;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                if (i != j)
                    ASSERT_TRUE(d(i, j).is_zero());
                else
                    ASSERT_EQ(d(i, j).valuation(), dec.valuations[i]);
            }
        ASSERT_EQ(dec.Q * dec.Q_inverse, PMatrix::identity(c, m.zero()));
    }
}

TEST(Smith, MatchesCokernelEnumeration)
{
    auto g = sseqkit_test::rng(18);
    for (int trial = 0; trial < 60; ++trial) {
        const std::uint64_t p = trial % 2 ? 3 : 2;
        const unsigned K = p == 3 ? 3 : 4;
        const std::size_t r = uniform(g, 1, 3), c = uniform(g, 1, 3);
        std::vector<std::vector<std::int64_t>> rows(r, std::vector<std::int64_t>(c));
        for (auto& row : rows)
            for (auto& x : row)
                x = uniform(g, 0, 1) ? uniform(g, -20, 20) * static_cast<std::int64_t>(p) : uniform(g, -3, 3);
        auto lib = smith_form(int_matrix(p, static_cast<int>(K), rows));
        auto expected = oracle::cokernel_divisors(rows, p, K);
        std::vector<std::uint64_t> got = lib.invariant_factors();
        for (int i = 0; i < lib.free_rank(); ++i)
            got.push_back(checked_pow(p, K));
        std::sort(got.begin(), got.end());
        std::sort(expected.begin(), expected.end());
        ASSERT_EQ(got, expected) << "trial " << trial;
    }
}

TEST(Smith, InvariantUnderRowAndColumnPermutations)
{
    auto g = sseqkit_test::rng(19);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t r = uniform(g, 1, 5), c = uniform(g, 1, 5);
        std::vector<std::vector<std::int64_t>> rows(r, std::vector<std::int64_t>(c));
        for (auto& row : rows)
            for (auto& x : row)
                x = uniform(g, -10, 10) * (uniform(g, 0, 1) ? 9 : 1);
        auto base = smith_form(int_matrix(5, 10, rows));
        std::vector<std::size_t> rp(r), cp(c);
        std::iota(rp.begin(), rp.end(), 0);
        std::iota(cp.begin(), cp.end(), 0);
        std::shuffle(rp.begin(), rp.end(), g);
        std::shuffle(cp.begin(), cp.end(), g);
        std::vector<std::vector<std::int64_t>> perm(r, std::vector<std::int64_t>(c));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                perm[i][j] = rows[rp[i]][cp[j]];
        ASSERT_EQ(smith_form(int_matrix(5, 10, perm)), base);
    }
}

TEST(Smith, PrecisionCheckDetectsLargeDivisors)
{
    auto compute = [](std::int64_t entry) {
        return [entry](int K) { return smith_form(int_matrix(3, K, {{entry}})); };
    };
    EXPECT_EQ(stable_computation(compute(9)), FinAbGroup::cyclic(9));
    // 3^12 vanishes at K = 12 but not at K = 14
    try {
        stable_computation(compute(531441));
        FAIL() << "expected insufficient precision";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient precision"), std::string::npos);
    }
}

TEST(Smith, LatticeHomology)
{
    // Z --3--> Z --0--> Z: homology Z/3 in the middle
    auto in = int_matrix(3, 8, {{3}});
    auto out = int_matrix(3, 8, {{0}});
    EXPECT_EQ(lattice_homology(in, out), FinAbGroup::cyclic(3));
    EXPECT_THROW(lattice_homology(int_matrix(3, 8, {{1}}), int_matrix(3, 8, {{1}})), Error);
}

TEST(FinAbGroup, CanonicalForm)
{
    EXPECT_EQ(FinAbGroup::cyclic(6), FinAbGroup::from_factors({3, 2}));
    EXPECT_EQ(FinAbGroup::cyclic(12).torsion_order(), 12u);
    EXPECT_EQ(FinAbGroup::free(1).direct_sum(FinAbGroup::cyclic(4)).to_string(3), "Z_3 x Z/4");
    EXPECT_THROW(FinAbGroup::from_factors({6}), Error);
    EXPECT_TRUE(FinAbGroup::trivial().is_trivial());
    auto g = FinAbGroup::from_factors({9, 2, 3}, 2);
    EXPECT_EQ(FinAbGroup::from_json(g.to_json()), g);
}

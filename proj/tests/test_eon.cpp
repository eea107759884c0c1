#include <gtest/gtest.h>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace sseqkit;
using sseqkit_test::uniform;

namespace {

EonModelParams with_units(std::uint32_t p, std::uint32_t n, const std::vector<std::uint32_t>& a,
                          const std::vector<std::uint32_t>& b)
{
    auto params = EonModelParams::defaults(p, n);
    const auto& F = params.field();
    for (std::uint32_t i = 0; i < n; ++i) {
        params.a_units[i] = GfElement::from_int(F, a[i]);
        params.b_units[i] = GfElement::from_int(F, b[i]);
    }
    return params;
}

// All tuples in {1..p-1}^n.
std::vector<std::vector<std::uint32_t>> unit_tuples(std::uint32_t p, std::uint32_t n)
{
    std::vector<std::vector<std::uint32_t>> out{{}};
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::vector<std::uint32_t>> next;
        for (const auto& t : out)
            for (std::uint32_t u = 1; u < p; ++u) {
                auto v = t;
                v.push_back(u);
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

}  // namespace

TEST(BuildE2, GeneratorsAndRules)
{
    auto ss = build_e2(EonModelParams::defaults(3, 1));
    auto pres = ss.presentation();
    ASSERT_EQ(pres->size(), 3u);
    EXPECT_EQ(pres->generator(0).name, "alpha1");
    EXPECT_EQ(pres->generator(0).degree, (Bidegree{-3, 1}));
    EXPECT_EQ(pres->generator(1).degree, (Bidegree{-2, 2}));
    EXPECT_EQ(pres->generator(2).kind, GeneratorKind::laurent);
    EXPECT_EQ(pres->generator(2).degree, (Bidegree{-6, 0}));
    ASSERT_EQ(ss.rules().size(), 1u);
    EXPECT_EQ(describe_rule(*pres, ss.rules()[0]), "d_5(delta1) = alpha1 beta^2");
    EXPECT_EQ(ss.r_max(), 5);

    auto ss2 = build_e2(EonModelParams::defaults(3, 2));
    EXPECT_EQ(ss2.rule_pages(), (std::vector<int>{5, 17}));
    EXPECT_EQ(describe_rule(*ss2.presentation(), ss2.rules()[0]), "d_5(delta2) = alpha1 beta^2");
    EXPECT_EQ(describe_rule(*ss2.presentation(), ss2.rules()[1]), "d_17(delta2^3) = alpha2 beta^8");
}

TEST(BuildE2, Errors)
{
    auto params = EonModelParams::defaults(3, 0);
    try {
        build_e2(params);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("n must be >= 1"), std::string::npos);
    }
    EXPECT_THROW(build_e2(EonModelParams::defaults(2, 1)), Error);
    auto zero_unit = EonModelParams::defaults(3, 1);
    zero_unit.a_units[0] = GfElement(zero_unit.field(), 0);
    EXPECT_THROW(build_e2(zero_unit), Error);

    for (std::uint32_t n : {1u, 2u, 3u}) {
        auto literal = EonModelParams::defaults(3, n);
        literal.paper_literal_bidegrees = true;
        try {
            build_e2(literal);
            FAIL();
        } catch (const BidegreeError& e) {
            EXPECT_EQ(e.failures().size(), n);
        }
    }
}

TEST(BuildE2, RulesPassBidegreeCheck)
{
    for (std::uint32_t p : {3u, 5u, 7u})
        for (std::uint32_t n : {1u, 2u, 3u}) {
            auto params = EonModelParams::defaults(p, n);
            auto pres = eon_presentation(params);
            for (const auto& rule : eon_rules(pres, params))
                EXPECT_TRUE(bidegree_check(*pres, rule)) << "p=" << p << " n=" << n << " " << describe_rule(*pres, rule);
        }
}

TEST(BuildE2, TodaHookRules)
{
    auto params = EonModelParams::defaults(3, 1);
    params.toda_hook = {{9, "alpha1 beta^3", "0"}};
    auto ss = build_e2(params);
    EXPECT_EQ(ss.rule_pages(), (std::vector<int>{5, 9}));
    EXPECT_EQ(ss.r_max(), 9);
    params.toda_hook = {{9, "beta^3", "beta^5"}};
    EXPECT_THROW(build_e2(params), BidegreeError);
}

TEST(SwShift, Examples)
{
    auto c31 = sw_shift(EonModelParams::defaults(3, 1));
    EXPECT_EQ(c31.ells, (std::vector<std::int64_t>{2}));
    EXPECT_EQ(c31.N, 2);
    EXPECT_EQ(c31.shift, 12);

    auto c32 = sw_shift(EonModelParams::defaults(3, 2));
    EXPECT_EQ(c32.ells, (std::vector<std::int64_t>{2, 2}));
    EXPECT_EQ(c32.N, 8);
    EXPECT_EQ(c32.shift, 48);

    auto c51 = sw_shift(with_units(5, 1, {2}, {1}));
    EXPECT_EQ(c51.ells, (std::vector<std::int64_t>{2}));
    EXPECT_EQ(c51.N, 2);
    EXPECT_EQ(c51.shift, 20);
}

TEST(SwShift, NoSolutionInPrimeField)
{
    auto params = EonModelParams::defaults(3, 2);
    const auto& F = params.field();
    params.b_units[0] = GfElement(F, F.generator());
    try {
        sw_shift(params);
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("no l in F_p"), std::string::npos);
    }
    // the E_2 model itself still builds and runs
    EXPECT_NO_THROW(build_e2(params));
}

TEST(SwShift, CertificateCheckedIndependently)
{
    auto g = sseqkit_test::rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const std::uint32_t p = std::vector<std::uint32_t>{3, 5, 7, 11}[uniform(g, 0, 3)];
        const std::uint32_t n = static_cast<std::uint32_t>(uniform(g, 1, 3));
        std::vector<std::uint32_t> a, b;
        for (std::uint32_t i = 0; i < n; ++i) {
            a.push_back(static_cast<std::uint32_t>(uniform(g, 1, p - 1)));
            b.push_back(static_cast<std::uint32_t>(uniform(g, 1, p - 1)));
        }
        auto params = with_units(p, n, a, b);
        auto cert = sw_shift(params);
        ASSERT_TRUE(certificate_valid(params, cert));
        std::int64_t N = 0, weight = 1;
        for (std::uint32_t i = 0; i < n; ++i) {
            // l a + b = 0 mod p, with plain integers
            ASSERT_EQ((cert.ells[i] * a[i] + b[i]) % p, 0u);
            N += cert.ells[i] * weight;
            weight *= p;
        }
        ASSERT_EQ(cert.N, N);
        ASSERT_GE(cert.N, 0);
        ASSERT_LT(cert.N, weight);
        ASSERT_EQ(cert.shift, 2 * static_cast<std::int64_t>(p) * N);
        auto bad = cert;
        bad.ells[0] = (bad.ells[0] + 1) % p;
        ASSERT_FALSE(certificate_valid(params, bad));
    }
}

TEST(VerifyShift, DefaultUnits)
{
    for (auto [p, n, shift] : std::vector<std::tuple<std::uint32_t, std::uint32_t, std::int64_t>>{
             {3, 1, 12}, {3, 2, 48}, {5, 1, 40}, {5, 2, 240}}) {
        auto params = EonModelParams::defaults(p, n);
        auto cert = sw_shift(params);
        EXPECT_EQ(cert.shift, shift);
        auto v = verify_shift(params, cert);
        EXPECT_EQ(v.verdict.status, Permanence::permanent) << v.to_json().dump();
        ASSERT_EQ(v.witnesses.size(), n);
        for (const auto& w : v.witnesses) {
            EXPECT_TRUE(w.engine.is_zero());
            EXPECT_EQ(w.engine, w.formula);
        }
    }
}

TEST(VerifyShift, WrongShiftDies)
{
    auto params = EonModelParams::defaults(3, 1);
    auto cert = sw_shift(params);
    cert.N = 1;
    cert.steps[0].prefix = 1;
    auto v = verify_shift(params, cert);
    EXPECT_EQ(v.verdict.status, Permanence::dies);
    EXPECT_EQ(v.verdict.dies_at_page, 5);
    ASSERT_EQ(v.witnesses.size(), 1u);
    EXPECT_EQ(v.witnesses[0].engine, GfElement(params.field(), 2));
    EXPECT_EQ(v.witnesses[0].engine, v.witnesses[0].formula);
}

TEST(VerifyShift, RoundTripOverAllPrimeFieldUnits)
{
    for (std::uint32_t p : {3u, 5u})
        for (std::uint32_t n : {1u, 2u})
            for (const auto& a : unit_tuples(p, n))
                for (const auto& b : unit_tuples(p, n)) {
                    auto params = with_units(p, n, a, b);
                    auto cert = sw_shift(params);
                    auto v = verify_shift(params, cert);
                    ASSERT_EQ(v.verdict.status, Permanence::permanent)
                        << "p=" << p << " n=" << n << " " << v.to_json().dump();
                    for (const auto& w : v.witnesses)
                        ASSERT_EQ(w.engine, w.formula);
                }
}

TEST(VerifyShift, EngineMatchesFormulaForEveryN)
{
    // the engine's coefficient of d(delta^N gamma) equals digit_i(N) a_i + b_i
    for (std::int64_t N = 0; N < 9; ++N) {
        auto params = with_units(3, 2, {2, 1}, {1, 2});
        auto cert = sw_shift(params);
        cert.N = N;
        cert.steps[0].prefix = N % 3;
        cert.steps[1].prefix = N;
        auto v = verify_shift(params, cert);
        for (const auto& w : v.witnesses)
            ASSERT_EQ(w.engine, w.formula) << "N=" << N << " i=" << w.i;
        const bool should_live = N == sw_shift(params).N;
        EXPECT_EQ(v.verdict.status == Permanence::permanent, should_live) << "N=" << N;
    }
}

TEST(DescentNote, Indices)
{
    auto params = EonModelParams::defaults(3, 1);
    EXPECT_EQ(leray_serre_descent_note(params, 1), "G = C_p, nothing to transfer");
    EXPECT_NE(leray_serre_descent_note(params, 2).find("norm"), std::string::npos);
    EXPECT_THROW(leray_serre_descent_note(params, 0), Error);
}

TEST(EonWindow, ContainsClassAndTargets)
{
    for (auto [p, n] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{3, 1}, {3, 2}, {5, 2}}) {
        auto params = EonModelParams::defaults(p, n);
        auto cert = sw_shift(params);
        auto w = eon_window(params, cert.N);
        const Bidegree cls{-2 * static_cast<int>(p) * static_cast<int>(cert.N), 0};
        const int rmax = eon_page(p, n);
        EXPECT_TRUE(w.contains(cls));
        EXPECT_TRUE(w.contains(cls + differential_shift(rmax)));
        EXPECT_GE(cls.stem - rmax, w.stem_min);
    }
}

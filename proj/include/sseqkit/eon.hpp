#pragma once

/*
 * The homotopy fixed point spectral sequence model for E_{n(p-1)}^{hC_p}.
 *
 * E_2 = Lambda(alpha_1..alpha_n) (x) P(beta, delta_1..delta_{n-1}, delta_n^{+-1})
 * over F_{p^n}, with
 *
 *     |alpha_i| = (-3, 1), |beta| = (-2, 2), |delta_i| = (-2p, 0),
 *     d_{2p^i - 1}(delta_n^{p^{i-1}}) = a_i delta_n^{p^{i-1}} h_{i,0} beta^{p^i - 1},
 *     h_{i,0} = alpha_i delta_n^{-p^{i-1}},
 *
 * and delta_i delta_n^{-1}, delta_n^{p^n} permanent. Setting
 * `paper_literal_bidegrees` uses |beta| = (-2, 0), under which the rules do
 * not have the bidegree of a differential.
 *
 * The dual module has one generator gamma in (0, 0) with
 * d_{2p^i - 1}(delta_n^{k_{i-1}} gamma) = b_i delta_n^{k_{i-1}} h_{i,0} beta^{p^i - 1} gamma,
 * where k_i = l_1 + l_2 p + ... + l_i p^{i-1} and l_i = -b_i / a_i mod p.
 * delta_n^N gamma with N = k_n is then a permanent cycle, so the dual is a
 * shift by 2pN.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sseqkit/bigraded.hpp"
#include "sseqkit/galois_field.hpp"
#include "sseqkit/sseq.hpp"

namespace sseqkit {

/// Extra rule given as text against the model's generator names.
struct RuleText {
    int page;
    std::string source;
    std::string target;
};

struct EonModelParams {
    std::uint32_t p = 3;
    std::uint32_t n = 1;
    std::vector<GfElement> a_units;
    std::vector<GfElement> b_units;
    std::optional<BidegreeWindow> window;
    bool paper_literal_bidegrees = false;
    std::vector<RuleText> toda_hook;
    std::map<Bidegree, int> transfer_sector;
    /// Exponent range of delta_1..delta_{n-1}; they have filtration 0 and
    /// stem -2p, so only a cap keeps the window finite.
    std::pair<int, int> delta_cap{0, 1};

    const GaloisField& field() const { return GaloisField::get(p, n); }

    /// a_i = b_i = 1.
    static EonModelParams defaults(std::uint32_t p, std::uint32_t n)
    {
        EonModelParams params;
        params.p = p;
        params.n = n;
        if (n == 0)
            return params;
        const auto& F = GaloisField::get(p, n);
        params.a_units.assign(n, GfElement(F, 1));
        params.b_units.assign(n, GfElement(F, 1));
        return params;
    }

    void validate() const
    {
        if (n == 0)
            throw Error("Eon model: n must be >= 1");
        if (p == 2 || !is_prime(p))
            throw Error("Eon model: p must be an odd prime");
        if (a_units.size() != n || b_units.size() != n)
            throw Error("Eon model: need exactly n units a_i and n units b_i");
        const auto& F = field();
        for (std::uint32_t i = 0; i < n; ++i) {
            for (const auto* u : {&a_units[i], &b_units[i]}) {
                if (&u->field() != &F)
                    throw Error("Eon model: units must lie in " + F.describe());
                if (u->is_zero())
                    throw Error(std::string("Eon model: ") + (u == &a_units[i] ? "a_" : "b_") + std::to_string(i + 1) +
                                " must be a unit");
            }
        }
        if (delta_cap.first < 0 || delta_cap.second < delta_cap.first)
            throw Error("Eon model: bad delta cap");
    }
};

inline std::string alpha_name(std::uint32_t i) { return "alpha" + std::to_string(i); }
inline std::string delta_name(std::uint32_t i) { return "delta" + std::to_string(i); }

inline PresentationPtr eon_presentation(const EonModelParams& params)
{
    const int p = static_cast<int>(params.p);
    std::vector<GeneratorSpec> gens;
    for (std::uint32_t i = 1; i <= params.n; ++i)
        gens.push_back({alpha_name(i), GeneratorKind::exterior, {-3, 1}});
    gens.push_back({"beta", GeneratorKind::polynomial, {-2, params.paper_literal_bidegrees ? 0 : 2}});
    for (std::uint32_t i = 1; i < params.n; ++i)
        gens.push_back({delta_name(i), GeneratorKind::polynomial, {-2 * p, 0}});
    gens.push_back({delta_name(params.n), GeneratorKind::laurent, {-2 * p, 0}});
    return std::make_shared<const Presentation>(params.field(), std::move(gens));
}

/// Default chart window for a class delta_n^N (gamma): stems
/// [-2p(N + p^n) - 10, 10], filtrations [0, 2p^n + 10].
inline BidegreeWindow eon_window(const EonModelParams& params, std::int64_t N)
{
    const std::int64_t p = params.p, pn = static_cast<std::int64_t>(checked_pow(params.p, params.n));
    BidegreeWindow w;
    w.stem_min = static_cast<int>(-2 * p * (N + pn) - 10);
    w.stem_max = 10;
    w.filtration_max = static_cast<int>(2 * pn + 10);
    return w;
}

/// Page on which the i-th family of differentials lives: 2p^i - 1.
inline int eon_page(std::uint32_t p, std::uint32_t i) { return static_cast<int>(2 * checked_pow(p, i) - 1); }

namespace detail {

inline Exponents delta_power(const Presentation& pres, std::uint32_t n, std::int64_t k)
{
    Exponents e = pres.unit_exponents();
    e[pres.index_of(delta_name(n))] = static_cast<int>(k);
    return e;
}

// delta_n^{shift} h_{i,0} beta^{p^i - 1}, h_{i,0} = alpha_i delta_n^{-p^{i-1}}
inline AlgebraElement eon_target(const PresentationPtr& pres, const EonModelParams& params, std::uint32_t i,
                                 std::int64_t delta_shift)
{
    const std::int64_t pi1 = static_cast<std::int64_t>(checked_pow(params.p, i - 1));
    Exponents h = pres->unit_exponents();
    h[pres->index_of(alpha_name(i))] = 1;
    h[pres->index_of(delta_name(params.n))] = static_cast<int>(-pi1);
    Exponents b = pres->unit_exponents();
    b[pres->index_of("beta")] = static_cast<int>(pi1 * params.p - 1);
    return multiply(multiply(AlgebraElement::monomial(pres, delta_power(*pres, params.n, delta_shift)),
                             AlgebraElement::monomial(pres, h)),
                    AlgebraElement::monomial(pres, b));
}

}  // namespace detail

/// Rules of the model without validating bidegrees.
inline std::vector<DifferentialRule> eon_rules(const PresentationPtr& pres, const EonModelParams& params)
{
    std::vector<DifferentialRule> rules;
    const GfElement one(pres->field(), 1);
    for (std::uint32_t i = 1; i <= params.n; ++i) {
        const std::int64_t pi1 = static_cast<std::int64_t>(checked_pow(params.p, i - 1));
        rules.push_back({eon_page(params.p, i),
                         {detail::delta_power(*pres, params.n, pi1), one},
                         detail::eon_target(pres, params, i, pi1).scaled(params.a_units[i - 1])});
    }
    for (const auto& t : params.toda_hook)
        rules.push_back(make_rule(pres, t.page, t.source, t.target));
    return rules;
}

inline std::vector<Monomial> eon_permanent_cycles(const PresentationPtr& pres, const EonModelParams& params)
{
    std::vector<Monomial> out;
    const GfElement one(pres->field(), 1);
    const auto dn = pres->index_of(delta_name(params.n));
    for (std::uint32_t i = 1; i < params.n; ++i) {
        Exponents e = pres->unit_exponents();
        e[pres->index_of(delta_name(i))] = 1;
        e[dn] = -1;
        out.push_back({e, one});
    }
    out.push_back({detail::delta_power(*pres, params.n, static_cast<std::int64_t>(checked_pow(params.p, params.n))), one});
    return out;
}

/// The E_2 page with its differentials. Throws BidegreeError in paper-literal mode.
inline SpectralSequence build_e2(const EonModelParams& params)
{
    params.validate();
    auto pres = eon_presentation(params);
    auto rules = eon_rules(pres, params);
    int r_max = eon_page(params.p, params.n);
    for (const auto& r : rules)
        r_max = std::max(r_max, r.page);
    BidegreeWindow w = params.window ? *params.window : eon_window(params, static_cast<std::int64_t>(checked_pow(params.p, params.n)));
    for (std::uint32_t i = 1; i < params.n; ++i)
        w.exponent_caps.emplace(delta_name(i), params.delta_cap);
    return SpectralSequence(pres, std::move(rules), eon_permanent_cycles(pres, params), std::move(w), r_max,
                            std::nullopt, params.transfer_sector);
}

struct ShiftStep {
    std::uint32_t i;
    int page;
    std::int64_t ell;
    std::int64_t prefix;     // k_i = l_1 + ... + l_i p^{i-1}
    GfElement coefficient;   // l_i a_i + b_i
};

struct ShiftCertificate {
    std::uint32_t p = 3;
    std::uint32_t n = 1;
    std::vector<std::int64_t> ells;
    std::int64_t N = 0;
    std::int64_t shift = 0;
    std::vector<ShiftStep> steps;

    nlohmann::json to_json() const
    {
        nlohmann::json steps_json = nlohmann::json::array();
        for (const auto& s : steps)
            steps_json.push_back({{"i", s.i},
                                  {"page", s.page},
                                  {"ell", s.ell},
                                  {"prefix", s.prefix},
                                  {"coefficient", s.coefficient.to_string()}});
        return {{"p", p}, {"n", n}, {"ells", ells}, {"N", N}, {"shift", shift}, {"steps", steps_json}};
    }
};

/// Choose l_i in [0, p) with l_i a_i + b_i = 0 for each i.
inline ShiftCertificate sw_shift(const EonModelParams& params)
{
    params.validate();
    const auto& F = params.field();
    ShiftCertificate cert;
    cert.p = params.p;
    cert.n = params.n;
    std::int64_t prefix = 0, weight = 1;
    for (std::uint32_t i = 1; i <= params.n; ++i) {
        const GfElement& a = params.a_units[i - 1];
        const GfElement& b = params.b_units[i - 1];
        GfElement ell = -(b / a);
        if (!ell.in_prime_subfield())
            throw Error("no l in F_p solves l*a_" + std::to_string(i) + " + b_" + std::to_string(i) + " = 0 (-b/a = " +
                        ell.to_string() + " lies outside F_" + std::to_string(params.p) + ")");
        const auto l = static_cast<std::int64_t>(ell.code());
        prefix += l * weight;
        GfElement coef = GfElement::from_int(F, l) * a + b;
        if (!coef.is_zero())
            throw Error("sw_shift: internal error, l a + b != 0");
        cert.ells.push_back(l);
        cert.steps.push_back({i, eon_page(params.p, i), l, prefix, coef});
        weight *= params.p;
    }
    cert.N = prefix;
    cert.shift = 2 * static_cast<std::int64_t>(params.p) * cert.N;
    return cert;
}

/// l_i a_i + b_i = 0 for every step, checked directly in F_{p^n}.
inline bool certificate_valid(const EonModelParams& params, const ShiftCertificate& cert)
{
    if (cert.ells.size() != params.n)
        return false;
    std::int64_t N = 0, weight = 1;
    for (std::uint32_t i = 0; i < params.n; ++i) {
        const auto l = cert.ells[i];
        if (l < 0 || l >= static_cast<std::int64_t>(params.p))
            return false;
        if (!(GfElement::from_int(params.field(), l) * params.a_units[i] + params.b_units[i]).is_zero())
            return false;
        N += l * weight;
        weight *= params.p;
    }
    return N == cert.N && cert.shift == 2 * static_cast<std::int64_t>(params.p) * N;
}

struct CoefficientWitness {
    std::uint32_t i;
    int page;
    GfElement engine;   // coefficient of the target monomial in d(delta_n^N gamma)
    GfElement formula;  // digit_i(N) a_i + b_i
};

struct ShiftVerdict {
    PermanenceVerdict verdict;
    std::vector<CoefficientWitness> witnesses;
    BidegreeWindow window;

    nlohmann::json to_json() const
    {
        nlohmann::json j = verdict.to_json();
        nlohmann::json ws = nlohmann::json::array();
        for (const auto& w : witnesses)
            ws.push_back({{"i", w.i},
                          {"page", w.page},
                          {"engine_coefficient", w.engine.to_string()},
                          {"formula_coefficient", w.formula.to_string()}});
        j["coefficients"] = ws;
        j["window"] = {{"stem_min", window.stem_min}, {"stem_max", window.stem_max}, {"filtration_max", window.filtration_max}};
        return j;
    }
};

/// The module spectral sequence of the dual, with rules built from the certificate's prefixes.
inline ModuleSpec eon_dual_module(const EonModelParams& params, const ShiftCertificate& cert, const BidegreeWindow& w)
{
    EonModelParams base_params = params;
    base_params.window = w;
    SpectralSequence base = build_e2(base_params);
    ModuleSpec mod(base, {"gamma", GeneratorKind::exterior, {0, 0}});
    const auto& pres = mod.presentation();
    Exponents g = pres->unit_exponents();
    g[mod.generator_index()] = 1;
    const AlgebraElement gamma = AlgebraElement::monomial(pres, g);
    std::int64_t prefix = 0;
    for (std::uint32_t i = 1; i <= params.n; ++i) {
        Exponents src = g;
        src[pres->index_of(delta_name(params.n))] = static_cast<int>(prefix);
        AlgebraElement target =
            multiply(detail::eon_target(pres, params, i, prefix), gamma).scaled(params.b_units[i - 1]);
        mod.add_rule({eon_page(params.p, i), {src, GfElement(pres->field(), 1)}, target});
        if (i - 1 < cert.steps.size())
            prefix = cert.steps[i - 1].prefix;
    }
    return mod;
}

/// Run the dual module spectral sequence and decide whether delta_n^N gamma is permanent.
inline ShiftVerdict verify_shift(const EonModelParams& params, const ShiftCertificate& cert,
                                 std::optional<BidegreeWindow> window = std::nullopt)
{
    params.validate();
    if (cert.steps.size() != params.n)
        throw Error("verify_shift: certificate has " + std::to_string(cert.steps.size()) + " steps, expected " +
                    std::to_string(params.n));
    ShiftVerdict out;
    out.window = window ? *window : eon_window(params, cert.N);
    ModuleSpec mod = eon_dual_module(params, cert, out.window);
    SseqRun run = module_run(mod);
    const auto& pres = mod.presentation();
    Exponents cls = pres->unit_exponents();
    cls[mod.generator_index()] = 1;
    cls[pres->index_of(delta_name(params.n))] = static_cast<int>(cert.N);
    AlgebraElement x = AlgebraElement::monomial(pres, cls);
    out.verdict = is_permanent_cycle(x, run);

    const auto& F = params.field();
    std::int64_t weight = 1;
    for (std::uint32_t i = 1; i <= params.n; ++i) {
        const int page = eon_page(params.p, i);
        AlgebraElement d = run.sseq().extend(cls, page).value;
        Exponents t = cls;
        t[pres->index_of(alpha_name(i))] = 1;
        t[pres->index_of("beta")] = static_cast<int>(weight * params.p - 1);
        t[pres->index_of(delta_name(params.n))] -= static_cast<int>(weight);
        const std::int64_t digit = (cert.N / weight) % params.p;
        GfElement formula = GfElement::from_int(F, digit) * params.a_units[i - 1] + params.b_units[i - 1];
        out.witnesses.push_back({i, page, d.coefficient_of(t), formula});
        weight *= params.p;
    }
    return out;
}

/// Reduction from a group G with Sylow p-subgroup C_p to C_p.
inline std::string leray_serre_descent_note(const EonModelParams& params, std::int64_t subgroup_index)
{
    if (subgroup_index < 1)
        throw Error("index must be >= 1");
    if (subgroup_index == 1)
        return "G = C_p, nothing to transfer";
    return "G contains C_p with index " + std::to_string(subgroup_index) +
           ", prime to p. The E_2 page for G is the G/C_p-invariants of the C_p page, so the norm over G/C_p of "
           "the C_p permanent cycle delta_" +
           std::to_string(params.n) +
           "^N gamma is a G-invariant permanent cycle and the shift certificate computed for C_p applies to G.";
}

}  // namespace sseqkit

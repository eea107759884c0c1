#pragma once

/*
 * Bigraded graded-commutative algebras presented by exterior, polynomial
 * and Laurent generators over a finite field.
 *
 * Bidegrees are (stem, filtration) in Adams indexing. The Koszul sign for
 * swapping two homogeneous elements is (-1)^{stem(x) * stem(y)}: only the
 * stem parity enters. Exterior generators square to zero; no other
 * relations are imposed.
 *
 * Monomials are exponent vectors aligned with the generator list, so the
 * lexicographic order on exponent vectors is the canonical term order.
 */

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sseqkit/arith.hpp"
#include "sseqkit/galois_field.hpp"

namespace sseqkit {

struct Bidegree {
    int stem = 0;
    int filtration = 0;

    Bidegree operator+(const Bidegree& o) const { return {stem + o.stem, filtration + o.filtration}; }
    Bidegree operator-(const Bidegree& o) const { return {stem - o.stem, filtration - o.filtration}; }
    Bidegree operator*(int k) const { return {stem * k, filtration * k}; }
    auto operator<=>(const Bidegree&) const = default;

    std::string to_string() const { return "(" + std::to_string(stem) + "," + std::to_string(filtration) + ")"; }
};

/// Bidegree shift of d_r: stem drops by one, filtration rises by r.
inline Bidegree differential_shift(int r) { return {-1, r}; }

enum class GeneratorKind { exterior, polynomial, laurent };

inline std::string to_string(GeneratorKind k)
{
    switch (k) {
    case GeneratorKind::exterior:
        return "exterior";
    case GeneratorKind::polynomial:
        return "polynomial";
    case GeneratorKind::laurent:
        return "laurent";
    }
    return "?";
}

inline GeneratorKind generator_kind_from_string(const std::string& s)
{
    if (s == "exterior")
        return GeneratorKind::exterior;
    if (s == "polynomial")
        return GeneratorKind::polynomial;
    if (s == "laurent")
        return GeneratorKind::laurent;
    throw Error("unknown generator kind: " + s);
}

struct GeneratorSpec {
    std::string name;
    GeneratorKind kind = GeneratorKind::polynomial;
    Bidegree degree;
};

using Exponents = std::vector<int>;

class Presentation {
public:
    Presentation(const GaloisField& field, std::vector<GeneratorSpec> generators)
        : field_(&field), gens_(std::move(generators))
    {
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            const auto& g = gens_[i];
            if (g.name.empty())
                throw Error("Presentation: empty generator name");
            if (!index_.emplace(g.name, i).second)
                throw Error("Presentation: duplicate generator " + g.name);
        }
    }

    const GaloisField& field() const { return *field_; }
    std::size_t size() const { return gens_.size(); }
    const GeneratorSpec& generator(std::size_t i) const { return gens_.at(i); }
    const std::vector<GeneratorSpec>& generators() const { return gens_; }

    std::size_t index_of(const std::string& name) const
    {
        auto it = index_.find(name);
        if (it == index_.end())
            throw Error("unknown generator: " + name);
        return it->second;
    }
    bool has_generator(const std::string& name) const { return index_.count(name) != 0; }

    Bidegree degree_of(const Exponents& e) const
    {
        Bidegree d{0, 0};
        for (std::size_t i = 0; i < gens_.size(); ++i)
            d = d + gens_[i].degree * e[i];
        return d;
    }

    int stem_of(const Exponents& e) const { return degree_of(e).stem; }

    /// True iff the exponents are allowed by each generator's kind.
    bool admissible(const Exponents& e) const
    {
        if (e.size() != gens_.size())
            return false;
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            switch (gens_[i].kind) {
            case GeneratorKind::exterior:
                if (e[i] < 0 || e[i] > 1)
                    return false;
                break;
            case GeneratorKind::polynomial:
                if (e[i] < 0)
                    return false;
                break;
            case GeneratorKind::laurent:
                break;
            }
        }
        return true;
    }

    Exponents unit_exponents() const { return Exponents(gens_.size(), 0); }

    std::string format(const Exponents& e) const
    {
        std::string s;
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            if (e[i] == 0)
                continue;
            if (!s.empty())
                s += " ";
            s += gens_[i].name;
            if (e[i] != 1)
                s += "^" + std::to_string(e[i]);
        }
        return s.empty() ? "1" : s;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json gens = nlohmann::json::array();
        for (const auto& g : gens_)
            gens.push_back({{"name", g.name},
                            {"kind", sseqkit::to_string(g.kind)},
                            {"stem", g.degree.stem},
                            {"filtration", g.degree.filtration}});
        return {{"generators", gens},
                {"field", {{"p", field_->characteristic()}, {"n", field_->degree()}, {"poly", field_->modulus()}}}};
    }

    static std::shared_ptr<const Presentation> from_json(const nlohmann::json& j)
    {
        const auto& f = j.at("field");
        const auto& field = GaloisField::get(f.at("p").get<std::uint32_t>(), f.at("n").get<std::uint32_t>());
        if (f.contains("poly") && f.at("poly").get<std::vector<std::uint32_t>>() != field.modulus())
            throw Error("Presentation::from_json: modulus differs from the canonical choice for " + field.describe());
        std::vector<GeneratorSpec> gens;
        for (const auto& g : j.at("generators"))
            gens.push_back({g.at("name").get<std::string>(), generator_kind_from_string(g.at("kind").get<std::string>()),
                            {g.at("stem").get<int>(), g.at("filtration").get<int>()}});
        return std::make_shared<const Presentation>(field, std::move(gens));
    }

private:
    const GaloisField* field_;
    std::vector<GeneratorSpec> gens_;
    std::unordered_map<std::string, std::size_t> index_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

struct Monomial {
    Exponents exponents;
    GfElement coefficient;
};

inline int stem_parity(int stem) { return stem & 1; }

/// Product of two unit monomials: exponents and Koszul sign, or nullopt when
/// an exterior generator would be squared.
inline std::optional<std::pair<Exponents, int>> multiply_exponents(const Presentation& pres, const Exponents& x,
                                                                   const Exponents& y)
{
    const std::size_t n = pres.size();
    Exponents out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x[i] + y[i];
        if (pres.generator(i).kind == GeneratorKind::exterior && out[i] > 1)
            return std::nullopt;
    }
    // moving each factor g_j^{y_j} left past g_i^{x_i} for i > j
    int sign = 0;
    int odd_suffix = 0;  // parity of stem of x restricted to generators > j
    for (std::size_t j = n; j-- > 0;) {
        const int gj = stem_parity(pres.generator(j).degree.stem);
        if (gj && (y[j] & 1))
            sign ^= odd_suffix;
        if (gj && (x[j] & 1))
            odd_suffix ^= 1;
    }
    return std::make_pair(std::move(out), sign ? -1 : 1);
}

/// Homogeneous element: a sum of monomials of one bidegree.
class AlgebraElement {
public:
    explicit AlgebraElement(PresentationPtr pres) : pres_(std::move(pres)) {}

    static AlgebraElement one(PresentationPtr pres)
    {
        AlgebraElement a(pres);
        a.add_term(pres->unit_exponents(), GfElement(pres->field(), 1));
        return a;
    }

    static AlgebraElement monomial(PresentationPtr pres, Exponents e, std::optional<GfElement> coef = std::nullopt)
    {
        AlgebraElement a(pres);
        GfElement c = coef ? *coef : GfElement(pres->field(), 1);
        if (!pres->admissible(e))
            throw Error("AlgebraElement: inadmissible exponents " + pres->format(e));
        a.add_term(std::move(e), c);
        return a;
    }

    static AlgebraElement from_monomial(PresentationPtr pres, const Monomial& m)
    {
        return monomial(std::move(pres), m.exponents, m.coefficient);
    }

    const PresentationPtr& presentation() const { return pres_; }
    const std::map<Exponents, GfElement>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::optional<Bidegree> bidegree() const { return bidegree_; }

    std::vector<Monomial> monomials() const
    {
        std::vector<Monomial> out;
        for (const auto& [e, c] : terms_)
            out.push_back({e, c});
        return out;
    }

    GfElement coefficient_of(const Exponents& e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? GfElement(pres_->field(), 0) : it->second;
    }

    void add_term(const Exponents& e, const GfElement& c)
    {
        if (c.is_zero())
            return;
        if (&c.field() != &pres_->field())
            throw Error("AlgebraElement: coefficient from the wrong field");
        Bidegree d = pres_->degree_of(e);
        if (bidegree_ && *bidegree_ != d && !terms_.empty())
            throw Error("AlgebraElement: inhomogeneous sum " + bidegree_->to_string() + " vs " + d.to_string());
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
        if (terms_.empty())
            bidegree_.reset();
        else
            bidegree_ = d;
    }

    AlgebraElement operator+(const AlgebraElement& o) const
    {
        check(o);
        AlgebraElement r = *this;
        for (const auto& [e, c] : o.terms_)
            r.add_term(e, c);
        return r;
    }

    AlgebraElement operator-() const
    {
        AlgebraElement r(pres_);
        for (const auto& [e, c] : terms_)
            r.add_term(e, -c);
        return r;
    }

    AlgebraElement operator-(const AlgebraElement& o) const { return *this + (-o); }

    AlgebraElement scaled(const GfElement& k) const
    {
        AlgebraElement r(pres_);
        for (const auto& [e, c] : terms_)
            r.add_term(e, c * k);
        return r;
    }

    bool operator==(const AlgebraElement& o) const { return pres_ == o.pres_ && terms_ == o.terms_; }
    bool operator!=(const AlgebraElement& o) const { return !(*this == o); }

    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& [e, c] : terms_) {
            if (!s.empty())
                s += " + ";
            if (!c.is_one())
                s += (pres_->field().degree() > 1 ? "(" + c.to_string() + ")" : c.to_string()) + " ";
            s += pres_->format(e);
        }
        return s;
    }

private:
    void check(const AlgebraElement& o) const
    {
        if (pres_ != o.pres_)
            throw Error("AlgebraElement: different presentations");
    }

    PresentationPtr pres_;
    std::map<Exponents, GfElement> terms_;
    std::optional<Bidegree> bidegree_;
};

/// Graded-commutative product.
inline AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b)
{
    if (a.presentation() != b.presentation())
        throw Error("multiply: different presentations");
    const auto& pres = *a.presentation();
    AlgebraElement out(a.presentation());
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            auto prod = multiply_exponents(pres, ea, eb);
            if (!prod)
                continue;
            GfElement c = ca * cb;
            out.add_term(prod->first, prod->second < 0 ? -c : c);
        }
    return out;
}

/// Parse "2 a1 b^2 d^-1" style monomials; generator names must not start with a digit or '-'.
inline Monomial parse_monomial(const Presentation& pres, const std::string& text)
{
    Exponents e = pres.unit_exponents();
    GfElement coef(pres.field(), 1);
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), '*', ' ');
    std::istringstream in(normalized);
    std::string tok;
    bool first = true;
    while (in >> tok) {
        if (first && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-')) {
            coef = GfElement::from_int(pres.field(), std::stoll(tok));
            first = false;
            continue;
        }
        first = false;
        auto caret = tok.find('^');
        std::string name = tok.substr(0, caret);
        int power = caret == std::string::npos ? 1 : std::stoi(tok.substr(caret + 1));
        e[pres.index_of(name)] += power;
    }
    if (!pres.admissible(e))
        throw Error("parse_monomial: inadmissible exponents in '" + text + "'");
    return {e, coef};
}

/// Sum of monomials separated by '+', or "0".
inline AlgebraElement parse_element(const PresentationPtr& pres, const std::string& text)
{
    AlgebraElement out(pres);
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t plus = text.find('+', start);
        std::string piece = text.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
        if (piece.find_first_not_of(" \t") != std::string::npos && piece.find_first_not_of(" \t0") != std::string::npos) {
            Monomial m = parse_monomial(*pres, piece);
            out.add_term(m.exponents, m.coefficient);
        }
        if (plus == std::string::npos)
            break;
        start = plus + 1;
    }
    return out;
}

/// Finite region of a chart. Optional per-generator exponent caps [lo, hi]
/// are intersected with the bounds implied by the stem and filtration ranges.
struct BidegreeWindow {
    int stem_min = 0;
    int stem_max = 0;
    int filtration_max = 0;
    std::map<std::string, std::pair<int, int>> exponent_caps;

    bool contains(const Bidegree& b) const
    {
        return b.stem >= stem_min && b.stem <= stem_max && b.filtration >= 0 && b.filtration <= filtration_max;
    }
};

namespace detail {

inline constexpr long long kUnbounded = std::numeric_limits<long long>::max() / 8;

struct Interval {
    long long lo = -kUnbounded;
    long long hi = kUnbounded;
    bool finite() const { return lo > -kUnbounded && hi < kUnbounded; }
};

// range of c * e for e in iv (kUnbounded marks infinity)
inline std::pair<long long, long long> scaled_range(const Interval& iv, long long c)
{
    auto mul = [](long long v, long long k) -> long long {
        if (k == 0)
            return 0;
        if (v >= kUnbounded)
            return k > 0 ? kUnbounded : -kUnbounded;
        if (v <= -kUnbounded)
            return k > 0 ? -kUnbounded : kUnbounded;
        return v * k;
    };
    long long a = mul(iv.lo, c), b = mul(iv.hi, c);
    return {std::min(a, b), std::max(a, b)};
}

inline long long sat_add(long long a, long long b)
{
    if (a >= kUnbounded || b >= kUnbounded)
        return kUnbounded;
    if (a <= -kUnbounded || b <= -kUnbounded)
        return -kUnbounded;
    return a + b;
}

inline long long floor_div_ll(long long a, long long b)
{
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

inline long long ceil_div_ll(long long a, long long b) { return -floor_div_ll(-a, b); }

// Tighten each interval against lo <= sum c_i e_i <= hi. Returns true if anything changed.
inline bool propagate(std::vector<Interval>& ivs, const std::vector<long long>& coeffs, long long lo, long long hi)
{
    bool changed = false;
    const std::size_t n = ivs.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (coeffs[i] == 0)
            continue;
        long long rest_min = 0, rest_max = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            auto [a, b] = scaled_range(ivs[j], coeffs[j]);
            rest_min = sat_add(rest_min, a);
            rest_max = sat_add(rest_max, b);
        }
        // lo - rest_max <= c e_i <= hi - rest_min
        const long long c = coeffs[i];
        if (rest_min > -kUnbounded) {
            long long upper = hi - rest_min;  // c e <= upper
            if (c > 0) {
                long long bound = floor_div_ll(upper, c);
                if (bound < ivs[i].hi) {
                    ivs[i].hi = bound;
                    changed = true;
                }
            } else {
                long long bound = ceil_div_ll(upper, c);
                if (bound > ivs[i].lo) {
                    ivs[i].lo = bound;
                    changed = true;
                }
            }
        }
        if (rest_max < kUnbounded) {
            long long lower = lo - rest_max;  // c e >= lower
            if (c > 0) {
                long long bound = ceil_div_ll(lower, c);
                if (bound > ivs[i].lo) {
                    ivs[i].lo = bound;
                    changed = true;
                }
            } else {
                long long bound = floor_div_ll(lower, c);
                if (bound < ivs[i].hi) {
                    ivs[i].hi = bound;
                    changed = true;
                }
            }
        }
    }
    return changed;
}

}  // namespace detail

/// Explicit exponent ranges implied by the window; throws "non-enumerable
/// window" if some exponent stays unbounded.
inline std::vector<std::pair<int, int>> exponent_bounds(const Presentation& pres, const BidegreeWindow& window)
{
    using detail::Interval;
    const std::size_t n = pres.size();
    std::vector<Interval> ivs(n);
    std::vector<long long> stems(n), filts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = pres.generator(i);
        stems[i] = g.degree.stem;
        filts[i] = g.degree.filtration;
        if (g.kind == GeneratorKind::exterior)
            ivs[i] = {0, 1};
        else if (g.kind == GeneratorKind::polynomial)
            ivs[i].lo = 0;
    }
    for (const auto& [name, cap] : window.exponent_caps) {
        auto i = pres.index_of(name);
        ivs[i].lo = std::max<long long>(ivs[i].lo, cap.first);
        ivs[i].hi = std::min<long long>(ivs[i].hi, cap.second);
    }
    for (int iter = 0; iter < 64; ++iter) {
        bool changed = detail::propagate(ivs, filts, 0, window.filtration_max);
        changed |= detail::propagate(ivs, stems, window.stem_min, window.stem_max);
        if (!changed)
            break;
    }
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!ivs[i].finite())
            throw Error("non-enumerable window: exponent of " + pres.generator(i).name + " is unbounded");
        out.emplace_back(static_cast<int>(ivs[i].lo), static_cast<int>(ivs[i].hi));
    }
    return out;
}

/// Unit monomials of every bidegree inside the window, lexicographically ordered.
inline std::map<Bidegree, std::vector<Monomial>> basis_in_bidegree(const Presentation& pres,
                                                                   const BidegreeWindow& window)
{
    auto bounds = exponent_bounds(pres, window);
    const std::size_t n = pres.size();
    // suffix ranges of stem / filtration contributions for pruning
    std::vector<long long> smin(n + 1, 0), smax(n + 1, 0), fmin(n + 1, 0), fmax(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) {
        const auto& d = pres.generator(i).degree;
        long long a = static_cast<long long>(d.stem) * bounds[i].first, b = static_cast<long long>(d.stem) * bounds[i].second;
        smin[i] = smin[i + 1] + std::min(a, b);
        smax[i] = smax[i + 1] + std::max(a, b);
        a = static_cast<long long>(d.filtration) * bounds[i].first;
        b = static_cast<long long>(d.filtration) * bounds[i].second;
        fmin[i] = fmin[i + 1] + std::min(a, b);
        fmax[i] = fmax[i + 1] + std::max(a, b);
    }
    std::map<Bidegree, std::vector<Monomial>> out;
    GfElement one(pres.field(), 1);
    Exponents e(n, 0);
    auto rec = [&](auto&& self, std::size_t i, long long stem, long long filt) -> void {
        if (stem + smax[i] < window.stem_min || stem + smin[i] > window.stem_max)
            return;
        if (filt + fmax[i] < 0 || filt + fmin[i] > window.filtration_max)
            return;
        if (i == n) {
            out[{static_cast<int>(stem), static_cast<int>(filt)}].push_back({e, one});
            return;
        }
        const auto& d = pres.generator(i).degree;
        for (int k = bounds[i].first; k <= bounds[i].second; ++k) {
            e[i] = k;
            self(self, i + 1, stem + static_cast<long long>(d.stem) * k, filt + static_cast<long long>(d.filtration) * k);
        }
        e[i] = 0;
    };
    rec(rec, 0, 0, 0);
    return out;
}

/// Basis of a single bidegree (empty if nothing lives there).
inline std::vector<Monomial> basis_in_bidegree(const Presentation& pres, const BidegreeWindow& window,
                                               const Bidegree& where)
{
    if (!window.contains(where))
        throw Error("basis_in_bidegree: " + where.to_string() + " outside the window");
    BidegreeWindow narrow = window;
    narrow.stem_min = narrow.stem_max = where.stem;
    narrow.filtration_max = where.filtration;
    auto all = basis_in_bidegree(pres, narrow);
    auto it = all.find(where);
    return it == all.end() ? std::vector<Monomial>{} : it->second;
}

}  // namespace sseqkit

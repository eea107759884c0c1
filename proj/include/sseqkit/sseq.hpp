#pragma once

/*
 * Spectral sequences of bigraded algebras in Adams indexing.
 *
 * d_r moves (stem, filtration) to (stem - 1, filtration + r). A spectral
 * sequence is given by primitive rules d_r(source) = target on monomials,
 * a list of declared permanent cycles, and a finite window. The value of d_r
 * on an arbitrary monomial is obtained by factoring the monomial into
 * permanent cycles, page-r rule sources and a remainder that is a d_r-cycle,
 * then applying the graded Leibniz rule
 *
 *     d(xy) = d(x) y + (-1)^{stem x} x d(y).
 *
 * Pages are computed lazily, one bidegree at a time. Classes are stored as
 * vectors in the E_2 monomial basis of their bidegree: at each page a
 * bidegree keeps a basis of boundaries B_r and representatives spanning a
 * complement of B_r in the cycles Z_r.
 */

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sseqkit/bigraded.hpp"
#include "sseqkit/matrix.hpp"

namespace sseqkit {

using FVec = Vec<GfElement>;
using FMatrix = Matrix<GfElement>;

/// Raised when differential rules have inconsistent bidegrees; lists every failing rule.
class BidegreeError : public Error {
public:
    explicit BidegreeError(std::vector<std::string> failures)
        : Error(summarize(failures)), failures_(std::move(failures))
    {
    }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    static std::string summarize(const std::vector<std::string>& f)
    {
        std::string s = "bidegree_check failed for " + std::to_string(f.size()) + " rule(s)";
        for (const auto& x : f)
            s += "\n  " + x;
        return s;
    }
    std::vector<std::string> failures_;
};

struct DifferentialRule {
    int page;
    Monomial source;
    AlgebraElement target;
};

inline DifferentialRule make_rule(const PresentationPtr& pres, int page, const std::string& source,
                                  const std::string& target)
{
    return {page, parse_monomial(*pres, source), parse_element(pres, target)};
}

inline std::string describe_rule(const Presentation& pres, const DifferentialRule& rule)
{
    return "d_" + std::to_string(rule.page) + "(" + pres.format(rule.source.exponents) + ") = " + rule.target.to_string();
}

/// True iff the target sits at source + (-1, r); a zero target always passes.
inline bool bidegree_check(const Presentation& pres, const DifferentialRule& rule)
{
    if (rule.source.exponents.size() != pres.size())
        throw Error("bidegree_check: source does not match the presentation (unknown generator)");
    if (rule.target.is_zero())
        return true;
    if (rule.target.presentation().get() != &pres)
        throw Error("bidegree_check: target uses a different presentation");
    return *rule.target.bidegree() == pres.degree_of(rule.source.exponents) + differential_shift(rule.page);
}

/// Human-readable description of every rule failing bidegree_check.
inline std::vector<std::string> validate_rules(const Presentation& pres, const std::vector<DifferentialRule>& rules)
{
    std::vector<std::string> failures;
    for (const auto& rule : rules) {
        if (bidegree_check(pres, rule))
            continue;
        Bidegree src = pres.degree_of(rule.source.exponents);
        Bidegree want = src + differential_shift(rule.page);
        failures.push_back(describe_rule(pres, rule) + ": source " + src.to_string() + ", target " +
                           rule.target.bidegree()->to_string() + ", expected " + want.to_string());
    }
    return failures;
}

class SpectralSequence {
public:
    /// `module_generator` names an exterior generator of weight one along
    /// which the chart is a module; `transfer_sector` adds classes (by
    /// bidegree and multiplicity) that are permanent and never touched by
    /// differentials.
    SpectralSequence(PresentationPtr pres, std::vector<DifferentialRule> rules, std::vector<Monomial> declared_permanent,
                     BidegreeWindow window, int r_max, std::optional<std::string> module_generator = std::nullopt,
                     std::map<Bidegree, int> transfer_sector = {})
        : pres_(std::move(pres)),
          rules_(std::move(rules)),
          permanent_(std::move(declared_permanent)),
          window_(std::move(window)),
          r_max_(r_max),
          transfer_(std::move(transfer_sector))
    {
        if (r_max_ < 2)
            throw Error("SpectralSequence: r_max must be >= 2");
        if (window_.stem_min > window_.stem_max || window_.filtration_max < 0)
            throw Error("SpectralSequence: empty window");
        for (const auto& [name, cap] : window_.exponent_caps)
            pres_->index_of(name);
        if (module_generator)
            module_index_ = pres_->index_of(*module_generator);
        std::set<std::pair<int, Exponents>> seen;
        for (const auto& rule : rules_) {
            if (rule.page < 2)
                throw Error("SpectralSequence: rule page must be >= 2");
            if (!pres_->admissible(rule.source.exponents))
                throw Error("SpectralSequence: inadmissible rule source");
            if (!rule.source.coefficient.is_one())
                throw Error("SpectralSequence: rule sources must have coefficient 1");
            if (!rule.target.is_zero() && rule.target.presentation() != pres_)
                throw Error("SpectralSequence: rule target uses a different presentation");
            if (!seen.emplace(rule.page, rule.source.exponents).second)
                throw Error("SpectralSequence: duplicate rule " + describe_rule(*pres_, rule));
        }
        auto failures = validate_rules(*pres_, rules_);
        if (!failures.empty())
            throw BidegreeError(std::move(failures));
        for (const auto& m : permanent_)
            if (!pres_->admissible(m.exponents))
                throw Error("SpectralSequence: inadmissible permanent cycle");
        for (const auto& rule : rules_)
            if (rule.page <= r_max_ && std::find(rule_pages_.begin(), rule_pages_.end(), rule.page) == rule_pages_.end())
                rule_pages_.push_back(rule.page);
        std::sort(rule_pages_.begin(), rule_pages_.end());
    }

    const PresentationPtr& presentation() const { return pres_; }
    const std::vector<DifferentialRule>& rules() const { return rules_; }
    const std::vector<Monomial>& declared_permanent() const { return permanent_; }
    const BidegreeWindow& window() const { return window_; }
    int r_max() const { return r_max_; }
    std::optional<std::size_t> module_generator() const { return module_index_; }
    const std::map<Bidegree, int>& transfer_sector() const { return transfer_; }

    /// Pages <= r_max carrying at least one rule, ascending.
    const std::vector<int>& rule_pages() const { return rule_pages_; }
    bool has_rules_at(int r) const { return std::binary_search(rule_pages_.begin(), rule_pages_.end(), r); }

    struct Extension {
        AlgebraElement value;
        bool rule_applied;  // some factor carried a page-r rule
    };

    /// d_r of the unit monomial with exponents e.
    Extension extend(const Exponents& e, int r) const
    {
        auto factors = decompose(e, r);
        bool applied = false;
        for (const auto& f : factors)
            applied |= f.rule != nullptr;
        AlgebraElement zero(pres_);
        if (!applied)
            return {zero, false};

        std::vector<AlgebraElement> value, dvalue;
        for (const auto& f : factors) {
            auto [v, dv] = power_with_derivative(f);
            value.push_back(std::move(v));
            dvalue.push_back(std::move(dv));
        }
        const std::size_t k = factors.size();
        std::vector<AlgebraElement> prefix{AlgebraElement::one(pres_)}, suffix(k + 1, AlgebraElement::one(pres_));
        for (std::size_t i = 0; i < k; ++i)
            prefix.push_back(multiply(prefix.back(), value[i]));
        for (std::size_t i = k; i-- > 0;)
            suffix[i] = multiply(value[i], suffix[i + 1]);

        // prefix[k] = eps * m with eps = +-1
        GfElement eps = prefix[k].coefficient_of(e);
        if (eps.is_zero() || prefix[k].terms().size() != 1)
            throw Error("leibniz_extend: factorization does not reproduce " + pres_->format(e));

        AlgebraElement d = zero;
        for (std::size_t i = 0; i < k; ++i) {
            if (dvalue[i].is_zero())
                continue;
            AlgebraElement term = multiply(multiply(prefix[i], dvalue[i]), suffix[i + 1]);
            if (pres_->stem_of(factor_exponents(factors, i)) & 1)
                term = -term;
            d = d + term;
        }
        return {d.scaled(eps.inverse()), true};
    }

private:
    struct Factor {
        Exponents base;
        int power;
        const DifferentialRule* rule;
    };

    bool laurent_only(const Exponents& x) const
    {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != 0 && pres_->generator(i).kind != GeneratorKind::laurent)
                return false;
        return true;
    }

    bool has_exterior_or_module(const Exponents& x) const
    {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] != 0 && (pres_->generator(i).kind == GeneratorKind::exterior || module_index_ == i))
                return true;
        return false;
    }

    // Largest q with e - q * base admissible in the non-Laurent generators;
    // for Laurent-only bases, Euclidean division on the first nonzero exponent.
    int multiplicity(const Exponents& e, const Exponents& base) const
    {
        bool any = false;
        for (int x : base)
            any |= x != 0;
        if (!any)
            return 0;
        if (laurent_only(base)) {
            for (std::size_t i = 0; i < base.size(); ++i)
                if (base[i] != 0)
                    return static_cast<int>(floor_div(e[i], base[i]));
        }
        int q = std::numeric_limits<int>::max();
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (base[i] == 0 || pres_->generator(i).kind == GeneratorKind::laurent)
                continue;
            q = std::min(q, e[i] / base[i]);
        }
        return q;
    }

    static void subtract(Exponents& e, const Exponents& base, int q)
    {
        for (std::size_t i = 0; i < e.size(); ++i)
            e[i] -= q * base[i];
    }

    std::vector<Factor> decompose(Exponents e, int r) const
    {
        std::vector<Factor> out;
        for (const auto& m : permanent_) {
            int q = multiplicity(e, m.exponents);
            if (q != 0) {
                out.push_back({m.exponents, q, nullptr});
                subtract(e, m.exponents, q);
            }
        }
        std::vector<const DifferentialRule*> page_rules;
        for (const auto& rule : rules_)
            if (rule.page == r)
                page_rules.push_back(&rule);
        std::stable_sort(page_rules.begin(), page_rules.end(), [&](const auto* a, const auto* b) {
            return has_exterior_or_module(a->source.exponents) > has_exterior_or_module(b->source.exponents);
        });
        for (const auto* rule : page_rules) {
            int q = multiplicity(e, rule->source.exponents);
            if (q != 0) {
                out.push_back({rule->source.exponents, q, rule});
                subtract(e, rule->source.exponents, q);
            }
        }
        bool rest = false;
        for (int x : e)
            rest |= x != 0;
        if (rest || out.empty())
            out.push_back({e, 1, nullptr});
        return out;
    }

    Exponents factor_exponents(const std::vector<Factor>& factors, std::size_t count) const
    {
        Exponents x = pres_->unit_exponents();
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < x.size(); ++j)
                x[j] += factors[i].power * factors[i].base[j];
        return x;
    }

    // (base^power, d(base^power)) with d(base) given by the factor's rule.
    std::pair<AlgebraElement, AlgebraElement> power_with_derivative(const Factor& f) const
    {
        const GaloisField& F = pres_->field();
        AlgebraElement t = AlgebraElement::monomial(pres_, f.base);
        AlgebraElement dt = f.rule ? f.rule->target : AlgebraElement(pres_);
        int power = f.power;
        if (power < 0) {
            if (!laurent_only(f.base))
                throw Error("leibniz_extend: negative power of a non-invertible monomial");
            Exponents neg = f.base;
            for (auto& x : neg)
                x = -x;
            AlgebraElement inv = AlgebraElement::monomial(pres_, neg);
            GfElement s = multiply(t, inv).coefficient_of(pres_->unit_exponents());
            inv = inv.scaled(s.inverse());
            // d(t^-1) = -(-1)^{|t|} t^-1 d(t) t^-1
            AlgebraElement dinv = multiply(multiply(inv, dt), inv);
            if (!(pres_->stem_of(f.base) & 1))
                dinv = -dinv;
            t = inv;
            dt = dinv;
            power = -power;
        }
        AlgebraElement value = AlgebraElement::one(pres_), dvalue(pres_);
        const int odd = pres_->stem_of(t.terms().begin()->first) & 1;
        for (int j = 0; j < power; ++j) {
            if (!dt.is_zero()) {
                AlgebraElement right = multiply(value, dt);
                if (odd && (j & 1))
                    right = -right;
                dvalue = multiply(dvalue, t) + right;
            }
            value = multiply(value, t);
        }
        (void)F;
        return {value, dvalue};
    }

    PresentationPtr pres_;
    std::vector<DifferentialRule> rules_;
    std::vector<Monomial> permanent_;
    BidegreeWindow window_;
    int r_max_;
    std::optional<std::size_t> module_index_;
    std::map<Bidegree, int> transfer_;
    std::vector<int> rule_pages_;
};

/// d_r(m) by the Leibniz rule from the primitive rules at page r.
inline AlgebraElement leibniz_extend(const SpectralSequence& ss, const Monomial& m, int r)
{
    return ss.extend(m.exponents, r).value.scaled(m.coefficient);
}

/// Abstract page: dimensions per bidegree and d_r matrices (columns indexed by
/// the source basis) in page coordinates.
struct ChainPage {
    int r = 2;
    const GaloisField* field = nullptr;
    std::map<Bidegree, std::size_t> dims;
    std::map<Bidegree, FMatrix> d;
    std::set<Bidegree> edge;
    std::map<Bidegree, std::vector<std::string>> labels;
    std::optional<BidegreeWindow> window;

    std::size_t dim(const Bidegree& b) const
    {
        auto it = dims.find(b);
        return it == dims.end() ? 0 : it->second;
    }
};

struct PageTransition {
    ChainPage next;
    std::map<Bidegree, std::vector<FVec>> survivors_local;       // basis of E_{r+1} in E_r coordinates
    std::map<Bidegree, std::vector<FVec>> new_boundaries_local;  // basis of im d_r
};

/// Homology of (E_r, d_r). Bidegrees whose d_r source or target falls outside
/// the window are marked edge-uncertain.
inline PageTransition turn_page(const ChainPage& page)
{
    if (!page.field)
        throw Error("turn_page: page has no field");
    const GfElement zero(*page.field, 0);
    const Bidegree shift = differential_shift(page.r);
    for (const auto& [b, m] : page.d) {
        if (m.cols() != page.dim(b) || m.rows() != page.dim(b + shift))
            throw Error("turn_page: d_" + std::to_string(page.r) + " at " + b.to_string() + " has the wrong shape");
        auto next = page.d.find(b + shift);
        if (next != page.d.end() && !(next->second * m).is_zero())
            throw Error("turn_page: d_r o d_r != 0 at " + b.to_string());
    }
    PageTransition out;
    out.next.r = page.r + 1;
    out.next.field = page.field;
    out.next.window = page.window;
    for (const auto& [b, n] : page.dims) {
        if (n == 0)
            continue;
        std::vector<FVec> kernel;
        auto dout = page.d.find(b);
        if (dout != page.d.end()) {
            kernel = row_reduce(dout->second).kernel_basis;
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                FVec v(n, zero);
                v[i] = zero.one_like();
                kernel.push_back(std::move(v));
            }
        }
        Echelon<GfElement> ech(n, 0, zero);
        std::vector<FVec> image;
        auto din = page.d.find(b - shift);
        if (din != page.d.end())
            for (auto& v : row_reduce(din->second).image_basis)
                if (ech.insert(v))
                    image.push_back(v);
        std::vector<FVec> survivors;
        for (auto& v : kernel)
            if (ech.insert(v))
                survivors.push_back(v);
        if (!survivors.empty())
            out.next.dims[b] = survivors.size();
        out.survivors_local[b] = std::move(survivors);
        out.new_boundaries_local[b] = std::move(image);

        bool edge = page.edge.count(b) != 0;
        if (page.window) {
            Bidegree t = b + shift, s = b - shift;
            edge |= !page.window->contains(t);
            edge |= s.filtration >= 0 && !page.window->contains(s);
        }
        if (edge)
            out.next.edge.insert(b);
    }
    return out;
}

/*
 * Lazily evaluated run of a spectral sequence. State s at a bidegree is the
 * page after the first s rule pages have been applied; pages without rules
 * share the state of the preceding rule page. Copies share one cache, which
 * is guarded by a mutex.
 */
class SseqRun {
public:
    explicit SseqRun(SpectralSequence ss) : impl_(std::make_shared<Impl>(std::move(ss))) {}

    const SpectralSequence& sseq() const { return impl_->ss; }

    /// Bidegrees of the window with nonzero E_2.
    std::vector<Bidegree> occupied() const
    {
        std::lock_guard lock(impl_->mu);
        std::vector<Bidegree> out;
        for (const auto& [b, basis] : impl_->basis())
            out.push_back(b);
        return out;
    }

    std::vector<Monomial> e2_basis(const Bidegree& b) const
    {
        std::lock_guard lock(impl_->mu);
        return impl_->basis_at(b);
    }

    std::size_t dimension(int r, const Bidegree& b) const
    {
        std::lock_guard lock(impl_->mu);
        return impl_->state(impl_->state_index(r), b)->reps.size();
    }

    bool edge_uncertain(int r, const Bidegree& b) const
    {
        std::lock_guard lock(impl_->mu);
        return impl_->state(impl_->state_index(r), b)->edge;
    }

    std::vector<AlgebraElement> representatives(int r, const Bidegree& b) const
    {
        std::lock_guard lock(impl_->mu);
        std::vector<AlgebraElement> out;
        for (const auto& v : impl_->state(impl_->state_index(r), b)->reps)
            out.push_back(impl_->element(b, v));
        return out;
    }

    /// d_r from E_r(b) to E_r(b + (-1, r)) in page coordinates; nullopt when
    /// r carries no rules or the target leaves the window.
    std::optional<FMatrix> differential_matrix(int r, const Bidegree& b) const
    {
        std::lock_guard lock(impl_->mu);
        if (!impl_->ss.has_rules_at(r))
            return std::nullopt;
        return impl_->dmatrix(impl_->state_index(r), b);
    }

    struct Reduction {
        bool cycle;         // lies in Z_r
        FVec coordinates;   // class in E_r, meaningful when cycle
        std::size_t dimension;
        bool edge;
    };

    Reduction reduce(int r, const AlgebraElement& x) const
    {
        std::lock_guard lock(impl_->mu);
        if (x.is_zero())
            throw Error("SseqRun::reduce: zero element has no bidegree");
        Bidegree b = *x.bidegree();
        auto st = impl_->state(impl_->state_index(r), b);
        auto red = st->quotient.reduce(impl_->vectorize(b, x));
        return {is_zero_vector(red.residual), red.tag, st->reps.size(), st->edge};
    }

    ChainPage page(int r) const
    {
        std::lock_guard lock(impl_->mu);
        return impl_->page(r);
    }

    /// Pages 2..r_max.
    std::vector<ChainPage> pages() const
    {
        std::vector<ChainPage> out;
        for (int r = 2; r <= impl_->ss.r_max(); ++r)
            out.push_back(page(r));
        return out;
    }

    /// The page after r_max.
    ChainPage e_infinity() const { return page(impl_->ss.r_max() + 1); }

    /// Chart export: every page with classes, labels and d_r arrows.
    nlohmann::json chart_json() const
    {
        nlohmann::json pages_json = nlohmann::json::array();
        for (int r = 2; r <= impl_->ss.r_max() + 1; ++r)
            pages_json.push_back(page_json(page(r), r > impl_->ss.r_max()));
        return {{"pages", pages_json}};
    }

    static nlohmann::json page_json(const ChainPage& pg, bool infinity = false)
    {
        nlohmann::json classes = nlohmann::json::array(), arrows = nlohmann::json::array();
        for (const auto& [b, n] : pg.dims) {
            auto lab = pg.labels.find(b);
            classes.push_back({{"stem", b.stem},
                               {"filtration", b.filtration},
                               {"dimension", n},
                               {"labels", lab == pg.labels.end() ? std::vector<std::string>{} : lab->second},
                               {"edge", pg.edge.count(b) != 0}});
        }
        for (const auto& [b, m] : pg.d) {
            std::size_t rk = rank(m);
            if (rk == 0)
                continue;
            Bidegree t = b + differential_shift(pg.r);
            arrows.push_back({{"r", pg.r}, {"source", {b.stem, b.filtration}}, {"target", {t.stem, t.filtration}}, {"rank", rk}});
        }
        nlohmann::json j{{"page", infinity ? nlohmann::json("infinity") : nlohmann::json(pg.r)},
                         {"classes", classes},
                         {"differentials", arrows}};
        return j;
    }

private:
    struct LocalState {
        std::vector<FVec> reps;
        std::vector<FVec> boundaries;
        Echelon<GfElement> quotient;
        bool edge = false;
    };
    using StatePtr = std::shared_ptr<const LocalState>;

    struct Impl {
        explicit Impl(SpectralSequence s) : ss(std::move(s)), zero(ss.presentation()->field(), 0) {}

        SpectralSequence ss;
        GfElement zero;
        std::recursive_mutex mu;
        std::optional<std::map<Bidegree, std::vector<Monomial>>> basis_;
        std::map<Bidegree, std::map<Exponents, std::size_t>> index_;
        std::map<std::pair<int, Bidegree>, StatePtr> states_;
        std::map<std::pair<int, Bidegree>, std::optional<FMatrix>> dmat_;
        std::map<std::pair<int, Exponents>, AlgebraElement> dcache_;

        const std::map<Bidegree, std::vector<Monomial>>& basis()
        {
            if (!basis_) {
                BidegreeWindow w = ss.window();
                if (auto g = ss.module_generator())
                    w.exponent_caps[ss.presentation()->generator(*g).name] = {1, 1};
                basis_ = basis_in_bidegree(*ss.presentation(), w);
                for (const auto& [b, list] : *basis_) {
                    auto& idx = index_[b];
                    for (std::size_t i = 0; i < list.size(); ++i)
                        idx.emplace(list[i].exponents, i);
                }
            }
            return *basis_;
        }

        std::vector<Monomial> basis_at(const Bidegree& b)
        {
            const auto& all = basis();
            auto it = all.find(b);
            return it == all.end() ? std::vector<Monomial>{} : it->second;
        }

        std::size_t dim_e2(const Bidegree& b)
        {
            const auto& all = basis();
            auto it = all.find(b);
            return it == all.end() ? 0 : it->second.size();
        }

        int state_index(int r) const
        {
            if (r < 2)
                throw Error("page index must be >= 2");
            const auto& pages = ss.rule_pages();
            return static_cast<int>(std::lower_bound(pages.begin(), pages.end(), r) - pages.begin());
        }

        FVec vectorize(const Bidegree& b, const AlgebraElement& x)
        {
            basis();
            FVec v(dim_e2(b), zero);
            if (x.is_zero())
                return v;
            if (*x.bidegree() != b)
                throw Error("vectorize: element lives in " + x.bidegree()->to_string() + ", not " + b.to_string());
            auto it = index_.find(b);
            for (const auto& [e, c] : x.terms()) {
                if (it == index_.end() || !it->second.count(e))
                    throw Error("monomial " + ss.presentation()->format(e) + " lies outside the enumerated basis at " +
                                b.to_string());
                v[it->second.at(e)] = c;
            }
            return v;
        }

        AlgebraElement element(const Bidegree& b, const FVec& v)
        {
            AlgebraElement x(ss.presentation());
            const auto& list = basis().at(b);
            for (std::size_t i = 0; i < v.size(); ++i)
                x.add_term(list[i].exponents, v[i]);
            return x;
        }

        const AlgebraElement& d_monomial(int r, const Exponents& e)
        {
            auto key = std::make_pair(r, e);
            auto it = dcache_.find(key);
            if (it == dcache_.end())
                it = dcache_.emplace(key, ss.extend(e, r).value).first;
            return it->second;
        }

        // d_r of a vector at b, as a vector at b + (-1, r)
        FVec apply_d(int r, const Bidegree& b, const FVec& v)
        {
            const auto& list = basis().at(b);
            Bidegree t = b + differential_shift(r);
            AlgebraElement acc(ss.presentation());
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!v[i].is_zero())
                    acc = acc + d_monomial(r, list[i].exponents).scaled(v[i]);
            return vectorize(t, acc);
        }

        StatePtr state(int s, const Bidegree& b)
        {
            if (!ss.window().contains(b))
                throw Error("bidegree " + b.to_string() + " outside the window");
            auto key = std::make_pair(s, b);
            if (auto it = states_.find(key); it != states_.end())
                return it->second;
            StatePtr out = s == 0 ? initial(b) : advance(s, b);
            states_.emplace(key, out);
            return out;
        }

        StatePtr initial(const Bidegree& b)
        {
            const std::size_t n = dim_e2(b);
            auto st = std::make_shared<LocalState>(LocalState{{}, {}, Echelon<GfElement>(n, n, zero), false});
            for (std::size_t i = 0; i < n; ++i) {
                FVec v(n, zero), tag(n, zero);
                v[i] = tag[i] = zero.one_like();
                st->quotient.insert(v, tag);
                st->reps.push_back(std::move(v));
            }
            return st;
        }

        // d at rule page index s (0-based) from E(s, b) into E(s, b + shift), page coordinates
        std::optional<FMatrix> dmatrix(int s, const Bidegree& b)
        {
            auto key = std::make_pair(s, b);
            if (auto it = dmat_.find(key); it != dmat_.end())
                return it->second;
            const int r = ss.rule_pages().at(static_cast<std::size_t>(s));
            const Bidegree t = b + differential_shift(r);
            std::optional<FMatrix> out;
            if (ss.window().contains(t)) {
                auto src = state(s, b);
                auto tgt = state(s, t);
                FMatrix m(tgt->reps.size(), src->reps.size(), zero);
                for (std::size_t j = 0; j < src->reps.size(); ++j) {
                    FVec w = apply_d(r, b, src->reps[j]);
                    auto red = tgt->quotient.reduce(w);
                    if (!is_zero_vector(red.residual))
                        throw Error("d_" + std::to_string(r) + " at " + b.to_string() +
                                    " hits a class that does not survive to E_" + std::to_string(r));
                    for (std::size_t i = 0; i < tgt->reps.size(); ++i)
                        m(i, j) = red.tag[i];
                }
                out = std::move(m);
            }
            dmat_.emplace(key, out);
            return out;
        }

        StatePtr advance(int s, const Bidegree& b)
        {
            auto prev = state(s - 1, b);
            const std::size_t n = dim_e2(b);
            if (n == 0)
                return prev;
            const int r = ss.rule_pages().at(static_cast<std::size_t>(s - 1));
            const Bidegree shift = differential_shift(r);
            const Bidegree t = b + shift, src = b - shift;
            bool edge = prev->edge;

            // cycles: kernel of d_r on the current representatives
            std::vector<FVec> candidates;
            auto dout = dmatrix(s - 1, b);
            if (dout) {
                edge |= state(s - 1, t)->edge;
                for (const auto& k : row_reduce(*dout).kernel_basis) {
                    FVec v(n, zero);
                    for (std::size_t j = 0; j < k.size(); ++j)
                        if (!k[j].is_zero())
                            for (std::size_t i = 0; i < n; ++i)
                                v[i] += k[j] * prev->reps[j][i];
                    candidates.push_back(std::move(v));
                }
            } else {
                edge = true;
                candidates = prev->reps;
            }

            // boundaries: previous ones plus the image of d_r from src
            Echelon<GfElement> bech(n, 0, zero);
            std::vector<FVec> boundaries;
            for (const auto& v : prev->boundaries)
                if (bech.insert(v))
                    boundaries.push_back(v);
            if (src.filtration >= 0) {
                if (!ss.window().contains(src)) {
                    edge = true;
                } else {
                    auto sst = state(s - 1, src);
                    edge |= sst->edge;
                    for (const auto& v : sst->reps) {
                        FVec w = apply_d(r, src, v);
                        if (bech.insert(w))
                            boundaries.push_back(std::move(w));
                    }
                }
            }
            std::vector<FVec> reps;
            for (auto& v : candidates)
                if (bech.insert(v))
                    reps.push_back(std::move(v));

            Echelon<GfElement> q(n, reps.size(), zero);
            for (const auto& v : boundaries)
                q.insert(v);
            for (std::size_t i = 0; i < reps.size(); ++i) {
                FVec tag(reps.size(), zero);
                tag[i] = zero.one_like();
                q.insert(reps[i], tag);
            }
            return std::make_shared<LocalState>(LocalState{std::move(reps), std::move(boundaries), std::move(q), edge});
        }

        ChainPage page(int r)
        {
            ChainPage pg;
            pg.r = r;
            pg.field = &ss.presentation()->field();
            pg.window = ss.window();
            const int s = state_index(r);
            const bool active = r <= ss.r_max() && ss.has_rules_at(r);
            for (const auto& [b, list] : basis()) {
                auto st = state(s, b);
                if (st->edge)
                    pg.edge.insert(b);
                if (st->reps.empty())
                    continue;
                pg.dims[b] = st->reps.size();
                auto& labels = pg.labels[b];
                for (const auto& v : st->reps)
                    labels.push_back(element(b, v).to_string());
                if (active)
                    if (auto m = dmatrix(s, b); m && m->rows() > 0)
                        pg.d.emplace(b, *m);
            }
            for (const auto& [b, count] : ss.transfer_sector()) {
                if (count <= 0 || !ss.window().contains(b))
                    continue;
                pg.dims[b] += static_cast<std::size_t>(count);
                // transfer classes carry no differentials; pad d_r with zero rows/columns
                for (int i = 0; i < count; ++i)
                    pg.labels[b].push_back("tr");
            }
            if (!ss.transfer_sector().empty())
                pad_transfer(pg);
            return pg;
        }

        void pad_transfer(ChainPage& pg)
        {
            std::map<Bidegree, FMatrix> padded;
            for (auto& [b, m] : pg.d) {
                Bidegree t = b + differential_shift(pg.r);
                FMatrix big(pg.dim(t), pg.dim(b), zero);
                for (std::size_t i = 0; i < m.rows(); ++i)
                    for (std::size_t j = 0; j < m.cols(); ++j)
                        big(i, j) = m(i, j);
                padded.emplace(b, std::move(big));
            }
            pg.d = std::move(padded);
        }
    };

    std::shared_ptr<Impl> impl_;
};

inline SseqRun run(const SpectralSequence& ss) { return SseqRun(ss); }

/// A module spectral sequence over `base`, free on one generator gamma.
class ModuleSpec {
public:
    ModuleSpec(const SpectralSequence& base, GeneratorSpec gamma) : base_(base), gamma_(std::move(gamma))
    {
        if (gamma_.kind != GeneratorKind::exterior)
            throw Error("ModuleSpec: the module generator is modeled as an exterior generator");
        auto gens = base.presentation()->generators();
        gens.push_back(gamma_);
        pres_ = std::make_shared<const Presentation>(base.presentation()->field(), std::move(gens));
    }

    const SpectralSequence& base() const { return base_; }
    const GeneratorSpec& generator() const { return gamma_; }
    /// Base generators followed by gamma.
    const PresentationPtr& presentation() const { return pres_; }
    std::size_t generator_index() const { return pres_->size() - 1; }
    const std::vector<DifferentialRule>& rules_on_generator() const { return rules_; }

    Exponents lift(const Exponents& e) const
    {
        Exponents x = e;
        x.push_back(0);
        return x;
    }

    AlgebraElement lift(const AlgebraElement& a) const
    {
        AlgebraElement out(pres_);
        for (const auto& [e, c] : a.terms())
            out.add_term(lift(e), c);
        return out;
    }

    /// x * gamma for a base element x.
    AlgebraElement times_generator(const AlgebraElement& a) const
    {
        Exponents g(pres_->size(), 0);
        g.back() = 1;
        return multiply(lift(a), AlgebraElement::monomial(pres_, g));
    }

    void add_rule(DifferentialRule rule)
    {
        if (rule.source.exponents.size() != pres_->size() || rule.source.exponents.back() != 1)
            throw Error("ModuleSpec: rule sources must be gamma-multiples");
        if (!bidegree_check(*pres_, rule))
            throw BidegreeError(validate_rules(*pres_, {rule}));
        rules_.push_back(std::move(rule));
    }

    /// The combined spectral sequence on base (x) gamma.
    SpectralSequence assemble(std::optional<BidegreeWindow> window = std::nullopt) const
    {
        std::vector<DifferentialRule> rules;
        for (const auto& r : base_.rules())
            rules.push_back({r.page, {lift(r.source.exponents), r.source.coefficient}, lift(r.target)});
        int r_max = base_.r_max();
        for (const auto& r : rules_) {
            rules.push_back(r);
            r_max = std::max(r_max, r.page);
        }
        std::vector<Monomial> perm;
        for (const auto& m : base_.declared_permanent())
            perm.push_back({lift(m.exponents), m.coefficient});
        BidegreeWindow w = window ? *window : base_.window();
        w.exponent_caps[gamma_.name] = {1, 1};
        return SpectralSequence(pres_, std::move(rules), std::move(perm), std::move(w), r_max, gamma_.name);
    }

private:
    SpectralSequence base_;
    GeneratorSpec gamma_;
    PresentationPtr pres_;
    std::vector<DifferentialRule> rules_;
};

inline SseqRun module_run(const ModuleSpec& mod, std::optional<BidegreeWindow> window = std::nullopt)
{
    return SseqRun(mod.assemble(std::move(window)));
}

enum class Permanence { permanent, dies, edge_uncertain };

inline std::string to_string(Permanence p)
{
    switch (p) {
    case Permanence::permanent:
        return "permanent";
    case Permanence::dies:
        return "dies";
    case Permanence::edge_uncertain:
        return "edge-uncertain";
    }
    return "?";
}

struct PageWitness {
    int page;
    std::string reason;  // no rule, zero coefficient, zero target group, target is boundary, out-of-window, nonzero
    std::optional<Bidegree> target;
    std::string detail;
};

struct PermanenceVerdict {
    Permanence status = Permanence::permanent;
    std::optional<int> dies_at_page;
    Bidegree bidegree;
    std::string element;
    std::vector<PageWitness> pages;
    std::string margin;

    nlohmann::json to_json() const
    {
        nlohmann::json ps = nlohmann::json::array();
        for (const auto& w : pages) {
            nlohmann::json j{{"page", w.page}, {"reason", w.reason}};
            if (w.target)
                j["target"] = {w.target->stem, w.target->filtration};
            if (!w.detail.empty())
                j["detail"] = w.detail;
            ps.push_back(j);
        }
        nlohmann::json j{{"verdict", to_string(status)},
                         {"class", element},
                         {"bidegree", {bidegree.stem, bidegree.filtration}},
                         {"pages", ps},
                         {"margin", margin}};
        j["dies_at_page"] = dies_at_page ? nlohmann::json(*dies_at_page) : nlohmann::json(nullptr);
        return j;
    }
};

/// Follow a class through pages 2..r_max. A "permanent" verdict also needs
/// r_max of room around the class in the stem direction and above it.
inline PermanenceVerdict is_permanent_cycle(const AlgebraElement& cls, const SseqRun& run)
{
    const SpectralSequence& ss = run.sseq();
    if (cls.presentation() != ss.presentation())
        throw Error("is_permanent_cycle: class uses a different presentation");
    if (cls.is_zero())
        throw Error("is_permanent_cycle: zero class");
    PermanenceVerdict v;
    v.bidegree = *cls.bidegree();
    v.element = cls.to_string();
    const auto& w = ss.window();
    if (!w.contains(v.bidegree))
        throw Error("is_permanent_cycle: class at " + v.bidegree.to_string() + " is not in the window");

    bool uncertain = false;
    for (int r = 2; r <= ss.r_max(); ++r) {
        if (!ss.has_rules_at(r)) {
            v.pages.push_back({r, "no rule", std::nullopt, ""});
            continue;
        }
        AlgebraElement d(ss.presentation());
        bool applied = false;
        for (const auto& [e, c] : cls.terms()) {
            auto ext = ss.extend(e, r);
            applied |= ext.rule_applied;
            d = d + ext.value.scaled(c);
        }
        const Bidegree t = v.bidegree + differential_shift(r);
        if (!applied) {
            v.pages.push_back({r, "no rule", t, ""});
            continue;
        }
        if (d.is_zero()) {
            v.pages.push_back({r, "zero coefficient", t, ""});
            continue;
        }
        if (!w.contains(t)) {
            uncertain = true;
            v.pages.push_back({r, "out-of-window", t, d.to_string()});
            continue;
        }
        auto red = run.reduce(r, d);
        if (!red.cycle)
            throw Error("is_permanent_cycle: d_" + std::to_string(r) + " lands outside Z_" + std::to_string(r));
        if (red.dimension == 0) {
            v.pages.push_back({r, "zero target group", t, d.to_string()});
            continue;
        }
        if (is_zero_vector(red.coordinates)) {
            v.pages.push_back({r, "target is boundary", t, d.to_string()});
            continue;
        }
        v.pages.push_back({r, "nonzero", t, d.to_string()});
        v.status = red.edge ? Permanence::edge_uncertain : Permanence::dies;
        if (!red.edge)
            v.dies_at_page = r;
        v.margin = red.edge ? "target bidegree has sources outside the window" : "";
        return v;
    }
    const int m = ss.r_max();
    const bool margin_ok = v.bidegree.stem - m >= w.stem_min && v.bidegree.stem + m <= w.stem_max &&
                           v.bidegree.filtration + m <= w.filtration_max;
    if (!margin_ok || uncertain) {
        v.status = Permanence::edge_uncertain;
        v.margin = "window leaves less than r_max = " + std::to_string(m) + " around the class";
    } else {
        v.margin = "ok (r_max = " + std::to_string(m) + ")";
    }
    return v;
}

}  // namespace sseqkit

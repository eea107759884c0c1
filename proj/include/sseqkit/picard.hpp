#pragma once

/*
 * The K(1)-local Picard group at an odd prime.
 *
 * Descent spectral sequence E_2^{s,t} = H^s_c(Z_p^x; pi_t pic(K_p)) with
 * d_r : E_r^{s,t} -> E_r^{s+r, t+r-1}, abutting to pi_{t-s}. Rows:
 *   t = 0:  pi_0 pic = Z/2 with trivial action,
 *   t = 1:  pi_1 pic = Z_p^x with trivial action,
 *   t >= 2: pi_t pic = pi_{t-1} K_p, i.e. Z_p(m) for t = 2m + 1 and 0 for t even.
 *
 * The p-adic spheres S^{-|v_1| a} are modeled by the colimit
 *   M(p) -> M(p^2) -> Sigma^{-|v_1| a_1} M(p^2) -> M(p^3) -> ...
 * with K(1)-homology of each Moore spectrum 2-dimensional.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sseqkit/cohomology.hpp"
#include "sseqkit/fin_ab_group.hpp"
#include "sseqkit/galois_field.hpp"
#include "sseqkit/matrix.hpp"

namespace sseqkit {

struct PicEntry {
    FinAbGroup group;
    std::string provenance;
};

struct PicE2Table {
    std::uint64_t p = 3;
    int t_max = 0;
    int s_max = 3;
    std::map<std::pair<int, int>, PicEntry> entries;  // (s, t); zero groups are omitted

    FinAbGroup at(int s, int t) const
    {
        auto it = entries.find({s, t});
        return it == entries.end() ? FinAbGroup::trivial() : it->second.group;
    }

    void set(int s, int t, FinAbGroup g, std::string provenance)
    {
        if (g.is_trivial())
            entries.erase({s, t});
        else
            entries[{s, t}] = {std::move(g), std::move(provenance)};
    }

    nlohmann::json to_json() const
    {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& [st, e] : entries)
            list.push_back({{"s", st.first},
                            {"t", st.second},
                            {"group", e.group.to_json()},
                            {"text", e.group.to_string(p)},
                            {"provenance", e.provenance}});
        return {{"p", p}, {"t_max", t_max}, {"s_max", s_max}, {"entries", list}};
    }
};

/// E_2 table for 0 <= t <= t_max, 0 <= s <= s_max.
inline PicE2Table pic_e2(std::uint64_t p, int t_max, int s_max = 3, int K = kDefaultPrecision)
{
    if (p == 2)
        throw Error("pic_e2: p = 2 is out of scope (odd primes only)");
    if (!is_prime(p))
        throw Error("pic_e2: p must be prime");
    if (t_max < 2)
        throw Error("pic_e2: t_max must be >= 2");
    PicE2Table table;
    table.p = p;
    table.t_max = t_max;
    table.s_max = s_max;
    table.set(0, 0, FinAbGroup::cyclic(2), "H^0_c(Z_p^x; Z/2)");
    table.set(1, 1, zpx_units_h1(p, K), "zpx_units_h1");
    for (int t = 2; t <= t_max; ++t) {
        if (t % 2 == 0)
            continue;
        WeightedZpModule mod{p, (t - 1) / 2, K};
        for (int s = 0; s <= std::min(s_max, 1); ++s)
            table.set(s, t, zpx_cohomology(mod, s), "zpx_cohomology(m=" + std::to_string(mod.weight) + ")");
    }
    return table;
}

/// Closed form for the t >= 2 part: Z/p^{v_p(t')+1} at s = 1, t = 2(p-1)t' + 1.
inline FinAbGroup pic_e2_closed_form(std::uint64_t p, int s, int t)
{
    const std::int64_t period = 2 * (static_cast<std::int64_t>(p) - 1);
    if (s != 1 || t < 2 || (t - 1) % period != 0)
        return FinAbGroup::trivial();
    const std::int64_t tp = (t - 1) / period;
    return FinAbGroup::cyclic(checked_pow(p, static_cast<unsigned>(valuation(tp, static_cast<std::int64_t>(p)) + 1)));
}

struct Obstruction {
    int r;
    std::pair<int, int> source;
    std::pair<int, int> target;
};

struct CollapseResult {
    bool collapses = true;
    std::vector<Obstruction> obstructions;

    nlohmann::json to_json() const
    {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& o : obstructions)
            list.push_back({{"r", o.r},
                            {"source", {o.source.first, o.source.second}},
                            {"target", {o.target.first, o.target.second}}});
        return {{"collapses", collapses}, {"obstructions", list}};
    }
};

/// E_2 = E_infinity iff no d_r has both a nonzero source and a nonzero target.
inline CollapseResult collapse_check(const PicE2Table& table)
{
    CollapseResult out;
    for (const auto& [st, src] : table.entries) {
        for (const auto& [tt, tgt] : table.entries) {
            const int r = tt.first - st.first;
            if (r >= 2 && tt.second == st.second + r - 1)
                out.obstructions.push_back({r, st, tt});
        }
    }
    out.collapses = out.obstructions.empty();
    return out;
}

enum class ExtensionResolution { nonsplit_hms, split, unresolved };

inline std::string to_string(ExtensionResolution r)
{
    switch (r) {
    case ExtensionResolution::nonsplit_hms:
        return "nonsplit_HMS";
    case ExtensionResolution::split:
        return "split";
    case ExtensionResolution::unresolved:
        return "unresolved";
    }
    return "?";
}

inline ExtensionResolution extension_resolution_from_string(const std::string& s)
{
    if (s == "nonsplit" || s == "nonsplit_HMS" || s == "nonsplit_hms")
        return ExtensionResolution::nonsplit_hms;
    if (s == "split")
        return ExtensionResolution::split;
    if (s == "unresolved")
        return ExtensionResolution::unresolved;
    throw Error("unknown extension resolution: " + s);
}

struct GradedPiece {
    int s;
    int t;
    FinAbGroup group;
};

struct PicardGroupResult {
    std::uint64_t p = 3;
    std::vector<GradedPiece> graded;
    std::optional<FinAbGroup> resolved;
    ExtensionResolution resolution = ExtensionResolution::unresolved;
    std::string source;

    nlohmann::json to_json() const
    {
        nlohmann::json g = nlohmann::json::array();
        for (const auto& piece : graded)
            g.push_back({{"s", piece.s}, {"t", piece.t}, {"group", piece.group.to_json()}, {"text", piece.group.to_string(p)}});
        nlohmann::json j{{"graded", g}, {"resolution", to_string(resolution)}, {"source", source}};
        if (resolved) {
            j["resolved"] = resolved->to_json();
            j["resolved_text"] = resolved->to_string(p);
        } else {
            j["resolved"] = nullptr;
            j["resolved_text"] = nullptr;
        }
        return j;
    }
};

/// pi_0 from the line t - s = 0. The nonsplit resolution merges the torsion
/// pieces into one cyclic group (Hopkins-Mahowald-Sadofsky).
inline PicardGroupResult assemble_pi0(const PicE2Table& table, ExtensionResolution resolution)
{
    if (!collapse_check(table).collapses)
        throw Error("cannot assemble across live differentials");
    PicardGroupResult out;
    out.p = table.p;
    out.resolution = resolution;
    FinAbGroup sum;
    std::uint64_t torsion = 1;
    int free_rank = 0;
    for (const auto& [st, e] : table.entries) {
        if (st.first != st.second)
            continue;
        out.graded.push_back({st.first, st.second, e.group});
        sum = sum.direct_sum(e.group);
        torsion *= e.group.torsion_order();
        free_rank += e.group.free_rank();
    }
    switch (resolution) {
    case ExtensionResolution::nonsplit_hms:
        out.resolved = FinAbGroup::free(free_rank).direct_sum(FinAbGroup::cyclic(torsion));
        out.source = "nonsplit extension imported from Hopkins-Mahowald-Sadofsky";
        break;
    case ExtensionResolution::split:
        out.resolved = sum;
        out.source = "split extension (direct sum of the graded pieces)";
        break;
    case ExtensionResolution::unresolved:
        out.source = "extension not resolved; associated graded only";
        break;
    }
    return out;
}

/// p-adic integer given by its first digits.
struct PAdicDigitStream {
    std::uint64_t p = 3;
    std::vector<std::uint64_t> digits;

    PAdicDigitStream(std::uint64_t prime, std::vector<std::uint64_t> ds) : p(prime), digits(std::move(ds))
    {
        if (!is_prime(p))
            throw Error("PAdicDigitStream: p must be prime");
        for (auto d : digits)
            if (d >= p)
                throw Error("PAdicDigitStream: digit " + std::to_string(d) + " out of range [0, " + std::to_string(p) + ")");
    }

    /// Digits of a (negative a uses its p-adic expansion), padded to `depth`.
    static PAdicDigitStream from_integer(std::int64_t a, std::uint64_t p, std::size_t depth)
    {
        const std::int64_t mod = static_cast<std::int64_t>(checked_pow(p, static_cast<unsigned>(depth)));
        std::uint64_t x = static_cast<std::uint64_t>(mod_floor(a, mod));
        std::vector<std::uint64_t> ds;
        for (std::size_t k = 0; k < depth; ++k) {
            ds.push_back(x % p);
            x /= p;
        }
        return {p, ds};
    }

    /// a_m = sum_{k <= m} lambda_k p^k.
    std::int64_t truncation(std::size_t m) const
    {
        if (m >= digits.size())
            throw Error("PAdicDigitStream: truncation past the known digits");
        std::int64_t a = 0;
        for (std::size_t k = 0; k <= m; ++k)
            a += static_cast<std::int64_t>(digits[k] * checked_pow(p, static_cast<unsigned>(k)));
        return a;
    }
};

struct MooreStage {
    int k;
    std::uint64_t moore_order;      // p^{k+1}
    std::int64_t suspension_in;     // -|v_1| a_{k-1}
    std::int64_t suspension_out;    // -|v_1| a_k
    std::int64_t selfmap_power;     // p^k lambda_k
};

enum class TransitionKind { inclusion, v1_power };

/// A map between suspended Moore spectra on K(1)-homology: basis (bottom
/// cell, top cell) on both sides.
struct MooreTransition {
    TransitionKind kind;
    std::uint64_t source_order, target_order;
    std::int64_t source_suspension, target_suspension;
    Matrix<GfElement> matrix;
};

struct MooreDiagram {
    std::uint64_t p = 3;
    std::vector<MooreStage> stages;
    std::vector<MooreTransition> transitions;

    std::int64_t v1_degree() const { return 2 * (static_cast<std::int64_t>(p) - 1); }

    std::vector<std::int64_t> suspensions() const
    {
        std::vector<std::int64_t> out;
        for (const auto& s : stages)
            out.push_back(s.suspension_out);
        return out;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json st = nlohmann::json::array(), tr = nlohmann::json::array();
        for (const auto& s : stages)
            st.push_back({{"k", s.k},
                          {"moore_order", s.moore_order},
                          {"suspension_in", s.suspension_in},
                          {"suspension_out", s.suspension_out},
                          {"selfmap_power", s.selfmap_power}});
        for (const auto& t : transitions) {
            std::vector<std::vector<std::uint32_t>> m;
            for (std::size_t i = 0; i < t.matrix.rows(); ++i) {
                m.emplace_back();
                for (std::size_t j = 0; j < t.matrix.cols(); ++j)
                    m.back().push_back(t.matrix(i, j).code());
            }
            tr.push_back({{"kind", t.kind == TransitionKind::inclusion ? "inclusion" : "v1_power"},
                          {"source", {{"order", t.source_order}, {"suspension", t.source_suspension}}},
                          {"target", {{"order", t.target_order}, {"suspension", t.target_suspension}}},
                          {"matrix", m}});
        }
        return {{"p", p}, {"v1_degree", v1_degree()}, {"stages", st}, {"suspensions", suspensions()}, {"transitions", tr}};
    }
};

namespace detail {

inline Matrix<GfElement> moore_matrix(std::uint64_t p, bool top_survives)
{
    const auto& F = GaloisField::get(static_cast<std::uint32_t>(p), 1);
    Matrix<GfElement> m(2, 2, GfElement(F, 0));
    m(0, 0) = GfElement(F, 1);
    if (top_survives)
        m(1, 1) = GfElement(F, 1);
    return m;
}

}  // namespace detail

/// Stages 0..depth-1; stage k is the inclusion into M(p^{k+1}) followed by
/// v_1^{p^k lambda_k}. A final inclusion into M(p^{depth+1}) stands for the
/// rest of the colimit.
inline MooreDiagram build_diagram(const PAdicDigitStream& a, std::size_t depth)
{
    if (depth > a.digits.size())
        throw Error("build_diagram: depth " + std::to_string(depth) + " exceeds the " + std::to_string(a.digits.size()) +
                    " known digits");
    MooreDiagram d;
    d.p = a.p;
    const std::int64_t v1 = d.v1_degree();
    std::int64_t prev = 0;
    for (std::size_t k = 0; k < depth; ++k) {
        const std::int64_t ak = a.truncation(k);
        const std::uint64_t pk = checked_pow(a.p, static_cast<unsigned>(k));
        MooreStage st{static_cast<int>(k), pk * a.p, -v1 * prev, -v1 * ak,
                      static_cast<std::int64_t>(pk * a.digits[k])};
        d.stages.push_back(st);
        d.transitions.push_back({TransitionKind::inclusion, pk, pk * a.p, st.suspension_in, st.suspension_in,
                                 detail::moore_matrix(a.p, false)});
        d.transitions.push_back({TransitionKind::v1_power, pk * a.p, pk * a.p, st.suspension_in, st.suspension_out,
                                 detail::moore_matrix(a.p, true)});
        prev = ak;
    }
    const std::uint64_t last = checked_pow(a.p, static_cast<unsigned>(depth));
    d.transitions.push_back({TransitionKind::inclusion, last, last * a.p, -v1 * prev, -v1 * prev,
                             detail::moore_matrix(a.p, false)});
    return d;
}

/// Dimension of the colimit of K(1)-homology: the largest rank of a
/// composite from some object to the end of the diagram.
inline std::size_t k1_dimension(const MooreDiagram& d)
{
    const std::int64_t v1 = d.v1_degree();
    const auto& F = GaloisField::get(static_cast<std::uint32_t>(d.p), 1);
    if (d.transitions.empty())
        throw Error("k1_dimension: empty diagram");
    for (std::size_t i = 0; i < d.transitions.size(); ++i) {
        const auto& t = d.transitions[i];
        if (t.matrix.rows() != 2 || t.matrix.cols() != 2 || &t.matrix.zero().field() != &F)
            throw Error("k1_dimension: transition " + std::to_string(i) + " is not a 2x2 matrix over F_p");
        if (t.kind == TransitionKind::inclusion && t.target_order != t.source_order * d.p)
            throw Error("k1_dimension: inclusion " + std::to_string(i) + " does not raise the Moore order by p");
        if (t.kind == TransitionKind::v1_power && t.target_order != t.source_order)
            throw Error("k1_dimension: v1 map " + std::to_string(i) + " changes the Moore spectrum");
        // cells sit in degrees suspension and suspension + 1; K(1)_* is |v1|-periodic
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
                if (!t.matrix(r, c).is_zero() &&
                    mod_floor(t.target_suspension + static_cast<std::int64_t>(r) - t.source_suspension -
                                  static_cast<std::int64_t>(c),
                              v1) != 0)
                    throw Error("k1_dimension: transition " + std::to_string(i) + " does not preserve degree mod |v1|");
        if (i + 1 < d.transitions.size()) {
            const auto& n = d.transitions[i + 1];
            if (n.source_order != t.target_order || n.source_suspension != t.target_suspension)
                throw Error("k1_dimension: transitions " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            " do not compose");
        }
    }
    std::size_t best = 0;
    Matrix<GfElement> tail = Matrix<GfElement>::identity(2, GfElement(F, 0));
    for (std::size_t i = d.transitions.size(); i-- > 0;) {
        tail = tail * d.transitions[i].matrix;
        best = std::max(best, rank(tail));
    }
    return best;
}

/// Class of S^{-|v_1| a} in Z_p x Z/(2p - 2).
struct PicClass {
    PAdicTruncated zp;
    std::int64_t torsion = 0;

    PicClass operator+(const PicClass& o) const
    {
        const std::int64_t m = 2 * (static_cast<std::int64_t>(zp.prime()) - 1);
        return {zp + o.zp, mod_floor(torsion + o.torsion, m)};
    }
    bool operator==(const PicClass& o) const { return zp == o.zp && torsion == o.torsion; }
    bool is_identity() const { return zp.is_zero() && torsion == 0; }
};

inline PicClass pic_class_of_integer(std::int64_t a, std::uint64_t p, int K = kDefaultPrecision)
{
    if (p == 2)
        throw Error("pic_class_of_integer: odd primes only");
    const std::int64_t v1 = 2 * (static_cast<std::int64_t>(p) - 1);
    return {PAdicTruncated(p, K, a), mod_floor(-v1 * a, v1)};
}

}  // namespace sseqkit

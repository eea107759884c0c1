#pragma once

// Finitely generated abelian groups of the form Z_p^r x (finite), stored in
// canonical form: the finite part as its sorted list of prime-power cyclic
// orders, the pro-p free part as a rank.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sseqkit/arith.hpp"

namespace sseqkit {

class FinAbGroup {
public:
    FinAbGroup() = default;

    static FinAbGroup trivial() { return {}; }

    static FinAbGroup free(int rank)
    {
        if (rank < 0)
            throw Error("FinAbGroup: negative free rank");
        FinAbGroup g;
        g.free_rank_ = rank;
        return g;
    }

    /// Z/n, split into its primary components.
    static FinAbGroup cyclic(std::uint64_t n)
    {
        if (n == 0)
            throw Error("FinAbGroup::cyclic: order must be positive (use free() for Z_p)");
        FinAbGroup g;
        for (auto [q, e] : factorize(n))
            g.factors_.push_back(checked_pow(q, static_cast<unsigned>(e)));
        g.normalize();
        return g;
    }

    /// Build from a list of cyclic orders; each must be a prime power > 1.
    static FinAbGroup from_factors(std::vector<std::uint64_t> factors, int free_rank = 0)
    {
        FinAbGroup g;
        for (auto f : factors) {
            auto fac = factorize(f);
            if (f < 2 || fac.size() != 1)
                throw Error("FinAbGroup: invariant factor " + std::to_string(f) + " is not a prime power > 1");
        }
        g.factors_ = std::move(factors);
        g.free_rank_ = free_rank;
        if (free_rank < 0)
            throw Error("FinAbGroup: negative free rank");
        g.normalize();
        return g;
    }

    FinAbGroup direct_sum(const FinAbGroup& o) const
    {
        FinAbGroup g = *this;
        g.factors_.insert(g.factors_.end(), o.factors_.begin(), o.factors_.end());
        g.free_rank_ += o.free_rank_;
        g.normalize();
        return g;
    }

    const std::vector<std::uint64_t>& invariant_factors() const { return factors_; }
    int free_rank() const { return free_rank_; }
    bool is_trivial() const { return factors_.empty() && free_rank_ == 0; }

    std::uint64_t torsion_order() const
    {
        std::uint64_t n = 1;
        for (auto f : factors_)
            n *= f;
        return n;
    }

    FinAbGroup torsion() const { return from_factors(factors_); }

    /// Invariant-factor form d_1 | d_2 | ... | d_k of the finite part.
    std::vector<std::uint64_t> cyclic_decomposition() const
    {
        // group prime powers by prime, largest first
        std::vector<std::vector<std::uint64_t>> by_prime;
        std::vector<std::uint64_t> primes;
        for (auto f : factors_) {
            auto q = factorize(f).front().first;
            auto it = std::find(primes.begin(), primes.end(), q);
            if (it == primes.end()) {
                primes.push_back(q);
                by_prime.emplace_back();
                it = primes.end() - 1;
            }
            by_prime[static_cast<std::size_t>(it - primes.begin())].push_back(f);
        }
        std::size_t len = 0;
        for (auto& v : by_prime) {
            std::sort(v.rbegin(), v.rend());
            len = std::max(len, v.size());
        }
        std::vector<std::uint64_t> out(len, 1);
        for (auto& v : by_prime)
            for (std::size_t i = 0; i < v.size(); ++i)
                out[len - 1 - i] *= v[i];
        return out;
    }

    /// Human-readable form such as "Z_3 x Z/4"; `p` labels the free part.
    std::string to_string(std::optional<std::uint64_t> p = std::nullopt) const
    {
        if (is_trivial())
            return "0";
        std::string free_label = p ? "Z_" + std::to_string(*p) : std::string("Z_p");
        std::vector<std::string> parts;
        for (int i = 0; i < free_rank_; ++i)
            parts.push_back(free_label);
        for (auto d : cyclic_decomposition())
            parts.push_back("Z/" + std::to_string(d));
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i)
            s += (i ? " x " : "") + parts[i];
        return s;
    }

    bool operator==(const FinAbGroup& o) const { return free_rank_ == o.free_rank_ && factors_ == o.factors_; }
    bool operator!=(const FinAbGroup& o) const { return !(*this == o); }

    nlohmann::json to_json() const
    {
        return nlohmann::json{{"invariant_factors", factors_}, {"free_rank", free_rank_}};
    }

    static FinAbGroup from_json(const nlohmann::json& j)
    {
        return from_factors(j.at("invariant_factors").get<std::vector<std::uint64_t>>(), j.at("free_rank").get<int>());
    }

private:
    void normalize() { std::sort(factors_.begin(), factors_.end()); }

    std::vector<std::uint64_t> factors_;
    int free_rank_ = 0;
};

}  // namespace sseqkit

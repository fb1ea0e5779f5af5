#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zerosum/elemset.hpp"

namespace zerosum {

// Presentation parameters for G = <x, y | x^p = y^m = 1, x^-1 y x = y^r>.
// Only values accepted by validate_params are ever stored in a group.
struct MetacyclicParams {
    long p = 0;  // quotient order, prime
    long m = 0;  // normal-subgroup order
    long r = 0;  // conjugation multiplier, taken mod m
    long r_order_mod_m = 1;  // multiplicative order of r mod m (recorded, not constrained)
};

// Outcome of validate_params. Rejection is a value, not a fault: each
// violated constraint is named so callers can report all of them at once.
struct ParamReport {
    bool ok = false;
    std::vector<std::string> violations;
    std::optional<MetacyclicParams> params;
};

ParamReport validate_params(long p, long m, long r);

long mod_pow(long base, long exp, long mod);
long mod_inverse(long a, long mod);  // gcd(a, mod) must be 1
bool is_prime(long n);

enum class GroupKind { Cyclic, AbelianProduct, Metacyclic, Table };

// Finite group with dense element indices [0, n). Multiplication comes from
// a memoized table once the order is at most 4096; structured groups larger
// than that fall back to the defining formula.
class FiniteGroup {
public:
    static FiniteGroup cyclic(int n);
    static FiniteGroup abelian(const std::vector<int>& factors);
    static FiniteGroup metacyclic(const MetacyclicParams& params);
    // Throws std::invalid_argument naming the failing triple / missing
    // identity when the table is not a group.
    static FiniteGroup from_table(const std::vector<std::vector<int>>& table);

    // Parses "cyclic:N", "abelian:N1xN2x...", "metacyclic:p=P,m=M,r=R",
    // "table:@path". Throws std::invalid_argument on malformed specs and
    // propagates rejection reports for invalid metacyclic parameters.
    static FiniteGroup parse_spec(const std::string& spec);

    GroupKind kind() const { return kind_; }
    int order() const { return n_; }
    int identity() const { return 0; }
    bool is_abelian() const { return abelian_; }
    const std::string& spec_string() const { return spec_; }

    int mul(int a, int b) const {
        if (!table_.empty()) return table_[static_cast<size_t>(a) * n_ + b];
        return mul_formula(a, b);
    }
    int inverse(int a) const { return inv_[a]; }
    int pow(int a, long e) const;
    int element_order(int a) const;

    // rmul_column(h)[q] = q*h; contiguous per h for tight DP loops.
    const uint16_t* rmul_column(int h) const { return rtable_.data() + static_cast<size_t>(h) * n_; }
    bool has_tables() const { return !table_.empty(); }

    // --- metacyclic structure -------------------------------------------
    const MetacyclicParams& metacyclic_params() const;
    int coset_exponent(int g) const { return g / static_cast<int>(mc_.m); }  // a in x^a y^b
    int normal_exponent(int g) const { return g % static_cast<int>(mc_.m); } // b in x^a y^b
    int encode(int a, int b) const { return a * static_cast<int>(mc_.m) + b; }
    bool in_normal_subgroup(int g) const { return coset_exponent(g) == 0; }
    int x() const;  // (1,0)
    int y() const;  // (0,1)

    std::string element_name(int g) const;
    // Accepts "1", "e", "x", "y", "x^a*y^b" (metacyclic) and "gK".
    int parse_element(const std::string& token) const;

    const std::vector<int>& abelian_factors() const { return factors_; }

private:
    FiniteGroup() = default;
    void finish_construction();
    int mul_formula(int a, int b) const;

    GroupKind kind_ = GroupKind::Cyclic;
    int n_ = 1;
    bool abelian_ = true;
    std::string spec_;
    MetacyclicParams mc_{};
    std::vector<int> factors_;        // abelian product factors
    std::vector<uint16_t> table_;     // row-major, a*n + b
    std::vector<uint16_t> rtable_;    // column-major, h*n + q  ->  q*h
    std::vector<int> inv_;
};

struct Subgroup {
    const FiniteGroup* parent = nullptr;
    ElemSet members;

    int order() const { return members.count(); }
    bool contains(int g) const { return members.test(g); }
};

// Canonical map onto G/N for a metacyclic group; N = <y>, image = C_p.
struct QuotientMap {
    const FiniteGroup* source = nullptr;
    Subgroup kernel;
    FiniteGroup image;

    int map(int g) const { return source->coset_exponent(g); }
};

// The subgroup N = <y> of a metacyclic group, as element indices [0, m).
Subgroup normal_subgroup(const FiniteGroup& g);
// Coset x^i N as an element set.
ElemSet normal_coset(const FiniteGroup& g, int i);
QuotientMap quotient_map(const FiniteGroup& g);

// [u, u^r, ..., u^(r^(p-1))]. Requires u in N.
std::vector<int> conjugation_orbit(const FiniteGroup& g, int u);

// One cyclic subgroup of N per divisor of m, ordered by order.
std::vector<Subgroup> subgroups_of_normal(const FiniteGroup& g);

// Exhaustive group-axiom check; returns a description of the first failure
// or nullopt. Quadratic in memory terms, cubic in time: callers gate on order.
std::optional<std::string> check_group_axioms(const FiniteGroup& g);

// All (p, m, r) accepted by validate_params with p*m <= pm_max, ordered by
// (p*m, p, r). Drives sweeps and the exhaustive lemma suites.
std::vector<MetacyclicParams> enumerate_valid_params(long pm_max);

}  // namespace zerosum

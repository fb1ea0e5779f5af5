#pragma once

#include <vector>

#include "zerosum/elemset.hpp"
#include "zerosum/group.hpp"

namespace zerosum {

// Ordered list of nonempty subsets (A_1, ..., A_l) over an abelian group.
struct SubsetSequence {
    const FiniteGroup* group = nullptr;
    std::vector<ElemSet> subsets;

    int length() const { return static_cast<int>(subsets.size()); }
};

struct KneserReport {
    int m = 0;
    ElemSet products;    // exact Π^m(A)
    ElemSet stab;        // H = stab(Π^m(A))
    long size = 0;       // |Π^m(A)|
    long bound = 0;      // |H| · (1 − m + Σ_Q min{m, #{i : A_i ∩ Q ≠ ∅}})
    bool holds = false;  // size ≥ bound; false would be a defect alarm
    bool tight = false;  // size == bound
    // Same sum with the min{m, ·} cap removed. Not a lower bound (a coset met
    // by k > m subsets contributes factors to at most m slots of any single
    // product); recorded for diagnostics only, nothing asserts it.
    long bound_uncapped = 0;
};

// Π^m(A): products of one element from each of m subsets chosen at distinct
// indices. Exact, by DP over (subset index, chosen count). Abelian only.
ElemSet partial_products(const SubsetSequence& a, int m);

// stab(P) = {g : gP = P}. P empty yields the whole group.
ElemSet stabilizer(const FiniteGroup& g, const ElemSet& p);

// Evaluates the lower bound |Π^m(A)| ≥ |H|(1−m+Σ_{Q∈G/H} min{m, …}) against
// the exact product set. Requires Π^m(A) nonempty.
KneserReport kneser_bound(const SubsetSequence& a, int m);

}  // namespace zerosum

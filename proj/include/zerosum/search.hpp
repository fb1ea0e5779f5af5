#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "zerosum/group.hpp"
#include "zerosum/sequence.hpp"

namespace zerosum {

struct SearchBudget {
    uint64_t max_nodes = 500'000'000;   // DFS nodes before giving up on exactness
    uint64_t max_multisets = 10'000'000;  // exhaustive enumeration ceiling
    uint64_t memo_budget = uint64_t(1) << 24;
    int exact_order_ceiling = 24;       // largest |G| accepted for exact d search
};

enum class ResultStatus { Exact, LowerBoundOnly, RandomizedEvidence };
std::string to_string(ResultStatus s);

// Running check of "product-one free implies |Π(S)| ≥ |S|" over every
// sequence a search visits. A violation is recorded, never repaired.
struct ZerofreeAudit {
    uint64_t checked = 0;
    uint64_t violations = 0;
    std::string first_violation;
};

struct ConstantResult {
    std::string constant;  // "d" or "E"
    std::string group_spec;
    int value = 0;
    ResultStatus status = ResultStatus::Exact;
    Sequence witness;      // d: product-one free of length=value; E: length value-1 counterexample
    uint64_t nodes = 0;    // DFS nodes / multisets enumerated / samples drawn
    ZerofreeAudit audit;
};

// True iff the identity is a product of some sub-multiset of size exactly n.
bool has_product_one_of_size(const Sequence& s, int n, const EngineConfig& cfg = {});

// Exact d(G): the longest product-one-free sequence, by DFS over canonical
// (nondecreasing element index) multisets, extending a branch only while it
// stays product-one free. Budget exhaustion degrades status to
// lower-bound-only with the best witness found.
ConstantResult small_davenport(const FiniteGroup& g, const SearchBudget& budget = {});

struct EgzOptions {
    bool force_randomized = false;
    uint64_t samples = 1000;
    uint64_t seed = 0;
};

// E(G): least t such that every length-t sequence has a product-one
// subsequence of length |G|. Exact mode enumerates all multisets of length
// t = d(G)+|G| (growing t if some multiset fails, which for a valid
// metacyclic group is instead a theorem contradiction); when the multiset
// count exceeds the budget, draws seeded uniform samples and certifies each
// via the extractor. The length t−1 lower-bound witness is always verified.
ConstantResult egz_constant(const FiniteGroup& g, const SearchBudget& budget = {},
                            const EgzOptions& opts = {});

// S_0 = x^{[p-1]} · y^{[m-1]}, the extremal product-one-free sequence of
// length m+p-2; verified product-one free before returning.
Sequence d_lower_witness(const FiniteGroup& metacyclic_group);

// U · 1^{[|G|-1]} for product-one-free U: a sequence of length |U|+|G|-1
// with no product-one subsequence of length |G| (any such subsequence would
// use a nonempty sub-multiset of U with product 1). Verified by Π_{|G|}
// membership when the DP fits the engine budget.
Sequence e_lower_witness(const FiniteGroup& g, const Sequence& u);

// Number of multisets of size t over n classes, saturating at cap+1.
uint64_t multiset_count(int n, int t, uint64_t cap);

// Every multiset of size t over the group's elements, in lexicographic
// count-vector order. fn returns false to stop; the return value says
// whether enumeration ran to completion.
bool for_each_multiset(const FiniteGroup& g, int t,
                       const std::function<bool(const Sequence&)>& fn);

// Uniform over all multisets of size t (stars and bars, Floyd sampling).
// Determinism does not depend on std::uniform_int_distribution.
Sequence sample_multiset(const FiniteGroup& g, int t, uint64_t seed);

// Decorrelated per-instance stream seed for reproducible parallel sampling.
inline uint64_t derive_seed(uint64_t base, uint64_t index) {
    return base + index * 0x9E3779B97F4A7C15ull;
}

}  // namespace zerosum

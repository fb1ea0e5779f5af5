#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zerosum/group.hpp"
#include "zerosum/sequence.hpp"

namespace zerosum {

// An ordered chunk of terms whose left-to-right product is value (an element
// of the normal subgroup N on every path that stores blocks).
struct Block {
    std::vector<int> terms;
    int value = 0;
};

struct ExtractionTrace {
    // "1", "2-large-identity", "2.1", "2.2", or "cyclic" (the degenerate
    // m = 1 group, where the whole job is one EGZ extraction over C_p).
    std::string case_taken;
    std::vector<Block> blocks;
    // Per-case meaning, documented with the trace schema: case 1 pairs
    // (block index, orbit exponent); case 2.1 pairs (term index, 1 if the
    // term goes before the final anchor term).
    std::vector<std::pair<int, int>> selection;
    OrderedWitness witness;
    bool verified = false;
};

// The constructive main theorem: for a valid metacyclic group of order pm
// and |S| ≥ pm+m+p−2, produce an ordering of pm terms of S with product 1.
// Every structural expectation the proof guarantees is checked; a miss
// raises TheoremContradiction with a reproducer, never a bad witness.
ExtractionTrace extract(const FiniteGroup& g, const Sequence& s, const EngineConfig& cfg = {});

// Erdős–Ginzburg–Ziv step over cyclic(n): a sub-multiset of exactly n terms
// summing to 0, for any |S| ≥ 2n−1. Absence is impossible (alarm).
Sequence egz_cyclic_extract(const Sequence& s);

struct QuotientFactorization {
    std::vector<Sequence> blocks;  // φ(block) minimal product-one over C_p
    Sequence remainder;            // φ(remainder) product-one free, so |remainder| ≤ p−1
};

// Greedy factorization of S by smallest φ-product-one blocks.
QuotientFactorization quotient_factorize(const FiniteGroup& g, const Sequence& s);

// Cyclic rotations of a block whose φ-image is minimal product-one realize
// u^{r^{s_i}} where s_i is the i-th prefix coset exponent; the realizable
// exponents are pairwise distinct when u ≠ 1.
std::vector<int> realizable_exponents(const FiniteGroup& g, const std::vector<int>& ordered_terms);

// The rotation of ordered_terms realizing u^{r^s}; throws if s is not one of
// the realizable exponents.
std::vector<int> realize_orbit_value(const FiniteGroup& g, const std::vector<int>& ordered_terms,
                                     int s);

// One anchor of p terms, all in the coset N_i (i ≠ 0), plus blocks with
// chosen orbit exponents: interleaves each block after the anchor prefix
// whose conjugation action realizes the chosen exponent.
OrderedWitness insertion_assemble(const FiniteGroup& g, const std::vector<int>& anchor,
                                  const std::vector<Block>& blocks,
                                  const std::vector<int>& exponents);

// Choose exactly `count` items, one option from each chosen item's option
// list (values in Z_modulus), with total ≡ target. Exact DP; nullopt is a
// proof of absence. Returns (item index, option index) pairs.
std::optional<std::vector<std::pair<int, int>>> select_targets(
    int modulus, const std::vector<std::vector<int>>& options, int count, int target);

// Smallest product-one sub-multiset of S with |block| ≤ max_len, with an
// ordering realizing the identity. Absence with |S| > d(G) contradicts the
// Davenport bound, so callers on that path treat it as an alarm.
std::optional<Block> find_product_one_subsequence(const FiniteGroup& g, const Sequence& s,
                                                  int max_len, const EngineConfig& cfg = {});

}  // namespace zerosum

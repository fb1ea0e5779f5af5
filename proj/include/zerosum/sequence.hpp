#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zerosum/elemset.hpp"
#include "zerosum/group.hpp"

namespace zerosum {

// A sequence is an unordered multiset of group elements; counts_ is indexed by
// element index. Terms are never reordered on the caller's behalf: ordered
// questions go through OrderedWitness.
class Sequence {
  public:
    Sequence() = default;
    explicit Sequence(const FiniteGroup& g) : group_(&g), counts_(g.order(), 0) {}
    Sequence(const FiniteGroup& g, const std::vector<int>& terms) : Sequence(g) {
        for (int t : terms) add(t);
    }

    const FiniteGroup& group() const { return *group_; }
    int length() const { return length_; }
    bool empty() const { return length_ == 0; }
    int count(int g) const { return counts_[g]; }
    const std::vector<int>& counts() const { return counts_; }

    void add(int g, int times = 1);
    void remove(int g, int times = 1);  // throws if the term is absent

    // Element indices present at least once, ascending.
    std::vector<int> support() const;
    // One index per term, ascending; |result| == length().
    std::vector<int> terms() const;

    // Terms lying in / outside the set, as a new sequence.
    Sequence restricted_to(const ElemSet& allow) const;
    Sequence without(const Sequence& sub) const;  // multiset difference; throws if not a subsequence
    bool contains(const Sequence& sub) const;

    bool operator==(const Sequence& o) const {
        return group_ == o.group_ && counts_ == o.counts_;
    }

    std::string to_literal() const;  // canonical index form, e.g. "g3^2 * g4"
    static Sequence parse_literal(const FiniteGroup& g, const std::string& text);

  private:
    const FiniteGroup* group_ = nullptr;
    std::vector<int> counts_;
    int length_ = 0;
};

struct EngineConfig {
    // Upper bound on DP table cells (keys x set-words). Exceeding it raises BudgetError.
    uint64_t memo_budget = uint64_t(1) << 24;
};

// pi(S): products over all orderings of the full sequence. Empty S -> {1}.
ElemSet pi(const Sequence& s, const EngineConfig& cfg = {});

// pi_n(S): products over all ordered n-term subsequences.
ElemSet pi_n(const Sequence& s, int n, const EngineConfig& cfg = {});

// pi_all(S): union of pi_n over 1 <= n <= |S|.
ElemSet pi_all(const Sequence& s, const EngineConfig& cfg = {});

bool is_product_one_free(const Sequence& s, const EngineConfig& cfg = {});

// An explicit ordering of a subsequence, checkable in O(length) by multiplication.
struct OrderedWitness {
    std::vector<int> ordered_terms;
    int claimed_product = 0;
};

struct WitnessCheck {
    bool ok = false;
    std::string reason;
};

// Confirms the witness terms form a subsequence of s and multiply (left to
// right) to the claimed product; required_length >= 0 additionally pins the
// witness length.
WitnessCheck verify_witness(const Sequence& s, const OrderedWitness& w, int required_length = -1);

// An ordering of ALL terms of s whose left-to-right product is target, or
// nullopt if no ordering achieves it. Peels the sub-multiset DP backwards.
std::optional<std::vector<int>> realize_product(const Sequence& s, int target,
                                                const EngineConfig& cfg = {});

// Incremental products-of-all-sub-multisets table.
//
// Maintains, for the current stack of pushed terms, the set of achievable
// products of every sub-multiset (keyed mixed-radix by per-term-class usage
// counts). The last-pushed element class owns the slowest digit, so push()
// appends table rows and pop() truncates them; nothing is rebuilt.
//
// full_products() is exact for any group: every ordering of a multiset has
// some last element, so f(T) = union over h in supp(T) of f(T - h) * h.
class SubMultisetProducts {
  public:
    SubMultisetProducts(const FiniteGroup& g, const EngineConfig& cfg = {});

    // Pushes one copy of element g (repeat pushes of the same element extend
    // its digit). Returns true if some newly created sub-multiset reaches the
    // identity, i.e. the stack stopped being product-one free.
    bool push(int g);
    void pop();

    int size() const { return static_cast<int>(stack_.size()); }
    bool empty() const { return stack_.empty(); }

    // Products of all nonempty sub-multisets of the current stack.
    const ElemSet& all_products() const { return all_; }
    // Products of the full stack (the key with every copy used).
    ElemSet full_products() const;
    bool identity_reachable() const { return all_.test(0); }

  private:
    struct Level {  // one per distinct pushed element, in push order
        int elem;
        int copies;
        uint64_t weight;  // mixed-radix stride of this digit
    };

    const FiniteGroup* group_;
    EngineConfig cfg_;
    int words_;                    // ElemSet words per key
    std::vector<Level> levels_;
    std::vector<int> stack_;       // element per push, for pop bookkeeping
    std::vector<uint64_t> nkeys_stack_;  // table size after each push
    std::vector<uint64_t> table_;  // nkeys x words_ bitset rows; key 0 = empty multiset
    ElemSet all_;
    std::vector<ElemSet> all_stack_;  // snapshot of all_ before each push

    uint64_t nkeys_ = 1;

    uint64_t* row(uint64_t key) { return table_.data() + key * words_; }
    const uint64_t* row(uint64_t key) const { return table_.data() + key * words_; }
};

}  // namespace zerosum

#include "zerosum/sequence.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include "zerosum/errors.hpp"

namespace zerosum {

void Sequence::add(int g, int times) {
    if (g < 0 || g >= group_->order()) throw std::invalid_argument("element index out of range");
    if (times < 0) throw std::invalid_argument("negative multiplicity");
    counts_[g] += times;
    length_ += times;
}

void Sequence::remove(int g, int times) {
    if (g < 0 || g >= group_->order()) throw std::invalid_argument("element index out of range");
    if (counts_[g] < times) throw std::invalid_argument("removing a term the sequence lacks");
    counts_[g] -= times;
    length_ -= times;
}

std::vector<int> Sequence::support() const {
    std::vector<int> out;
    for (int g = 0; g < static_cast<int>(counts_.size()); ++g)
        if (counts_[g] > 0) out.push_back(g);
    return out;
}

std::vector<int> Sequence::terms() const {
    std::vector<int> out;
    out.reserve(length_);
    for (int g = 0; g < static_cast<int>(counts_.size()); ++g)
        for (int k = 0; k < counts_[g]; ++k) out.push_back(g);
    return out;
}

Sequence Sequence::restricted_to(const ElemSet& allow) const {
    Sequence out(*group_);
    for (int g = 0; g < static_cast<int>(counts_.size()); ++g)
        if (counts_[g] > 0 && allow.test(g)) out.add(g, counts_[g]);
    return out;
}

Sequence Sequence::without(const Sequence& sub) const {
    if (!contains(sub)) throw std::invalid_argument("not a subsequence");
    Sequence out(*group_);
    for (int g = 0; g < static_cast<int>(counts_.size()); ++g)
        out.add(g, counts_[g] - sub.counts_[g]);
    return out;
}

bool Sequence::contains(const Sequence& sub) const {
    if (group_ != sub.group_) return false;
    for (int g = 0; g < static_cast<int>(counts_.size()); ++g)
        if (sub.counts_[g] > counts_[g]) return false;
    return true;
}

std::string Sequence::to_literal() const {
    std::string out;
    for (int g = 0; g < static_cast<int>(counts_.size()); ++g) {
        if (counts_[g] == 0) continue;
        if (!out.empty()) out += " * ";
        out += "g" + std::to_string(g);
        if (counts_[g] > 1) out += "^" + std::to_string(counts_[g]);
    }
    return out.empty() ? "(empty)" : out;
}

Sequence Sequence::parse_literal(const FiniteGroup& g, const std::string& text) {
    // TOKEN or TOKEN^COUNT, joined by '*'; the caret is a multiplicity, so
    // compound elements must be written in index form gK.
    Sequence out(g);
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '*')) {
        auto first = part.find_first_not_of(" \t");
        auto last = part.find_last_not_of(" \t");
        if (first == std::string::npos) throw std::invalid_argument("empty term in sequence literal");
        part = part.substr(first, last - first + 1);
        long mult = 1;
        auto caret = part.find('^');
        if (caret != std::string::npos) {
            mult = std::stol(part.substr(caret + 1));
            if (mult < 1) throw std::invalid_argument("multiplicity must be positive: " + part);
            part = part.substr(0, caret);
        }
        out.add(g.parse_element(part), static_cast<int>(mult));
    }
    if (out.empty()) throw std::invalid_argument("empty sequence literal");
    return out;
}

// --- product-set DP ---------------------------------------------------------

namespace {

// dst |= src * h, rows as raw word spans.
void or_mul(const FiniteGroup& g, uint64_t* dst, const uint64_t* src, int h, int words) {
    if (g.has_tables()) {
        const uint16_t* col = g.rmul_column(h);
        for (int w = 0; w < words; ++w) {
            uint64_t bits = src[w];
            while (bits) {
                int q = w * 64 + std::countr_zero(bits);
                bits &= bits - 1;
                int t = col[q];
                dst[t >> 6] |= uint64_t(1) << (t & 63);
            }
        }
    } else {
        for (int w = 0; w < words; ++w) {
            uint64_t bits = src[w];
            while (bits) {
                int q = w * 64 + std::countr_zero(bits);
                bits &= bits - 1;
                int t = g.mul(q, h);
                dst[t >> 6] |= uint64_t(1) << (t & 63);
            }
        }
    }
}

ElemSet row_to_set(const uint64_t* src, int n) {
    ElemSet out(n);
    std::copy(src, src + out.nwords(), out.data());
    return out;
}

// Products of every sub-multiset, keyed mixed-radix by per-class usage.
// sizes[key] = number of terms used. Exact for any group: each ordering of a
// multiset ends in some class, so f(T) = union_h f(T - h) * h.
struct FullTable {
    std::vector<int> elems;
    std::vector<int> radix;        // count + 1 per class
    std::vector<uint64_t> weight;  // mixed-radix strides
    uint64_t nkeys = 1;
    int words = 0;
    std::vector<uint64_t> table;
    std::vector<int> sizes;
};

FullTable build_full_table(const Sequence& s, const EngineConfig& cfg) {
    const FiniteGroup& g = s.group();
    FullTable t;
    t.words = (g.order() + 63) / 64;
    for (int e : s.support()) {
        t.elems.push_back(e);
        t.radix.push_back(s.count(e) + 1);
        t.weight.push_back(t.nkeys);
        if (t.nkeys > cfg.memo_budget / t.radix.back() / t.words + 1)
            throw BudgetError("sub-multiset table needs more than " +
                              std::to_string(cfg.memo_budget) + " cells");
        t.nkeys *= t.radix.back();
    }
    if (t.nkeys * t.words > cfg.memo_budget)
        throw BudgetError("sub-multiset table needs " + std::to_string(t.nkeys * t.words) +
                          " cells, budget is " + std::to_string(cfg.memo_budget));

    t.table.assign(t.nkeys * t.words, 0);
    t.sizes.assign(t.nkeys, 0);
    t.table[0] |= 1;  // empty product
    const int nc = static_cast<int>(t.elems.size());
    for (uint64_t key = 1; key < t.nkeys; ++key) {
        uint64_t* dst = t.table.data() + key * t.words;
        for (int i = 0; i < nc; ++i) {
            const uint64_t digit = key / t.weight[i] % t.radix[i];
            if (digit == 0) continue;
            const uint64_t prev = key - t.weight[i];
            or_mul(g, dst, t.table.data() + prev * t.words, t.elems[i], t.words);
            t.sizes[key] = t.sizes[prev] + 1;
        }
    }
    return t;
}

// Abelian layered DP: dp[k] = products of exactly-k-term subsequences.
std::vector<ElemSet> abelian_layers(const Sequence& s) {
    const FiniteGroup& g = s.group();
    const int L = s.length();
    std::vector<ElemSet> dp(L + 1, ElemSet(g.order()));
    dp[0].set(g.identity());
    int placed = 0;
    for (int e : s.support()) {
        const int c = s.count(e);
        for (int k = std::min(L, placed + c); k >= 1; --k) {
            ElemSet acc(g.order());
            int h = g.identity();
            for (int j = 0; j <= std::min(c, k); ++j) {  // h = e^j
                if (j > 0) h = g.mul(h, e);
                if (j == 0) {
                    acc |= dp[k];
                } else if (k - j <= placed) {
                    ElemSet shifted(g.order());
                    or_mul(g, shifted.data(), dp[k - j].data(), h, shifted.nwords());
                    acc |= shifted;
                }
            }
            dp[k] = std::move(acc);
        }
        placed += c;
    }
    return dp;
}

}  // namespace

ElemSet pi(const Sequence& s, const EngineConfig& cfg) {
    const FiniteGroup& g = s.group();
    if (s.empty()) {
        ElemSet out(g.order());
        out.set(g.identity());
        return out;
    }
    if (g.is_abelian()) {
        int prod = g.identity();
        for (int e : s.support()) prod = g.mul(prod, g.pow(e, s.count(e)));
        ElemSet out(g.order());
        out.set(prod);
        return out;
    }
    FullTable t = build_full_table(s, cfg);
    return row_to_set(t.table.data() + (t.nkeys - 1) * t.words, g.order());
}

ElemSet pi_n(const Sequence& s, int n, const EngineConfig& cfg) {
    const FiniteGroup& g = s.group();
    ElemSet out(g.order());
    if (n == 0) {
        out.set(g.identity());
        return out;
    }
    if (n < 0 || n > s.length()) return out;
    if (g.is_abelian()) return abelian_layers(s)[n];
    FullTable t = build_full_table(s, cfg);
    for (uint64_t key = 1; key < t.nkeys; ++key)
        if (t.sizes[key] == n)
            out |= row_to_set(t.table.data() + key * t.words, g.order());
    return out;
}

ElemSet pi_all(const Sequence& s, const EngineConfig& cfg) {
    const FiniteGroup& g = s.group();
    ElemSet out(g.order());
    if (g.is_abelian()) {
        auto dp = abelian_layers(s);
        for (int k = 1; k <= s.length(); ++k) out |= dp[k];
        return out;
    }
    FullTable t = build_full_table(s, cfg);
    for (uint64_t key = 1; key < t.nkeys; ++key)
        out |= row_to_set(t.table.data() + key * t.words, g.order());
    return out;
}

bool is_product_one_free(const Sequence& s, const EngineConfig& cfg) {
    return !pi_all(s, cfg).test(s.group().identity());
}

WitnessCheck verify_witness(const Sequence& s, const OrderedWitness& w, int required_length) {
    const FiniteGroup& g = s.group();
    if (required_length >= 0 && static_cast<int>(w.ordered_terms.size()) != required_length)
        return {false, "witness has " + std::to_string(w.ordered_terms.size()) +
                           " terms, required " + std::to_string(required_length)};
    Sequence used(g);
    int prod = g.identity();
    for (int t : w.ordered_terms) {
        if (t < 0 || t >= g.order())
            return {false, "term index " + std::to_string(t) + " out of range"};
        used.add(t);
        prod = g.mul(prod, t);
    }
    if (!s.contains(used))
        return {false, "witness terms are not a subsequence"};
    if (prod != w.claimed_product)
        return {false, "ordered product is " + g.element_name(prod) + ", claimed " +
                            g.element_name(w.claimed_product)};
    return {true, ""};
}

std::optional<std::vector<int>> realize_product(const Sequence& s, int target,
                                                const EngineConfig& cfg) {
    const FiniteGroup& g = s.group();
    if (s.empty()) {
        if (target == g.identity()) return std::vector<int>{};
        return std::nullopt;
    }
    if (g.is_abelian()) {
        int prod = g.identity();
        for (int e : s.support()) prod = g.mul(prod, g.pow(e, s.count(e)));
        if (prod != target) return std::nullopt;
        return s.terms();
    }
    FullTable t = build_full_table(s, cfg);
    const int nc = static_cast<int>(t.elems.size());
    uint64_t key = t.nkeys - 1;
    int want = target;
    if (!(t.table[key * t.words + (want >> 6)] >> (want & 63) & 1)) return std::nullopt;
    // Peel the last factor: want ∈ f(key) means some class h with a nonzero
    // digit has want·h⁻¹ ∈ f(key − w_h).
    std::vector<int> reversed;
    while (key != 0) {
        bool advanced = false;
        for (int i = 0; i < nc && !advanced; ++i) {
            if (key / t.weight[i] % t.radix[i] == 0) continue;
            const int h = t.elems[i];
            const int prev_want = g.mul(want, g.inverse(h));
            const uint64_t prev = key - t.weight[i];
            if (t.table[prev * t.words + (prev_want >> 6)] >> (prev_want & 63) & 1) {
                reversed.push_back(h);
                want = prev_want;
                key = prev;
                advanced = true;
            }
        }
        if (!advanced) throw std::logic_error("product table peeling lost its trail");
    }
    return std::vector<int>(reversed.rbegin(), reversed.rend());
}

// --- incremental table ------------------------------------------------------

SubMultisetProducts::SubMultisetProducts(const FiniteGroup& g, const EngineConfig& cfg)
    : group_(&g), cfg_(cfg), words_((g.order() + 63) / 64), all_(g.order()) {
    table_.assign(words_, 0);
    table_[0] |= 1;  // key 0 = empty multiset, product {1}
}

bool SubMultisetProducts::push(int g) {
    if (!levels_.empty() && levels_.back().elem == g) {
        ++levels_.back().copies;
    } else {
        levels_.push_back({g, 1, nkeys_});
    }
    const Level& lv = levels_.back();
    const uint64_t old_nkeys = nkeys_;
    nkeys_ = lv.weight * (static_cast<uint64_t>(lv.copies) + 1);
    if (nkeys_ * words_ > cfg_.memo_budget) {
        nkeys_ = old_nkeys;  // leave the table untouched
        if (levels_.back().copies > 1) --levels_.back().copies;
        else levels_.pop_back();
        throw BudgetError("incremental product table would exceed " +
                          std::to_string(cfg_.memo_budget) + " cells");
    }
    stack_.push_back(g);
    nkeys_stack_.push_back(old_nkeys);
    all_stack_.push_back(all_);
    table_.resize(nkeys_ * words_, 0);

    // New keys use the latest copy of g at least once; every other digit
    // combination already existed. Keys only ever reference smaller keys.
    bool hit_identity = false;
    const int nc = static_cast<int>(levels_.size());
    for (uint64_t key = old_nkeys; key < nkeys_; ++key) {
        uint64_t* dst = row(key);
        for (int i = 0; i < nc; ++i) {
            const uint64_t digit = key / levels_[i].weight %
                                   (static_cast<uint64_t>(levels_[i].copies) + 1);
            if (digit == 0) continue;
            or_mul(*group_, dst, row(key - levels_[i].weight), levels_[i].elem, words_);
        }
        if (dst[0] & 1) hit_identity = true;
        for (int w = 0; w < words_; ++w) all_.data()[w] |= dst[w];
    }
    return hit_identity;
}

void SubMultisetProducts::pop() {
    if (stack_.empty()) throw std::logic_error("pop on empty product table");
    nkeys_ = nkeys_stack_.back();
    nkeys_stack_.pop_back();
    table_.resize(nkeys_ * words_);
    all_ = std::move(all_stack_.back());
    all_stack_.pop_back();
    stack_.pop_back();
    if (levels_.back().copies > 1) --levels_.back().copies;
    else levels_.pop_back();
}

ElemSet SubMultisetProducts::full_products() const {
    return row_to_set(row(nkeys_ - 1), group_->order());
}

}  // namespace zerosum

#include "zerosum/kneser.hpp"

#include <algorithm>
#include <stdexcept>

namespace zerosum {

namespace {

void require_valid(const SubsetSequence& a) {
    if (!a.group) throw std::invalid_argument("subset sequence has no group");
    if (!a.group->is_abelian())
        throw std::invalid_argument("partial products are defined here for abelian groups only");
    if (a.subsets.empty()) throw std::invalid_argument("subset sequence is empty");
    for (const ElemSet& s : a.subsets)
        if (s.empty()) throw std::invalid_argument("subset sequence contains an empty subset");
}

}  // namespace

ElemSet partial_products(const SubsetSequence& a, int m) {
    require_valid(a);
    const FiniteGroup& g = *a.group;
    const int l = a.length();
    if (m < 1 || m > l) throw std::invalid_argument("m must lie in [1, l]");

    // dp[k] = products of one element from each of k subsets seen so far.
    std::vector<ElemSet> dp(m + 1, ElemSet(g.order()));
    dp[0].set(g.identity());
    for (int i = 0; i < l; ++i) {
        for (int k = std::min(m, i + 1); k >= 1; --k) {
            ElemSet grown(g.order());
            a.subsets[i].for_each([&](int h) {
                dp[k - 1].for_each([&](int q) { grown.set(g.mul(q, h)); });
            });
            dp[k] |= grown;
        }
    }
    return dp[m];
}

ElemSet stabilizer(const FiniteGroup& g, const ElemSet& p) {
    ElemSet stab(g.order());
    if (p.empty()) {
        for (int h = 0; h < g.order(); ++h) stab.set(h);
        return stab;
    }
    for (int h = 0; h < g.order(); ++h) {
        ElemSet shifted(g.order());
        p.for_each([&](int q) { shifted.set(g.mul(h, q)); });
        if (shifted == p) stab.set(h);
    }
    return stab;
}

KneserReport kneser_bound(const SubsetSequence& a, int m) {
    require_valid(a);
    const FiniteGroup& g = *a.group;
    KneserReport rep;
    rep.m = m;
    rep.products = partial_products(a, m);
    if (rep.products.empty()) throw std::invalid_argument("partial product set is empty");
    rep.stab = stabilizer(g, rep.products);
    rep.size = rep.products.count();

    // Cosets of H: sweep elements, skip those already covered.
    const long h_order = rep.stab.count();
    ElemSet covered(g.order());
    long sum_capped = 0, sum_raw = 0;
    for (int q0 = 0; q0 < g.order(); ++q0) {
        if (covered.test(q0)) continue;
        ElemSet coset(g.order());
        rep.stab.for_each([&](int h) { coset.set(g.mul(q0, h)); });
        covered |= coset;
        long meets = 0;
        for (const ElemSet& ai : a.subsets) {
            ElemSet inter = ai;
            inter &= coset;
            if (inter.any()) ++meets;
        }
        sum_capped += std::min<long>(m, meets);
        sum_raw += meets;
    }
    rep.bound = h_order * (1 - m + sum_capped);
    rep.holds = rep.size >= rep.bound;
    rep.tight = rep.size == rep.bound;
    rep.bound_uncapped = h_order * (1 - m + sum_raw);
    return rep;
}

}  // namespace zerosum

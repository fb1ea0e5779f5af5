#include "zerosum/search.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "zerosum/errors.hpp"
#include "zerosum/extractor.hpp"

namespace zerosum {

std::string to_string(ResultStatus s) {
    switch (s) {
        case ResultStatus::Exact: return "exact";
        case ResultStatus::LowerBoundOnly: return "lower-bound-only";
        case ResultStatus::RandomizedEvidence: return "randomized-evidence";
    }
    return "?";
}

bool has_product_one_of_size(const Sequence& s, int n, const EngineConfig& cfg) {
    if (n < 1 || n > s.length()) return false;
    return pi_n(s, n, cfg).test(s.group().identity());
}

uint64_t multiset_count(int n, int t, uint64_t cap) {
    unsigned __int128 c = 1;  // C(t+k, k) is nondecreasing in k, so capping early is safe
    for (int k = 1; k <= n - 1; ++k) {
        c = c * static_cast<unsigned>(t + k) / static_cast<unsigned>(k);
        if (c > cap) return cap + 1;
    }
    return static_cast<uint64_t>(c);
}

bool for_each_multiset(const FiniteGroup& g, int t,
                       const std::function<bool(const Sequence&)>& fn) {
    const int n = g.order();
    Sequence s(g);
    std::function<bool(int, int)> rec = [&](int elem, int remaining) {
        if (elem == n - 1) {
            s.add(elem, remaining);
            const bool keep_going = fn(s);
            s.remove(elem, remaining);
            return keep_going;
        }
        for (int c = 0; c <= remaining; ++c) {
            s.add(elem, c);
            const bool keep_going = rec(elem + 1, remaining - c);
            s.remove(elem, c);
            if (!keep_going) return false;
        }
        return true;
    };
    return rec(0, t);
}

namespace {

uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

}  // namespace

Sequence sample_multiset(const FiniteGroup& g, int t, uint64_t seed) {
    const int n = g.order();
    Sequence s(g);
    if (n == 1) {
        s.add(0, t);
        return s;
    }
    // n-1 bar positions among t+n-1 slots; gaps between bars are the counts.
    std::mt19937_64 rng(seed);
    const uint64_t slots = static_cast<uint64_t>(t) + n - 1;
    std::set<uint64_t> bars;
    for (uint64_t j = slots - (n - 1); j < slots; ++j) {
        const uint64_t v = bounded(rng, j + 1);
        if (!bars.insert(v).second) bars.insert(j);
    }
    int elem = 0;
    uint64_t prev = 0;
    for (uint64_t b : bars) {
        s.add(elem++, static_cast<int>(b - prev));
        prev = b + 1;
    }
    s.add(elem, static_cast<int>(slots - prev));
    return s;
}

ConstantResult small_davenport(const FiniteGroup& g, const SearchBudget& budget) {
    if (g.order() > budget.exact_order_ceiling)
        throw std::invalid_argument("exact d search is limited to order " +
                                    std::to_string(budget.exact_order_ceiling) +
                                    "; got " + std::to_string(g.order()));
    ConstantResult res;
    res.constant = "d";
    res.group_spec = g.spec_string();
    res.witness = Sequence(g);
    if (g.kind() == GroupKind::Metacyclic) {
        res.witness = d_lower_witness(g);  // verified extremal seed
        res.value = res.witness.length();
    }

    EngineConfig cfg{budget.memo_budget};
    SubMultisetProducts table(g, cfg);
    std::vector<int> stack;
    bool budget_hit = false;

    std::function<void(int)> dfs = [&](int min_elem) {
        const int len = static_cast<int>(stack.size());
        if (len > 0) {
            ++res.audit.checked;
            if (table.all_products().count() < len && ++res.audit.violations == 1)
                res.audit.first_violation = Sequence(g, stack).to_literal();
        }
        if (len > res.value) {
            res.value = len;
            res.witness = Sequence(g, stack);
        }
        for (int e = min_elem; e < g.order(); ++e) {
            if (e == g.identity()) continue;
            // Extending by e creates a product-one sub-multiset iff e's
            // inverse is already an achievable product (peel e from any
            // ordering reaching 1).
            if (table.all_products().test(g.inverse(e))) continue;
            if (res.nodes >= budget.max_nodes) {
                budget_hit = true;
                return;
            }
            ++res.nodes;
            if (table.push(e))
                throw std::logic_error("prune invariant failed: identity reached after push of " +
                                       g.element_name(e));
            stack.push_back(e);
            dfs(e);
            stack.pop_back();
            table.pop();
            if (budget_hit) return;
        }
    };

    try {
        dfs(0);
    } catch (const BudgetError&) {
        budget_hit = true;  // memo blow-up: exactness is gone, the bound stands
    }
    res.status = budget_hit ? ResultStatus::LowerBoundOnly : ResultStatus::Exact;
    return res;
}

Sequence d_lower_witness(const FiniteGroup& g) {
    const MetacyclicParams& mc = g.metacyclic_params();
    Sequence s(g);
    s.add(g.x(), static_cast<int>(mc.p) - 1);
    if (mc.m > 1) s.add(g.y(), static_cast<int>(mc.m) - 1);
    if (!is_product_one_free(s))
        throw TheoremContradiction("extremal sequence x^[p-1]*y^[m-1] is not product-one free",
                                   g.spec_string() + " ; " + s.to_literal());
    return s;
}

Sequence e_lower_witness(const FiniteGroup& g, const Sequence& u) {
    if (!is_product_one_free(u))
        throw std::invalid_argument("base sequence must be product-one free");
    Sequence s = u;
    s.add(g.identity(), g.order() - 1);
    try {
        if (has_product_one_of_size(s, g.order()))
            throw TheoremContradiction(
                "U*1^[|G|-1] has a product-one subsequence of group length",
                g.spec_string() + " ; " + s.to_literal());
    } catch (const BudgetError&) {
        // Verification out of reach; the construction argument still applies:
        // a product-one subsequence of length |G| would need a term from U,
        // and its U-part would be a product-one sub-multiset of U.
    }
    return s;
}

ConstantResult egz_constant(const FiniteGroup& g, const SearchBudget& budget,
                            const EgzOptions& opts) {
    const int n = g.order();
    ConstantResult d = small_davenport(g, budget);
    if (d.status != ResultStatus::Exact)
        throw BudgetError("E(G) needs d(G) exactly; the d search exhausted its budget");

    EngineConfig cfg{budget.memo_budget};
    ConstantResult res;
    res.constant = "E";
    res.group_spec = g.spec_string();
    res.audit = d.audit;
    int t = d.value + n;
    res.witness = e_lower_witness(g, d.witness);

    const bool exact_feasible =
        !opts.force_randomized && multiset_count(n, t, budget.max_multisets) <= budget.max_multisets;

    if (exact_feasible) {
        Sequence bad(g);
        bool found_bad = false;
        for (;; ++t) {
            if (t > n * n + n) throw std::logic_error("E search exceeded the pigeonhole bound");
            if (multiset_count(n, t, budget.max_multisets) > budget.max_multisets)
                throw BudgetError("exact E enumeration outgrew the multiset budget at t=" +
                                  std::to_string(t));
            found_bad = false;
            for_each_multiset(g, t, [&](const Sequence& s) {
                ++res.nodes;
                if (!has_product_one_of_size(s, n, cfg)) {
                    bad = s;
                    found_bad = true;
                    return false;
                }
                return true;
            });
            if (!found_bad) break;
            if (g.kind() == GroupKind::Metacyclic)
                throw TheoremContradiction(
                    "a sequence of length d(G)+|G| with no product-one subsequence of group length",
                    g.spec_string() + " ; " + bad.to_literal());
            res.witness = bad;  // length t, so E >= t+1; retry at t+1
        }
        res.value = t;
        res.status = ResultStatus::Exact;
        return res;
    }

    // Randomized evidence: certify t = d+|G| on seeded samples.
    res.value = t;
    res.status = ResultStatus::RandomizedEvidence;
    for (uint64_t k = 0; k < opts.samples; ++k) {
        Sequence s = sample_multiset(g, t, derive_seed(opts.seed, k));
        if (g.kind() == GroupKind::Metacyclic) {
            extract(g, s, cfg);  // verifies internally; alarms propagate
        } else if (!has_product_one_of_size(s, n, cfg)) {
            throw std::runtime_error("sampling found a counterexample at t=d+|G| for " +
                                     g.spec_string() + "; exact E is unknown here");
        }
        ++res.nodes;
    }
    return res;
}

}  // namespace zerosum

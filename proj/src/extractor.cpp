#include "zerosum/extractor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "zerosum/errors.hpp"

namespace zerosum {

namespace {

long mod_of(long v, long mod) { return ((v % mod) + mod) % mod; }

std::string repro(const FiniteGroup& g, const Sequence& s) {
    return g.spec_string() + " ; " + s.to_literal();
}

[[noreturn]] void alarm(const std::string& what, const FiniteGroup& g, const Sequence& s) {
    throw TheoremContradiction(what, repro(g, s));
}

int product_of(const FiniteGroup& g, const std::vector<int>& terms) {
    int acc = g.identity();
    for (int t : terms) acc = g.mul(acc, t);
    return acc;
}

}  // namespace

std::optional<std::vector<std::pair<int, int>>> select_targets(
    int modulus, const std::vector<std::vector<int>>& options, int count, int target) {
    if (modulus < 1) throw std::invalid_argument("modulus must be positive");
    if (count < 0) return std::nullopt;
    const int ni = static_cast<int>(options.size());
    if (count > ni) return std::nullopt;
    target = static_cast<int>(mod_of(target, modulus));

    // reach[i][c][v]: choosing exactly c items from the suffix i.. can sum to v.
    const size_t stride_c = static_cast<size_t>(modulus);
    const size_t stride_i = stride_c * (count + 1);
    std::vector<uint8_t> reach((ni + 1) * stride_i, 0);
    auto at = [&](int i, int c, int v) -> uint8_t& {
        return reach[i * stride_i + c * stride_c + v];
    };
    at(ni, 0, 0) = 1;
    for (int i = ni - 1; i >= 0; --i) {
        for (int c = 0; c <= std::min(count, ni - i); ++c) {
            for (int v = 0; v < modulus; ++v) {
                uint8_t ok = at(i + 1, c, v);
                if (!ok && c > 0) {
                    for (int opt : options[i]) {
                        if (at(i + 1, c - 1, mod_of(v - opt, modulus))) {
                            ok = 1;
                            break;
                        }
                    }
                }
                at(i, c, v) = ok;
            }
        }
    }
    if (!at(0, count, target)) return std::nullopt;

    std::vector<std::pair<int, int>> picks;
    int c = count, v = target;
    for (int i = 0; i < ni && c > 0; ++i) {
        bool picked = false;
        for (int o = 0; o < static_cast<int>(options[i].size()); ++o) {
            const int v2 = static_cast<int>(mod_of(v - options[i][o], modulus));
            if (at(i + 1, c - 1, v2)) {
                picks.emplace_back(i, o);
                v = v2;
                --c;
                picked = true;
                break;
            }
        }
        if (!picked && !at(i + 1, c, v))
            throw std::logic_error("selection DP lost its trail");
    }
    if (c != 0) throw std::logic_error("selection DP ended with items outstanding");
    return picks;
}

Sequence egz_cyclic_extract(const Sequence& s) {
    const FiniteGroup& g = s.group();
    const int n = g.order();
    // Indices must behave as Z_n exponents: mul(1, k) = k+1 forces mul(i, j) = i+j.
    for (int k = 0; k < n; ++k)
        if (g.mul(1 % n, k) != (k + 1) % n)
            throw std::invalid_argument("EGZ extraction needs a group with Z_n index arithmetic");
    if (s.length() < 2 * n - 1)
        throw std::invalid_argument("EGZ extraction needs length at least 2n-1");
    const std::vector<int> terms = s.terms();
    std::vector<std::vector<int>> options(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) options[i] = {terms[i]};
    auto sel = select_targets(n, options, n, 0);
    if (!sel) alarm("no zero-sum sub-multiset of full cyclic length", g, s);
    Sequence out(g);
    for (auto [i, o] : *sel) out.add(terms[i]);
    return out;
}

QuotientFactorization quotient_factorize(const FiniteGroup& g, const Sequence& s) {
    const MetacyclicParams& mc = g.metacyclic_params();
    const int p = static_cast<int>(mc.p);
    QuotientFactorization out{{}, Sequence(g)};
    Sequence rest = s;

    // Terms inside N are singleton blocks: their quotient image is the
    // identity, which is minimally product-one on its own.
    for (int e = 0; e < static_cast<int>(mc.m); ++e)
        for (int c = 0; c < s.count(e); ++c) {
            Sequence b(g);
            b.add(e);
            out.blocks.push_back(std::move(b));
            rest.remove(e);
        }

    for (;;) {
        const std::vector<int> terms = rest.terms();
        std::vector<std::vector<int>> options(terms.size());
        for (size_t i = 0; i < terms.size(); ++i) options[i] = {g.coset_exponent(terms[i])};
        bool found = false;
        for (int len = 1; len <= std::min<int>(p, static_cast<int>(terms.size())); ++len) {
            auto sel = select_targets(p, options, len, 0);
            if (!sel) continue;
            Sequence b(g);
            for (auto [i, o] : *sel) {
                b.add(terms[i]);
                rest.remove(terms[i]);
            }
            out.blocks.push_back(std::move(b));
            found = true;
            break;  // smallest block first, hence minimal
        }
        if (!found) break;
    }
    if (rest.length() > p - 1)
        alarm("quotient-product-one-free remainder longer than p-1", g, rest);
    out.remainder = std::move(rest);
    return out;
}

std::vector<int> realizable_exponents(const FiniteGroup& g, const std::vector<int>& ordered_terms) {
    const MetacyclicParams& mc = g.metacyclic_params();
    std::vector<int> out;
    long acc = 0;
    for (int t : ordered_terms) {
        acc = mod_of(acc + g.coset_exponent(t), mc.p);
        out.push_back(static_cast<int>(acc));
    }
    return out;
}

std::vector<int> realize_orbit_value(const FiniteGroup& g, const std::vector<int>& ordered_terms,
                                     int s) {
    const std::vector<int> exps = realizable_exponents(g, ordered_terms);
    for (size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] != s) continue;
        // Rotation g_{i+2}..g_t g_1..g_{i+1} conjugates the product by the
        // prefix g_1..g_{i+1}, whose coset exponent is exps[i].
        std::vector<int> rot(ordered_terms.begin() + i + 1, ordered_terms.end());
        rot.insert(rot.end(), ordered_terms.begin(), ordered_terms.begin() + i + 1);
        return rot;
    }
    throw std::invalid_argument("orbit exponent " + std::to_string(s) +
                                " is not realizable by this block");
}

OrderedWitness insertion_assemble(const FiniteGroup& g, const std::vector<int>& anchor,
                                  const std::vector<Block>& blocks,
                                  const std::vector<int>& exponents) {
    const MetacyclicParams& mc = g.metacyclic_params();
    const int p = static_cast<int>(mc.p);
    if (static_cast<int>(anchor.size()) != p)
        throw std::invalid_argument("anchor must have exactly p terms");
    const int i = g.coset_exponent(anchor[0]);
    if (i == 0) throw std::invalid_argument("anchor terms must lie outside N");
    for (int t : anchor)
        if (g.coset_exponent(t) != i)
            throw std::invalid_argument("anchor terms must share one coset");
    if (blocks.size() != exponents.size())
        throw std::invalid_argument("one exponent per block required");

    // A block at slot k (before the (k+1)-th anchor term) commutes leftward
    // past k anchor terms, each conjugating by r^{-i}; realized exponent is
    // -i*k, so slot k = -s * i^{-1} (mod p).
    const long inv_i = mod_inverse(i, p);
    std::vector<std::vector<int>> slots(p);
    for (size_t j = 0; j < blocks.size(); ++j) {
        const int k = static_cast<int>(mod_of(-static_cast<long>(exponents[j]) * inv_i, p));
        slots[k].push_back(static_cast<int>(j));
    }
    OrderedWitness w;
    for (int k = 0; k < p; ++k) {
        for (int j : slots[k])
            w.ordered_terms.insert(w.ordered_terms.end(), blocks[j].terms.begin(),
                                   blocks[j].terms.end());
        w.ordered_terms.push_back(anchor[k]);
    }
    w.claimed_product = product_of(g, w.ordered_terms);
    return w;
}

std::optional<Block> find_product_one_subsequence(const FiniteGroup& g, const Sequence& s,
                                                  int max_len, const EngineConfig& cfg) {
    if (max_len < 1 || s.empty()) return std::nullopt;

    if (s.count(g.identity()) > 0) return Block{{g.identity()}, g.identity()};

    // Inverse pairs cover every product-one block of two terms.
    if (max_len >= 2) {
        for (int e : s.support()) {
            const int inv = g.inverse(e);
            if (inv == e && s.count(e) >= 2) return Block{{e, e}, g.identity()};
            if (inv > e && s.count(inv) > 0) return Block{{e, inv}, g.identity()};
        }
    }

    // Inside a metacyclic N the question is a subset-sum over Z_m; the probe
    // below tries it first at each size before the exhaustive search.
    int nmod = 0;
    std::vector<int> nterms;
    std::vector<std::vector<int>> noptions;
    if (g.kind() == GroupKind::Metacyclic && g.metacyclic_params().m > 1) {
        nmod = static_cast<int>(g.metacyclic_params().m);
        for (int e = 1; e < nmod; ++e)
            for (int c = 0; c < s.count(e); ++c) nterms.push_back(e);
        noptions.resize(nterms.size());
        for (size_t i = 0; i < nterms.size(); ++i) noptions[i] = {nterms[i]};
    }

    // General short-first search: enumerate product-one-free stacks in
    // canonical nondecreasing order. The stack closes to a product-one
    // multiset of size want exactly when some candidate's inverse equals a
    // product of the whole stack (rotate the witness so the candidate is
    // last). Interior candidates whose inverse is a product of a proper
    // sub-multiset are skipped: that block was searched at a shorter want.
    SubMultisetProducts table(g, cfg);
    std::vector<int> stack;
    auto in_stack = [&](int e) {
        return static_cast<int>(std::count(stack.begin(), stack.end(), e));
    };
    std::optional<Block> result;
    std::function<bool(int, int)> rec = [&](int min_elem, int want) -> bool {
        if (static_cast<int>(stack.size()) == want - 1) {
            for (int e = min_elem; e < g.order(); ++e) {
                if (e == g.identity() || s.count(e) <= in_stack(e)) continue;
                if (!table.full_products().test(g.inverse(e))) continue;
                Sequence full(g, stack);
                full.add(e);
                auto ordering = realize_product(full, g.identity(), cfg);
                if (!ordering) throw std::logic_error("achievable identity failed to realize");
                result = Block{*ordering, g.identity()};
                return true;
            }
            return false;
        }
        for (int e = min_elem; e < g.order(); ++e) {
            if (e == g.identity() || s.count(e) <= in_stack(e)) continue;
            if (table.all_products().test(g.inverse(e))) continue;
            if (table.push(e))
                throw std::logic_error("identity reached past an exact membership prune");
            stack.push_back(e);
            const bool done = rec(e, want);
            stack.pop_back();
            table.pop();
            if (done) return true;
        }
        return false;
    };
    for (int want = 3; want <= std::min(max_len, s.length()); ++want) {
        if (nmod > 1 && want <= static_cast<int>(nterms.size())) {
            if (auto sel = select_targets(nmod, noptions, want, 0)) {
                Block b;
                for (auto [i, o] : *sel) b.terms.push_back(nterms[i]);
                b.value = product_of(g, b.terms);
                if (b.value != g.identity())
                    throw std::logic_error("zero-sum of exponents missed the identity");
                return b;
            }
        }
        if (rec(0, want)) return result;
    }
    return std::nullopt;
}

// --- the main extraction ----------------------------------------------------

namespace {

struct Ctx {
    const FiniteGroup& g;
    const Sequence& s;
    const EngineConfig& cfg;
    int p, m, pm;
};

void finalize(const Ctx& c, ExtractionTrace& t) {
    t.witness.claimed_product = c.g.identity();
    const WitnessCheck chk = verify_witness(c.s, t.witness, c.pm);
    if (!chk.ok) alarm("assembled witness failed verification: " + chk.reason, c.g, c.s);
    t.verified = true;
}

ExtractionTrace case_cyclic(const Ctx& c) {
    ExtractionTrace t;
    t.case_taken = "cyclic";
    const std::vector<int> terms = c.s.terms();
    std::vector<std::vector<int>> options(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) options[i] = {terms[i] % c.pm};
    auto sel = select_targets(c.pm, options, c.pm, 0);
    if (!sel) alarm("EGZ selection over the cyclic group failed", c.g, c.s);
    Block b;
    for (auto [i, o] : *sel) b.terms.push_back(terms[i]);
    b.value = product_of(c.g, b.terms);
    t.witness.ordered_terms = b.terms;
    t.blocks.push_back(std::move(b));
    finalize(c, t);
    return t;
}

ExtractionTrace case_one(const Ctx& c, int ci) {
    ExtractionTrace t;
    t.case_taken = "1";
    const FiniteGroup& g = c.g;

    // Anchor: the p smallest terms in the chosen nontrivial coset.
    Sequence anchor_seq(g);
    {
        int need = c.p;
        for (int b = 0; b < c.m && need > 0; ++b) {
            const int e = g.encode(ci, b);
            const int take = std::min(need, c.s.count(e));
            if (take > 0) anchor_seq.add(e, take);
            need -= take;
        }
        if (need > 0) alarm("chosen coset lost its p terms", g, c.s);
    }
    Sequence rest = c.s.without(anchor_seq);

    // Greedy size-p blocks with quotient product one.
    std::vector<Sequence> raw_blocks;
    for (;;) {
        const std::vector<int> terms = rest.terms();
        if (static_cast<int>(terms.size()) < c.p) break;
        std::vector<std::vector<int>> options(terms.size());
        for (size_t i = 0; i < terms.size(); ++i) options[i] = {g.coset_exponent(terms[i])};
        auto sel = select_targets(c.p, options, c.p, 0);
        if (!sel) break;
        Sequence b(g);
        for (auto [i, o] : *sel) {
            b.add(terms[i]);
            rest.remove(terms[i]);
        }
        raw_blocks.push_back(std::move(b));
    }
    if (static_cast<int>(raw_blocks.size()) < c.m - 1)
        alarm("fewer than m-1 quotient blocks in case 1", c.g, c.s);

    // One ordered value per block, preferring a non-identity product.
    std::vector<Block> cand;
    for (const Sequence& bs : raw_blocks) {
        const ElemSet prods = pi(bs, c.cfg);
        int u = -1;
        prods.for_each([&](int v) {
            if (u < 0 && v != g.identity()) u = v;
        });
        if (u < 0) u = g.identity();
        auto ordering = realize_product(bs, u, c.cfg);
        if (!ordering) throw std::logic_error("block product failed to realize");
        if (!g.in_normal_subgroup(u)) alarm("quotient block with product outside N", g, bs);
        cand.push_back(Block{*ordering, u});
    }

    // Orbit options: choosing exponent s contributes e(u)*r^s.
    std::vector<std::vector<int>> options(cand.size());
    for (size_t j = 0; j < cand.size(); ++j) {
        const long e = g.normal_exponent(cand[j].value);
        for (int s = 0; s < c.p; ++s)
            options[j].push_back(static_cast<int>(e * mod_pow(g.metacyclic_params().r, s, c.m) % c.m));
    }

    const ElemSet anchor_products = pi(anchor_seq, c.cfg);
    std::vector<int> anchor_values = anchor_products.to_indices();
    for (int a : anchor_values) {
        if (!g.in_normal_subgroup(a)) alarm("anchor product outside N", g, anchor_seq);
        auto sel = select_targets(c.m, options, c.m - 1, -g.normal_exponent(a));
        if (!sel) continue;
        auto anchor_order = realize_product(anchor_seq, a, c.cfg);
        if (!anchor_order) throw std::logic_error("anchor product failed to realize");
        std::vector<Block> chosen;
        std::vector<int> exps;
        t.blocks.push_back(Block{*anchor_order, a});
        for (auto [j, sexp] : *sel) {
            chosen.push_back(cand[j]);
            exps.push_back(sexp);
            t.blocks.push_back(cand[j]);
            t.selection.emplace_back(static_cast<int>(t.blocks.size()) - 1, sexp);
        }
        t.witness = insertion_assemble(g, *anchor_order, chosen, exps);
        if (t.witness.claimed_product != g.identity())
            alarm("case-1 assembly produced a non-identity product", g, c.s);
        finalize(c, t);
        return t;
    }

    // Fallback: m whole blocks multiplied as they stand.
    std::vector<std::vector<int>> plain(cand.size());
    for (size_t j = 0; j < cand.size(); ++j) plain[j] = {g.normal_exponent(cand[j].value)};
    auto sel = select_targets(c.m, plain, c.m, 0);
    if (!sel) alarm("case-1 selection failed for every anchor value", c.g, c.s);
    for (auto [j, o] : *sel) {
        t.blocks.push_back(cand[j]);
        t.selection.emplace_back(static_cast<int>(t.blocks.size()) - 1, 0);
        t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), cand[j].terms.begin(),
                                       cand[j].terms.end());
    }
    finalize(c, t);
    return t;
}

ExtractionTrace case_large_identity(const Ctx& c) {
    ExtractionTrace t;
    t.case_taken = "2-large-identity";
    const int d = c.m + c.p - 2;
    Sequence rest = c.s;
    rest.remove(c.g.identity(), d);

    const int need = c.pm - d;  // smallest admissible total block length
    int total = 0;
    while (total < need) {
        auto b = find_product_one_subsequence(c.g, rest, d + 1, c.cfg);
        if (!b) {
            if (rest.length() >= d + 1)
                alarm("no product-one subsequence in a sequence longer than d(G)", c.g, rest);
            alarm("product-one blocks exhausted before reaching group length", c.g, c.s);
        }
        Sequence used(c.g, b->terms);
        rest = rest.without(used);
        total += static_cast<int>(b->terms.size());
        t.blocks.push_back(std::move(*b));
    }
    if (total > c.pm)
        alarm("block accumulation overshot group length", c.g, c.s);

    for (const Block& b : t.blocks)
        t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), b.terms.begin(),
                                       b.terms.end());
    t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), c.pm - total, c.g.identity());
    finalize(c, t);
    return t;
}

ExtractionTrace case_two_one(const Ctx& c) {
    ExtractionTrace t;
    t.case_taken = "2.1";
    const FiniteGroup& g = c.g;

    Sequence outside(g);
    Sequence inside(g);
    for (int e : c.s.support())
        (g.in_normal_subgroup(e) ? inside : outside).add(e, c.s.count(e));

    QuotientFactorization qf = quotient_factorize(g, outside);
    if (qf.blocks.empty()) alarm("no quotient block despite p terms outside N", g, c.s);

    int kept_len = 0;
    for (const Sequence& w : qf.blocks) kept_len += w.length();
    const int s_needed = c.pm - kept_len;
    if (s_needed < 0 || s_needed > inside.length())
        alarm("subcase 2.1 arithmetic out of range: need " + std::to_string(s_needed) +
                  " of " + std::to_string(inside.length()) + " N-terms",
              g, c.s);

    // Last block W_k: insertion happens around its final term w_e.
    long base = 0;
    for (const Sequence& w : qf.blocks) {
        const std::vector<int> terms = w.terms();
        const int v = product_of(g, terms);
        if (!g.in_normal_subgroup(v)) alarm("quotient block with product outside N", g, w);
        base = mod_of(base + g.normal_exponent(v), c.m);
        t.blocks.push_back(Block{terms, v});
    }
    const std::vector<int> wk = qf.blocks.back().terms();
    const int we = wk.back();
    const int i = g.coset_exponent(we);
    if (i == 0) alarm("final quotient-block term lies in N", g, c.s);
    const long ri = mod_pow(g.metacyclic_params().r, i, c.m);

    const std::vector<int> nterms = inside.terms();
    std::vector<std::vector<int>> options(nterms.size());
    for (size_t j = 0; j < nterms.size(); ++j) {
        const int e = g.normal_exponent(nterms[j]);
        if (e == 0) options[j] = {0};
        else options[j] = {e, static_cast<int>(e * ri % c.m)};  // option 1 = before w_e
    }
    auto sel = select_targets(c.m, options, s_needed, static_cast<int>(mod_of(-base, c.m)));
    if (!sel) alarm("subcase 2.1 selection over S_N failed", g, c.s);

    std::vector<int> before, after;
    for (auto [j, o] : *sel) {
        t.selection.emplace_back(j, o);
        (o == 1 ? before : after).push_back(nterms[j]);
    }
    for (size_t b = 0; b + 1 < qf.blocks.size(); ++b) {
        const std::vector<int> terms = qf.blocks[b].terms();
        t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), terms.begin(), terms.end());
    }
    t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), wk.begin(), wk.end() - 1);
    t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), before.begin(), before.end());
    t.witness.ordered_terms.push_back(we);
    t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), after.begin(), after.end());
    finalize(c, t);
    return t;
}

ExtractionTrace case_two_two(const Ctx& c) {
    ExtractionTrace t;
    t.case_taken = "2.2";
    Sequence inside(c.g);
    for (int e = 0; e < c.m; ++e)
        if (c.s.count(e) > 0) inside.add(e, c.s.count(e));
    if (inside.length() < c.pm + c.m - 1)
        alarm("subcase 2.2 entered with too few N-terms", c.g, c.s);

    for (int round = 0; round < c.p; ++round) {
        const std::vector<int> terms = inside.terms();
        std::vector<std::vector<int>> options(terms.size());
        for (size_t j = 0; j < terms.size(); ++j) options[j] = {terms[j]};  // index = exponent in N
        auto sel = select_targets(c.m, options, c.m, 0);
        if (!sel) alarm("EGZ step failed inside N", c.g, inside);
        Block b;
        for (auto [j, o] : *sel) b.terms.push_back(terms[j]);
        for (int term : b.terms) inside.remove(term);
        b.value = product_of(c.g, b.terms);
        if (b.value != c.g.identity()) alarm("zero-sum block with non-identity product", c.g, c.s);
        t.witness.ordered_terms.insert(t.witness.ordered_terms.end(), b.terms.begin(),
                                       b.terms.end());
        t.blocks.push_back(std::move(b));
    }
    finalize(c, t);
    return t;
}

}  // namespace

ExtractionTrace extract(const FiniteGroup& g, const Sequence& s, const EngineConfig& cfg) {
    if (g.kind() != GroupKind::Metacyclic)
        throw std::invalid_argument("extraction applies to metacyclic groups");
    const MetacyclicParams& mc = g.metacyclic_params();
    const int p = static_cast<int>(mc.p), m = static_cast<int>(mc.m);
    const int pm = p * m;
    if (s.length() < pm + m + p - 2)
        throw std::invalid_argument("extraction needs length at least pm+m+p-2 = " +
                                    std::to_string(pm + m + p - 2) + ", got " +
                                    std::to_string(s.length()));
    Ctx c{g, s, cfg, p, m, pm};

    if (m == 1) return case_cyclic(c);

    for (int i = 1; i < p; ++i) {
        int coset_count = 0;
        for (int b = 0; b < m; ++b) coset_count += s.count(g.encode(i, b));
        if (coset_count >= p) return case_one(c, i);
    }
    if (s.count(g.identity()) >= p + m - 2) return case_large_identity(c);
    int outside = 0;
    for (int e = m; e < pm; ++e) outside += s.count(e);
    if (outside >= p) return case_two_one(c);
    return case_two_two(c);
}

}  // namespace zerosum

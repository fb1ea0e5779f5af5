// Command-line front end: constants, extraction, Kneser checks, verification
// campaigns, parameter sweeps. All machine output is JSON (CSV for sweep
// tables only) and is byte-identical across runs with the same seed and
// budget; wall-clock timings are emitted only under --timings.
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "zerosum/errors.hpp"
#include "zerosum/extractor.hpp"
#include "zerosum/group.hpp"
#include "zerosum/kneser.hpp"
#include "zerosum/search.hpp"
#include "zerosum/sequence.hpp"

using nlohmann::json;
using namespace zerosum;

namespace {

// splitmix64; bounded() rejects instead of using distribution objects so the
// stream is identical across standard libraries.
struct Rng {
    uint64_t state;
    uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    uint64_t bounded(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }
};

struct OutputOptions {
    bool json_out = false;
    bool csv_out = false;
    bool timings = false;
    std::string out_path;
};

std::chrono::steady_clock::time_point t_start;

json elapsed_field(const OutputOptions& oo) {
    if (!oo.timings) return nullptr;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
    return ms;
}

void emit(const OutputOptions& oo, const json& payload, const std::string& human,
          const std::string& csv = "") {
    std::string text;
    if (oo.json_out)
        text = payload.dump(2) + "\n";
    else if (oo.csv_out)
        text = csv;
    else
        text = human;
    if (oo.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(oo.out_path);
        if (!f) throw std::invalid_argument("cannot open output path " + oo.out_path);
        f << text;
    }
}

template <typename F>
std::vector<json> parallel_map(int jobs, uint64_t count, F&& fn) {
    std::vector<json> out(count);
    if (jobs <= 1) {
        for (uint64_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<uint64_t> cursor{0};
    std::mutex err_mu;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back([&] {
            for (;;) {
                const uint64_t i = cursor.fetch_add(1);
                if (i >= count) return;
                try {
                    out[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

// --- witness JSON ------------------------------------------------------------

json witness_product_one_free(const FiniteGroup& g, const Sequence& s) {
    return {{"kind", "product_one_free"},
            {"group", g.spec_string()},
            {"sequence", s.to_literal()},
            {"length", s.length()}};
}

json witness_no_product_one(const FiniteGroup& g, const Sequence& s, int required) {
    return {{"kind", "no_product_one_of_group_length"},
            {"group", g.spec_string()},
            {"sequence", s.to_literal()},
            {"length", s.length()},
            {"required_length", required}};
}

json witness_ordered(const FiniteGroup& g, const OrderedWitness& w, int required,
                     const Sequence* source) {
    json terms = json::array();
    for (int t : w.ordered_terms) terms.push_back(g.element_name(t));
    json out = {{"kind", "ordered_product_one"},
                {"group", g.spec_string()},
                {"terms", terms},
                {"product", g.element_name(w.claimed_product)},
                {"required_length", required}};
    if (source) out["source_sequence"] = source->to_literal();
    return out;
}

json trace_json(const FiniteGroup& g, const ExtractionTrace& t, const Sequence& source) {
    json blocks = json::array();
    for (const Block& b : t.blocks) {
        json terms = json::array();
        for (int e : b.terms) terms.push_back(g.element_name(e));
        blocks.push_back({{"terms", terms}, {"u", g.element_name(b.value)}});
    }
    json selection = json::array();
    for (auto [a, b] : t.selection) selection.push_back(json::array({a, b}));
    const int pm = g.order();
    return {{"case", t.case_taken},
            {"blocks", blocks},
            {"selection", selection},
            {"witness", witness_ordered(g, t.witness, pm, &source)},
            {"verified", t.verified}};
}

// --- constants ---------------------------------------------------------------

json constant_json(const ConstantResult& r, const json& witness) {
    return {{"constant", r.constant},
            {"group", r.group_spec},
            {"value", r.value},
            {"status", to_string(r.status)},
            {"witness", witness},
            {"nodes", r.nodes},
            {"audit",
             {{"checked", r.audit.checked},
              {"violations", r.audit.violations},
              {"first_violation", r.audit.violations ? json(r.audit.first_violation) : json(nullptr)}}}};
}

int cmd_davenport(const std::string& spec, uint64_t budget_nodes, const OutputOptions& oo) {
    FiniteGroup g = FiniteGroup::parse_spec(spec);
    SearchBudget budget;
    budget.max_nodes = budget_nodes;
    budget.exact_order_ceiling = 512;
    const ConstantResult r = small_davenport(g, budget);
    json payload = constant_json(r, witness_product_one_free(g, r.witness));
    payload["command"] = "davenport";
    payload["elapsed_ms"] = elapsed_field(oo);
    std::ostringstream human;
    human << "d(" << spec << ") = " << r.value << " [" << to_string(r.status) << "]"
          << "  nodes=" << r.nodes << "\n"
          << "  witness (product-one free, length " << r.witness.length()
          << "): " << r.witness.to_literal() << "\n"
          << "  zerofree audit: " << r.audit.checked << " sequences, " << r.audit.violations
          << " violations\n";
    emit(oo, payload, human.str());
    return r.status == ResultStatus::Exact ? 0 : 3;
}

int cmd_egz(const std::string& spec, bool exact, bool randomized, uint64_t samples, uint64_t seed,
            uint64_t budget_nodes, const OutputOptions& oo) {
    FiniteGroup g = FiniteGroup::parse_spec(spec);
    SearchBudget budget;
    budget.max_nodes = budget_nodes;
    budget.exact_order_ceiling = 512;
    if (exact) budget.max_multisets = UINT64_MAX;
    EgzOptions opts;
    opts.force_randomized = randomized;
    opts.samples = samples;
    opts.seed = seed;
    const ConstantResult r = egz_constant(g, budget, opts);
    json payload = constant_json(r, witness_no_product_one(g, r.witness, g.order()));
    payload["command"] = "egz";
    payload["d_value"] = r.value - g.order();
    payload["group_order"] = g.order();
    payload["elapsed_ms"] = elapsed_field(oo);
    if (r.status == ResultStatus::RandomizedEvidence) payload["samples"] = r.nodes;
    std::ostringstream human;
    human << "E(" << spec << ") = " << r.value << " [" << to_string(r.status) << "]\n"
          << "  identity E = d + |G|: " << r.value << " = " << (r.value - g.order()) << " + "
          << g.order() << "\n"
          << "  witness (length " << r.witness.length() << ", no product-one subsequence of length "
          << g.order() << "): " << r.witness.to_literal() << "\n";
    emit(oo, payload, human.str());
    return 0;
}

// --- extract -----------------------------------------------------------------

int cmd_extract(const std::string& spec, const std::string& literal, uint64_t random_trials,
                uint64_t seed, int jobs, const OutputOptions& oo) {
    FiniteGroup g = FiniteGroup::parse_spec(spec);
    if (!literal.empty()) {
        Sequence s = Sequence::parse_literal(g, literal);
        const ExtractionTrace t = extract(g, s);
        json payload = trace_json(g, t, s);
        payload["command"] = "extract";
        payload["group"] = g.spec_string();
        payload["sequence"] = s.to_literal();
        payload["elapsed_ms"] = elapsed_field(oo);
        std::ostringstream human;
        human << "case " << t.case_taken << ": witness of length " << t.witness.ordered_terms.size()
              << (t.verified ? " verified" : " NOT VERIFIED") << "\n  ";
        for (size_t i = 0; i < t.witness.ordered_terms.size(); ++i)
            human << (i ? " * " : "") << g.element_name(t.witness.ordered_terms[i]);
        human << " = " << g.element_name(t.witness.claimed_product) << "\n";
        emit(oo, payload, human.str());
        return 0;
    }
    // Randomized trials: each draws a fresh length d(G)+|G| sequence.
    const MetacyclicParams& mc = g.metacyclic_params();
    const int len = static_cast<int>(mc.p * mc.m + mc.m + mc.p - 2);
    std::map<std::string, uint64_t> cases;
    std::mutex mu;
    auto rows = parallel_map(jobs, random_trials, [&](uint64_t k) -> json {
        FiniteGroup gi = FiniteGroup::parse_spec(spec);
        Sequence s = sample_multiset(gi, len, derive_seed(seed, k));
        const ExtractionTrace t = extract(gi, s);
        std::lock_guard<std::mutex> lk(mu);
        ++cases[t.case_taken];
        return json{{"case", t.case_taken}, {"verified", t.verified}};
    });
    uint64_t verified = 0;
    for (const json& r : rows) verified += r.at("verified").get<bool>() ? 1 : 0;
    json payload = {{"command", "extract"}, {"group", g.spec_string()},
                    {"mode", "random"},     {"samples", random_trials},
                    {"seed", seed},         {"sequence_length", len},
                    {"verified", verified}, {"cases", json(cases)},
                    {"elapsed_ms", elapsed_field(oo)}};
    std::ostringstream human;
    human << "extract random: " << verified << "/" << random_trials
          << " witnesses verified on " << g.spec_string() << " (length " << len << ")\n  cases:";
    for (const auto& [k, v] : cases) human << " " << k << "=" << v;
    human << "\n";
    emit(oo, payload, human.str());
    return verified == random_trials ? 0 : 4;
}

// --- kneser ------------------------------------------------------------------

json subset_names(const FiniteGroup& g, const ElemSet& a) {
    json out = json::array();
    a.for_each([&](int e) { out.push_back(g.element_name(e)); });
    return out;
}

SubsetSequence random_subsets(const FiniteGroup& g, int l, Rng& rng) {
    SubsetSequence a;
    a.group = &g;
    for (int i = 0; i < l; ++i) {
        ElemSet s(g.order());
        while (s.empty())
            for (int e = 0; e < g.order(); ++e)
                if (rng.next() & 1) s.set(e);
        a.subsets.push_back(s);
    }
    return a;
}

json kneser_instance_json(const FiniteGroup& g, const SubsetSequence& a, const KneserReport& r) {
    json subsets = json::array();
    for (const ElemSet& s : a.subsets) subsets.push_back(subset_names(g, s));
    return {{"subsets", subsets}, {"m", r.m},         {"exact", r.size},
            {"stab_order", r.stab.count()},           {"bound", r.bound},
            {"holds", r.holds},  {"tight", r.tight}};
}

int cmd_kneser(const std::string& spec, uint64_t instances, uint64_t seed, int lmax, int jobs,
               const OutputOptions& oo) {
    FiniteGroup g = FiniteGroup::parse_spec(spec);
    if (!g.is_abelian()) throw std::invalid_argument("kneser needs an abelian group");
    auto rows = parallel_map(jobs, instances, [&](uint64_t k) -> json {
        FiniteGroup gi = FiniteGroup::parse_spec(spec);
        Rng rng{derive_seed(seed, k)};
        const int l = 1 + static_cast<int>(rng.bounded(lmax));
        const int m = 1 + static_cast<int>(rng.bounded(l));
        SubsetSequence a = random_subsets(gi, l, rng);
        const KneserReport r = kneser_bound(a, m);
        return kneser_instance_json(gi, a, r);
    });
    uint64_t holds = 0, tight = 0;
    for (const json& r : rows) {
        holds += r.at("holds").get<bool>() ? 1 : 0;
        tight += r.at("tight").get<bool>() ? 1 : 0;
    }
    json payload = {{"command", "kneser"},   {"group", g.spec_string()},
                    {"instances", instances}, {"seed", seed},
                    {"lmax", lmax},           {"holds", holds},
                    {"tight", tight},         {"results", rows},
                    {"elapsed_ms", elapsed_field(oo)}};
    std::ostringstream human;
    human << "kneser on " << g.spec_string() << ": " << holds << "/" << instances
          << " bounds hold, " << tight << " tight\n";
    emit(oo, payload, human.str());
    return holds == instances ? 0 : 4;
}

// --- verify campaigns ----------------------------------------------------------

struct CampaignReport {
    uint64_t instances = 0;
    uint64_t failures = 0;
    json details = json::object();
};

CampaignReport campaign_remark_m(long pm_max) {
    CampaignReport rep;
    for (const MetacyclicParams& mc : enumerate_valid_params(pm_max)) {
        ++rep.instances;
        if (mc.m % mc.p != 1 % mc.p) ++rep.failures;
    }
    rep.details = {{"pm_max", pm_max}};
    return rep;
}

CampaignReport campaign_lemma_basic(long pm_max) {
    CampaignReport rep;
    uint64_t groups = 0;
    for (const MetacyclicParams& mc : enumerate_valid_params(pm_max)) {
        FiniteGroup g = FiniteGroup::metacyclic(mc);
        ++groups;
        const int p = static_cast<int>(mc.p), m = static_cast<int>(mc.m);
        for (const Subgroup& sub : subgroups_of_normal(g)) {
            for (int u = 0; u < m; ++u) {
                const std::vector<int> orbit = conjugation_orbit(g, u);
                bool orbit_in = true;
                for (int v : orbit) orbit_in = orbit_in && sub.contains(v);
                for (int s = 0; s < p; ++s) {
                    ++rep.instances;  // (i)
                    if (sub.contains(orbit[s]) && !orbit_in) ++rep.failures;
                }
                for (int s = 0; s < p; ++s)
                    for (int s2 = s + 1; s2 < p; ++s2) {
                        ++rep.instances;  // (ii) and (iii) on the pair
                        const int diff = ((orbit[s] - orbit[s2]) % m + m) % m;
                        if (sub.contains(diff) && !orbit_in) ++rep.failures;
                        if (u != g.identity() && orbit[s] == orbit[s2]) ++rep.failures;
                    }
            }
        }
    }
    rep.details = {{"pm_max", pm_max}, {"groups", groups}};
    return rep;
}

// Every multiset T over g with |T| <= p and φ(T) minimal product-one.
std::vector<Sequence> all_minimal_quotient_blocks(const FiniteGroup& g) {
    const MetacyclicParams& mc = g.metacyclic_params();
    const int p = static_cast<int>(mc.p), m = static_cast<int>(mc.m);
    std::vector<Sequence> out;
    for (int u = 0; u < m; ++u) out.emplace_back(g, std::vector<int>{u});
    for (int t = 2; t <= p; ++t) {
        // nondecreasing tuples of non-N elements
        std::vector<int> pick(t, m);
        std::function<void(int, int)> rec = [&](int pos, int from) {
            if (pos == t) {
                long sum = 0;
                for (int e : pick) sum += g.coset_exponent(e);
                if (sum % p != 0) return;
                // minimality: no proper nonempty sub-multiset with zero sum
                for (uint32_t mask = 1; mask + 1 < (1u << t); ++mask) {
                    long ms = 0;
                    for (int i = 0; i < t; ++i)
                        if (mask & (1u << i)) ms += g.coset_exponent(pick[i]);
                    if (ms % p == 0) return;
                }
                out.emplace_back(g, pick);
                return;
            }
            for (int e = from; e < g.order(); ++e) {
                pick[pos] = e;
                rec(pos + 1, e);
            }
        };
        rec(0, m);
    }
    return out;
}

Sequence sample_minimal_quotient_block(const FiniteGroup& g, Rng& rng) {
    const MetacyclicParams& mc = g.metacyclic_params();
    const int p = static_cast<int>(mc.p), m = static_cast<int>(mc.m);
    const int t = 1 + static_cast<int>(rng.bounded(p));
    if (t == 1) return Sequence(g, {static_cast<int>(rng.bounded(m))});
    for (;;) {
        std::vector<int> res(t);
        long sum = 0;
        for (int i = 0; i + 1 < t; ++i) {
            res[i] = 1 + static_cast<int>(rng.bounded(p - 1));
            sum += res[i];
        }
        res[t - 1] = static_cast<int>(((-sum) % p + p) % p);
        if (res[t - 1] == 0) continue;
        bool minimal = true;
        for (uint32_t mask = 1; minimal && mask + 1 < (1u << t); ++mask) {
            long ms = 0;
            for (int i = 0; i < t; ++i)
                if (mask & (1u << i)) ms += res[i];
            if (ms % p == 0) minimal = false;
        }
        if (!minimal) continue;
        std::vector<int> terms(t);
        for (int i = 0; i < t; ++i)
            terms[i] = g.encode(res[i], static_cast<int>(rng.bounded(m)));
        return Sequence(g, terms);
    }
}

bool conj1_block_holds(const FiniteGroup& g, const Sequence& t) {
    const ElemSet prods = pi(t);
    const int len = t.length();
    bool ok = true;
    prods.for_each([&](int u) {
        if (u == g.identity()) return;  // orbit collapses to {1}; containment is trivial
        const std::vector<int> orbit = conjugation_orbit(g, u);
        ElemSet distinct(g.order());
        for (int v : orbit)
            if (prods.test(v)) distinct.set(v);
        if (distinct.count() < len) ok = false;
    });
    return ok;
}

CampaignReport campaign_conj1(const std::string& group_spec, uint64_t samples, uint64_t seed) {
    CampaignReport rep;
    json runs = json::array();
    std::vector<std::string> specs;
    if (!group_spec.empty())
        specs = {group_spec};
    else
        specs = {"metacyclic:p=2,m=3,r=2", "metacyclic:p=3,m=7,r=2"};
    for (const std::string& spec : specs) {
        FiniteGroup g = FiniteGroup::parse_spec(spec);
        const bool exhaustive = g.order() <= 8;
        uint64_t n = 0, bad = 0;
        if (exhaustive) {
            for (const Sequence& t : all_minimal_quotient_blocks(g)) {
                ++n;
                if (!conj1_block_holds(g, t)) ++bad;
            }
        } else {
            Rng rng{seed};
            for (uint64_t k = 0; k < samples; ++k) {
                Sequence t = sample_minimal_quotient_block(g, rng);
                ++n;
                if (!conj1_block_holds(g, t)) ++bad;
            }
        }
        rep.instances += n;
        rep.failures += bad;
        runs.push_back({{"group", spec},
                        {"mode", exhaustive ? "exhaustive" : "sampled"},
                        {"blocks", n},
                        {"failures", bad}});
    }
    rep.details = {{"runs", runs}};
    return rep;
}

bool conj2_instance_holds(const FiniteGroup& g, const Sequence& t0,
                          const std::vector<Sequence>& blocks) {
    Sequence concat = t0;
    for (const Sequence& b : blocks)
        for (int e : b.terms()) concat.add(e);
    const ElemSet lhs = pi(concat);
    const ElemSet p0 = pi(t0);

    // all choices of u_j in π(T_j) ∩ N
    std::vector<std::vector<int>> choices;
    for (const Sequence& b : blocks) {
        std::vector<int> c;
        pi(b).for_each([&](int v) {
            if (g.in_normal_subgroup(v)) c.push_back(v);
        });
        if (c.empty()) return true;  // hypothesis π(T_j) ∩ N ≠ ∅ unmet; vacuous
        choices.push_back(std::move(c));
    }
    std::vector<size_t> idx(choices.size(), 0);
    for (;;) {
        ElemSet rhs = p0;
        for (size_t j = 0; j < choices.size(); ++j) {
            ElemSet next(g.order());
            for (int v : conjugation_orbit(g, choices[j][idx[j]]))
                rhs.for_each([&](int a) { next.set(g.mul(a, v)); });
            rhs = next;
        }
        bool subset = true;
        rhs.for_each([&](int v) { subset = subset && lhs.test(v); });
        if (!subset) return false;
        size_t j = 0;
        while (j < idx.size() && ++idx[j] == choices[j].size()) idx[j++] = 0;
        if (j == idx.size()) break;
    }
    return true;
}

CampaignReport campaign_conj2(const std::string& group_spec, uint64_t samples, uint64_t seed) {
    CampaignReport rep;
    json runs = json::array();
    std::vector<std::string> specs;
    if (!group_spec.empty())
        specs = {group_spec};
    else
        specs = {"metacyclic:p=2,m=3,r=2", "metacyclic:p=3,m=7,r=2"};
    for (const std::string& spec : specs) {
        FiniteGroup g = FiniteGroup::parse_spec(spec);
        const MetacyclicParams& mc = g.metacyclic_params();
        const int p = static_cast<int>(mc.p), m = static_cast<int>(mc.m);
        uint64_t n = 0, bad = 0;
        const bool small = static_cast<long>(g.order()) <= 6;
        if (small) {
            // exhaustive: every T_0 (p terms of one nontrivial coset), every
            // single block, and every pair of blocks
            std::vector<Sequence> blocks = all_minimal_quotient_blocks(g);
            for (int i = 1; i < p; ++i) {
                std::vector<int> coset;
                for (int b = 0; b < m; ++b) coset.push_back(g.encode(i, b));
                std::vector<int> pick(p);
                std::function<void(int, int)> rec = [&](int pos, int from) {
                    if (pos == p) {
                        Sequence t0(g, pick);
                        for (size_t a = 0; a < blocks.size(); ++a) {
                            ++n;
                            if (!conj2_instance_holds(g, t0, {blocks[a]})) ++bad;
                            for (size_t b = a; b < blocks.size(); ++b) {
                                ++n;
                                if (!conj2_instance_holds(g, t0, {blocks[a], blocks[b]})) ++bad;
                            }
                        }
                        return;
                    }
                    for (int c = from; c < static_cast<int>(coset.size()); ++c) {
                        pick[pos] = coset[c];
                        rec(pos + 1, c);
                    }
                };
                rec(0, 0);
            }
        } else {
            Rng rng{seed};
            for (uint64_t k = 0; k < samples; ++k) {
                const int i = 1 + static_cast<int>(rng.bounded(p - 1));
                std::vector<int> t0_terms(p);
                for (int j = 0; j < p; ++j)
                    t0_terms[j] = g.encode(i, static_cast<int>(rng.bounded(m)));
                Sequence t0(g, t0_terms);
                const int t = 1 + static_cast<int>(rng.bounded(2));
                std::vector<Sequence> blocks;
                for (int j = 0; j < t; ++j) blocks.push_back(sample_minimal_quotient_block(g, rng));
                ++n;
                if (!conj2_instance_holds(g, t0, blocks)) ++bad;
            }
        }
        rep.instances += n;
        rep.failures += bad;
        runs.push_back({{"group", spec},
                        {"mode", small ? "exhaustive" : "sampled"},
                        {"instances", n},
                        {"failures", bad}});
    }
    rep.details = {{"runs", runs}};
    return rep;
}

CampaignReport campaign_zerofree(const std::string& group_spec, uint64_t budget_nodes) {
    CampaignReport rep;
    std::vector<std::string> specs;
    if (!group_spec.empty())
        specs = {group_spec};
    else
        specs = {"cyclic:2", "cyclic:3", "cyclic:4", "cyclic:5",
                 "cyclic:6", "cyclic:7", "metacyclic:p=2,m=3,r=2"};
    json runs = json::array();
    for (const std::string& spec : specs) {
        FiniteGroup g = FiniteGroup::parse_spec(spec);
        SearchBudget budget;
        budget.max_nodes = budget_nodes;
        budget.exact_order_ceiling = 512;
        const ConstantResult r = small_davenport(g, budget);
        rep.instances += r.audit.checked;
        rep.failures += r.audit.violations;
        runs.push_back({{"group", spec},
                        {"status", to_string(r.status)},
                        {"sequences_checked", r.audit.checked},
                        {"violations", r.audit.violations}});
    }
    rep.details = {{"runs", runs}};
    return rep;
}

CampaignReport campaign_kneser(uint64_t samples, uint64_t seed, int lmax, int jobs) {
    static const std::vector<std::string> catalog = {
        "cyclic:2",         "cyclic:3",        "cyclic:4",     "abelian:2x2",
        "cyclic:5",         "cyclic:6",        "cyclic:7",     "cyclic:8",
        "abelian:4x2",      "abelian:2x2x2",   "cyclic:9",     "abelian:3x3",
        "cyclic:10",        "cyclic:11",       "cyclic:12",    "abelian:6x2",
        "cyclic:13",        "cyclic:14",       "cyclic:15",    "cyclic:16",
        "abelian:8x2",      "abelian:4x4",     "abelian:4x2x2", "abelian:2x2x2x2"};
    CampaignReport rep;
    auto rows = parallel_map(jobs, samples, [&](uint64_t k) -> json {
        Rng rng{derive_seed(seed, k)};
        const std::string& spec = catalog[rng.bounded(catalog.size())];
        FiniteGroup g = FiniteGroup::parse_spec(spec);
        const int l = 1 + static_cast<int>(rng.bounded(lmax));
        const int m = 1 + static_cast<int>(rng.bounded(l));
        SubsetSequence a = random_subsets(g, l, rng);
        const KneserReport r = kneser_bound(a, m);
        json row = kneser_instance_json(g, a, r);
        row["group"] = spec;
        return row;
    });
    uint64_t tight = 0;
    json tight_examples = json::array();
    for (const json& r : rows) {
        ++rep.instances;
        if (!r.at("holds").get<bool>()) ++rep.failures;
        if (r.at("tight").get<bool>()) {
            ++tight;
            if (tight_examples.size() < 10) tight_examples.push_back(r);
        }
    }
    rep.details = {{"lmax", lmax}, {"tight", tight}, {"tight_examples", tight_examples}};
    return rep;
}

CampaignReport campaign_theorem(const std::string& group_spec, uint64_t samples, uint64_t seed,
                                uint64_t max_multisets, int jobs) {
    const std::string spec = group_spec.empty() ? "metacyclic:p=2,m=3,r=2" : group_spec;
    FiniteGroup g = FiniteGroup::parse_spec(spec);
    const MetacyclicParams& mc = g.metacyclic_params();
    const int len = static_cast<int>(mc.p * mc.m + mc.m + mc.p - 2);
    CampaignReport rep;
    const bool exhaustive = multiset_count(g.order(), len, max_multisets) <= max_multisets;
    if (exhaustive) {
        for_each_multiset(g, len, [&](const Sequence& s) {
            ++rep.instances;
            const ExtractionTrace t = extract(g, s);
            if (!t.verified) ++rep.failures;
            return true;
        });
    } else {
        auto rows = parallel_map(jobs, samples, [&](uint64_t k) -> json {
            FiniteGroup gi = FiniteGroup::parse_spec(spec);
            Sequence s = sample_multiset(gi, len, derive_seed(seed, k));
            const ExtractionTrace t = extract(gi, s);
            return json{{"verified", t.verified}};
        });
        for (const json& r : rows) {
            ++rep.instances;
            if (!r.at("verified").get<bool>()) ++rep.failures;
        }
    }
    rep.details = {{"group", spec},
                   {"sequence_length", len},
                   {"mode", exhaustive ? "exhaustive" : "sampled"}};
    return rep;
}

int cmd_verify(const std::string& campaign, const std::string& group_spec, uint64_t samples,
               uint64_t seed, long pm_max, int lmax, uint64_t budget_nodes,
               uint64_t max_multisets, int jobs, const OutputOptions& oo) {
    CampaignReport rep;
    if (campaign == "remark-m")
        rep = campaign_remark_m(pm_max > 0 ? pm_max : 200);
    else if (campaign == "lemma-basic")
        rep = campaign_lemma_basic(pm_max > 0 ? pm_max : 42);
    else if (campaign == "lemma-conj1")
        rep = campaign_conj1(group_spec, samples, seed);
    else if (campaign == "lemma-conj2")
        rep = campaign_conj2(group_spec, samples, seed);
    else if (campaign == "lemma-zerofree")
        rep = campaign_zerofree(group_spec, budget_nodes);
    else if (campaign == "kneser")
        rep = campaign_kneser(samples, seed, lmax, jobs);
    else if (campaign == "theorem")
        rep = campaign_theorem(group_spec, samples, seed, max_multisets, jobs);
    else
        throw std::invalid_argument("unknown campaign " + campaign);
    json payload = {{"command", "verify"},
                    {"campaign", campaign},
                    {"instances", rep.instances},
                    {"failures", rep.failures},
                    {"details", rep.details},
                    {"seed", seed},
                    {"elapsed_ms", elapsed_field(oo)}};
    std::ostringstream human;
    human << "verify " << campaign << ": " << rep.instances << " instances, " << rep.failures
          << " failures\n";
    emit(oo, payload, human.str());
    return rep.failures == 0 ? 0 : 4;
}

// --- sweep ---------------------------------------------------------------------

int cmd_sweep(long pm_max, uint64_t budget_nodes, const OutputOptions& oo) {
    json rows = json::array();
    std::ostringstream csv;
    csv << "p,m,r,order,d_formula,d_value,d_status,d_nodes,e_formula,e_witness_length\n";
    std::ostringstream human;
    for (const MetacyclicParams& mc : enumerate_valid_params(pm_max)) {
        FiniteGroup g = FiniteGroup::metacyclic(mc);
        SearchBudget budget;
        budget.max_nodes = budget_nodes;
        budget.exact_order_ceiling = 512;
        const ConstantResult d = small_davenport(g, budget);
        const long d_formula = mc.m + mc.p - 2;
        const long e_formula = d_formula + g.order();
        Sequence ew = e_lower_witness(g, d_lower_witness(g));
        rows.push_back({{"p", mc.p},
                        {"m", mc.m},
                        {"r", mc.r},
                        {"order", g.order()},
                        {"d_formula", d_formula},
                        {"d_value", d.value},
                        {"d_status", to_string(d.status)},
                        {"d_nodes", d.nodes},
                        {"e_formula", e_formula},
                        {"e_witness_length", ew.length()}});
        csv << mc.p << "," << mc.m << "," << mc.r << "," << g.order() << "," << d_formula << ","
            << d.value << "," << to_string(d.status) << "," << d.nodes << "," << e_formula << ","
            << ew.length() << "\n";
        human << "p=" << mc.p << " m=" << mc.m << " r=" << mc.r << " |G|=" << g.order()
              << "  d: formula " << d_formula << ", search " << d.value << " ["
              << to_string(d.status) << "]  E formula " << e_formula << " (witness length "
              << ew.length() << ")\n";
    }
    json payload = {{"command", "sweep"},
                    {"pm_max", pm_max},
                    {"budget_nodes", budget_nodes},
                    {"rows", rows},
                    {"elapsed_ms", elapsed_field(oo)}};
    emit(oo, payload, human.str(), csv.str());
    return 0;
}

// --- verify-witness --------------------------------------------------------------

int cmd_verify_witness(const std::string& path, const OutputOptions& oo) {
    json doc;
    if (path == "-") {
        doc = json::parse(std::cin, nullptr, true);
    } else {
        std::ifstream f(path);
        if (!f) throw std::invalid_argument("cannot open " + path);
        doc = json::parse(f, nullptr, true);
    }
    // accept a bare witness object or one nested under .witness / .trace.witness
    if (!doc.contains("kind")) {
        if (doc.contains("witness"))
            doc = doc["witness"];
        else if (doc.contains("trace") && doc["trace"].contains("witness"))
            doc = doc["trace"]["witness"];
    }
    if (!doc.contains("kind")) throw std::invalid_argument("no witness object found");
    const std::string kind = doc.at("kind").get<std::string>();
    FiniteGroup g = FiniteGroup::parse_spec(doc.at("group").get<std::string>());
    bool valid = false;
    std::string reason;
    if (kind == "product_one_free") {
        Sequence s = Sequence::parse_literal(g, doc.at("sequence").get<std::string>());
        valid = is_product_one_free(s);
        if (!valid) reason = "sequence has a product-one subsequence";
    } else if (kind == "no_product_one_of_group_length") {
        Sequence s = Sequence::parse_literal(g, doc.at("sequence").get<std::string>());
        const int n = doc.at("required_length").get<int>();
        valid = !has_product_one_of_size(s, n);
        if (!valid) reason = "sequence has a product-one subsequence of the forbidden length";
    } else if (kind == "ordered_product_one") {
        OrderedWitness w;
        for (const json& t : doc.at("terms")) w.ordered_terms.push_back(g.parse_element(t.get<std::string>()));
        w.claimed_product = g.parse_element(doc.at("product").get<std::string>());
        Sequence source = doc.contains("source_sequence")
                              ? Sequence::parse_literal(g, doc["source_sequence"].get<std::string>())
                              : Sequence(g, w.ordered_terms);
        const int required = doc.contains("required_length") ? doc["required_length"].get<int>() : -1;
        const WitnessCheck chk = verify_witness(source, w, required);
        valid = chk.ok;
        reason = chk.reason;
    } else {
        throw std::invalid_argument("unknown witness kind " + kind);
    }
    json payload = {{"command", "verify-witness"},
                    {"kind", kind},
                    {"valid", valid},
                    {"reason", valid ? json(nullptr) : json(reason)},
                    {"elapsed_ms", elapsed_field(oo)}};
    std::ostringstream human;
    human << "witness " << (valid ? "valid" : "INVALID") << " (" << kind << ")"
          << (valid ? "" : ": " + reason) << "\n";
    emit(oo, payload, human.str());
    return valid ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    t_start = std::chrono::steady_clock::now();
    CLI::App app{"zero-sum invariants over finite groups: constants, witnesses, verification"};
    app.require_subcommand(1);

    OutputOptions oo;
    std::string spec, group_spec, sequence_literal, campaign, witness_path = "-";
    uint64_t budget_nodes = 500'000'000, samples = 1000, seed = 0, random_trials = 0,
             max_multisets = 10'000'000;
    long pm_max = 0;
    int lmax = 6, jobs = 1;
    bool exact = false, randomized = false;

    auto add_output = [&](CLI::App* c) {
        c->add_flag("--json", oo.json_out, "machine-readable JSON to stdout");
        c->add_option("--out", oo.out_path, "write output to a file");
        c->add_flag("--timings", oo.timings, "include wall-clock elapsed_ms (non-deterministic)");
    };

    CLI::App* dav = app.add_subcommand("davenport", "compute the small Davenport constant d(G)");
    dav->add_option("group", spec, "group spec, e.g. metacyclic:p=2,m=3,r=2")->required();
    dav->add_option("--budget-nodes", budget_nodes, "DFS node budget");
    add_output(dav);

    CLI::App* egz = app.add_subcommand("egz", "compute the EGZ constant E(G)");
    egz->add_option("group", spec, "group spec")->required();
    egz->add_flag("--exact", exact, "force exhaustive enumeration");
    egz->add_flag("--random", randomized, "force randomized evidence");
    egz->add_option("--samples", samples, "random sample count");
    egz->add_option("--seed", seed, "RNG seed");
    egz->add_option("--budget-nodes", budget_nodes, "DFS node budget for d(G)");
    add_output(egz);

    CLI::App* ext = app.add_subcommand("extract", "extract a product-one subsequence of length |G|");
    ext->add_option("--group", group_spec, "metacyclic group spec")->required();
    ext->add_option("--sequence", sequence_literal, "sequence literal, e.g. \"x^2 * y^6 * 1^13\"");
    ext->add_option("--random", random_trials, "run K randomized trials instead");
    ext->add_option("--seed", seed, "RNG seed");
    ext->add_option("--jobs", jobs, "worker threads for independent instances");
    add_output(ext);

    CLI::App* kne = app.add_subcommand("kneser", "verify the partial-product lower bound");
    kne->add_option("--group", group_spec, "abelian group spec")->required();
    kne->add_option("--random", samples, "number of random instances")->default_val(100);
    kne->add_option("--seed", seed, "RNG seed");
    kne->add_option("--lmax", lmax, "maximum subset-sequence length");
    kne->add_option("--jobs", jobs, "worker threads");
    add_output(kne);

    CLI::App* ver = app.add_subcommand("verify", "run a verification campaign");
    ver->add_option("campaign", campaign,
                    "one of: lemma-basic, lemma-conj1, lemma-conj2, lemma-zerofree, remark-m, "
                    "kneser, theorem")
        ->required();
    ver->add_option("--group", group_spec, "focus group spec (campaign-dependent)");
    ver->add_option("--samples", samples, "sample count for randomized campaigns");
    ver->add_option("--random", samples, "alias of --samples");
    ver->add_option("--seed", seed, "RNG seed");
    ver->add_option("--pm-max", pm_max, "enumeration ceiling for p*m");
    ver->add_option("--lmax", lmax, "kneser campaign subset-sequence length cap");
    ver->add_option("--budget-nodes", budget_nodes, "search node budget");
    ver->add_option("--jobs", jobs, "worker threads");
    add_output(ver);

    CLI::App* swp = app.add_subcommand("sweep", "tabulate constants over all valid (p,m,r)");
    swp->add_option("--pm-max", pm_max, "enumeration ceiling for p*m")->default_val(50);
    swp->add_option("--budget-nodes", budget_nodes, "per-row DFS node budget")->default_val(100000);
    swp->add_flag("--csv", oo.csv_out, "CSV table to stdout");
    add_output(swp);

    CLI::App* vw = app.add_subcommand("verify-witness", "re-validate a witness JSON document");
    vw->add_option("input", witness_path, "path to witness JSON, or - for stdin");
    add_output(vw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        if (dav->parsed()) return cmd_davenport(spec, budget_nodes, oo);
        if (egz->parsed())
            return cmd_egz(spec, exact, randomized, samples, seed, budget_nodes, oo);
        if (ext->parsed()) {
            if (sequence_literal.empty() && random_trials == 0)
                throw std::invalid_argument("extract needs --sequence or --random K");
            return cmd_extract(group_spec, sequence_literal, random_trials, seed, jobs, oo);
        }
        if (kne->parsed()) return cmd_kneser(group_spec, samples, seed, lmax, jobs, oo);
        if (ver->parsed())
            return cmd_verify(campaign, group_spec, samples, seed, pm_max, lmax, budget_nodes,
                              max_multisets, jobs, oo);
        if (swp->parsed()) return cmd_sweep(pm_max, budget_nodes, oo);
        if (vw->parsed()) return cmd_verify_witness(witness_path, oo);
    } catch (const TheoremContradiction& e) {
        std::cerr << "theorem-contradiction: " << e.what() << "\n  reproducer: " << e.reproducer()
                  << "\n";
        if (oo.json_out)
            std::cout << json{{"alarm", e.what()}, {"reproducer", e.reproducer()}}.dump(2) << "\n";
        return 4;
    } catch (const BudgetError& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal defect: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <stdexcept>

#include "oracle.hpp"
#include "zerosum/errors.hpp"
#include "zerosum/search.hpp"

using namespace zerosum;

TEST_CASE("multiset counting") {
    // C(n+t-1, t) with saturation.
    CHECK(multiset_count(6, 9, 1u << 30) == 2002);
    CHECK(multiset_count(5, 9, 1u << 30) == 715);
    CHECK(multiset_count(2, 3, 1u << 30) == 4);
    CHECK(multiset_count(3, 0, 1u << 30) == 1);
    // Saturates at cap+1 instead of overflowing.
    CHECK(multiset_count(64, 64, 1000) == 1001);
}

TEST_CASE("multiset enumeration is complete and canonical") {
    FiniteGroup g = FiniteGroup::cyclic(4);
    std::set<std::vector<int>> seen;
    uint64_t n = 0;
    bool done = for_each_multiset(g, 3, [&](const Sequence& s) {
        ++n;
        std::vector<int> t = s.terms();
        CHECK(static_cast<int>(t.size()) == 3);
        CHECK(std::is_sorted(t.begin(), t.end()));
        seen.insert(t);
        return true;
    });
    CHECK(done);
    CHECK(n == 20);  // C(6,3)
    CHECK(seen.size() == 20);

    // Early stop is reported.
    n = 0;
    done = for_each_multiset(g, 3, [&](const Sequence&) { return ++n < 5; });
    CHECK_FALSE(done);
    CHECK(n == 5);
}

TEST_CASE("multiset sampling is deterministic and in range") {
    FiniteGroup g = FiniteGroup::cyclic(7);
    Sequence a = sample_multiset(g, 12, 42);
    Sequence b = sample_multiset(g, 12, 42);
    CHECK(a == b);
    CHECK(a.length() == 12);
    Sequence c = sample_multiset(g, 12, 43);
    // Different seeds almost surely differ; these two do.
    CHECK_FALSE(a == c);
}

TEST_CASE("has_product_one_of_size agrees with the ordering oracle") {
    oracle::Rng rng{1234};
    FiniteGroup groups[] = {FiniteGroup::parse_spec("metacyclic:p=2,m=3,r=2"),
                            FiniteGroup::cyclic(5)};
    for (const FiniteGroup& g : groups) {
        for (int rep = 0; rep < 40; ++rep) {
            int len = 1 + static_cast<int>(rng.bounded(6));
            Sequence s = oracle::random_sequence(g, len, rng);
            for (int n = 1; n <= len; ++n) {
                bool brute = oracle::pi_n_bruteforce(s, n).test(g.identity());
                CHECK(has_product_one_of_size(s, n) == brute);
            }
        }
    }
}

TEST_CASE("cyclic Davenport constants, exhaustively") {
    for (int n = 2; n <= 7; ++n) {
        FiniteGroup g = FiniteGroup::cyclic(n);  // witnesses borrow the group
        ConstantResult d = small_davenport(g);
        CHECK(d.value == n - 1);
        CHECK(d.status == ResultStatus::Exact);
        CHECK(d.witness.length() == n - 1);
        CHECK(is_product_one_free(d.witness));
        CHECK(d.audit.violations == 0);
        CHECK(d.audit.checked > 0);
    }
}

TEST_CASE("cyclic EGZ constants, exhaustively") {
    for (int n = 2; n <= 5; ++n) {
        FiniteGroup g = FiniteGroup::cyclic(n);
        ConstantResult e = egz_constant(g);
        CHECK(e.value == 2 * n - 1);
        CHECK(e.status == ResultStatus::Exact);
        // The lower-bound witness has length E-1 and no full-length
        // product-one subsequence.
        CHECK(e.witness.length() == 2 * n - 2);
        CHECK_FALSE(has_product_one_of_size(e.witness, n));
    }
}

TEST_CASE("smallest non-abelian instance: d and E") {
    FiniteGroup g = FiniteGroup::parse_spec("metacyclic:p=2,m=3,r=2");
    ConstantResult d = small_davenport(g);
    CHECK(d.value == 3);
    CHECK(d.status == ResultStatus::Exact);
    CHECK(is_product_one_free(d.witness));
    CHECK(d.audit.violations == 0);

    ConstantResult e = egz_constant(g);
    CHECK(e.value == 9);
    CHECK(e.status == ResultStatus::Exact);
    CHECK(e.witness.length() == 8);
    CHECK_FALSE(has_product_one_of_size(e.witness, 6));
}

TEST_CASE("order-10 metacyclic group: d = m+p-2") {
    FiniteGroup g = FiniteGroup::parse_spec("metacyclic:p=2,m=5,r=4");
    ConstantResult d = small_davenport(g);
    CHECK(d.value == 5);
    CHECK(d.status == ResultStatus::Exact);
}

TEST_CASE("davenport witness sequences") {
    FiniteGroup g = FiniteGroup::parse_spec("metacyclic:p=3,m=7,r=2");
    Sequence s0 = d_lower_witness(g);
    CHECK(s0.length() == 8);
    CHECK(s0.count(g.x()) == 2);
    CHECK(s0.count(g.y()) == 6);
    CHECK(is_product_one_free(s0));

    Sequence ew = e_lower_witness(g, s0);
    CHECK(ew.length() == 8 + 20);
    CHECK(ew.count(g.identity()) == 20);

    Sequence not_free(g, {1, 6});  // y * y^6 multiplies to 1
    CHECK_THROWS_AS(e_lower_witness(g, not_free), std::invalid_argument);
}

TEST_CASE("node budget degrades to a lower bound, never lies") {
    FiniteGroup g = FiniteGroup::cyclic(9);
    SearchBudget tiny;
    tiny.max_nodes = 5;
    ConstantResult d = small_davenport(g, tiny);
    CHECK(d.status == ResultStatus::LowerBoundOnly);
    CHECK(d.value <= 8);
    CHECK(is_product_one_free(d.witness));

    // EGZ needs d exact.
    CHECK_THROWS_AS(egz_constant(g, tiny), BudgetError);
}

TEST_CASE("exact search is gated on group order") {
    SearchBudget b;
    b.exact_order_ceiling = 10;
    CHECK_THROWS_AS(small_davenport(FiniteGroup::cyclic(11), b), std::invalid_argument);
}

TEST_CASE("exact EGZ enumeration respects the multiset budget") {
    FiniteGroup g = FiniteGroup::parse_spec("metacyclic:p=2,m=3,r=2");
    SearchBudget b;
    b.max_multisets = 100;  // far below the 2002 length-9 multisets
    EgzOptions opts;
    opts.samples = 25;
    ConstantResult e = egz_constant(g, b, opts);
    CHECK(e.status == ResultStatus::RandomizedEvidence);
    CHECK(e.value == 9);
    CHECK(e.nodes == 25);
}

TEST_CASE("randomized EGZ is forced by option") {
    FiniteGroup g = FiniteGroup::cyclic(4);
    EgzOptions opts;
    opts.force_randomized = true;
    opts.samples = 50;
    opts.seed = 9;
    ConstantResult e = egz_constant(g, {}, opts);
    CHECK(e.status == ResultStatus::RandomizedEvidence);
    CHECK(e.value == 7);
}

TEST_CASE("zerofree audit counts every visited free sequence") {
    FiniteGroup g = FiniteGroup::cyclic(5);
    ConstantResult d = small_davenport(g);
    // Canonical nondecreasing DFS over C_5 visits every free prefix once.
    CHECK(d.audit.checked == d.nodes);
    CHECK(d.audit.violations == 0);
    CHECK(d.audit.first_violation.empty());
}

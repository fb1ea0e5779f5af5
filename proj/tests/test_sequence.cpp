#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "oracle.hpp"
#include "zerosum/errors.hpp"
#include "zerosum/sequence.hpp"

using namespace zerosum;

namespace {

FiniteGroup s3() { return FiniteGroup::parse_spec("metacyclic:p=2,m=3,r=2"); }

}  // namespace

TEST_CASE("multiset bookkeeping") {
    FiniteGroup g = s3();
    Sequence s(g);
    CHECK(s.empty());
    s.add(3, 2);
    s.add(1);
    CHECK(s.length() == 3);
    CHECK(s.count(3) == 2);
    CHECK(s.support() == std::vector<int>{1, 3});
    CHECK(s.terms() == std::vector<int>{1, 3, 3});

    s.remove(3);
    CHECK(s.count(3) == 1);
    CHECK_THROWS_AS(s.remove(5), std::invalid_argument);

    Sequence sub(g, {3});
    CHECK(s.contains(sub));
    Sequence rest = s.without(sub);
    CHECK(rest.terms() == std::vector<int>{1});
    CHECK_THROWS_AS(rest.without(sub), std::invalid_argument);

    ElemSet normal(g.order());
    for (int b = 0; b < 3; ++b) normal.set(b);
    Sequence s2(g, {0, 1, 3, 4});
    CHECK(s2.restricted_to(normal).terms() == std::vector<int>{0, 1});
}

TEST_CASE("literals round-trip and reject junk") {
    FiniteGroup g = s3();
    Sequence s(g, {3, 3, 1});
    CHECK(s.to_literal() == "g1 * g3^2");
    CHECK(Sequence::parse_literal(g, "g1 * g3^2") == s);
    CHECK(Sequence::parse_literal(g, " g3 ^2*g1 ") == s);
    // Element-name tokens work too.
    CHECK(Sequence::parse_literal(g, "y * x^2") == Sequence(g, {1, 3, 3}));

    CHECK_THROWS_AS(Sequence::parse_literal(g, "g9"), std::invalid_argument);
    CHECK_THROWS_AS(Sequence::parse_literal(g, "g1^0"), std::invalid_argument);
    CHECK_THROWS_AS(Sequence::parse_literal(g, "g1^"), std::invalid_argument);
    CHECK_THROWS_AS(Sequence::parse_literal(g, ""), std::invalid_argument);
}

TEST_CASE("pi of a fixed S3 sequence") {
    FiniteGroup g = s3();
    // x * y * y: orderings give xyy=xy^2? Walk them all via the oracle.
    Sequence s(g, {3, 1, 1});
    ElemSet got = pi(s);
    CHECK(got == oracle::pi_perm(g, {3, 1, 1}));
    // Frozen expectation: products are exactly {x, xy, xy^2}.
    CHECK(got.to_indices() == std::vector<int>{3, 4, 5});

    CHECK(pi_n(s, 2) == oracle::pi_n_bruteforce(s, 2));
    CHECK(pi_n(s, 2).to_indices() == std::vector<int>{2, 4, 5});
    CHECK(pi_all(s) == oracle::pi_all_bruteforce(s));
}

TEST_CASE("pi matches the permutation oracle on random sequences") {
    oracle::Rng rng{2024};
    FiniteGroup groups[] = {s3(), FiniteGroup::parse_spec("metacyclic:p=3,m=7,r=2"),
                            FiniteGroup::cyclic(8), FiniteGroup::abelian({4, 2})};
    for (const FiniteGroup& g : groups) {
        for (int rep = 0; rep < 30; ++rep) {
            int len = 1 + static_cast<int>(rng.bounded(6));
            Sequence s = oracle::random_sequence(g, len, rng);
            CHECK(pi(s) == oracle::pi_perm(g, s.terms()));
            int n = 1 + static_cast<int>(rng.bounded(len));
            CHECK(pi_n(s, n) == oracle::pi_n_bruteforce(s, n));
            CHECK(pi_all(s) == oracle::pi_all_bruteforce(s));
            CHECK(is_product_one_free(s) == oracle::product_one_free_bruteforce(s));
        }
    }
}

TEST_CASE("pi edge cases") {
    FiniteGroup g = s3();
    Sequence empty(g);
    ElemSet e = pi(empty);
    CHECK(e.count() == 1);
    CHECK(e.test(g.identity()));
    CHECK(pi_all(empty).empty());
    CHECK(is_product_one_free(empty));

    Sequence one(g, {0});
    CHECK_FALSE(is_product_one_free(one));
    // Out-of-range n is an empty set, n = 0 the empty product.
    CHECK(pi_n(one, 2).empty());
    CHECK(pi_n(one, 0).to_indices() == std::vector<int>{0});
}

TEST_CASE("the extremal sequence is product-one free") {
    FiniteGroup g = FiniteGroup::parse_spec("metacyclic:p=3,m=7,r=2");
    // x^[2] * y^[6], length m+p-2 = 8.
    Sequence s0(g);
    s0.add(g.x(), 2);
    s0.add(g.y(), 6);
    CHECK(is_product_one_free(s0));
    // Π(S0) has at least |S0| elements (it is product-one free).
    CHECK(pi_all(s0).count() >= s0.length());
    // One more y kills freeness: y^7 = 1.
    Sequence s1 = s0;
    s1.add(g.y());
    CHECK_FALSE(is_product_one_free(s1));
}

TEST_CASE("witness verification pins terms, membership, product, length") {
    FiniteGroup g = s3();
    Sequence s(g, {3, 3, 1, 0});

    OrderedWitness w;
    w.ordered_terms = {3, 3};
    w.claimed_product = 0;
    CHECK(verify_witness(s, w).ok);
    CHECK(verify_witness(s, w, 2).ok);
    CHECK_FALSE(verify_witness(s, w, 3).ok);

    OrderedWitness wrong_product = w;
    wrong_product.claimed_product = 1;
    CHECK_FALSE(verify_witness(s, wrong_product).ok);

    OrderedWitness not_sub = w;
    not_sub.ordered_terms = {3, 3, 3};
    CHECK_FALSE(verify_witness(s, not_sub).ok);

    OrderedWitness order_matters;
    order_matters.ordered_terms = {3, 1};  // x*y = xy
    order_matters.claimed_product = 4;
    CHECK(verify_witness(s, order_matters).ok);
    order_matters.ordered_terms = {1, 3};  // y*x = xy^2
    CHECK_FALSE(verify_witness(s, order_matters).ok);

    // The empty witness is the empty product: identity, but never length n>0.
    OrderedWitness empty;
    empty.claimed_product = 0;
    CHECK(verify_witness(s, empty).ok);
    CHECK_FALSE(verify_witness(s, empty, 1).ok);
}

TEST_CASE("realize_product recovers an ordering for every achievable target") {
    oracle::Rng rng{77};
    FiniteGroup g = s3();
    for (int rep = 0; rep < 40; ++rep) {
        int len = 1 + static_cast<int>(rng.bounded(5));
        Sequence s = oracle::random_sequence(g, len, rng);
        ElemSet achievable = pi(s);
        for (int target = 0; target < g.order(); ++target) {
            auto ordering = realize_product(s, target);
            CHECK(ordering.has_value() == achievable.test(target));
            if (ordering) {
                CHECK(Sequence(g, *ordering) == s);
                int prod = g.identity();
                for (int t : *ordering) prod = g.mul(prod, t);
                CHECK(prod == target);
            }
        }
    }
}

TEST_CASE("incremental product table tracks push and pop") {
    FiniteGroup g = s3();
    SubMultisetProducts table(g);
    CHECK(table.empty());
    CHECK(table.all_products().empty());

    CHECK_FALSE(table.push(3));  // x
    CHECK(table.all_products().to_indices() == std::vector<int>{3});
    CHECK_FALSE(table.push(1));  // y
    // Sub-multisets: {x}, {y}, {x,y} -> products {x, y, xy, xy^2}.
    CHECK(table.all_products().to_indices() == std::vector<int>{1, 3, 4, 5});
    CHECK(table.full_products().to_indices() == std::vector<int>{4, 5});

    // Pushing x again completes x*x = 1.
    CHECK(table.push(3));
    CHECK(table.identity_reachable());
    table.pop();
    CHECK_FALSE(table.identity_reachable());
    CHECK(table.all_products().to_indices() == std::vector<int>{1, 3, 4, 5});
    table.pop();
    CHECK(table.all_products().to_indices() == std::vector<int>{3});
    table.pop();
    CHECK(table.empty());
    CHECK(table.all_products().empty());
}

TEST_CASE("incremental table agrees with oracles on random stacks") {
    oracle::Rng rng{5150};
    FiniteGroup groups[] = {s3(), FiniteGroup::cyclic(6)};
    for (const FiniteGroup& g : groups) {
        for (int rep = 0; rep < 25; ++rep) {
            SubMultisetProducts table(g);
            Sequence s(g);
            int len = 1 + static_cast<int>(rng.bounded(6));
            for (int i = 0; i < len; ++i) {
                int e = static_cast<int>(rng.bounded(g.order()));
                bool hit = table.push(e);
                Sequence before = s;
                s.add(e);
                // push reports "some newly created sub-multiset reaches 1":
                // exact at the free-to-unfree transition, and never claims a
                // reachability the table does not have.
                bool now = pi_all(s).test(g.identity());
                bool was = before.empty() ? false : pi_all(before).test(g.identity());
                if (!was) CHECK(hit == now);
                if (hit) CHECK(now);
                CHECK(table.all_products() == oracle::pi_all_bruteforce(s));
                CHECK(table.full_products() == oracle::pi_perm(g, s.terms()));
            }
            // Unwind completely; the table must return to its initial state.
            for (int i = 0; i < len; ++i) table.pop();
            CHECK(table.empty());
            CHECK(table.all_products().empty());
        }
    }
}

TEST_CASE("rotation identity: appending e makes product-one iff inverse(e) in full products") {
    oracle::Rng rng{99};
    FiniteGroup g = s3();
    for (int rep = 0; rep < 60; ++rep) {
        int len = 1 + static_cast<int>(rng.bounded(4));
        Sequence s = oracle::random_sequence(g, len, rng);
        int e = static_cast<int>(rng.bounded(g.order()));
        Sequence extended = s;
        extended.add(e);
        bool one = oracle::pi_perm(g, extended.terms()).test(g.identity());
        CHECK(one == pi(s).test(g.inverse(e)));
    }
}

TEST_CASE("memo budget aborts oversize tables") {
    // Non-abelian path: the table has prod(count_i + 1) keys, 4^3 = 64 > 16.
    FiniteGroup g = FiniteGroup::parse_spec("metacyclic:p=3,m=7,r=2");
    EngineConfig tiny{16};
    Sequence s(g);
    for (int e = 1; e <= 3; ++e) s.add(e, 3);
    CHECK_THROWS_AS(pi_all(s, tiny), BudgetError);
}

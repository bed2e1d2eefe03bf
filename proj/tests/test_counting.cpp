#include <catch2/catch_amalgamated.hpp>

#include "apfree/counting.hpp"

using namespace apfree;

TEST_CASE("CountQuery validation", "[counting]") {
    CHECK_THROWS_AS(CountQuery(0), domain_error);
    CHECK_THROWS_AS(CountQuery(3, APConstraint(), Seq({1, 2, 3, 4})), domain_error);
    CHECK_THROWS_AS(CountQuery(3, APConstraint(), Seq({4})), domain_error);
    CHECK(CountQuery(4) == CountQuery(4, APConstraint(3, Parity::any)));
    CHECK_FALSE(CountQuery(4) == CountQuery(4, APConstraint(4)));
}

TEST_CASE("count_apfree pinned values", "[counting]") {
    CHECK(count_apfree(CountQuery(1)).count == 1);
    CHECK(count_apfree(CountQuery(4)).count == 10);
    CHECK(count_apfree(CountQuery(10)).count == 1066);
    CHECK(count_apfree(CountQuery(3, APConstraint(3, Parity::odd))).count == 4);
    CHECK(count_apfree(CountQuery(3, APConstraint(3, Parity::odd), Seq({2, 1}))).count == 1);
    // prefix completing an AP immediately: zero completions
    CHECK(count_apfree(CountQuery(3, APConstraint(), Seq({1, 2, 3}))).count == 0);
    // full-length AP-free prefix counts itself
    CHECK(count_apfree(CountQuery(4, APConstraint(), Seq({2, 4, 1, 3}))).count == 1);
}

TEST_CASE("count_apfree feasibility guard", "[counting]") {
    CHECK_THROWS_AS(count_apfree(CountQuery(21)), feasibility_error);
    CountOptions wide;
    wide.max_n = 40;  // beyond the engine's hard cap
    CHECK_THROWS_AS(count_apfree(CountQuery(33), wide), feasibility_error);
}

TEST_CASE("enumerate_apfree pinned lists", "[counting]") {
    const std::vector<Seq> expected = {
        Seq({1, 3, 2, 4}), Seq({1, 3, 4, 2}), Seq({2, 1, 4, 3}), Seq({2, 4, 1, 3}),
        Seq({2, 4, 3, 1}), Seq({3, 1, 2, 4}), Seq({3, 1, 4, 2}), Seq({3, 4, 1, 2}),
        Seq({4, 2, 1, 3}), Seq({4, 2, 3, 1}),
    };
    CHECK(enumerate_apfree(CountQuery(4), 100) == expected);
    CHECK(enumerate_apfree(CountQuery(2), 100) == std::vector<Seq>{Seq({1, 2}), Seq({2, 1})});
    CHECK(enumerate_apfree(CountQuery(3), 1) == std::vector<Seq>{Seq({1, 3, 2})});
    CHECK_THROWS_AS(enumerate_apfree(CountQuery(3), 0), domain_error);
}

TEST_CASE("oracle_count pinned values and guard", "[counting]") {
    CHECK(oracle_count(CountQuery(4)).count == 10);
    CHECK(oracle_count(CountQuery(2)).count == 2);
    CHECK(oracle_count(CountQuery(3)).count == 4);
    CHECK(oracle_count(CountQuery(4)).node_count == 24);
    CHECK_THROWS_AS(oracle_count(CountQuery(11)), feasibility_error);
    // prefix narrows the factorial guard
    CHECK_NOTHROW(oracle_count(CountQuery(12, APConstraint(), Seq({1, 2}))));
}

TEST_CASE("count_apfree agrees with oracle for n <= 8, all constraints", "[counting]") {
    for (Value n = 1; n <= 8; ++n) {
        for (int k : {3, 4}) {
            for (Parity parity : {Parity::any, Parity::odd, Parity::even}) {
                const CountQuery q(n, APConstraint(k, parity));
                const auto fast = count_apfree(q);
                const auto slow = oracle_count(q);
                INFO("n=" << n << " k=" << k << " parity=" << to_string(parity));
                CHECK(fast.count == slow.count);
            }
        }
    }
}

TEST_CASE("relaxing the constraint never shrinks the count", "[counting]") {
    for (Value n = 1; n <= 10; ++n) {
        const auto c3 = count_apfree(CountQuery(n, APConstraint(3))).count;
        const auto c4 = count_apfree(CountQuery(n, APConstraint(4))).count;
        const auto c3odd = count_apfree(CountQuery(n, APConstraint(3, Parity::odd))).count;
        CHECK(c4 >= c3);
        CHECK(c3odd >= c3);
    }
}

TEST_CASE("enumerated sets are closed under reversal; counts even for n >= 2", "[counting]") {
    for (Value n = 2; n <= 8; ++n) {
        const auto perms = enumerate_apfree(CountQuery(n), 100000);
        CHECK(perms.size() % 2 == 0);
        CHECK(count_apfree(CountQuery(n)).count == perms.size());
        for (const Seq& p : perms) {
            const Seq rev = reverse_seq(p);
            CHECK(std::find(perms.begin(), perms.end(), rev) != perms.end());
        }
    }
}

TEST_CASE("prefix counts partition the total", "[counting]") {
    for (Value n : {5, 7}) {
        for (Parity parity : {Parity::any, Parity::odd}) {
            const APConstraint c(3, parity);
            const auto whole = count_apfree(CountQuery(n, c)).count;
            BigInt sum = 0;
            for (Value v = 1; v <= n; ++v)
                sum += count_apfree(CountQuery(n, c, Seq({v}))).count;
            CHECK(sum == whole);
        }
    }
}

TEST_CASE("thread count does not change the result", "[counting]") {
    for (Value n : {6, 9, 11}) {
        CountOptions lone;
        lone.threads = 1;
        CountOptions four;
        four.threads = 4;
        const auto a = count_apfree(CountQuery(n), lone);
        const auto b = count_apfree(CountQuery(n), four);
        CHECK(a.count == b.count);
        CHECK(a.node_count == b.node_count);
    }
}

TEST_CASE("check_prefix_forces_ap examples", "[counting]") {
    {
        const auto r = check_prefix_forces_ap(3, Seq({2, 1}), APConstraint(3, Parity::odd));
        CHECK_FALSE(r.forces);
        REQUIRE(r.counterexample.has_value());
        CHECK(*r.counterexample == Seq({2, 1, 3}));
    }
    {
        const auto r = check_prefix_forces_ap(3, Seq({1, 2}), APConstraint(3, Parity::odd));
        CHECK(r.forces);
        CHECK_FALSE(r.counterexample.has_value());
    }
    // cross-check against the counting route on everything small
    for (Value n = 1; n <= 6; ++n) {
        for (Value a = 1; a <= n; ++a) {
            for (Value b = 1; b <= n; ++b) {
                if (a == b) continue;
                for (Parity parity : {Parity::any, Parity::odd, Parity::even}) {
                    const APConstraint c(3, parity);
                    const auto forced = check_prefix_forces_ap(n, Seq({a, b}), c).forces;
                    const auto avoiders = count_apfree(CountQuery(n, c, Seq({a, b}))).count;
                    CHECK(forced == (avoiders == 0));
                }
            }
        }
    }
}

TEST_CASE("claim: prefix (2,1) forces an odd-difference 3AP at n = 11", "[counting]") {
    const auto r = check_prefix_forces_ap(11, Seq({2, 1}), APConstraint(3, Parity::odd));
    CHECK(r.forces);
    CHECK_FALSE(r.counterexample.has_value());
    // ...but not yet at n = 10
    const auto r10 = check_prefix_forces_ap(10, Seq({2, 1}), APConstraint(3, Parity::odd));
    CHECK_FALSE(r10.forces);
    REQUIRE(r10.counterexample.has_value());
    CHECK_FALSE(find_ap(*r10.counterexample, APConstraint(3, Parity::odd)).has_value());
}

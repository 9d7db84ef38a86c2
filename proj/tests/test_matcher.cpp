#include <doctest.h>

#include "surfsim/matcher.hpp"
#include "surfsim/rng.hpp"

using namespace surfsim;

TEST_CASE("two nodes, one edge") {
    MatchingGraph G(2);
    G.add_edge(0, 1, 3.7);
    auto M = min_weight_perfect_matching(G);
    REQUIRE(M.pairs.size() == 1);
    CHECK(M.pairs[0] == std::pair<int, int>{0, 1});
    CHECK(M.total_weight == 3.7);
    auto O = brute_force_matching(G);
    CHECK(O.pairs == M.pairs);
    CHECK(O.total_weight == M.total_weight);
}

TEST_CASE("greedy choice is suboptimal on the 4-node example") {
    // Perfect matchings: {(0,1),(2,3)}=11, {(0,2),(1,3)}=4, {(0,3),(1,2)}=12.
    MatchingGraph G(4);
    G.add_edge(0, 1, 1);
    G.add_edge(2, 3, 10);
    G.add_edge(0, 2, 2);
    G.add_edge(1, 3, 2);
    G.add_edge(0, 3, 6);
    G.add_edge(1, 2, 6);
    auto M = min_weight_perfect_matching(G);
    CHECK(M.total_weight == 4);
    REQUIRE(M.pairs.size() == 2);
    CHECK(M.pairs[0] == std::pair<int, int>{0, 2});
    CHECK(M.pairs[1] == std::pair<int, int>{1, 3});
    auto O = brute_force_matching(G);
    CHECK(O.pairs == M.pairs);
    CHECK(O.total_weight == 4);
}

TEST_CASE("odd node count is rejected") {
    MatchingGraph G(3);
    G.add_edge(0, 1, 1);
    G.add_edge(1, 2, 1);
    CHECK_THROWS_AS(min_weight_perfect_matching(G), std::invalid_argument);
}

TEST_CASE("no perfect matching is rejected") {
    MatchingGraph G(4);
    // 1-2-3 path plus isolated satellite edges off node 0 only.
    G.add_edge(0, 1, 1);
    G.add_edge(0, 2, 1);
    G.add_edge(0, 3, 1);
    CHECK_THROWS_AS(min_weight_perfect_matching(G), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_matching(G), std::invalid_argument);
}

TEST_CASE("brute force rejects > 12 nodes") {
    MatchingGraph G(14);
    CHECK_THROWS_AS(brute_force_matching(G), std::invalid_argument);
}

TEST_CASE("boundary nodes absorb odd events") {
    MatchingGraph G(3);
    G.add_edge(0, 1, 1.0);
    G.set_boundary(0, 5.0);
    G.set_boundary(1, 5.0);
    G.set_boundary(2, 0.25);
    auto M = min_weight_perfect_matching(G);
    REQUIRE(M.pairs.size() == 2);
    CHECK(M.pairs[0] == std::pair<int, int>{0, 1});
    CHECK(M.pairs[1] == std::pair<int, int>{2, -1});
    CHECK(M.total_weight == doctest::Approx(1.25));
    auto O = brute_force_matching(G);
    CHECK(O.pairs == M.pairs);
}

TEST_CASE("oracle equivalence on 1000 random graphs (4-10 nodes)") {
    Rng rng(2024);
    int blossom_nontrivial = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        int n = 4 + 2 * static_cast<int>(rng.below(4));  // 4, 6, 8, 10
        MatchingGraph G(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) G.add_edge(i, j, rng.uniform() * 10.0);
        bool with_boundary = rng.below(2) == 0;
        if (with_boundary)
            for (int i = 0; i < n; ++i) G.set_boundary(i, rng.uniform() * 10.0);
        auto M = min_weight_perfect_matching(G);
        auto O = brute_force_matching(G);
        CHECK(M.total_weight == O.total_weight);
        CHECK(M.pairs == O.pairs);
        blossom_nontrivial += M.pairs.size() > 1;
    }
    CHECK(blossom_nontrivial > 500);
}

TEST_CASE("positive scaling of all weights leaves the pairing unchanged") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        int n = 8;
        MatchingGraph G(n), G2(n);
        double k = 0.001 + rng.uniform() * 100.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double w = rng.uniform() * 10.0;
                G.add_edge(i, j, w);
                G2.add_edge(i, j, w * k);
            }
        CHECK(min_weight_perfect_matching(G).pairs == min_weight_perfect_matching(G2).pairs);
    }
}

TEST_CASE("blossom handles odd cycles (forced blossom instance)") {
    // 6 nodes; best solution requires shrinking the 1-2-3 triangle.
    MatchingGraph G(6);
    G.add_edge(0, 1, 1);
    G.add_edge(1, 2, 1);
    G.add_edge(2, 0, 1);
    G.add_edge(0, 3, 1);
    G.add_edge(1, 4, 1);
    G.add_edge(2, 5, 1);
    G.add_edge(3, 4, 100);
    auto M = min_weight_perfect_matching(G);
    auto O = brute_force_matching(G);
    CHECK(M.total_weight == O.total_weight);
    CHECK(M.pairs == O.pairs);
}

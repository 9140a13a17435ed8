#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "vcgap/exact.hpp"

using namespace vcgap;

TEST(ExactVc, SmallExamples) {
    EXPECT_EQ(*exact_vc(support::complete(3)).optimum, 2u);
    EXPECT_EQ(*exact_vc(support::cycle(5)).optimum, 3u);
    EXPECT_EQ(*exact_vc(support::petersen()).optimum, 6u);
    EXPECT_EQ(*exact_vc_enumerate(support::petersen()).optimum, 6u);
    EXPECT_EQ(*exact_vc(Graph{}).optimum, 0u);
    EXPECT_EQ(*exact_vc(Graph::with_order(5, {})).optimum, 0u);
    EXPECT_EQ(support::brute_force_vc(support::cycle(5)), 3u);
}

TEST(ExactVc, CoverIsFeasibleAndSized) {
    const auto r = exact_vc(support::petersen());
    ASSERT_TRUE(r.known());
    EXPECT_TRUE(verify_cover(support::petersen(), *r.cover).feasible);
    EXPECT_EQ(r.cover->cover_size(), 6u);
}

TEST(ExactVc, BranchAndBoundMatchesEnumeration) {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 150; ++trial) {
        const auto g = support::random_graph(rng, 1 + trial % 18, 0.1 + 0.1 * (trial % 8));
        const auto bb = exact_vc(g);
        const auto en = exact_vc_enumerate(g);
        ASSERT_TRUE(bb.known());
        EXPECT_EQ(*bb.optimum, *en.optimum);
        EXPECT_TRUE(verify_cover(g, *bb.cover).feasible);
        EXPECT_TRUE(verify_cover(g, *en.cover).feasible);
        if (g.order() <= 14) {
            EXPECT_EQ(*bb.optimum, support::brute_force_vc(g));
        }
    }
}

TEST(ExactVc, BudgetExhaustionIsUnknownNotWrong) {
    std::mt19937_64 rng(73);
    const auto g = support::random_graph(rng, 40, 0.5);
    const auto r = exact_vc(g, 5);
    EXPECT_EQ(r.status, ExactStatus::unknown);
    EXPECT_FALSE(r.optimum.has_value());
    EXPECT_FALSE(r.cover.has_value());
}

TEST(ExactVc, SixtyVertexSparseGraph) {
    std::mt19937_64 rng(79);
    const auto g = support::random_graph(rng, 60, 0.06);
    const auto r = exact_vc(g);
    ASSERT_TRUE(r.known());
    EXPECT_TRUE(verify_cover(g, *r.cover).feasible);
}

TEST(ExactVc, OrderLimits) {
    EXPECT_THROW(exact_vc(Graph::with_order(65, {})), ArgumentError);
    EXPECT_THROW(exact_vc_enumerate(Graph::with_order(31, {})), ArgumentError);
}

TEST(LpGapReport, SmallExamples) {
    const auto k3 = lp_gap_report(support::complete(3));
    EXPECT_NEAR(k3.z_lp, 1.5, 1e-9);
    EXPECT_EQ(k3.z_exact, 2u);
    EXPECT_NEAR(k3.gap_lp, 4.0 / 3.0, 1e-9);
    const auto k2 = lp_gap_report(support::path(2));
    EXPECT_NEAR(k2.gap_lp, 1.0, 1e-9);
    EXPECT_NEAR(k2.gap_sdp, 1.0, 1e-4);
    EXPECT_DOUBLE_EQ(lp_gap_report(Graph::with_order(3, {})).gap_lp, 1.0);
}

TEST(LpGapReport, BipartiteGraphsHaveNoLpGap) {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = support::random_bipartite(rng, 2 + trial % 5, 2 + trial % 4, 0.4);
        EXPECT_NEAR(lp_gap_report(g).gap_lp, 1.0, 1e-7);
    }
}

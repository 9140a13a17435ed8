#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "vcgap/bipartite.hpp"

using namespace vcgap;

namespace {

Bipartition coloring(const Graph& g) { return std::get<Bipartition>(find_odd_cycle(g)); }

void expect_valid_matching(const Graph& g, const Matching& m) {
    VertexSet used;
    for (const auto& e : m.edges) {
        EXPECT_TRUE(g.has_edge(e.u, e.v));
        EXPECT_TRUE(used.insert(e.u).second);
        EXPECT_TRUE(used.insert(e.v).second);
    }
}

} // namespace

TEST(MaxMatching, SmallExamples) {
    const auto p3 = support::path(3);
    EXPECT_EQ(max_matching(p3, coloring(p3)).size(), 1u);
    const auto c6 = support::cycle(6);
    EXPECT_EQ(max_matching(c6, coloring(c6)).size(), 3u);
    const auto k33 = support::complete_bipartite(3, 3);
    EXPECT_EQ(max_matching(k33, coloring(k33)).size(), 3u);
    EXPECT_EQ(support::brute_force_matching(c6), 3u);
    EXPECT_EQ(support::brute_force_matching(k33), 3u);
}

TEST(MaxMatching, InvalidColoringRejected) {
    const auto p3 = support::path(3);
    Bipartition bad{{0, 1}, {2}};
    EXPECT_THROW(max_matching(p3, bad), ArgumentError);
    Bipartition partial{{0}, {1}};
    EXPECT_THROW(max_matching(p3, partial), ArgumentError);
}

TEST(KonigCover, SmallExamples) {
    const auto p3 = support::path(3);
    const auto parts = coloring(p3);
    const auto cover = konig_cover(p3, parts, max_matching(p3, parts));
    EXPECT_EQ(cover.in_cover, (VertexSet{1}));

    const auto k2 = support::path(2);
    EXPECT_EQ(konig_cover(k2, coloring(k2), max_matching(k2, coloring(k2))).cover_size(), 1u);

    const auto c6 = support::cycle(6);
    EXPECT_EQ(konig_cover(c6, coloring(c6), max_matching(c6, coloring(c6))).cover_size(), 3u);
}

TEST(KonigCover, NonMaximumMatchingIsAContractViolation) {
    const auto p4 = support::path(4);
    Matching middle;
    middle.edges = {Edge{1, 2}};
    EXPECT_THROW(konig_cover(p4, coloring(p4), middle), ContractViolation);
    Matching overlapping;
    overlapping.edges = {Edge{0, 1}, Edge{1, 2}};
    EXPECT_THROW(konig_cover(p4, coloring(p4), overlapping), ContractViolation);
}

TEST(KonigCover, EqualsMatchingAndBruteForceOptimum) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t a = 1 + trial % 10;
        const std::size_t b = 1 + (trial / 10) % 10;
        const auto g = support::random_bipartite(rng, a, b, 0.1 + 0.1 * (trial % 7));
        const auto parts = coloring(g);
        const auto m = max_matching(g, parts);
        expect_valid_matching(g, m);
        const auto cover = konig_cover(g, parts, m);
        EXPECT_TRUE(verify_cover(g, cover).feasible);
        EXPECT_EQ(cover.cover_size(), m.size());
        EXPECT_EQ(m.size(), support::brute_force_matching(g));
        if (g.order() <= 16) {
            EXPECT_EQ(cover.cover_size(), support::brute_force_vc(g));
        }
    }
}

TEST(MaximalMatchingCover, SmallExamples) {
    EXPECT_EQ(maximal_matching_cover(support::path(2)).in_cover, (VertexSet{0, 1}));
    EXPECT_EQ(maximal_matching_cover(support::complete(3)).cover_size(), 2u);
    EXPECT_TRUE(maximal_matching_cover(Graph::with_order(4, {})).in_cover.empty());
    EXPECT_EQ(maximal_matching_cover(support::cycle(5)).cover_size(), 4u);
}

TEST(MaximalMatchingCover, FeasibleAndWithinFactorTwo) {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 150; ++trial) {
        const auto g = support::random_graph(rng, 2 + trial % 13, 0.1 + 0.1 * (trial % 8));
        const auto cover = maximal_matching_cover(g);
        EXPECT_TRUE(verify_cover(g, cover).feasible);
        EXPECT_LE(cover.cover_size(), 2 * support::brute_force_vc(g));
    }
}

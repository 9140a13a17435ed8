#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "vcgap/graph.hpp"

using namespace vcgap;

namespace {

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_dimacs(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

} // namespace

TEST(ParseDimacs, TriangleFromHeaderAndEdges) {
    const auto g = parse_dimacs("p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
    EXPECT_EQ(g.order(), 3u);
    EXPECT_EQ(g.size(), 3u);
    EXPECT_TRUE(g.has_edge(0, 2));
}

TEST(ParseDimacs, CommentsIgnoredAndIsolatedVerticesKept) {
    const auto g = parse_dimacs("c hello\np edge 5 1\nc mid\ne 1 2\n");
    EXPECT_EQ(g.order(), 5u);
    EXPECT_EQ(g.size(), 1u);
    EXPECT_EQ(g.degree(4), 0u);
}

TEST(ParseDimacs, DuplicateEdgeLinesAreMerged) {
    const auto g = parse_dimacs("p edge 2 3\ne 1 2\ne 2 1\ne 1 2\n");
    EXPECT_EQ(g.size(), 1u);
}

TEST(ParseDimacs, ColHeaderAccepted) {
    EXPECT_EQ(parse_dimacs("p col 2 1\ne 1 2\n").size(), 1u);
}

TEST(ParseDimacs, ErrorsNameTheLine) {
    EXPECT_EQ(parse_error_line("p edge 3 1\ne 1 4\n"), 2u);
    EXPECT_EQ(parse_error_line("p edge 3 1\nc x\ne 2 2\n"), 3u);
    EXPECT_EQ(parse_error_line("p edge three 1\n"), 1u);
    EXPECT_EQ(parse_error_line("e 1 2\np edge 2 1\n"), 1u);
    EXPECT_EQ(parse_error_line("p edge 2 1\np edge 2 1\n"), 2u);
    EXPECT_EQ(parse_error_line("p edge 2 1\nx 1 2\n"), 2u);
    EXPECT_EQ(parse_error_line("p edge 2 1\ne 0 1\n"), 2u);
    EXPECT_THROW(parse_dimacs("c only comments\n"), ParseError);
}

TEST(ParseDimacs, WriteThenParseIsIdentity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = support::random_graph(rng, 1 + trial % 9, 0.4);
        std::ostringstream out;
        write_dimacs(out, g);
        EXPECT_EQ(parse_dimacs(out.str()), g);
    }
}

TEST(GraphJson, RoundTripKeepsIds) {
    const auto g = Graph::from_edges({3, 7, 9}, {{3, 9}, {7, 9}});
    EXPECT_EQ(graph_from_json(to_json(g)), g);
    const auto k4 = support::complete(4);
    EXPECT_EQ(graph_from_json(to_json(k4)), k4);
}

TEST(GraphConstruction, RejectsBadInput) {
    EXPECT_THROW(Graph::from_edges({1, 1}, {}), ArgumentError);
    EXPECT_THROW(Graph::from_edges({1, 2}, {{1, 1}}), ArgumentError);
    EXPECT_THROW(Graph::from_edges({1, 2}, {{1, 3}}), ArgumentError);
}

TEST(GraphConstruction, AdjacencyIsSymmetric) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = support::random_graph(rng, 12, 0.3);
        std::size_t degree_sum = 0;
        for (std::size_t p = 0; p < g.order(); ++p) {
            degree_sum += g.degree(p);
            for (auto w : g.neighbors(p)) {
                const auto back = g.neighbors(w);
                EXPECT_TRUE(std::find(back.begin(), back.end(), p) != back.end());
                EXPECT_TRUE(g.has_edge(g.id_at(p), g.id_at(w)));
            }
        }
        EXPECT_EQ(degree_sum, 2 * g.size());
    }
}

TEST(InducedSubgraph, KeepsIdsAndInternalEdges) {
    const auto g = support::cycle(5);
    const auto h = induced_subgraph(g, {0, 1, 3});
    EXPECT_EQ(h.order(), 3u);
    EXPECT_EQ(h.size(), 1u);
    EXPECT_TRUE(h.has_edge(0, 1));
    EXPECT_EQ(h.id_at(2), 3u);
    EXPECT_THROW(induced_subgraph(g, {0, 8}), ArgumentError);
    EXPECT_TRUE(induced_subgraph(g, {}).empty());
}

TEST(DuplicateJoin, EdgeCountAndOrigins) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = trial % 8;
        const auto g = support::random_graph(rng, n, 0.5);
        const auto dg = duplicate_join(g);
        EXPECT_EQ(dg.combined.order(), 2 * n);
        EXPECT_EQ(dg.combined.size(), 2 * g.size() + n * n);
        for (std::size_t p = 0; p < n; ++p) {
            EXPECT_EQ(dg.origin[p].copy, Copy::prime);
            EXPECT_EQ(dg.origin[n + p].copy, Copy::double_prime);
            EXPECT_EQ(dg.origin[p].base_id, g.id_at(p));
            for (std::size_t q = 0; q < n; ++q) {
                const auto a = static_cast<VertexId>(p);
                const auto b = static_cast<VertexId>(q);
                const bool base = g.has_edge(g.id_at(p), g.id_at(q));
                EXPECT_EQ(dg.combined.has_edge(a, b), base);
                EXPECT_EQ(dg.combined.has_edge(a + n, b + n), base);
                EXPECT_TRUE(dg.combined.has_edge(a, b + n));
            }
        }
    }
}

TEST(DuplicateJoin, SingleEdgeGivesFourCycle) {
    const auto dg = duplicate_join(support::path(2));
    EXPECT_EQ(dg.combined.order(), 4u);
    EXPECT_EQ(dg.combined.size(), 6u);
}

TEST(FindOddCycle, FiveCycle) {
    const auto r = find_odd_cycle(support::cycle(5));
    ASSERT_TRUE(std::holds_alternative<OddCycle>(r));
    EXPECT_EQ(std::get<OddCycle>(r).cycle.size(), 5u);
}

TEST(FindOddCycle, EvenCycleIsBipartite) {
    const auto r = find_odd_cycle(support::cycle(6));
    ASSERT_TRUE(std::holds_alternative<Bipartition>(r));
    EXPECT_EQ(std::get<Bipartition>(r).left.size(), 3u);
}

TEST(FindOddCycle, AgreesWithBruteForceColoring) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = support::random_graph(rng, 2 + trial % 10, 0.1 + 0.05 * (trial % 8));
        const auto r = find_odd_cycle(g);
        EXPECT_EQ(std::holds_alternative<Bipartition>(r), support::brute_force_bipartite(g));
        if (const auto* c = std::get_if<OddCycle>(&r)) {
            EXPECT_TRUE(detail::is_valid_odd_cycle(g, *c));
            VertexSet distinct(c->cycle.begin(), c->cycle.end());
            EXPECT_EQ(distinct.size(), c->cycle.size());
        } else {
            EXPECT_TRUE(detail::is_valid_bipartition(g, std::get<Bipartition>(r)));
        }
    }
}

TEST(VerifyCover, ReportsUncoveredEdges) {
    const auto g = support::path(3);
    EXPECT_TRUE(verify_cover(g, CoverPartition::from_cover(g, {1})).feasible);
    const auto bad = verify_cover(g, CoverPartition::from_cover(g, {0}));
    EXPECT_FALSE(bad.feasible);
    ASSERT_EQ(bad.uncovered.size(), 1u);
    EXPECT_EQ(bad.uncovered[0], (Edge{1, 2}));
}

TEST(VerifyCover, MalformedPartitionRejected) {
    const auto g = support::path(3);
    CoverPartition p;
    p.in_cover = {0, 1};
    p.out_cover = {1, 2};
    EXPECT_THROW(verify_cover(g, p), ArgumentError);
    p.out_cover = {};
    EXPECT_THROW(verify_cover(g, p), ArgumentError);
}

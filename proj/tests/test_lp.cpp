#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "support.hpp"
#include "vcgap/lp.hpp"

using namespace vcgap;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

LpRow row(std::vector<double> c, Relation r, double rhs) { return LpRow{std::move(c), r, rhs}; }

/// Constraints a·x ≥ b of the vertex-cover polytope.
struct Halfspace {
    std::vector<double> a;
    double b;
};

std::vector<Halfspace> vc_halfspaces(const Graph& g) {
    const std::size_t n = g.order();
    std::vector<Halfspace> hs;
    for (const auto& e : g.edges()) {
        Halfspace h{std::vector<double>(n, 0.0), 1.0};
        h.a[g.index_of(e.u)] = 1.0;
        h.a[g.index_of(e.v)] = 1.0;
        hs.push_back(h);
    }
    for (std::size_t i = 0; i < n; ++i) {
        Halfspace lo{std::vector<double>(n, 0.0), 0.0};
        lo.a[i] = 1.0;
        Halfspace hi{std::vector<double>(n, 0.0), -1.0};
        hi.a[i] = -1.0;
        hs.push_back(lo);
        hs.push_back(hi);
    }
    return hs;
}

/// Solves the square system by Gaussian elimination; nullopt if singular.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

/// Every vertex of the polytope, by trying all n-subsets of constraints.
std::vector<std::vector<double>> enumerate_vertices(const Graph& g) {
    const std::size_t n = g.order();
    const auto hs = vc_halfspaces(g);
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> pick(n);
    auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
        if (depth == n) {
            std::vector<std::vector<double>> a;
            std::vector<double> b;
            for (auto k : pick) {
                a.push_back(hs[k].a);
                b.push_back(hs[k].b);
            }
            auto x = solve_square(a, b);
            if (!x) return;
            for (const auto& h : hs) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += h.a[i] * (*x)[i];
                if (s < h.b - 1e-9) return;
            }
            for (const auto& v : out) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(v[i] - (*x)[i]));
                if (d < 1e-9) return;
            }
            out.push_back(*x);
            return;
        }
        for (std::size_t k = start; k < hs.size(); ++k) {
            pick[depth] = k;
            self(self, k + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);
    return out;
}

/// Rank of the constraints tight at x; n means x is a vertex.
std::size_t tight_rank(const Graph& g, const std::vector<double>& x) {
    const std::size_t n = g.order();
    std::vector<std::vector<double>> rows;
    for (const auto& h : vc_halfspaces(g)) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += h.a[i] * x[i];
        if (std::abs(s - h.b) < 1e-7) rows.push_back(h.a);
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < n && rank < rows.size(); ++c) {
        std::size_t piv = rank;
        for (std::size_t r = rank; r < rows.size(); ++r)
            if (std::abs(rows[r][c]) > std::abs(rows[piv][c])) piv = r;
        if (std::abs(rows[piv][c]) < 1e-9) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == rank) continue;
            const double f = rows[r][c] / rows[rank][c];
            for (std::size_t k = 0; k < n; ++k) rows[r][k] -= f * rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

} // namespace

TEST(Simplex, TextbookMaximization) {
    LpProblem p;
    p.objective = {-3.0, -5.0};
    p.lower = {0.0, 0.0};
    p.upper = {inf, inf};
    p.rows = {row({1, 0}, Relation::less_equal, 4), row({0, 2}, Relation::less_equal, 12),
              row({3, 2}, Relation::less_equal, 18)};
    const auto s = simplex_solve(p);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.objective_value, -36.0, 1e-9);
    EXPECT_NEAR(s.values[0], 2.0, 1e-9);
    EXPECT_NEAR(s.values[1], 6.0, 1e-9);
}

TEST(Simplex, InfeasibleAndUnbounded) {
    LpProblem p;
    p.objective = {1.0};
    p.lower = {0.0};
    p.upper = {1.0};
    p.rows = {row({1}, Relation::greater_equal, 2)};
    EXPECT_EQ(simplex_solve(p).status, LpStatus::infeasible);

    LpProblem q;
    q.objective = {-1.0, 0.0};
    q.lower = {0.0, 0.0};
    q.upper = {inf, inf};
    q.rows = {row({1, -1}, Relation::less_equal, 1)};
    EXPECT_EQ(simplex_solve(q).status, LpStatus::unbounded);
}

TEST(Simplex, EqualityRowsAndFixedVariables) {
    LpProblem p;
    p.objective = {1.0, 2.0, 3.0};
    p.lower = {0.0, 0.0, 0.5};
    p.upper = {inf, inf, 0.5};
    p.rows = {row({1, 1, 1}, Relation::equal, 3)};
    const auto s = simplex_solve(p);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.values[0], 2.5, 1e-9);
    EXPECT_NEAR(s.values[2], 0.5, 1e-12);
    EXPECT_NEAR(s.objective_value, 4.0, 1e-9);
}

// Beale's example cycles under the textbook largest-coefficient rule.
TEST(Simplex, DegenerateCyclingExampleTerminates) {
    LpProblem p;
    p.objective = {-0.75, 20.0, -0.5, 6.0};
    p.lower = {0, 0, 0, 0};
    p.upper = {inf, inf, inf, inf};
    p.rows = {row({0.25, -8, -1, 9}, Relation::less_equal, 0), row({0.5, -12, -0.5, 3}, Relation::less_equal, 0),
              row({0, 0, 1, 0}, Relation::less_equal, 1)};
    const auto s = simplex_solve(p);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.objective_value, -1.25, 1e-9);
}

TEST(Simplex, RejectsMalformedProblems) {
    LpProblem p;
    p.objective = {1.0};
    p.lower = {0.0, 0.0};
    p.upper = {1.0};
    EXPECT_THROW(simplex_solve(p), ArgumentError);
    p.lower = {-inf};
    EXPECT_THROW(simplex_solve(p), ArgumentError);
}

TEST(VcLp, SmallValues) {
    EXPECT_NEAR(vc_lp_value(support::complete(3)), 1.5, 1e-9);
    EXPECT_NEAR(vc_lp_value(support::cycle(5)), 2.5, 1e-9);
    EXPECT_NEAR(vc_lp_value(support::path(2)), 1.0, 1e-9);
    EXPECT_NEAR(vc_lp_value(support::star(3)), 1.0, 1e-9);
    EXPECT_NEAR(vc_lp_value(Graph::with_order(4, {})), 0.0, 1e-12);
    EXPECT_NEAR(vc_lp_value(Graph{}), 0.0, 1e-12);
}

TEST(VcLp, ValueMatchesVertexEnumeration) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = support::random_graph(rng, 2 + trial % 5, 0.3 + 0.1 * (trial % 4));
        const auto vertices = enumerate_vertices(g);
        double best = inf;
        for (const auto& v : vertices) {
            double s = 0.0;
            for (double x : v) s += x;
            best = std::min(best, s);
        }
        EXPECT_NEAR(vc_lp_value(g), best, 1e-8);
    }
}

TEST(ExtremePointRefine, StarPicksCenter) {
    const auto s = extreme_point_refine(support::star(3), 1.0);
    ASSERT_EQ(s.values.size(), 4u);
    EXPECT_NEAR(s.values[0], 1.0, 1e-9);
    for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(s.values[i], 0.0, 1e-9);
}

TEST(ExtremePointRefine, WrongOptimumIsAContractViolation) {
    EXPECT_THROW(extreme_point_refine(support::complete(3), 1.0), ContractViolation);
}

TEST(ExtremePointRefine, MatchesLexicographicMinimumOfEnumeratedVertices) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = support::random_graph(rng, 2 + trial % 5, 0.25 + 0.1 * (trial % 5));
        const double z = vc_lp_value(g);
        std::vector<std::vector<double>> optimal;
        for (const auto& v : enumerate_vertices(g)) {
            double s = 0.0;
            for (double x : v) s += x;
            if (std::abs(s - z) < 1e-8) optimal.push_back(v);
        }
        ASSERT_FALSE(optimal.empty());
        auto lexless = [](const std::vector<double>& a, const std::vector<double>& b) {
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i] < b[i] - 1e-9) return true;
                if (a[i] > b[i] + 1e-9) return false;
            }
            return false;
        };
        const auto expected = *std::min_element(optimal.begin(), optimal.end(), lexless);
        const auto got = extreme_point_refine(g, z).values;
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], expected[i], 1e-8);
    }
}

TEST(ExtremePointRefine, ResultIsHalfIntegralVertex) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = support::random_graph(rng, 3 + trial % 12, 0.1 + 0.1 * (trial % 9));
        const auto s = extreme_point_refine(g, vc_lp_value(g));
        EXPECT_EQ(tight_rank(g, s.values), g.order());
        EXPECT_NO_THROW(classify_half_integral(s, g.vertices()));
    }
}

TEST(ExtremePointRefine, DescendingOrderAlsoGivesAVertex) {
    LpConfig cfg;
    cfg.order = RefineOrder::descending_id;
    const auto g = support::star(3);
    const auto s = extreme_point_refine(g, 1.0, cfg);
    EXPECT_EQ(tight_rank(g, s.values), g.order());
}

TEST(ClassifyHalfIntegral, PartitionsAndRejectsOffenders) {
    LpSolution s;
    s.status = LpStatus::optimal;
    s.values = {0.0, 0.5, 1.0, 0.50004};
    const std::vector<VertexId> ids = {10, 11, 12, 13};
    const auto d = classify_half_integral(s, ids);
    EXPECT_EQ(d.v_zero, (VertexSet{10}));
    EXPECT_EQ(d.v_half, (VertexSet{11, 13}));
    EXPECT_EQ(d.v_one, (VertexSet{12}));
    EXPECT_DOUBLE_EQ(d.lp_value, 2.0);

    s.values[3] = 0.3;
    try {
        classify_half_integral(s, ids);
        FAIL() << "expected a half-integrality violation";
    } catch (const HalfIntegralityViolation& e) {
        ASSERT_EQ(e.offenders().size(), 1u);
        EXPECT_EQ(e.offenders()[0].first, 3u);
    }
}

TEST(NtDecompose, StarKernelizesCompletely) {
    const auto r = nt_decompose(support::star(3));
    EXPECT_EQ(r.decomposition.v_one, (VertexSet{0}));
    EXPECT_EQ(r.decomposition.v_zero, (VertexSet{1, 2, 3}));
    EXPECT_TRUE(r.residual.empty());
}

TEST(NtDecompose, TriangleStaysWhole) {
    const auto r = nt_decompose(support::complete(3));
    EXPECT_EQ(r.decomposition.v_half.size(), 3u);
    EXPECT_EQ(r.residual, support::complete(3));
}

TEST(NtDecompose, ExactSplitsAcrossKernelAndResidual) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 80; ++trial) {
        const auto g = support::random_graph(rng, 2 + trial % 11, 0.1 + 0.1 * (trial % 8));
        const auto r = nt_decompose(g);
        const auto residual_opt = support::brute_force_vc(r.residual);
        EXPECT_EQ(support::brute_force_vc(g), r.decomposition.v_one.size() + residual_opt);
    }
}

TEST(Recombine, FeasibleWithOptimalResidualCover) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const auto g = support::random_graph(rng, 3 + trial % 9, 0.2 + 0.1 * (trial % 5));
        const auto r = nt_decompose(g);
        // All residual vertices is always a cover of the residual.
        const auto residual_all = CoverPartition::from_cover(r.residual, r.residual.vertex_set());
        const auto full = recombine(g, r.decomposition, residual_all);
        EXPECT_TRUE(verify_cover(g, full).feasible);
    }
}

TEST(Recombine, InfeasibleResidualCoverIsAContractViolation) {
    const auto g = support::complete(3);
    const auto r = nt_decompose(g);
    const auto bad = CoverPartition::from_cover(r.residual, {0});
    EXPECT_THROW(recombine(g, r.decomposition, bad), ContractViolation);
}

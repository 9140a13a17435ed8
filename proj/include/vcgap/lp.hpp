#pragma once

// Dense two-phase tableau simplex and the vertex-cover LP machinery built on
// it: the relaxation itself, lexicographic extreme-point refinement,
// half-integral classification and the kernel decomposition.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "vcgap/errors.hpp"
#include "vcgap/graph.hpp"

namespace vcgap {

enum class Relation { greater_equal, equal, less_equal };

struct LpRow {
    std::vector<double> coeffs;
    Relation relation = Relation::greater_equal;
    double rhs = 0.0;
};

/// minimize objective·x subject to rows and lower ≤ x ≤ upper.
struct LpProblem {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t variables() const noexcept { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> values;
    double objective_value = 0.0;
    /// Original variable index of each basic structural column; slack and
    /// bound-row columns are reported as -1.
    std::vector<long> basis;
    std::size_t iterations = 0;
};

struct LpTolerances {
    double lp = 1e-7;
    double half = 1e-4;
};

enum class RefineOrder { ascending_id, descending_id };

struct LpConfig {
    LpTolerances tol;
    RefineOrder order = RefineOrder::ascending_id;
};

struct HalfIntegralDecomposition {
    VertexSet v_zero;
    VertexSet v_half;
    VertexSet v_one;
    double lp_value = 0.0;
};

inline const char* to_string(Relation r) {
    switch (r) {
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "=";
    case Relation::less_equal: return "<=";
    }
    return "?";
}

inline const char* to_string(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

/// Plain-text dump, one line per row.
inline std::string debug_dump(const LpProblem& p) {
    std::ostringstream out;
    out.precision(17);
    out << "minimize";
    for (std::size_t j = 0; j < p.variables(); ++j) {
        if (p.objective[j] != 0.0) out << ' ' << (p.objective[j] >= 0 ? "+" : "") << p.objective[j] << "*x" << j;
    }
    out << '\n';
    for (std::size_t r = 0; r < p.rows.size(); ++r) {
        out << "r" << r << ":";
        for (std::size_t j = 0; j < p.rows[r].coeffs.size(); ++j) {
            const double a = p.rows[r].coeffs[j];
            if (a != 0.0) out << ' ' << (a >= 0 ? "+" : "") << a << "*x" << j;
        }
        out << ' ' << to_string(p.rows[r].relation) << ' ' << p.rows[r].rhs << '\n';
    }
    for (std::size_t j = 0; j < p.variables(); ++j) {
        out << p.lower[j] << " <= x" << j << " <= " << p.upper[j] << '\n';
    }
    return out.str();
}

namespace detail {

/**
 * Tableau in canonical form: rows_ x (cols_ + 1), last column is the rhs.
 * Reduced costs live in a separate row. Bland's rule throughout.
 */
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::vector<std::size_t>& basis() noexcept { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            double* row = &a_[r * (cols_ + 1)];
            const double* prow = &a_[pr * (cols_ + 1)];
            for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    /// Reduced costs d_j = c_j - c_B B^-1 A_j for cost vector c.
    std::vector<double> reduced_costs(const std::vector<double>& cost, double& objective) const {
        std::vector<double> d(cost.begin(), cost.end());
        objective = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c < cols_; ++c) d[c] -= cb * at(r, c);
            objective += cb * rhs(r);
        }
        return d;
    }

    /// Returns false on unboundedness.
    bool optimize(const std::vector<double>& cost, const std::vector<bool>& allowed, double tol,
                  std::size_t& iterations, std::size_t max_iterations) {
        constexpr double pivot_tol = 1e-9;
        double objective = 0.0;
        std::vector<double> d = reduced_costs(cost, objective);
        for (;;) {
            std::optional<std::size_t> entering;
            for (std::size_t c = 0; c < cols_; ++c) {
                if (allowed[c] && d[c] < -tol) {
                    entering = c;
                    break;
                }
            }
            if (!entering) return true;
            std::optional<std::size_t> leaving;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < rows_; ++r) {
                const double a = at(r, *entering);
                if (a <= pivot_tol) continue;
                const double ratio = rhs(r) / a;
                if (!leaving || ratio < best - 1e-12) {
                    best = ratio;
                    leaving = r;
                } else if (ratio <= best + 1e-12 && basis_[r] < basis_[*leaving]) {
                    leaving = r;
                }
            }
            if (!leaving) return false;
            const double dq = d[*entering];
            pivot(*leaving, *entering);
            for (std::size_t c = 0; c < cols_; ++c) d[c] -= dq * at(*leaving, c);
            d[*entering] = 0.0;
            if (++iterations > max_iterations) throw SolverError("simplex iteration limit exceeded", iterations);
            if (!std::isfinite(rhs(*leaving))) throw SolverError("simplex numeric breakdown", iterations);
        }
    }

    void drop_row(std::size_t r) {
        a_.erase(a_.begin() + static_cast<long>(r * (cols_ + 1)), a_.begin() + static_cast<long>((r + 1) * (cols_ + 1)));
        basis_.erase(basis_.begin() + static_cast<long>(r));
        --rows_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
    std::vector<std::size_t> basis_;
};

} // namespace detail

/**
 * Two-phase primal simplex with Bland's anti-cycling rule.
 *
 * Variables with lo == hi are substituted out; the rest are shifted to
 * y = x - lo ≥ 0 and finite upper bounds become explicit ≤ rows. Every
 * lower bound must be finite.
 */
inline LpSolution simplex_solve(const LpProblem& p, double tol = LpTolerances{}.lp) {
    const std::size_t nv = p.variables();
    if (p.lower.size() != nv || p.upper.size() != nv) throw ArgumentError("bound vectors do not match variable count");
    for (const auto& row : p.rows) {
        if (row.coeffs.size() != nv) throw ArgumentError("row width does not match variable count");
    }
    for (std::size_t j = 0; j < nv; ++j) {
        if (!std::isfinite(p.lower[j])) throw ArgumentError("lower bounds must be finite");
        if (p.lower[j] > p.upper[j]) throw ArgumentError("lower bound exceeds upper bound on x" + std::to_string(j));
    }

    // Free (non-fixed) structural columns.
    std::vector<std::size_t> free_vars;
    std::vector<long> column_of(nv, -1);
    for (std::size_t j = 0; j < nv; ++j) {
        if (p.upper[j] - p.lower[j] > 0.0) {
            column_of[j] = static_cast<long>(free_vars.size());
            free_vars.push_back(j);
        }
    }

    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        Relation relation;
        double rhs;
    };
    std::vector<Row> rows;
    for (const auto& src : p.rows) {
        Row row{{}, src.relation, src.rhs};
        for (std::size_t j = 0; j < nv; ++j) {
            const double a = src.coeffs[j];
            if (a == 0.0) continue;
            row.rhs -= a * p.lower[j];
            if (column_of[j] >= 0) row.terms.emplace_back(static_cast<std::size_t>(column_of[j]), a);
        }
        if (row.terms.empty()) {
            const bool ok = (row.relation == Relation::greater_equal && row.rhs <= tol) ||
                            (row.relation == Relation::less_equal && row.rhs >= -tol) ||
                            (row.relation == Relation::equal && std::abs(row.rhs) <= tol);
            if (!ok) return LpSolution{LpStatus::infeasible, {}, 0.0, {}, 0};
            continue;
        }
        rows.push_back(std::move(row));
    }
    for (std::size_t k = 0; k < free_vars.size(); ++k) {
        const auto j = free_vars[k];
        if (std::isfinite(p.upper[j])) rows.push_back(Row{{{k, 1.0}}, Relation::less_equal, p.upper[j] - p.lower[j]});
    }
    for (auto& row : rows) {
        if (row.rhs < 0.0) {
            row.rhs = -row.rhs;
            for (auto& term : row.terms) term.second = -term.second;
            if (row.relation == Relation::greater_equal) row.relation = Relation::less_equal;
            else if (row.relation == Relation::less_equal) row.relation = Relation::greater_equal;
        }
    }

    // Column layout: structural | slack/surplus | artificial.
    const std::size_t ns = free_vars.size();
    std::size_t n_slack = 0;
    std::size_t n_art = 0;
    for (const auto& row : rows) {
        if (row.relation != Relation::equal) ++n_slack;
        if (row.relation != Relation::less_equal) ++n_art;
    }
    const std::size_t cols = ns + n_slack + n_art;
    detail::Tableau t(rows.size(), cols);
    std::size_t slack = ns;
    std::size_t art = ns + n_slack;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& [c, a] : rows[r].terms) t.at(r, c) += a;
        t.rhs(r) = rows[r].rhs;
        switch (rows[r].relation) {
        case Relation::less_equal:
            t.at(r, slack) = 1.0;
            t.basis()[r] = slack++;
            break;
        case Relation::greater_equal:
            t.at(r, slack++) = -1.0;
            t.at(r, art) = 1.0;
            t.basis()[r] = art++;
            break;
        case Relation::equal:
            t.at(r, art) = 1.0;
            t.basis()[r] = art++;
            break;
        }
    }

    LpSolution sol;
    const std::size_t max_iterations = 50 * (cols + rows.size()) + 1000;
    std::vector<bool> allowed(cols, true);
    if (n_art > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t c = ns + n_slack; c < cols; ++c) phase1[c] = 1.0;
        t.optimize(phase1, allowed, tol * 1e-2, sol.iterations, max_iterations);
        double infeasibility = 0.0;
        t.reduced_costs(phase1, infeasibility);
        double scale = 1.0;
        for (const auto& row : rows) scale = std::max(scale, std::abs(row.rhs));
        if (infeasibility > tol * scale) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are redundant.
        for (std::size_t r = t.rows(); r-- > 0;) {
            if (t.basis()[r] < ns + n_slack) continue;
            std::optional<std::size_t> col;
            for (std::size_t c = 0; c < ns + n_slack; ++c) {
                if (std::abs(t.at(r, c)) > 1e-9) {
                    col = c;
                    break;
                }
            }
            if (col) t.pivot(r, *col);
            else t.drop_row(r);
        }
        for (std::size_t c = ns + n_slack; c < cols; ++c) allowed[c] = false;
    }

    std::vector<double> cost(cols, 0.0);
    for (std::size_t k = 0; k < ns; ++k) cost[k] = p.objective[free_vars[k]];
    if (!t.optimize(cost, allowed, tol * 1e-2, sol.iterations, max_iterations)) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    std::vector<double> y(cols, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) y[t.basis()[r]] = t.rhs(r);
    sol.values = p.lower;
    for (std::size_t k = 0; k < ns; ++k) sol.values[free_vars[k]] += y[k];
    sol.objective_value = 0.0;
    for (std::size_t j = 0; j < nv; ++j) sol.objective_value += p.objective[j] * sol.values[j];
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const auto c = t.basis()[r];
        sol.basis.push_back(c < ns ? static_cast<long>(free_vars[c]) : -1);
    }
    sol.status = LpStatus::optimal;
    return sol;
}

// ---------------------------------------------------------------------------

/// One variable per vertex (position order), x_u + x_v ≥ 1 per edge, 0 ≤ x ≤ 1.
inline LpProblem build_vc_lp(const Graph& g) {
    const std::size_t n = g.order();
    LpProblem p;
    p.objective.assign(n, 1.0);
    p.lower.assign(n, 0.0);
    p.upper.assign(n, 1.0);
    p.rows.reserve(g.size());
    for (const auto& e : g.edges()) {
        LpRow row;
        row.coeffs.assign(n, 0.0);
        row.coeffs[g.index_of(e.u)] = 1.0;
        row.coeffs[g.index_of(e.v)] = 1.0;
        row.relation = Relation::greater_equal;
        row.rhs = 1.0;
        p.rows.push_back(std::move(row));
    }
    return p;
}

/// Optimal value of the vertex-cover LP relaxation.
inline double vc_lp_value(const Graph& g, double tol = LpTolerances{}.lp) {
    const auto sol = simplex_solve(build_vc_lp(g), tol);
    if (sol.status != LpStatus::optimal) throw SolverError("vertex-cover LP not optimal", sol.iterations);
    return sol.objective_value;
}

namespace detail {

/// Values within tol of a multiple of 1/2 are snapped onto it.
inline double snap_half(double x, double tol) {
    const double level = std::round(2.0 * x) / 2.0;
    return std::abs(x - level) <= tol ? level : x;
}

} // namespace detail

/**
 * Lexicographic refinement over the optimal face {x : rows, Σx = z*}.
 *
 * Step k minimizes x_k with every earlier variable pinned (lo = hi) at its
 * minimized value. The result is an extreme optimum.
 */
inline LpSolution extreme_point_refine(const Graph& g, double z_star, const LpConfig& cfg = {}) {
    const std::size_t n = g.order();
    LpProblem p = build_vc_lp(g);
    LpRow face;
    face.coeffs.assign(n, 1.0);
    face.relation = Relation::equal;
    face.rhs = z_star;
    p.rows.push_back(std::move(face));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = cfg.order == RefineOrder::ascending_id ? i : n - 1 - i;

    LpSolution last;
    last.status = LpStatus::optimal;
    std::size_t iterations = 0;
    for (const auto k : order) {
        std::fill(p.objective.begin(), p.objective.end(), 0.0);
        p.objective[k] = 1.0;
        last = simplex_solve(p, cfg.tol.lp);
        iterations += last.iterations;
        if (last.status != LpStatus::optimal) {
            throw ContractViolation("refinement step for x" + std::to_string(k) + " is " + to_string(last.status) +
                                    "; z* = " + std::to_string(z_star) + " is not the LP optimum");
        }
        const double value = detail::snap_half(last.objective_value, cfg.tol.lp);
        p.lower[k] = value;
        p.upper[k] = value;
    }
    LpSolution out;
    out.status = LpStatus::optimal;
    out.values = p.lower;
    if (n == 0) out.values.clear();
    out.objective_value = 0.0;
    for (double v : out.values) out.objective_value += v;
    out.basis = last.basis;
    out.iterations = iterations;
    if (std::abs(out.objective_value - z_star) > cfg.tol.lp * std::max(1.0, static_cast<double>(n))) {
        throw ContractViolation("refined solution left the optimal face");
    }
    return out;
}

/// Snaps each value to {0, 1/2, 1}; `ids` names the variables in order.
inline HalfIntegralDecomposition classify_half_integral(const LpSolution& s, std::span<const VertexId> ids,
                                                        double tau_half = LpTolerances{}.half) {
    if (s.status != LpStatus::optimal) throw ArgumentError("solution is not optimal");
    if (s.values.size() != ids.size()) throw ArgumentError("id list does not match solution width");
    HalfIntegralDecomposition d;
    std::vector<HalfIntegralityViolation::Offender> bad;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double x = s.values[i];
        const double levels[] = {0.0, 0.5, 1.0};
        std::size_t best = 0;
        for (std::size_t l = 1; l < 3; ++l) {
            if (std::abs(x - levels[l]) < std::abs(x - levels[best])) best = l;
        }
        if (std::abs(x - levels[best]) > tau_half) {
            bad.emplace_back(i, x);
            continue;
        }
        (best == 0 ? d.v_zero : best == 1 ? d.v_half : d.v_one).insert(ids[i]);
    }
    if (!bad.empty()) throw HalfIntegralityViolation(std::move(bad));
    d.lp_value = static_cast<double>(d.v_one.size()) + 0.5 * static_cast<double>(d.v_half.size());
    return d;
}

struct NtResult {
    HalfIntegralDecomposition decomposition;
    Graph residual;
    /// Extreme optimum the decomposition came from.
    LpSolution extreme;
};

/**
 * LP solve, refinement and classification. The residual is the graph
 * induced on the half-valued vertices, whose own LP optimum must be n'/2.
 */
inline NtResult nt_decompose(const Graph& g, const LpConfig& cfg = {}) {
    const double z = vc_lp_value(g, cfg.tol.lp);
    NtResult r;
    r.extreme = extreme_point_refine(g, z, cfg);
    r.decomposition = classify_half_integral(r.extreme, g.vertices(), cfg.tol.half);
    if (std::abs(r.decomposition.lp_value - z) > cfg.tol.half) {
        throw ContractViolation("decomposition value differs from the LP optimum");
    }
    r.residual = induced_subgraph(g, r.decomposition.v_half);
    const double residual_lp = vc_lp_value(r.residual, cfg.tol.lp);
    const double half_n = 0.5 * static_cast<double>(r.residual.order());
    if (std::abs(residual_lp - half_n) > cfg.tol.lp * std::max(1.0, half_n)) {
        throw ContractViolation("residual LP optimum " + std::to_string(residual_lp) + " differs from n'/2");
    }
    return r;
}

/// Adds V¹ to the residual cover and V⁰ to its complement, then checks the
/// result against the original graph.
inline CoverPartition recombine(const Graph& original, const HalfIntegralDecomposition& d,
                                const CoverPartition& residual_cover) {
    CoverPartition out = residual_cover;
    out.in_cover.insert(d.v_one.begin(), d.v_one.end());
    out.out_cover.insert(d.v_zero.begin(), d.v_zero.end());
    CoverCheck check;
    try {
        check = verify_cover(original, out);
    } catch (const ArgumentError& e) {
        throw ContractViolation(std::string("recombined partition malformed: ") + e.what());
    }
    if (!check.feasible) throw ContractViolation("recombined cover leaves edges uncovered");
    return out;
}

} // namespace vcgap

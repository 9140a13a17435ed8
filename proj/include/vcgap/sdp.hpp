#pragma once

// Vertex-cover SDP relaxations on a graph and on its doubled graph, an
// operator-splitting solver for them, and Gram-vector extraction.
//
// Index 0 of every matrix is the special vector v_o; graph vertex at
// position p sits at index 1 + p (single) or 1 + p / 1 + n + p (doubled,
// prime / double-prime copy).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "vcgap/eigen.hpp"
#include "vcgap/errors.hpp"
#include "vcgap/graph.hpp"

namespace vcgap {

/// X_{0i} + X_{0j} - X_{ij} = 1
struct PairEquality {
    std::size_t i = 0;
    std::size_t j = 0;
};

enum class SdpLayout { single, doubled };

struct SdpProblem {
    std::size_t dim = 1;
    SdpLayout layout = SdpLayout::single;
    std::vector<PairEquality> equalities;
    /// Entrywise bounds; the diagonal is pinned to [1, 1].
    Matrix box_lo;
    Matrix box_hi;
    /// The objective is Σ X_{0i} over these indices.
    std::vector<std::size_t> objective_indices;
};

struct SdpConfig {
    double tau_feas = 1e-5;
    double tau_psd = 1e-7;
    double tau_obj = 1e-7;
    double tau_dual = 1e-5;
    double tau_factor = 1e-4;
    double tau_cmp = 1e-3;
    std::size_t max_iter = 50000;
    /// Initial penalty parameter.
    double step = 3.0;
    /// The penalty doubles or halves when one residual exceeds the other
    /// by this factor.
    double balance_ratio = 5.0;
    double over_relaxation = 1.6;
    /// History length for Anderson extrapolation; 0 disables it.
    std::size_t anderson_memory = 8;
};

struct GramSolution {
    Matrix matrix;
    double objective_value = 0.0;
    double max_equality_violation = 0.0;
    double max_box_violation = 0.0;
    double min_eigenvalue = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// One unit vector per matrix index; vector 0 is v_o.
class VectorEmbedding {
public:
    VectorEmbedding() = default;
    VectorEmbedding(std::vector<std::vector<double>> vectors, double reconstruction_error)
        : vectors_(std::move(vectors)), reconstruction_error_(reconstruction_error) {}

    std::size_t size() const noexcept { return vectors_.size(); }
    const std::vector<double>& vector(std::size_t i) const { return vectors_.at(i); }
    double reconstruction_error() const noexcept { return reconstruction_error_; }

    double product(std::size_t i, std::size_t j) const {
        const auto& a = vectors_.at(i);
        const auto& b = vectors_.at(j);
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
        return s;
    }

    /// v_o · v_i
    double anchor_product(std::size_t i) const { return product(0, i); }

private:
    std::vector<std::vector<double>> vectors_;
    double reconstruction_error_ = 0.0;
};

namespace detail {

inline void set_symmetric(Matrix& m, std::size_t i, std::size_t j, double v) {
    m(i, j) = v;
    m(j, i) = v;
}

inline SdpProblem empty_problem(std::size_t dim, SdpLayout layout) {
    SdpProblem p;
    p.dim = dim;
    p.layout = layout;
    p.box_lo = Matrix(dim, 0.0);
    p.box_hi = Matrix(dim, 1.0);
    for (std::size_t i = 0; i < dim; ++i) p.box_lo(i, i) = 1.0;
    for (std::size_t i = 1; i < dim; ++i) p.objective_indices.push_back(i);
    return p;
}

} // namespace detail

inline SdpProblem build_sdp_single(const Graph& g) {
    auto p = detail::empty_problem(g.order() + 1, SdpLayout::single);
    for (const auto& e : g.edges()) p.equalities.push_back({1 + g.index_of(e.u), 1 + g.index_of(e.v)});
    return p;
}

inline SdpProblem build_sdp_doubled(const DoubledGraph& dg) {
    const std::size_t n = dg.base.order();
    auto p = detail::empty_problem(2 * n + 1, SdpLayout::doubled);
    for (const auto& e : dg.base.edges()) {
        const auto a = 1 + dg.base.index_of(e.u);
        const auto b = 1 + dg.base.index_of(e.v);
        p.equalities.push_back({a, b});
        p.equalities.push_back({a + n, b + n});
    }
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = n + 1; j <= 2 * n; ++j) {
            p.equalities.push_back({i, j});
            detail::set_symmetric(p.box_lo, i, j, -1.0);
        }
    }
    return p;
}

namespace detail {

/// Dense Cholesky factor (lower) of a symmetric positive definite matrix.
class Cholesky {
public:
    Cholesky() = default;
    explicit Cholesky(Matrix a) : l_(std::move(a)) {
        const std::size_t n = l_.dim();
        for (std::size_t j = 0; j < n; ++j) {
            double d = l_(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            if (d <= 0.0) throw SolverError("normal matrix not positive definite", 0);
            l_(j, j) = std::sqrt(d);
            for (std::size_t i = j + 1; i < n; ++i) {
                double s = l_(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
            for (std::size_t i = 0; i < j; ++i) l_(i, j) = 0.0;
        }
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = l_.dim();
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[i];
            for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * b[k];
            b[i] = s / l_(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = b[i];
            for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * b[k];
            b[i] = s / l_(i, i);
        }
    }

private:
    Matrix l_;
};

/**
 * Euclidean projection onto {diag = 1, all pair equalities}.
 *
 * Each equality owns its X_{ij}, so eliminating X_{ij} = t_i + t_j - 1
 * leaves an unconstrained least-squares problem in t_i = X_{0i} with normal
 * matrix I + D + A over the constraint pairs.
 */
class AffineProjector {
public:
    explicit AffineProjector(const SdpProblem& p) : dim_(p.dim), pairs_(p.equalities) {
        const std::size_t m = dim_ - 1;
        Matrix h = Matrix::identity(m);
        std::vector<char> owned(dim_ * dim_, 0);
        for (const auto& e : pairs_) {
            if (e.i == 0 || e.j == 0 || e.i >= dim_ || e.j >= dim_ || e.i == e.j) {
                throw ArgumentError("equality references an invalid index pair");
            }
            auto& flag = owned[std::min(e.i, e.j) * dim_ + std::max(e.i, e.j)];
            if (flag) throw ArgumentError("two equalities share the entry X_{ij}");
            flag = 1;
            h(e.i - 1, e.i - 1) += 1.0;
            h(e.j - 1, e.j - 1) += 1.0;
            h(e.i - 1, e.j - 1) += 1.0;
            h(e.j - 1, e.i - 1) += 1.0;
        }
        if (m > 0) factor_ = Cholesky(std::move(h));
    }

    /// out = Π(y); y is assumed symmetric.
    void project(const Matrix& y, Matrix& out) const {
        out = y;
        for (std::size_t i = 0; i < dim_; ++i) out(i, i) = 1.0;
        if (dim_ <= 1) return;
        std::vector<double> rhs(dim_ - 1);
        for (std::size_t i = 1; i < dim_; ++i) rhs[i - 1] = y(0, i);
        for (const auto& e : pairs_) {
            rhs[e.i - 1] += 1.0 + y(e.i, e.j);
            rhs[e.j - 1] += 1.0 + y(e.i, e.j);
        }
        factor_.solve(rhs);
        for (std::size_t i = 1; i < dim_; ++i) set_symmetric(out, 0, i, rhs[i - 1]);
        for (const auto& e : pairs_) set_symmetric(out, e.i, e.j, rhs[e.i - 1] + rhs[e.j - 1] - 1.0);
    }

private:
    std::size_t dim_;
    std::vector<PairEquality> pairs_;
    Cholesky factor_;
};

/// Clips negative eigenvalues; `basis` carries the eigenvectors between calls.
inline void project_psd(const Matrix& y, Matrix& out, Matrix& basis) {
    auto eig = jacobi_eigen(y, basis.dim() == y.dim() ? &basis : nullptr, 1e-13);
    for (double& v : eig.values) v = std::max(v, 0.0);
    out = reconstruct(eig);
    basis = std::move(eig.vectors);
}

inline void project_box(const SdpProblem& p, const Matrix& y, Matrix& out) {
    out = y;
    for (std::size_t k = 0; k < out.data().size(); ++k) {
        out.data()[k] = std::clamp(out.data()[k], p.box_lo.data()[k], p.box_hi.data()[k]);
    }
}

inline void symmetrize(Matrix& m) {
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t j = i + 1; j < m.dim(); ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    }
}

inline double objective_of(const SdpProblem& p, const Matrix& x) {
    double s = 0.0;
    for (auto i : p.objective_indices) s += x(0, i);
    return s;
}

inline void measure_residuals(const SdpProblem& p, GramSolution& s) {
    s.max_equality_violation = 0.0;
    for (const auto& e : p.equalities) {
        const double r = s.matrix(0, e.i) + s.matrix(0, e.j) - s.matrix(e.i, e.j) - 1.0;
        s.max_equality_violation = std::max(s.max_equality_violation, std::abs(r));
    }
    s.max_box_violation = 0.0;
    for (std::size_t k = 0; k < s.matrix.data().size(); ++k) {
        const double x = s.matrix.data()[k];
        const double v = std::max(p.box_lo.data()[k] - x, x - p.box_hi.data()[k]);
        s.max_box_violation = std::max(s.max_box_violation, v);
    }
    s.objective_value = objective_of(p, s.matrix);
}

/**
 * One step of consensus ADMM over three blocks: (objective + affine
 * equalities), entrywise box, and the PSD cone. Viewed as a map on the
 * stacked state (W, U_affine, U_box, U_psd) so it can be extrapolated.
 */
class ConsensusStep {
public:
    ConsensusStep(const SdpProblem& p, const SdpConfig& cfg)
        : problem_(p), affine_(p), dim_(p.dim), rho_(cfg.step), alpha_(cfg.over_relaxation), cost_(p.dim),
          v_(p.dim), psd_(p.dim) {
        for (auto i : p.objective_indices) {
            cost_(0, i) += 0.5;
            cost_(i, 0) += 0.5;
        }
        for (auto& x : x_) x = Matrix(dim_);
    }

    std::size_t block() const noexcept { return dim_ * dim_; }
    std::size_t state_size() const noexcept { return 4 * block(); }
    double rho() const noexcept { return rho_; }
    double primal() const noexcept { return primal_; }
    double dual() const noexcept { return dual_; }
    const Matrix& psd_iterate() const noexcept { return psd_; }

    std::vector<double> initial_state() const {
        std::vector<double> s(state_size(), 0.0);
        for (std::size_t i = 0; i < dim_; ++i) s[i * dim_ + i] = 1.0;
        for (std::size_t i = 1; i < dim_; ++i) {
            s[i] = 0.5;
            s[i * dim_] = 0.5;
        }
        return s;
    }

    /// Multiplies rho by `factor` and rescales the scaled duals to match.
    void rescale(double factor, std::vector<double>& state) {
        rho_ *= factor;
        for (std::size_t k = block(); k < state.size(); ++k) state[k] /= factor;
    }

    void apply(const std::vector<double>& state, std::vector<double>& next) {
        const std::size_t nn = block();
        next.resize(state.size());
        const double* w = state.data();
        for (std::size_t k = 0; k < nn; ++k) v_.data()[k] = w[k] - state[nn + k] - cost_.data()[k] / rho_;
        affine_.project(v_, x_[0]);
        for (std::size_t k = 0; k < nn; ++k) v_.data()[k] = w[k] - state[2 * nn + k];
        project_box(problem_, v_, x_[1]);
        for (std::size_t k = 0; k < nn; ++k) v_.data()[k] = w[k] - state[3 * nn + k];
        symmetrize(v_);
        project_psd(v_, x_[2], basis_);
        psd_ = x_[2];

        double primal = 0.0;
        double dual = 0.0;
        for (std::size_t k = 0; k < nn; ++k) {
            double relaxed[3];
            double sum = 0.0;
            for (std::size_t b = 0; b < 3; ++b) {
                relaxed[b] = alpha_ * x_[b].data()[k] + (1.0 - alpha_) * w[k];
                sum += relaxed[b] + state[(b + 1) * nn + k];
            }
            const double w_next = sum / 3.0;
            next[k] = w_next;
            for (std::size_t b = 0; b < 3; ++b) {
                next[(b + 1) * nn + k] = state[(b + 1) * nn + k] + relaxed[b] - w_next;
                const double r = x_[b].data()[k] - w_next;
                primal += r * r;
            }
            dual += (w_next - w[k]) * (w_next - w[k]);
        }
        primal_ = std::sqrt(primal);
        dual_ = rho_ * std::sqrt(3.0 * dual);
    }

private:
    const SdpProblem& problem_;
    AffineProjector affine_;
    std::size_t dim_;
    double rho_;
    double alpha_;
    Matrix cost_;
    Matrix v_;
    std::array<Matrix, 3> x_;
    Matrix psd_;
    Matrix basis_;
    double primal_ = 0.0;
    double dual_ = 0.0;
};

/**
 * Type-II Anderson acceleration for a fixed-point map f: given x and f(x)
 * proposes f(x) - ΔF·γ with γ = argmin ‖g - ΔG·γ‖, g = f(x) - x.
 */
class AndersonAccelerator {
public:
    explicit AndersonAccelerator(std::size_t memory) : memory_(memory) {}

    void reset() {
        dg_.clear();
        df_.clear();
        last_g_.clear();
        last_f_.clear();
    }

    bool empty() const noexcept { return dg_.empty(); }

    void extrapolate(const std::vector<double>& x, const std::vector<double>& fx, std::vector<double>& out) {
        const std::size_t n = x.size();
        std::vector<double> g(n);
        for (std::size_t k = 0; k < n; ++k) g[k] = fx[k] - x[k];
        if (!last_g_.empty()) {
            std::vector<double> dg(n);
            std::vector<double> df(n);
            for (std::size_t k = 0; k < n; ++k) {
                dg[k] = g[k] - last_g_[k];
                df[k] = fx[k] - last_f_[k];
            }
            dg_.push_back(std::move(dg));
            df_.push_back(std::move(df));
            if (dg_.size() > memory_) {
                dg_.erase(dg_.begin());
                df_.erase(df_.begin());
            }
        }
        last_g_ = g;
        last_f_ = fx;
        out = fx;
        const std::size_t m = dg_.size();
        if (m == 0) return;

        Matrix normal(m);
        std::vector<double> rhs(m, 0.0);
        double trace = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = a; b < m; ++b) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += dg_[a][k] * dg_[b][k];
                normal(a, b) = s;
                normal(b, a) = s;
            }
            for (std::size_t k = 0; k < n; ++k) rhs[a] += dg_[a][k] * g[k];
            trace += normal(a, a);
        }
        if (trace <= 0.0) return;
        for (std::size_t a = 0; a < m; ++a) normal(a, a) += 1e-10 * trace;
        try {
            Cholesky(std::move(normal)).solve(rhs);
        } catch (const SolverError&) {
            reset();
            return;
        }
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t k = 0; k < n; ++k) out[k] -= rhs[a] * df_[a][k];
        }
    }

private:
    std::size_t memory_;
    std::vector<std::vector<double>> dg_;
    std::vector<std::vector<double>> df_;
    std::vector<double> last_g_;
    std::vector<double> last_f_;
};

inline double residual_norm(const std::vector<double>& x, const std::vector<double>& fx) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (fx[k] - x[k]) * (fx[k] - x[k]);
    return std::sqrt(s);
}

} // namespace detail

/**
 * Consensus ADMM (affine+objective / box / PSD) with safeguarded Anderson
 * extrapolation of the iterate. The PSD block is the one reported, so the
 * returned matrix is PSD up to rounding; its equality and box residuals
 * are measured directly. Running out of iterations returns the last
 * iterate with converged=false.
 */
inline GramSolution admm_solve(const SdpProblem& p, const SdpConfig& cfg = {}) {
    const std::size_t dim = p.dim;
    GramSolution sol;
    if (dim <= 1) {
        sol.matrix = Matrix::identity(dim);
        detail::measure_residuals(p, sol);
        sol.min_eigenvalue = dim == 1 ? 1.0 : 0.0;
        sol.converged = true;
        return sol;
    }

    detail::ConsensusStep step(p, cfg);
    detail::AndersonAccelerator accel(cfg.anderson_memory);
    std::vector<double> x = step.initial_state();
    std::vector<double> fx;
    step.apply(x, fx);
    double residual = detail::residual_norm(x, fx);
    std::vector<double> y;
    std::vector<double> fy;
    double last_objective = std::numeric_limits<double>::infinity();

    std::size_t it = 1;
    while (it < cfg.max_iter) {
        ++it;
        const bool accelerated = cfg.anderson_memory > 0;
        if (accelerated) accel.extrapolate(x, fx, y);
        else y = fx;
        step.apply(y, fy);
        double r = detail::residual_norm(y, fy);
        if (accelerated && r > residual) {
            // Rejected: fall back to the plain step from x.
            accel.reset();
            y = fx;
            step.apply(y, fy);
            r = detail::residual_norm(y, fy);
        }
        std::swap(x, y);
        std::swap(fx, fy);
        residual = r;
        if (!std::isfinite(residual)) throw SolverError("ADMM diverged", it);

        if (it % 10 == 0) {
            sol.matrix = step.psd_iterate();
            detail::measure_residuals(p, sol);
            const bool objective_settled = std::abs(sol.objective_value - last_objective) <=
                                           cfg.tau_obj * std::max(1.0, std::abs(sol.objective_value));
            last_objective = sol.objective_value;
            if (sol.max_equality_violation <= cfg.tau_feas && sol.max_box_violation <= cfg.tau_feas &&
                step.dual() <= cfg.tau_dual && objective_settled) {
                sol.converged = true;
                break;
            }
        }
        if (it % 100 == 0) {
            double scale = 1.0;
            if (step.primal() > cfg.balance_ratio * step.dual()) scale = 2.0;
            else if (step.dual() > cfg.balance_ratio * step.primal()) scale = 0.5;
            if (scale != 1.0) {
                step.rescale(scale, x);
                accel.reset();
                step.apply(x, fx);
                residual = detail::residual_norm(x, fx);
            }
        }
    }
    sol.iterations = it;
    sol.matrix = step.psd_iterate();
    detail::symmetrize(sol.matrix);
    detail::measure_residuals(p, sol);
    const auto eig = jacobi_eigen(sol.matrix);
    sol.min_eigenvalue = *std::min_element(eig.values.begin(), eig.values.end());
    return sol;
}

/**
 * Factor the Gram matrix: rows of Q·Λ^{1/2} over positive eigenvalues,
 * each renormalized to unit length. Throws when the renormalized vectors
 * no longer reproduce the matrix within tau_factor.
 */
inline VectorEmbedding extract_vectors(const GramSolution& gs, double tau_factor = SdpConfig{}.tau_factor) {
    if (!gs.converged) throw ArgumentError("Gram solution is not converged");
    const std::size_t n = gs.matrix.dim();
    Matrix sym = gs.matrix;
    detail::symmetrize(sym);
    const auto eig = jacobi_eigen(sym);
    double top = 0.0;
    for (double v : eig.values) top = std::max(top, v);
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] > 1e-12 * std::max(top, 1.0)) kept.push_back(k);
    }
    std::vector<std::vector<double>> vectors(n, std::vector<double>(kept.size()));
    for (std::size_t i = 0; i < n; ++i) {
        double norm = 0.0;
        for (std::size_t c = 0; c < kept.size(); ++c) {
            const double val = eig.vectors(i, kept[c]) * std::sqrt(eig.values[kept[c]]);
            vectors[i][c] = val;
            norm += val * val;
        }
        norm = std::sqrt(norm);
        if (norm <= 0.0) throw ContractViolation("Gram vector " + std::to_string(i) + " vanished");
        for (double& val : vectors[i]) val /= norm;
    }
    VectorEmbedding probe(vectors, 0.0);
    double error = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) error = std::max(error, std::abs(probe.product(i, j) - sym(i, j)));
    if (error > tau_factor) {
        throw ContractViolation("embedding reconstruction error " + std::to_string(error) + " exceeds tolerance");
    }
    return VectorEmbedding(std::move(vectors), error);
}

struct Lemma2Verdict {
    /// z6 - 2·z4 (should be ≥ -tol)
    double lower_margin = 0.0;
    /// 2·z_exact - z6 (should be ≥ -tol)
    double upper_margin = 0.0;
    bool lower_holds = true;
    bool upper_holds = true;

    bool holds() const noexcept { return lower_holds && upper_holds; }
};

/// 2·z4 ≤ z6 ≤ 2·z_exact up to tau_cmp.
inline Lemma2Verdict check_lemma2_bounds(double z4, double z6, double z_exact, double tau_cmp = SdpConfig{}.tau_cmp) {
    Lemma2Verdict v;
    v.lower_margin = z6 - 2.0 * z4;
    v.upper_margin = 2.0 * z_exact - z6;
    v.lower_holds = v.lower_margin >= -tau_cmp;
    v.upper_holds = v.upper_margin >= -tau_cmp;
    return v;
}

inline nlohmann::json to_json(const GramSolution& s) {
    nlohmann::json j;
    j["dim"] = s.matrix.dim();
    j["matrix"] = s.matrix.data();
    j["objective_value"] = s.objective_value;
    j["residuals"] = {{"max_equality_violation", s.max_equality_violation},
                      {"max_box_violation", s.max_box_violation},
                      {"min_eigenvalue", s.min_eigenvalue}};
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    return j;
}

inline GramSolution gram_from_json(const nlohmann::json& j) {
    GramSolution s;
    const auto dim = j.at("dim").get<std::size_t>();
    s.matrix = Matrix(dim);
    auto data = j.at("matrix").get<std::vector<double>>();
    if (data.size() != dim * dim) throw ArgumentError("matrix has " + std::to_string(data.size()) + " entries, expected dim^2");
    s.matrix.data() = std::move(data);
    s.objective_value = j.at("objective_value").get<double>();
    const auto& r = j.at("residuals");
    s.max_equality_violation = r.at("max_equality_violation").get<double>();
    s.max_box_violation = r.at("max_box_violation").get<double>();
    s.min_eigenvalue = r.at("min_eigenvalue").get<double>();
    s.iterations = j.at("iterations").get<std::size_t>();
    s.converged = j.at("converged").get<bool>();
    return s;
}

} // namespace vcgap

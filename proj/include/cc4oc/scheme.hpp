#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cc4oc/grid.hpp"
#include "cc4oc/linalg.hpp"
#include "cc4oc/pade.hpp"

namespace cc4oc {

/// Time coefficient, weighting and tolerances for the weighted-iota compact scheme.
struct SchemeConfig {
    double a = 1.0;
    double iota = 0.5;
    double dt = 0.01;
    double inner_tol = 1e-12;   // correcting-to-convergence, L-infinity change of phi
    double linear_tol = 1e-10;  // absolute BiCGStab residual
    int max_inner = 100;
    int max_linear_iter = 20000;

    /// Von Neumann stability holds for iota in [0.5, 1]; smaller iota is allowed but conditional.
    bool unconditionally_stable() const { return iota >= 0.5 && iota <= 1.0; }

    void validate() const {
        if (!(a > 0.0)) throw std::invalid_argument("SchemeConfig: a must be positive");
        if (!(iota >= 0.0 && iota <= 1.0)) throw std::invalid_argument("SchemeConfig: iota must lie in [0, 1]");
        if (!(dt > 0.0)) throw std::invalid_argument("SchemeConfig: dt must be positive");
        if (!(inner_tol > 0.0) || !(linear_tol > 0.0)) throw std::invalid_argument("SchemeConfig: tolerances");
        if (max_inner < 1 || max_linear_iter < 1) throw std::invalid_argument("SchemeConfig: iteration caps");
    }
};

/// Convection coefficients c, d and source s of a phi_t - lap phi + c phi_x + d phi_y = s.
/// An empty function stands for zero.
struct Coefficients {
    SpaceTimeFunction c;
    SpaceTimeFunction d;
    SpaceTimeFunction s;
};

/// Coefficients sampled on the grid at one time level. Empty vectors stand for zero.
struct CoefficientFields {
    std::vector<double> c;
    std::vector<double> d;
    std::vector<double> s;
};

inline CoefficientFields evaluate_coefficients(const Coefficients& coeffs, const UniformGrid2D& grid, double t) {
    CoefficientFields out;
    if (coeffs.c) out.c = sample(grid, coeffs.c, t).data();
    if (coeffs.d) out.d = sample(grid, coeffs.d, t).data();
    if (coeffs.s) out.s = sample(grid, coeffs.s, t).data();
    return out;
}

/// phi and its compact first derivatives at one time level.
struct TransportState {
    ScalarField phi;
    ScalarField phi_x;
    ScalarField phi_y;
    double t = 0.0;
};

struct Topology {
    bool periodic_x = false;
    bool periodic_y = false;

    static Topology of(const BoundarySpec& bc) { return {bc.periodic_x(), bc.periodic_y()}; }
};

/// Matrix-free five-point operator  y = w_id * x - w_lap * (dxx + dyy) x  on active nodes.
/// Dirichlet boundary rows and periodic duplicate rows act as scaled identity rows.
class FivePointOperator {
public:
    enum class RowKind : std::uint8_t { Active, Boundary, Duplicate };

    FivePointOperator(const UniformGrid2D& grid, Topology topo, double identity_weight, double laplacian_weight)
        : grid_(grid), topo_(topo), w_id_(identity_weight), w_lap_(laplacian_weight) {
        build_axis(grid.nx, topo.periodic_x, ip_, im_, active_x_);
        build_axis(grid.ny, topo.periodic_y, jp_, jm_, active_y_);
        rx_ = w_lap_ / (grid.h * grid.h);
        ry_ = w_lap_ / (grid.k * grid.k);
    }

    std::size_t dim() const { return grid_.size(); }
    const UniformGrid2D& grid() const { return grid_; }
    Topology topology() const { return topo_; }

    /// Scale of identity rows: the identity weight, or 1 when it vanishes (steady problems).
    double boundary_scale() const { return w_id_ != 0.0 ? w_id_ : 1.0; }

    RowKind row_kind(int i, int j) const {
        if (active_x_[i] && active_y_[j]) return RowKind::Active;
        const bool wall_x = !topo_.periodic_x && (i == 0 || i == grid_.nx - 1);
        const bool wall_y = !topo_.periodic_y && (j == 0 || j == grid_.ny - 1);
        return (wall_x || wall_y) ? RowKind::Boundary : RowKind::Duplicate;
    }

    /// Stencil weights of an active row: centre, east/west, north/south.
    struct Stencil {
        double centre;
        double east_west;
        double north_south;
    };
    Stencil stencil() const { return {w_id_ + 2.0 * rx_ + 2.0 * ry_, -rx_, -ry_}; }

    /// Largest absolute row sum.
    double norm_inf() const {
        return std::max(std::abs(boundary_scale()), std::abs(w_id_ + 2.0 * rx_ + 2.0 * ry_) + 2.0 * std::abs(rx_) +
                                                        2.0 * std::abs(ry_));
    }

    void apply(std::span<const double> x, std::span<double> y) const {
        const int nx = grid_.nx;
        const double bs = boundary_scale();
        const double c0 = w_id_ + 2.0 * rx_ + 2.0 * ry_;
        const double rx = rx_, ry = ry_;
        const double* X = x.data();
        double* Y = y.data();
        // Only columns 0 and nx-2 can wrap (periodic x); the last column is an identity row.
        const int first = active_x_[0] ? 0 : 1;
        for (int j = 0; j < grid_.ny; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * nx;
            if (!active_y_[j]) {
                for (int i = 0; i < nx; ++i) Y[row + i] = bs * X[row + i];
                continue;
            }
            const double* xc = X + row;
            const double* xn = X + static_cast<std::size_t>(jp_[j]) * nx;
            const double* xs = X + static_cast<std::size_t>(jm_[j]) * nx;
            double* yc = Y + row;
            if (first == 0) {
                yc[0] = c0 * xc[0] - rx * (xc[ip_[0]] + xc[im_[0]]) - ry * (xn[0] + xs[0]);
            } else {
                yc[0] = bs * xc[0];
            }
            for (int i = 1; i < nx - 2; ++i) {
                yc[i] = c0 * xc[i] - rx * (xc[i + 1] + xc[i - 1]) - ry * (xn[i] + xs[i]);
            }
            const int last = nx - 2;  // east neighbour is the duplicate column unless wrapped
            yc[last] = c0 * xc[last] - rx * (xc[ip_[last]] + xc[last - 1]) - ry * (xn[last] + xs[last]);
            yc[nx - 1] = bs * xc[nx - 1];
        }
    }

    // Neighbour tables (wrapped on periodic axes).
    const std::vector<int>& east() const { return ip_; }
    const std::vector<int>& west() const { return im_; }
    const std::vector<int>& north() const { return jp_; }
    const std::vector<int>& south() const { return jm_; }
    bool active_x(int i) const { return active_x_[i] != 0; }
    bool active_y(int j) const { return active_y_[j] != 0; }

private:
    static void build_axis(int n, bool periodic, std::vector<int>& plus, std::vector<int>& minus,
                           std::vector<std::uint8_t>& active) {
        plus.resize(n);
        minus.resize(n);
        active.assign(n, 0);
        if (periodic) {
            const int m = n - 1;
            for (int i = 0; i < n; ++i) {
                plus[i] = (i + 1) % m;
                minus[i] = (i + m - 1) % m;
                active[i] = i < m;
            }
        } else {
            for (int i = 0; i < n; ++i) {
                plus[i] = std::min(i + 1, n - 1);
                minus[i] = std::max(i - 1, 0);
                active[i] = i > 0 && i < n - 1;
            }
        }
    }

    UniformGrid2D grid_;
    Topology topo_;
    double w_id_;
    double w_lap_;
    double rx_ = 0.0;
    double ry_ = 0.0;
    std::vector<int> ip_, im_, jp_, jm_;
    std::vector<std::uint8_t> active_x_, active_y_;
};

namespace detail {

inline double coeff_at(const std::vector<double>& v, std::size_t n) { return v.empty() ? 0.0 : v[n]; }

/// -(delta_x + c) phi_x - (delta_y + d) phi_y + s at an active node.
inline double lagged_terms(const FivePointOperator& op, const TransportState& st, const CoefficientFields& cf, int i,
                           int j) {
    const UniformGrid2D& g = op.grid();
    const std::size_t n = g.index(i, j);
    const auto& px = st.phi_x.data();
    const auto& py = st.phi_y.data();
    const double dxpx = (px[g.index(op.east()[i], j)] - px[g.index(op.west()[i], j)]) / (2.0 * g.h);
    const double dypy = (py[g.index(i, op.north()[j])] - py[g.index(i, op.south()[j])]) / (2.0 * g.k);
    return -(dxpx + coeff_at(cf.c, n) * px[n]) - (dypy + coeff_at(cf.d, n) * py[n]) + coeff_at(cf.s, n);
}

inline double laplacian_at(const FivePointOperator& op, const ScalarField& f, int i, int j) {
    const UniformGrid2D& g = op.grid();
    const double c = f(i, j);
    return (f(op.east()[i], j) - 2.0 * c + f(op.west()[i], j)) / (g.h * g.h) +
           (f(i, op.north()[j]) - 2.0 * c + f(i, op.south()[j])) / (g.k * g.k);
}

inline void sync_duplicates(ScalarField& f, Topology topo) {
    const UniformGrid2D& g = f.grid();
    if (topo.periodic_x) {
        for (int j = 0; j < g.ny; ++j) f(g.nx - 1, j) = f(0, j);
    }
    if (topo.periodic_y) {
        for (int i = 0; i < g.nx; ++i) f(i, g.ny - 1) = f(i, 0);
    }
}

inline void set_edge(ScalarField& f, const SpaceTimeFunction& fn, bool vertical, int line, double t) {
    const UniformGrid2D& g = f.grid();
    if (vertical) {
        for (int j = 0; j < g.ny; ++j) f(line, j) = fn(g.x(line), g.y(j), t);
    } else {
        for (int i = 0; i < g.nx; ++i) f(i, line) = fn(g.x(i), g.y(line), t);
    }
}

}  // namespace detail

/// Overwrites boundary derivative values with the analytic data carried by Dirichlet edges.
inline void apply_derivative_boundary(TransportState& st, const BoundarySpec& bc, double t) {
    const UniformGrid2D& g = st.phi.grid();
    struct Edge {
        const EdgeCondition* e;
        bool vertical;
        int line;
    };
    const Edge edges[] = {{&bc.left, true, 0}, {&bc.right, true, g.nx - 1}, {&bc.bottom, false, 0},
                          {&bc.top, false, g.ny - 1}};
    for (const Edge& ed : edges) {
        if (ed.e->kind != EdgeKind::Dirichlet) continue;
        if (ed.e->dx) detail::set_edge(st.phi_x, ed.e->dx, ed.vertical, ed.line, t);
        if (ed.e->dy) detail::set_edge(st.phi_y, ed.e->dy, ed.vertical, ed.line, t);
    }
}

/// Sets Dirichlet values of phi (left/right first, then bottom/top) and syncs periodic duplicates.
inline void apply_value_boundary(ScalarField& phi, const BoundarySpec& bc, double t) {
    const UniformGrid2D& g = phi.grid();
    if (bc.left.kind == EdgeKind::Dirichlet) detail::set_edge(phi, bc.left.value, true, 0, t);
    if (bc.right.kind == EdgeKind::Dirichlet) detail::set_edge(phi, bc.right.value, true, g.nx - 1, t);
    if (bc.bottom.kind == EdgeKind::Dirichlet) detail::set_edge(phi, bc.bottom.value, false, 0, t);
    if (bc.top.kind == EdgeKind::Dirichlet) detail::set_edge(phi, bc.top.value, false, g.ny - 1, t);
    detail::sync_duplicates(phi, Topology::of(bc));
}

/// Recomputes phi_x, phi_y from phi by the Pade systems, then applies boundary derivative data.
inline void refresh_derivatives(TransportState& st, const BoundarySpec& bc, double t) {
    pade_dx_into(st.phi, x_closure(bc), t, st.phi_x);
    pade_dy_into(st.phi, y_closure(bc), t, st.phi_y);
    apply_derivative_boundary(st, bc, t);
}

/// Builds a consistent state from nodal values; derivatives come from the Pade systems.
inline TransportState make_transport_state(ScalarField phi, const BoundarySpec& bc, double t) {
    bc.validate();
    TransportState st{phi, ScalarField(phi.grid()), ScalarField(phi.grid()), t};
    apply_value_boundary(st.phi, bc, t);
    refresh_derivatives(st, bc, t);
    return st;
}

/// -2 dxx phi - 2 dyy phi + (delta_x + c) phi_x + (delta_y + d) phi_y on active nodes; zero elsewhere.
inline ScalarField apply_steady_operator(const TransportState& st, const Coefficients& coeffs, double t,
                                         Topology topo = {}) {
    const UniformGrid2D& g = st.phi.grid();
    const FivePointOperator op(g, topo, 0.0, 2.0);
    const CoefficientFields cf = evaluate_coefficients({coeffs.c, coeffs.d, {}}, g, t);
    ScalarField out(g);
    op.apply(st.phi.values(), out.values());
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (op.row_kind(i, j) != FivePointOperator::RowKind::Active) {
                out(i, j) = 0.0;
                continue;
            }
            out(i, j) -= detail::lagged_terms(op, st, cf, i, j);
        }
    }
    return out;
}

/// Matrix-free application of the implicit-level matrix  a - 2 iota dt (dxx + dyy).
inline ScalarField apply_unsteady_lhs(const ScalarField& phi, const SchemeConfig& cfg, Topology topo = {}) {
    const FivePointOperator op(phi.grid(), topo, cfg.a, 2.0 * cfg.iota * cfg.dt);
    ScalarField out(phi.grid());
    op.apply(phi.values(), out.values());
    return out;
}

/// One correcting pass (solve for phi with lagged derivatives, then refresh the derivatives).
/// The same machinery serves the unsteady step and the steady solver:
///   unsteady: w_id = a, w_lap = 2 iota dt, w_lag = iota dt, explicit part from level n
///   steady:   w_id = 0, w_lap = 2,         w_lag = 1,       explicit part zero
class CompactCorrector {
public:
    CompactCorrector(const UniformGrid2D& grid, BoundarySpec bc, double identity_weight, double laplacian_weight,
                     double lagged_weight, std::vector<double> explicit_rhs, double t_new, double linear_tol,
                     int max_linear_iter)
        : op_(grid, Topology::of(bc), identity_weight, laplacian_weight),
          bc_(std::move(bc)),
          w_id_(identity_weight),
          w_lag_(lagged_weight),
          explicit_(std::move(explicit_rhs)),
          t_new_(t_new),
          linear_tol_(linear_tol),
          max_linear_iter_(max_linear_iter),
          rhs_(grid.size()) {}

    const FivePointOperator& op() const { return op_; }
    double time() const { return t_new_; }

    /// Runs one pass on `it` in place and returns the L-infinity change of phi.
    double correct(TransportState& it, const CoefficientFields& cf, IterStats* linear_stats = nullptr) {
        const UniformGrid2D& g = op_.grid();
        const double bs = op_.boundary_scale();
        const Topology topo = op_.topology();

        // Boundary rows take the Dirichlet data at the new level.
        ScalarField target = it.phi;
        apply_value_boundary(target, bc_, t_new_);

        const bool gauge = topo.periodic_x && topo.periodic_y && w_id_ == 0.0;
        double active_sum = 0.0;
        std::size_t active_count = 0;
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t n = g.index(i, j);
                if (op_.row_kind(i, j) == FivePointOperator::RowKind::Active) {
                    const double e = explicit_.empty() ? 0.0 : explicit_[n];
                    rhs_[n] = e + w_lag_ * detail::lagged_terms(op_, it, cf, i, j);
                    active_sum += rhs_[n];
                    ++active_count;
                } else {
                    rhs_[n] = bs * target[n];
                }
            }
        }
        if (gauge) {
            // Singular periodic Laplacian: project onto the range.
            const double mean = active_sum / static_cast<double>(active_count);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    if (op_.row_kind(i, j) == FivePointOperator::RowKind::Active) rhs_[g.index(i, j)] -= mean;
        }

        BicgstabResult res = bicgstab(op_, std::span<const double>(rhs_), std::span<const double>(target.data()),
                                      linear_tol_, max_linear_iter_,
                                      std::numeric_limits<double>::epsilon() * op_.norm_inf());
        if (linear_stats) *linear_stats = res.stats;

        ScalarField next(g, std::move(res.x));
        detail::sync_duplicates(next, topo);
        if (gauge) remove_mean(next);

        double change = 0.0;
        for (std::size_t n = 0; n < next.size(); ++n) change = std::max(change, std::abs(next[n] - it.phi[n]));
        it.phi = std::move(next);
        it.t = t_new_;
        refresh_derivatives(it, bc_, t_new_);
        return change;
    }

    /// Subtracts the mean over unique nodes (periodic gauge).
    static void remove_mean(ScalarField& f) {
        const UniformGrid2D& g = f.grid();
        double sum = 0.0;
        for (int j = 0; j < g.ny - 1; ++j)
            for (int i = 0; i < g.nx - 1; ++i) sum += f(i, j);
        const double mean = sum / (static_cast<double>(g.nx - 1) * (g.ny - 1));
        for (double& v : f.data()) v -= mean;
    }

private:
    FivePointOperator op_;
    BoundarySpec bc_;
    double w_id_;
    double w_lag_;
    std::vector<double> explicit_;
    double t_new_;
    double linear_tol_;
    int max_linear_iter_;
    std::vector<double> rhs_;
};

/// Corrector for the step from `level_n` to level_n.t + cfg.dt.
inline CompactCorrector make_unsteady_corrector(const TransportState& level_n, const CoefficientFields& coeffs_n,
                                                const SchemeConfig& cfg, const BoundarySpec& bc) {
    const UniformGrid2D& g = level_n.phi.grid();
    const double w_exp_lap = 2.0 * (1.0 - cfg.iota) * cfg.dt;
    const double w_exp_lag = (1.0 - cfg.iota) * cfg.dt;
    const FivePointOperator op(g, Topology::of(bc), cfg.a, 2.0 * cfg.iota * cfg.dt);
    std::vector<double> e(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (op.row_kind(i, j) != FivePointOperator::RowKind::Active) continue;
            e[g.index(i, j)] = cfg.a * level_n.phi(i, j) + w_exp_lap * detail::laplacian_at(op, level_n.phi, i, j) +
                               w_exp_lag * detail::lagged_terms(op, level_n, coeffs_n, i, j);
        }
    }
    return CompactCorrector(g, bc, cfg.a, 2.0 * cfg.iota * cfg.dt, cfg.iota * cfg.dt, std::move(e),
                            level_n.t + cfg.dt, cfg.linear_tol, cfg.max_linear_iter);
}

inline CompactCorrector make_steady_corrector(const UniformGrid2D& grid, const SchemeConfig& cfg,
                                              const BoundarySpec& bc, double t) {
    return CompactCorrector(grid, bc, 0.0, 2.0, 1.0, {}, t, cfg.linear_tol, cfg.max_linear_iter);
}

struct StepResult {
    TransportState state;
    IterStats stats;  // inner (correcting) iterations; residual is the last phi change
};

/// Prepares the first iterate of a new level: old values, boundary data at the new time.
inline TransportState start_iterate(const TransportState& level_n, const BoundarySpec& bc, double t_new) {
    TransportState it = level_n;
    it.t = t_new;
    apply_value_boundary(it.phi, bc, t_new);
    apply_derivative_boundary(it, bc, t_new);
    return it;
}

namespace detail {

template <class Pass>
StepResult correct_to_convergence(TransportState it, const SchemeConfig& cfg, Pass&& pass, const char* what) {
    double change = 0.0;
    for (int k = 1; k <= cfg.max_inner; ++k) {
        change = pass(it);
        if (change < cfg.inner_tol) return {std::move(it), {k, change, true}};
    }
    throw NonConvergenceError(std::string(what) + ": correcting iteration did not converge in " +
                                  std::to_string(cfg.max_inner) + " passes (last change " + std::to_string(change) +
                                  ")",
                              it.phi.data(), cfg.max_inner, change);
}

}  // namespace detail

/// Advances phi by one step of the weighted-iota scheme with correcting-to-convergence.
inline StepResult advance(const TransportState& state, const Coefficients& coeffs, const SchemeConfig& cfg,
                          const BoundarySpec& bc) {
    cfg.validate();
    bc.validate();
    const UniformGrid2D& g = state.phi.grid();
    const double t_new = state.t + cfg.dt;
    CompactCorrector corrector = make_unsteady_corrector(state, evaluate_coefficients(coeffs, g, state.t), cfg, bc);
    const CoefficientFields next = evaluate_coefficients(coeffs, g, t_new);
    return detail::correct_to_convergence(start_iterate(state, bc, t_new), cfg,
                                          [&](TransportState& it) { return corrector.correct(it, next); }, "advance");
}

/// Solves -lap phi + c phi_x + d phi_y = s with the compact five-point operator, correcting
/// derivatives to convergence. Fully periodic problems are solved in the zero-mean gauge.
inline StepResult solve_steady(const Coefficients& coeffs, const SchemeConfig& cfg, const BoundarySpec& bc,
                               const TransportState& initial_guess) {
    bc.validate();
    const UniformGrid2D& g = initial_guess.phi.grid();
    const double t = initial_guess.t;
    CompactCorrector corrector = make_steady_corrector(g, cfg, bc, t);
    const CoefficientFields cf = evaluate_coefficients(coeffs, g, t);
    return detail::correct_to_convergence(start_iterate(initial_guess, bc, t), cfg,
                                          [&](TransportState& it) { return corrector.correct(it, cf); },
                                          "solve_steady");
}

}  // namespace cc4oc

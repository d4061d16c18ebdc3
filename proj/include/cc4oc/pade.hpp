#pragma once

#include <stdexcept>
#include <vector>

#include "cc4oc/grid.hpp"
#include "cc4oc/linalg.hpp"

namespace cc4oc {

/// How a derivative line is closed at one end.
///  ExactValue       boundary derivative supplied by a function of (x, y, t)
///  OneSidedCompact  d_0 + 2 d_1 = (-5/2 f_0 + 2 f_1 + 1/2 f_2) / h  (third order)
///  Periodic         wrap-around; the last node duplicates the first
enum class EndMode { ExactValue, OneSidedCompact, Periodic };

struct DerivativeClosure {
    EndMode lower = EndMode::OneSidedCompact;
    EndMode upper = EndMode::OneSidedCompact;
    SpaceTimeFunction lower_value;
    SpaceTimeFunction upper_value;

    void validate() const {
        if ((lower == EndMode::Periodic) != (upper == EndMode::Periodic)) {
            throw std::invalid_argument("DerivativeClosure: periodic must be set at both ends");
        }
        if ((lower == EndMode::ExactValue && !lower_value) || (upper == EndMode::ExactValue && !upper_value)) {
            throw std::invalid_argument("DerivativeClosure: ExactValue end without a derivative function");
        }
    }
};

namespace detail {

inline EndMode mode_for(const EdgeCondition& e, const SpaceTimeFunction& derivative) {
    if (e.kind == EdgeKind::Periodic) return EndMode::Periodic;
    return derivative ? EndMode::ExactValue : EndMode::OneSidedCompact;
}

}  // namespace detail

/// Closure for x-lines (left/right edges, using their dx data).
inline DerivativeClosure x_closure(const BoundarySpec& bc) {
    return {detail::mode_for(bc.left, bc.left.dx), detail::mode_for(bc.right, bc.right.dx), bc.left.dx, bc.right.dx};
}

/// Closure for y-lines (bottom/top edges, using their dy data).
inline DerivativeClosure y_closure(const BoundarySpec& bc) {
    return {detail::mode_for(bc.bottom, bc.bottom.dy), detail::mode_for(bc.top, bc.top.dy), bc.bottom.dy,
            bc.top.dy};
}

/// Solves the fourth-order Pade relation
///   d_{i-1}/6 + 2 d_i/3 + d_{i+1}/6 = (f_{i+1} - f_{i-1}) / (2h)
/// along single lines. Buffers are reused between lines.
class PadeLineSolver {
public:
    explicit PadeLineSolver(int n) : lower_(n), diag_(n), upper_(n), scratch_(n), z_(n) {}

    /// `f` and `d` are strided views of one grid line of length n.
    void solve(const double* f, std::ptrdiff_t stride, double h, EndMode lo_mode, double lo_value, EndMode hi_mode,
               double hi_value, double* d) {
        const int n = static_cast<int>(diag_.size());
        auto F = [&](int i) { return f[i * stride]; };
        auto D = [&](int i) -> double& { return d[i * stride]; };
        const double inv2h = 1.0 / (2.0 * h);

        if (lo_mode == EndMode::Periodic) {
            solve_periodic(f, stride, h, d);
            return;
        }
        std::vector<double>& rhs = z_;
        for (int i = 1; i < n - 1; ++i) {
            lower_[i] = 1.0 / 6.0;
            diag_[i] = 2.0 / 3.0;
            upper_[i] = 1.0 / 6.0;
            rhs[i] = (F(i + 1) - F(i - 1)) * inv2h;
        }
        lower_[0] = 0.0;
        if (lo_mode == EndMode::ExactValue) {
            diag_[0] = 1.0;
            upper_[0] = 0.0;
            rhs[0] = lo_value;
        } else {
            diag_[0] = 1.0;
            upper_[0] = 2.0;
            rhs[0] = (-2.5 * F(0) + 2.0 * F(1) + 0.5 * F(2)) / h;
        }
        upper_[n - 1] = 0.0;
        if (hi_mode == EndMode::ExactValue) {
            diag_[n - 1] = 1.0;
            lower_[n - 1] = 0.0;
            rhs[n - 1] = hi_value;
        } else {
            diag_[n - 1] = 1.0;
            lower_[n - 1] = 2.0;
            rhs[n - 1] = (2.5 * F(n - 1) - 2.0 * F(n - 2) - 0.5 * F(n - 3)) / h;
        }
        detail::thomas_in_place(lower_, diag_, upper_, rhs, scratch_, 1e-14);
        for (int i = 0; i < n; ++i) D(i) = rhs[i];
    }

private:
    void solve_periodic(const double* f, std::ptrdiff_t stride, double h, double* d) {
        const int n = static_cast<int>(diag_.size());
        const int m = n - 1;  // unique nodes
        TridiagonalSystem sys;
        sys.lower.assign(m, 1.0 / 6.0);
        sys.diag.assign(m, 2.0 / 3.0);
        sys.upper.assign(m, 1.0 / 6.0);
        sys.rhs.resize(m);
        const double inv2h = 1.0 / (2.0 * h);
        for (int i = 0; i < m; ++i) {
            const int ip = (i + 1) % m;
            const int im = (i + m - 1) % m;
            sys.rhs[i] = (f[ip * stride] - f[im * stride]) * inv2h;
        }
        const std::vector<double> x = solve_cyclic_tridiagonal(sys, 1.0 / 6.0, 1.0 / 6.0);
        for (int i = 0; i < m; ++i) d[i * stride] = x[i];
        d[m * stride] = x[0];
    }

    std::vector<double> lower_, diag_, upper_, scratch_, z_;
};

namespace detail {

inline void check_line_length(int n, const DerivativeClosure& c) {
    const bool one_sided = c.lower == EndMode::OneSidedCompact || c.upper == EndMode::OneSidedCompact;
    if (n < (one_sided ? 4 : 3)) throw std::invalid_argument("pade: line too short for the requested closure");
    if (c.lower == EndMode::Periodic && n - 1 < 3) throw std::invalid_argument("pade: periodic line too short");
}

}  // namespace detail

/// Fourth-order compact x-derivative, one tridiagonal solve per grid row.
inline void pade_dx_into(const ScalarField& field, const DerivativeClosure& closure, double t, ScalarField& out) {
    closure.validate();
    const UniformGrid2D& g = field.grid();
    detail::check_line_length(g.nx, closure);
    PadeLineSolver line(g.nx);
    const double xl = g.x(0), xr = g.x(g.nx - 1);
    for (int j = 0; j < g.ny; ++j) {
        const double y = g.y(j);
        const double lo = closure.lower == EndMode::ExactValue ? closure.lower_value(xl, y, t) : 0.0;
        const double hi = closure.upper == EndMode::ExactValue ? closure.upper_value(xr, y, t) : 0.0;
        line.solve(&field.data()[g.index(0, j)], 1, g.h, closure.lower, lo, closure.upper, hi,
                   &out.data()[g.index(0, j)]);
    }
}

/// Fourth-order compact y-derivative, one tridiagonal solve per grid column.
inline void pade_dy_into(const ScalarField& field, const DerivativeClosure& closure, double t, ScalarField& out) {
    closure.validate();
    const UniformGrid2D& g = field.grid();
    detail::check_line_length(g.ny, closure);
    PadeLineSolver line(g.ny);
    const double yb = g.y(0), yt = g.y(g.ny - 1);
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        const double lo = closure.lower == EndMode::ExactValue ? closure.lower_value(x, yb, t) : 0.0;
        const double hi = closure.upper == EndMode::ExactValue ? closure.upper_value(x, yt, t) : 0.0;
        line.solve(&field.data()[g.index(i, 0)], g.nx, g.k, closure.lower, lo, closure.upper, hi,
                   &out.data()[g.index(i, 0)]);
    }
}

inline ScalarField pade_dx(const ScalarField& field, const DerivativeClosure& closure, double t) {
    ScalarField out(field.grid());
    pade_dx_into(field, closure, t, out);
    return out;
}

inline ScalarField pade_dy(const ScalarField& field, const DerivativeClosure& closure, double t) {
    ScalarField out(field.grid());
    pade_dy_into(field, closure, t, out);
    return out;
}

}  // namespace cc4oc

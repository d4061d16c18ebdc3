#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "cc4oc/errors.hpp"

namespace cc4oc {

/// Tridiagonal system A x = rhs. lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    std::size_t size() const { return diag.size(); }
};

namespace detail {

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// In-place Thomas elimination. `x` holds the rhs on entry and the solution on exit;
/// `scratch` must have n entries. Pivots below `pivot_floor` raise SingularMatrixError.
inline void thomas_in_place(std::span<const double> lower, std::span<const double> diag,
                            std::span<const double> upper, std::span<double> x, std::span<double> scratch,
                            double pivot_floor) {
    const std::size_t n = diag.size();
    double pivot = diag[0];
    if (std::abs(pivot) <= pivot_floor) throw SingularMatrixError("tridiagonal solve: zero pivot in row 0");
    scratch[0] = upper[0] / pivot;
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * scratch[i - 1];
        if (std::abs(pivot) <= pivot_floor) {
            throw SingularMatrixError("tridiagonal solve: zero pivot in row " + std::to_string(i));
        }
        scratch[i] = (i + 1 < n) ? upper[i] / pivot : 0.0;
        x[i] = (x[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= scratch[i] * x[i + 1];
    }
}

inline double pivot_floor_for(std::span<const double> diag) { return 1e-14 * max_abs(diag); }

inline void check_shape(const TridiagonalSystem& sys, std::size_t min_n) {
    const std::size_t n = sys.diag.size();
    if (n < min_n) throw std::invalid_argument("tridiagonal system too small");
    if (sys.lower.size() != n || sys.upper.size() != n || sys.rhs.size() != n) {
        throw std::invalid_argument("tridiagonal system: band and rhs lengths differ");
    }
}

}  // namespace detail

inline std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
    detail::check_shape(sys, 2);
    std::vector<double> x = sys.rhs;
    std::vector<double> scratch(sys.size());
    detail::thomas_in_place(sys.lower, sys.diag, sys.upper, x, scratch, detail::pivot_floor_for(sys.diag));
    return x;
}

/// Cyclic tridiagonal solve via a Sherman-Morrison correction of two Thomas solves.
/// corner_upper is A(0, n-1) and corner_lower is A(n-1, 0).
inline std::vector<double> solve_cyclic_tridiagonal(const TridiagonalSystem& sys, double corner_lower,
                                                    double corner_upper) {
    detail::check_shape(sys, 3);
    const std::size_t n = sys.size();
    if (corner_lower == 0.0 && corner_upper == 0.0) return solve_tridiagonal(sys);

    const double floor = detail::pivot_floor_for(sys.diag);
    const double gamma = (sys.diag[0] != 0.0) ? -sys.diag[0] : -1.0;
    std::vector<double> diag = sys.diag;
    diag[0] -= gamma;
    diag[n - 1] -= corner_lower * corner_upper / gamma;

    std::vector<double> x = sys.rhs;
    std::vector<double> z(n, 0.0);
    z[0] = gamma;
    z[n - 1] = corner_lower;
    std::vector<double> scratch(n);
    detail::thomas_in_place(sys.lower, diag, sys.upper, x, scratch, floor);
    detail::thomas_in_place(sys.lower, diag, sys.upper, z, scratch, floor);

    const double denom = 1.0 + z[0] + corner_upper * z[n - 1] / gamma;
    if (std::abs(denom) <= 1e-14) throw SingularMatrixError("cyclic tridiagonal solve: singular rank-one update");
    const double factor = (x[0] + corner_upper * x[n - 1] / gamma) / denom;
    for (std::size_t i = 0; i < n; ++i) x[i] -= factor * z[i];
    return x;
}

struct IterStats {
    int iterations = 0;
    double final_residual_norm = 0.0;
    bool converged = false;
};

/// Anything that can apply y = A x for vectors of length dim().
template <class Op>
concept LinearMap = requires(const Op& op, std::span<const double> x, std::span<double> y) {
    { op.dim() } -> std::convertible_to<std::size_t>;
    op.apply(x, y);
};

/// Type-erased matrix-free operator.
struct LinearOperator {
    std::function<void(std::span<const double>, std::span<double>)> fn;
    std::size_t n = 0;

    std::size_t dim() const { return n; }
    void apply(std::span<const double> x, std::span<double> y) const { fn(x, y); }
};

struct BicgstabResult {
    std::vector<double> x;
    IterStats stats;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

template <LinearMap Op>
double residual(const Op& op, std::span<const double> b, std::span<const double> x, std::span<double> r) {
    op.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}

}  // namespace detail

/// Unpreconditioned BiCGStab with an absolute tolerance on the 2-norm of the true residual.
/// Dot products run in index order, so results are bit-reproducible. On hitting the cap the
/// error carries the best checkpointed iterate (a checkpoint is taken whenever the residual
/// halves, plus the final iterate).
/// A positive `floor_scale` (typically eps * |A|_inf) raises the tolerance to
/// floor_scale * |x|_2 when that is larger, so solves stop at the round-off floor.
template <LinearMap Op>
BicgstabResult bicgstab(const Op& op, std::span<const double> rhs, std::span<const double> x0, double tol,
                        int max_iter, double floor_scale = 0.0) {
    const std::size_t n = op.dim();
    if (rhs.size() != n || x0.size() != n) throw std::invalid_argument("bicgstab: dimension mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("bicgstab: tolerance must be positive");

    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), s(n), t(n);
    double r_norm = detail::residual(op, rhs, x, r);

    double x_norm = floor_scale > 0.0 ? detail::norm2(x) : 0.0;
    auto limit = [&] { return std::max(tol, floor_scale * x_norm); };

    std::vector<double> best = x;
    double best_norm = r_norm;
    auto checkpoint = [&](bool force) {
        if (r_norm < (force ? best_norm : 0.5 * best_norm)) {
            best_norm = r_norm;
            best = x;
        }
    };
    int it = 0;
    constexpr double tiny = std::numeric_limits<double>::min();

    double* const X = x.data();
    double* const R = r.data();
    double* const RH = r_hat.data();
    double* const P = p.data();
    double* const V = v.data();
    double* const S = s.data();
    double* const T = t.data();

    while (true) {
        // Restart point: also used when the recursive residual claims convergence but the
        // true residual does not.
        if (r_norm <= limit()) return {std::move(x), {it, r_norm, true}};
        r_hat = r;
        double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
        double rho = detail::dot(r_hat, r);
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(v.begin(), v.end(), 0.0);

        while (true) {
            if (it >= max_iter) {
                checkpoint(true);
                throw NonConvergenceError("bicgstab: no convergence in " + std::to_string(max_iter) + " iterations",
                                          std::move(best), it, best_norm);
            }
            ++it;
            if (std::abs(rho) < tiny || !std::isfinite(rho)) throw BreakdownError("bicgstab: rho breakdown");
            const double beta = (rho / rho_prev) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) P[i] = R[i] + beta * (P[i] - omega * V[i]);
            op.apply(p, v);
            const double rv = detail::dot(r_hat, v);
            if (std::abs(rv) < tiny || !std::isfinite(rv)) throw BreakdownError("bicgstab: alpha breakdown");
            alpha = rho / rv;
            double ss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                S[i] = R[i] - alpha * V[i];
                ss += S[i] * S[i];
            }
            if (std::sqrt(ss) <= limit()) {
                for (std::size_t i = 0; i < n; ++i) X[i] += alpha * P[i];
                if (floor_scale > 0.0) x_norm = detail::norm2(x);
                r_norm = detail::residual(op, rhs, x, r);
                break;
            }
            op.apply(s, t);
            double tt = 0.0, ts = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                tt += T[i] * T[i];
                ts += T[i] * S[i];
            }
            if (tt < tiny) throw BreakdownError("bicgstab: omega breakdown (t = 0)");
            omega = ts / tt;
            if (std::abs(omega) < tiny || !std::isfinite(omega)) throw BreakdownError("bicgstab: omega breakdown");
            double rr = 0.0, rhr = 0.0, xx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                X[i] += alpha * P[i] + omega * S[i];
                R[i] = S[i] - omega * T[i];
                rr += R[i] * R[i];
                rhr += RH[i] * R[i];
                xx += X[i] * X[i];
            }
            r_norm = std::sqrt(rr);
            x_norm = std::sqrt(xx);
            if (r_norm <= limit()) {
                r_norm = detail::residual(op, rhs, x, r);
                break;
            }
            checkpoint(false);
            rho_prev = rho;
            rho = rhr;
        }
        checkpoint(true);
    }
}

inline BicgstabResult bicgstab(const LinearOperator& op, const std::vector<double>& rhs,
                               const std::vector<double>& x0, double tol, int max_iter, double floor_scale = 0.0) {
    return bicgstab<LinearOperator>(op, std::span<const double>(rhs), std::span<const double>(x0), tol, max_iter,
                                    floor_scale);
}

}  // namespace cc4oc

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "cc4oc/grid.hpp"
#include "cc4oc/scheme.hpp"

namespace cc4oc {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------------------------
// Linear convection-diffusion benchmarks

/// Decaying Taylor vortex: a = 1, c = d = 0 on [0,1]^2.
inline double taylor_exact(double x, double y, double t) {
    return std::exp(-2.0 * pi * pi * t) * std::sin(pi * x) * std::sin(pi * y);
}
inline double taylor_exact_dx(double x, double y, double t) {
    return pi * std::exp(-2.0 * pi * pi * t) * std::cos(pi * x) * std::sin(pi * y);
}
inline double taylor_exact_dy(double x, double y, double t) {
    return pi * std::exp(-2.0 * pi * pi * t) * std::sin(pi * x) * std::cos(pi * y);
}

/// Gaussian pulse of height 1 at (0.5, 0.5) convected with (c, d) and diffused with 1/a, on [0,2]^2.
inline double gaussian_exact(double x, double y, double t, double a, double c, double d) {
    const double s = 4.0 * t + 1.0;
    const double px = a * x - c * t - 0.5 * a;
    const double py = a * y - d * t - 0.5 * a;
    return std::exp(-(px * px) / (a * s) - (py * py) / (a * s)) / s;
}
inline double gaussian_exact_dx(double x, double y, double t, double a, double c, double d) {
    return -2.0 * (a * x - c * t - 0.5 * a) / (4.0 * t + 1.0) * gaussian_exact(x, y, t, a, c, d);
}
inline double gaussian_exact_dy(double x, double y, double t, double a, double c, double d) {
    return -2.0 * (a * y - d * t - 0.5 * a) / (4.0 * t + 1.0) * gaussian_exact(x, y, t, a, c, d);
}

/// A convection-diffusion benchmark with an exact solution.
struct TransportProblem {
    UniformGrid2D grid;
    SchemeConfig config;  // a is problem data; iota, dt, tolerances are filled by the caller
    Coefficients coeffs;
    BoundarySpec bc;
    SpaceTimeFunction exact;
    SpaceTimeFunction exact_dx;
    SpaceTimeFunction exact_dy;

    /// Initial state with analytic derivatives.
    TransportState initial_state(double t0 = 0.0) const {
        return {sample(grid, exact, t0), sample(grid, exact_dx, t0), sample(grid, exact_dy, t0), t0};
    }
};

inline TransportProblem taylor_problem(int n) {
    TransportProblem p;
    p.grid = make_grid(n, n, 0.0, 0.0, 1.0, 1.0);
    p.config.a = 1.0;
    p.exact = taylor_exact;
    p.exact_dx = taylor_exact_dx;
    p.exact_dy = taylor_exact_dy;
    p.bc = BoundarySpec::dirichlet(p.exact, p.exact_dx, p.exact_dy);
    return p;
}

inline TransportProblem gaussian_problem(int n, double a, double c, double d) {
    TransportProblem p;
    p.grid = make_grid(n, n, 0.0, 0.0, 2.0, 2.0);
    p.config.a = a;
    p.coeffs.c = [c](double, double, double) { return c; };
    p.coeffs.d = [d](double, double, double) { return d; };
    p.exact = [=](double x, double y, double t) { return gaussian_exact(x, y, t, a, c, d); };
    p.exact_dx = [=](double x, double y, double t) { return gaussian_exact_dx(x, y, t, a, c, d); };
    p.exact_dy = [=](double x, double y, double t) { return gaussian_exact_dy(x, y, t, a, c, d); };
    p.bc = BoundarySpec::dirichlet(p.exact, p.exact_dx, p.exact_dy);
    return p;
}

// ---------------------------------------------------------------------------------------------
// Streamfunction-vorticity Navier-Stokes

/// psi and omega with their compact derivatives; u = psi_y, v = -psi_x.
struct NSState {
    TransportState psi;
    TransportState omega;

    double t() const { return psi.t; }
    ScalarField u() const { return psi.phi_y; }
    ScalarField v() const {
        ScalarField out = psi.phi_x;
        for (double& x : out.data()) x = -x;
        return out;
    }
};

/// Boundary data and forcing of a psi-omega problem. `before_pass` runs before every coupled
/// correcting pass with the current iterate (e.g. to refresh wall vorticity).
struct NSProblem {
    BoundarySpec psi_bc;
    BoundarySpec omega_bc;
    SpaceTimeFunction source;  // right-hand side of the vorticity equation, unscaled
    std::function<void(const NSState&)> before_pass;
};

struct NSManufacturedValues {
    double psi;
    double omega;
    double source;
};

/// Closed-form solution with source for the manufactured Navier-Stokes case on [0,1]^2.
inline NSManufacturedValues ns_manufactured(double x, double y, double t, double re) {
    const double r2 = x * x + y * y;
    const double e = std::exp(-t / re);
    return {r2 * r2 * e, -16.0 * r2 * e, 16.0 / re * (r2 + 4.0) * e};
}

inline NSProblem ns_manufactured_problem(double re) {
    auto decay = [re](double t) { return std::exp(-t / re); };
    auto psi = [=](double x, double y, double t) { return ns_manufactured(x, y, t, re).psi; };
    auto psi_x = [=](double x, double y, double t) { return 4.0 * x * (x * x + y * y) * decay(t); };
    auto psi_y = [=](double x, double y, double t) { return 4.0 * y * (x * x + y * y) * decay(t); };
    auto omega = [=](double x, double y, double t) { return ns_manufactured(x, y, t, re).omega; };
    auto omega_x = [=](double x, double, double t) { return -32.0 * x * decay(t); };
    auto omega_y = [=](double, double y, double t) { return -32.0 * y * decay(t); };
    NSProblem p;
    p.psi_bc = BoundarySpec::dirichlet(psi, psi_x, psi_y);
    p.omega_bc = BoundarySpec::dirichlet(omega, omega_x, omega_y);
    p.source = [=](double x, double y, double t) { return ns_manufactured(x, y, t, re).source; };
    return p;
}

inline NSState ns_manufactured_initial(const UniformGrid2D& grid, double re, double t0 = 0.0) {
    const NSProblem p = ns_manufactured_problem(re);
    return {{sample(grid, p.psi_bc.left.value, t0), sample(grid, p.psi_bc.left.dx, t0),
             sample(grid, p.psi_bc.left.dy, t0), t0},
            {sample(grid, p.omega_bc.left.value, t0), sample(grid, p.omega_bc.left.dx, t0),
             sample(grid, p.omega_bc.left.dy, t0), t0}};
}

struct NSStepResult {
    NSState state;
    IterStats stats;  // coupled passes; residual is the last psi change
};

/// One time step of the coupled psi-omega system. The vorticity equation is multiplied by Re
/// so that it fits  a w_t - lap w + c w_x + d w_y = s  with a = Re, c = Re u, d = Re v,
/// s = Re f. Each coupled pass does one vorticity correction, one Poisson correction for psi
/// and refreshes all derivatives; the loop stops on the psi change.
/// cfg.linear_tol refers to the unscaled vorticity equation.
inline NSStepResult ns_advance(const NSState& state, double re, const SchemeConfig& cfg, const NSProblem& problem) {
    const UniformGrid2D& g = state.psi.phi.grid();
    const double t0 = state.t();
    const double t1 = t0 + cfg.dt;

    SchemeConfig wcfg = cfg;
    wcfg.a = re;
    wcfg.linear_tol = cfg.linear_tol * re;
    wcfg.validate();

    auto transport_coefficients = [&](const TransportState& psi, double t) {
        CoefficientFields cf;
        cf.c.resize(g.size());
        cf.d.resize(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) {
            cf.c[n] = re * psi.phi_y[n];
            cf.d[n] = -re * psi.phi_x[n];
        }
        if (problem.source) {
            cf.s = sample(g, problem.source, t).data();
            for (double& s : cf.s) s *= re;
        }
        return cf;
    };

    CompactCorrector omega_pass =
        make_unsteady_corrector(state.omega, transport_coefficients(state.psi, t0), wcfg, problem.omega_bc);
    CompactCorrector psi_pass = make_steady_corrector(g, cfg, problem.psi_bc, t1);

    NSState it{start_iterate(state.psi, problem.psi_bc, t1), state.omega};
    if (problem.before_pass) problem.before_pass(it);
    it.omega = start_iterate(state.omega, problem.omega_bc, t1);

    CoefficientFields poisson;
    double change = 0.0;
    for (int k = 1; k <= cfg.max_inner; ++k) {
        if (problem.before_pass) problem.before_pass(it);
        omega_pass.correct(it.omega, transport_coefficients(it.psi, t1));
        poisson.s = it.omega.phi.data();
        change = psi_pass.correct(it.psi, poisson);
        if (change < cfg.inner_tol) return {std::move(it), {k, change, true}};
    }
    throw NonConvergenceError("ns_advance: coupled iteration did not converge in " + std::to_string(cfg.max_inner) +
                                  " passes at t = " + std::to_string(t1),
                              it.psi.phi.data(), cfg.max_inner, change);
}

// ---------------------------------------------------------------------------------------------
// Lid-driven cavity

/// Wall vorticity from the second-order Jensen relation
///   w_wall = -(-7 psi_w + 8 psi_1 - psi_2) / (2 D^2) + 3 psi_n / D
/// with psi_n the inward normal derivative of psi (tangential wall speed with the sign of the
/// inward normal). Interior entries and corners are zero.
inline ScalarField cavity_wall_vorticity(const ScalarField& psi, double lid_speed) {
    const UniformGrid2D& g = psi.grid();
    const int nx = g.nx, ny = g.ny;
    const double h2 = g.h * g.h, k2 = g.k * g.k;
    ScalarField w(g);
    for (int i = 1; i < nx - 1; ++i) {
        // bottom: inward normal +y, psi_y = u = 0
        w(i, 0) = -(-7.0 * psi(i, 0) + 8.0 * psi(i, 1) - psi(i, 2)) / (2.0 * k2);
        // top: inward normal -y, psi_n = -u = -lid_speed
        w(i, ny - 1) =
            -(-7.0 * psi(i, ny - 1) + 8.0 * psi(i, ny - 2) - psi(i, ny - 3)) / (2.0 * k2) - 3.0 * lid_speed / g.k;
    }
    for (int j = 1; j < ny - 1; ++j) {
        w(0, j) = -(-7.0 * psi(0, j) + 8.0 * psi(1, j) - psi(2, j)) / (2.0 * h2);
        w(nx - 1, j) = -(-7.0 * psi(nx - 1, j) + 8.0 * psi(nx - 2, j) - psi(nx - 3, j)) / (2.0 * h2);
    }
    return w;
}

/// Unit cavity with the top wall sliding at `lid_speed`. The vorticity boundary reads a shared
/// wall buffer that `before_pass` refreshes from the current psi iterate.
struct CavitySetup {
    UniformGrid2D grid;
    NSProblem problem;
    std::shared_ptr<ScalarField> wall_vorticity;
};

inline CavitySetup make_cavity(int n, double lid_speed = 1.0) {
    CavitySetup cs;
    cs.grid = make_grid(n, n, 0.0, 0.0, 1.0, 1.0);
    cs.wall_vorticity = std::make_shared<ScalarField>(cs.grid);

    const SpaceTimeFunction zero = [](double, double, double) { return 0.0; };
    const SpaceTimeFunction lid = [lid_speed](double, double, double) { return lid_speed; };
    EdgeCondition wall{EdgeKind::Dirichlet, zero, zero, zero};
    EdgeCondition top{EdgeKind::Dirichlet, zero, zero, lid};
    cs.problem.psi_bc = BoundarySpec{wall, wall, wall, top};

    EdgeCondition w{EdgeKind::Dirichlet, nodal_lookup(cs.wall_vorticity), {}, {}};
    cs.problem.omega_bc = BoundarySpec{w, w, w, w};

    auto buffer = cs.wall_vorticity;
    cs.problem.before_pass = [buffer, lid_speed](const NSState& s) {
        *buffer = cavity_wall_vorticity(s.psi.phi, lid_speed);
    };
    return cs;
}

/// Fluid at rest with the lid boundary data applied.
inline NSState cavity_initial(const CavitySetup& cs) {
    NSState s{make_transport_state(ScalarField(cs.grid), cs.problem.psi_bc, 0.0), {}};
    cs.problem.before_pass(s);
    s.omega = make_transport_state(ScalarField(cs.grid), cs.problem.omega_bc, 0.0);
    return s;
}

// ---------------------------------------------------------------------------------------------
// Doubly periodic double shear layer on [0, 2 pi]^2

inline double shear_u(double y, double rho) {
    return y <= pi ? std::tanh((y - pi / 2.0) / rho) : std::tanh((3.0 * pi / 2.0 - y) / rho);
}

inline double shear_v(double x, double sigma) { return sigma * std::sin(x); }

/// w = v_x - u_y. The two tanh branches meet with a slope jump at y = 0 (mod 2 pi) and y = pi;
/// nodes on the joins take the mean of the one-sided slopes.
inline double shear_omega(double x, double y, double rho, double sigma) {
    auto sech2 = [](double z) {
        const double c = std::cosh(z);
        return 1.0 / (c * c);
    };
    const double lower = sech2((y - pi / 2.0) / rho) / rho;          // u_y on the first branch
    const double upper = -sech2((3.0 * pi / 2.0 - y) / rho) / rho;  // u_y on the second branch
    constexpr double join_tol = 1e-9;
    const double ym = std::fmod(std::fmod(y, 2.0 * pi) + 2.0 * pi, 2.0 * pi);
    double u_y;
    if (std::abs(ym - pi) < join_tol || ym < join_tol || std::abs(ym - 2.0 * pi) < join_tol) {
        u_y = 0.0;  // one-sided slopes are +s and -s
    } else {
        u_y = ym <= pi ? lower : upper;
    }
    return sigma * std::cos(x) - u_y;
}

/// Initial psi-omega state: analytic omega, psi from the periodic Poisson problem (zero mean).
inline NSState shear_layer_init(const UniformGrid2D& grid, double rho, double sigma, const SchemeConfig& cfg) {
    const BoundarySpec bc = BoundarySpec::periodic();
    const SpaceTimeFunction omega0 = [=](double x, double y, double) { return shear_omega(x, y, rho, sigma); };
    const TransportState omega = make_transport_state(sample(grid, omega0, 0.0), bc, 0.0);
    const TransportState guess = make_transport_state(ScalarField(grid), bc, 0.0);
    const StepResult psi = solve_steady({{}, {}, omega0}, cfg, bc, guess);
    return {psi.state, omega};
}

inline NSProblem shear_layer_problem() {
    NSProblem p;
    p.psi_bc = BoundarySpec::periodic();
    p.omega_bc = BoundarySpec::periodic();
    return p;
}

// ---------------------------------------------------------------------------------------------
// Vortex identification

enum class VortexKind { Primary, Secondary, Tertiary };
enum class Region { BottomLeft, BottomRight, TopLeft, TopRight };

inline std::string to_string(VortexKind k) {
    switch (k) {
        case VortexKind::Primary: return "primary";
        case VortexKind::Secondary: return "secondary";
        case VortexKind::Tertiary: return "tertiary";
    }
    return "?";
}

inline std::string to_string(Region r) {
    switch (r) {
        case Region::BottomLeft: return "BL";
        case Region::BottomRight: return "BR";
        case Region::TopLeft: return "TL";
        case Region::TopRight: return "TR";
    }
    return "?";
}

struct Vortex {
    double value;
    double x;
    double y;
    VortexKind kind;
    Region region;
    int node_i;
    int node_j;
};

/// Local extrema of psi over interior 3x3 neighbourhoods, refined by a least-squares
/// paraboloid through the 9 points. The largest |psi| is the primary vortex; extrema of the
/// opposite sign are secondary, further extrema of the primary's sign are tertiary.
inline std::vector<Vortex> find_vortices(const ScalarField& psi) {
    const UniformGrid2D& g = psi.grid();
    std::vector<Vortex> out;
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 1; i < g.nx - 1; ++i) {
            const double c = psi(i, j);
            bool is_max = true, is_min = true;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const double v = psi(i + di, j + dj);
                    if (v >= c) is_max = false;
                    if (v <= c) is_min = false;
                }
            }
            if (!is_max && !is_min) continue;

            // Orthogonal 3x3 fit: f = a0 + a1 X + a2 Y + a3 X^2 + a4 X Y + a5 Y^2 (grid units).
            double col[3] = {0, 0, 0}, row[3] = {0, 0, 0}, sxy = 0.0, sum = 0.0;
            for (int dj = -1; dj <= 1; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const double v = psi(i + di, j + dj);
                    col[di + 1] += v / 3.0;
                    row[dj + 1] += v / 3.0;
                    sxy += di * dj * v;
                    sum += v;
                }
            }
            const double a1 = (col[2] - col[0]) / 2.0;
            const double a3 = (col[2] - 2.0 * col[1] + col[0]) / 2.0;
            const double a2 = (row[2] - row[0]) / 2.0;
            const double a5 = (row[2] - 2.0 * row[1] + row[0]) / 2.0;
            const double a4 = sxy / 4.0;
            const double a0 = sum / 9.0 - (2.0 / 3.0) * (a3 + a5);

            double X = 0.0, Y = 0.0, value = c;
            const double det = 4.0 * a3 * a5 - a4 * a4;
            if (std::abs(det) > 0.0) {
                const double sx = (-a1 * 2.0 * a5 + a2 * a4) / det;
                const double sy = (-2.0 * a3 * a2 + a4 * a1) / det;
                if (std::abs(sx) <= 1.0 && std::abs(sy) <= 1.0) {
                    X = sx;
                    Y = sy;
                    value = a0 + a1 * X + a2 * Y + a3 * X * X + a4 * X * Y + a5 * Y * Y;
                }
            }
            const double x = g.x(i) + X * g.h;
            const double y = g.y(j) + Y * g.k;
            const double xm = g.x0 + 0.5 * g.lx, ym = g.y0 + 0.5 * g.ly;
            const Region region = y < ym ? (x < xm ? Region::BottomLeft : Region::BottomRight)
                                         : (x < xm ? Region::TopLeft : Region::TopRight);
            out.push_back({value, x, y, VortexKind::Secondary, region, i, j});
        }
    }
    if (out.empty()) return out;

    auto primary = std::max_element(out.begin(), out.end(),
                                    [](const Vortex& a, const Vortex& b) { return std::abs(a.value) < std::abs(b.value); });
    primary->kind = VortexKind::Primary;
    const double sign = primary->value;
    for (Vortex& v : out) {
        if (&v == &*primary) continue;
        v.kind = (v.value * sign > 0.0) ? VortexKind::Tertiary : VortexKind::Secondary;
    }
    std::stable_sort(out.begin(), out.end(), [](const Vortex& a, const Vortex& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return std::abs(a.value) > std::abs(b.value);
    });
    return out;
}

}  // namespace cc4oc

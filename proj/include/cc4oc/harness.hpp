#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cc4oc/analysis.hpp"
#include "cc4oc/grid.hpp"
#include "cc4oc/problems.hpp"
#include "cc4oc/scheme.hpp"

namespace cc4oc {

// ---------------------------------------------------------------------------------------------
// Error norms and order estimators

/// Node-averaged norms: l1 = mean |e|, l2 = sqrt(mean e^2), linf = max |e|.
struct ErrorReport {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    int nx = 0;
    int ny = 0;
    double t = 0.0;
    std::string case_id;
};

inline ErrorReport error_norms(const ScalarField& numeric, const ScalarField& exact, std::string case_id = {},
                               double t = 0.0) {
    if (!(numeric.grid() == exact.grid())) throw std::invalid_argument("error_norms: fields live on different grids");
    double s1 = 0.0, s2 = 0.0, mx = 0.0;
    for (std::size_t n = 0; n < numeric.size(); ++n) {
        const double e = std::abs(numeric[n] - exact[n]);
        s1 += e;
        s2 += e * e;
        mx = std::max(mx, e);
    }
    const double count = static_cast<double>(numeric.size());
    return {s1 / count, std::sqrt(s2 / count), mx, numeric.grid().nx, numeric.grid().ny, t, std::move(case_id)};
}

/// log2(err_coarse / err_fine) for a halved spacing.
inline double observed_order(double err_coarse, double err_fine) {
    if (!(err_coarse > 0.0) || !(err_fine > 0.0)) throw std::invalid_argument("observed_order: errors must be positive");
    return std::log2(err_coarse / err_fine);
}

/// Order p with (h1^p - h3^p) / (h2^p - h3^p) = diff31 / diff32, by bisection on (0, 10].
inline double perceived_order(double diff31, double diff32, double h1, double h2, double h3) {
    if (!(diff31 > diff32 && diff32 > 0.0)) throw std::invalid_argument("perceived_order: need diff31 > diff32 > 0");
    if (!(h1 > h2 && h2 > h3 && h3 > 0.0)) throw std::invalid_argument("perceived_order: need h1 > h2 > h3 > 0");
    const double ratio = diff31 / diff32;
    // Work in units of h3 to keep the powers tame.
    const double r1 = h1 / h3, r2 = h2 / h3;
    auto f = [&](double p) { return (std::pow(r1, p) - 1.0) / (std::pow(r2, p) - 1.0) - ratio; };
    double lo = 1e-9, hi = 10.0;
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0) throw EstimationError("perceived_order: no root in (0, 10]");
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Injection of a fine field onto the nodes of a nested coarse grid.
inline ScalarField restrict_to_common(const ScalarField& fine, const UniformGrid2D& coarse) {
    const UniformGrid2D& f = fine.grid();
    auto stride = [](int nf, int nc) {
        if ((nf - 1) % (nc - 1) != 0) return -1;
        return (nf - 1) / (nc - 1);
    };
    const int sx = stride(f.nx, coarse.nx);
    const int sy = stride(f.ny, coarse.ny);
    const double tol = 1e-12 * std::max(1.0, std::max(std::abs(f.lx), std::abs(f.ly)));
    if (sx < 1 || sy < 1 || std::abs(f.x0 - coarse.x0) > tol || std::abs(f.y0 - coarse.y0) > tol ||
        std::abs(f.lx - coarse.lx) > tol || std::abs(f.ly - coarse.ly) > tol) {
        throw std::invalid_argument("restrict_to_common: grids are not nested");
    }
    ScalarField out(coarse);
    for (int j = 0; j < coarse.ny; ++j)
        for (int i = 0; i < coarse.nx; ++i) out(i, j) = fine(i * sx, j * sy);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Cases

enum class CaseId { Taylor, Gauss, NSManufactured, Shear, Cavity };

inline std::string to_string(CaseId id) {
    switch (id) {
        case CaseId::Taylor: return "taylor";
        case CaseId::Gauss: return "gauss";
        case CaseId::NSManufactured: return "ns-manufactured";
        case CaseId::Shear: return "shear";
        case CaseId::Cavity: return "cavity";
    }
    return "?";
}

inline CaseId parse_case(const std::string& s) {
    for (CaseId id : {CaseId::Taylor, CaseId::Gauss, CaseId::NSManufactured, CaseId::Shear, CaseId::Cavity}) {
        if (to_string(id) == s) return id;
    }
    throw std::invalid_argument("unknown case '" + s + "'");
}

struct RunConfig {
    CaseId case_id = CaseId::Taylor;
    int nx = 21;
    int ny = 21;
    double dt = 0.0025;
    double iota = 0.5;
    double t_end = 0.25;
    std::vector<double> report_times;  // empty: t_end only
    double a = 100.0;                  // gauss
    double c = 80.0;                   // gauss
    double d = 80.0;                   // gauss
    double re = 1.0;                   // Navier-Stokes cases
    double rho = pi / 15.0;            // shear layer width
    double sigma = 0.05;               // shear layer perturbation
    double inner_tol = 1e-12;
    double linear_tol = 1e-10;
    int max_inner = 100;
    std::string out;

    void validate() const {
        if (nx < 3 || ny < 3) throw std::invalid_argument("RunConfig: grids need at least 3 nodes");
        if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("RunConfig: dt and t_end must be positive");
        if (!(iota >= 0.0 && iota <= 1.0)) throw std::invalid_argument("RunConfig: iota must lie in [0, 1]");
        if (!(re > 0.0) || !(a > 0.0)) throw std::invalid_argument("RunConfig: Re and a must be positive");
    }

    SchemeConfig scheme(double a_value) const {
        SchemeConfig s;
        s.a = a_value;
        s.iota = iota;
        s.dt = dt;
        s.inner_tol = inner_tol;
        s.linear_tol = linear_tol;
        s.max_inner = max_inner;
        return s;
    }
};

/// Defaults that reproduce the benchmark tables.
inline RunConfig default_run_config(CaseId id) {
    RunConfig c;
    c.case_id = id;
    switch (id) {
        case CaseId::Taylor: c.t_end = 0.25; break;
        case CaseId::Gauss:
            c.nx = c.ny = 41;
            c.dt = 0.0025;
            c.t_end = 0.5;
            break;
        case CaseId::NSManufactured: c.t_end = 1.0; break;
        case CaseId::Shear:
            c.nx = c.ny = 65;
            c.dt = 0.005;
            c.t_end = 1.0;
            c.re = 10000.0;
            break;
        case CaseId::Cavity:
            c.nx = c.ny = 65;
            c.dt = 0.01;
            c.t_end = 1.0;
            c.re = 1000.0;
            break;
    }
    return c;
}

namespace detail {

inline long step_count(double span, double dt) {
    const double n = span / dt;
    const long steps = std::lround(n);
    if (steps < 0 || std::abs(n - static_cast<double>(steps)) > 1e-8 * std::max(1.0, n)) {
        throw std::invalid_argument("time span is not a whole number of steps");
    }
    return steps;
}

inline std::vector<double> report_schedule(const RunConfig& cfg) {
    std::vector<double> times = cfg.report_times.empty() ? std::vector<double>{cfg.t_end} : cfg.report_times;
    for (double t : times) {
        if (t > cfg.t_end + 1e-12) throw std::invalid_argument("report time beyond t_end");
        step_count(t, cfg.dt);
    }
    return times;
}

}  // namespace detail

inline TransportProblem transport_problem(const RunConfig& cfg) {
    switch (cfg.case_id) {
        case CaseId::Taylor: {
            TransportProblem p = taylor_problem(cfg.nx);
            if (cfg.ny != cfg.nx) p.grid = make_grid(cfg.nx, cfg.ny, 0.0, 0.0, 1.0, 1.0);
            return p;
        }
        case CaseId::Gauss: {
            TransportProblem p = gaussian_problem(cfg.nx, cfg.a, cfg.c, cfg.d);
            if (cfg.ny != cfg.nx) p.grid = make_grid(cfg.nx, cfg.ny, 0.0, 0.0, 2.0, 2.0);
            return p;
        }
        default: throw std::invalid_argument("transport_problem: not a linear transport case");
    }
}

struct TransportRun {
    std::vector<ErrorReport> reports;
    TransportState final_state;
    ScalarField final_exact;
    int max_inner_iterations = 0;
};

/// Marches a linear convection-diffusion case and reports errors at the scheduled times.
inline TransportRun march_transport(const RunConfig& cfg) {
    cfg.validate();
    const TransportProblem p = transport_problem(cfg);
    const SchemeConfig sc = cfg.scheme(p.config.a);
    const std::vector<double> times = detail::report_schedule(cfg);
    const long total = detail::step_count(cfg.t_end, cfg.dt);

    TransportRun run;
    TransportState st = p.initial_state(0.0);
    std::size_t next = 0;
    for (long n = 1; n <= total; ++n) {
        StepResult r = advance(st, p.coeffs, sc, p.bc);
        run.max_inner_iterations = std::max(run.max_inner_iterations, r.stats.iterations);
        st = std::move(r.state);
        st.t = n * cfg.dt;  // avoid drift from repeated addition
        while (next < times.size() && detail::step_count(times[next], cfg.dt) == n) {
            run.reports.push_back(error_norms(st.phi, sample(p.grid, p.exact, st.t), to_string(cfg.case_id), st.t));
            ++next;
        }
    }
    run.final_exact = sample(p.grid, p.exact, st.t);
    run.final_state = std::move(st);
    return run;
}

struct NSRun {
    std::vector<ErrorReport> psi_reports;
    std::vector<ErrorReport> omega_reports;
    NSState final_state;
};

inline NSRun march_ns_manufactured(const RunConfig& cfg) {
    cfg.validate();
    const UniformGrid2D g = make_grid(cfg.nx, cfg.ny, 0.0, 0.0, 1.0, 1.0);
    const NSProblem p = ns_manufactured_problem(cfg.re);
    const SchemeConfig sc = cfg.scheme(1.0);
    const std::vector<double> times = detail::report_schedule(cfg);
    const long total = detail::step_count(cfg.t_end, cfg.dt);

    NSRun run;
    NSState st = ns_manufactured_initial(g, cfg.re, 0.0);
    std::size_t next = 0;
    for (long n = 1; n <= total; ++n) {
        st = ns_advance(st, cfg.re, sc, p).state;
        st.psi.t = st.omega.t = n * cfg.dt;
        while (next < times.size() && detail::step_count(times[next], cfg.dt) == n) {
            const double t = st.t();
            run.psi_reports.push_back(error_norms(st.psi.phi, sample(g, p.psi_bc.left.value, t), "ns-manufactured:psi", t));
            run.omega_reports.push_back(
                error_norms(st.omega.phi, sample(g, p.omega_bc.left.value, t), "ns-manufactured:omega", t));
            ++next;
        }
    }
    run.final_state = std::move(st);
    return run;
}

inline UniformGrid2D shear_grid(int n) { return make_grid(n, n, 0.0, 0.0, 2.0 * pi, 2.0 * pi); }

/// Discrete mean of a periodic field over its unique nodes.
inline double periodic_mean(const ScalarField& f) {
    const UniformGrid2D& g = f.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny - 1; ++j)
        for (int i = 0; i < g.nx - 1; ++i) s += f(i, j);
    return s / (static_cast<double>(g.nx - 1) * (g.ny - 1));
}

struct ShearSnapshot {
    double t;
    NSState state;
};

/// Marches the double shear layer; snapshots are taken at the scheduled report times.
inline std::vector<ShearSnapshot> march_shear(const RunConfig& cfg,
                                              const std::function<void(const NSState&)>& on_step = {}) {
    cfg.validate();
    const UniformGrid2D g = make_grid(cfg.nx, cfg.ny, 0.0, 0.0, 2.0 * pi, 2.0 * pi);
    const SchemeConfig sc = cfg.scheme(1.0);
    const NSProblem p = shear_layer_problem();
    const std::vector<double> times = detail::report_schedule(cfg);
    const long total = detail::step_count(cfg.t_end, cfg.dt);

    std::vector<ShearSnapshot> out;
    NSState st = shear_layer_init(g, cfg.rho, cfg.sigma, sc);
    std::size_t next = 0;
    for (long n = 1; n <= total; ++n) {
        st = ns_advance(st, cfg.re, sc, p).state;
        st.psi.t = st.omega.t = n * cfg.dt;
        if (on_step) on_step(st);
        while (next < times.size() && detail::step_count(times[next], cfg.dt) == n) {
            out.push_back({st.t(), st});
            ++next;
        }
    }
    return out;
}

struct CavityRun {
    NSState state;
    long steps = 0;
    double last_change = 0.0;
    bool steady = false;
    std::vector<Vortex> vortices;
};

/// Marches the lid-driven cavity from rest until the per-step max psi change drops below
/// `steady_tol` (or `max_time` is reached).
inline CavityRun run_cavity(double re, int n, double dt, double steady_tol = 1e-10, double max_time = 1000.0,
                            const SchemeConfig* base = nullptr,
                            const std::function<void(long, double)>& progress = {}) {
    const CavitySetup cs = make_cavity(n);
    SchemeConfig sc = base ? *base : SchemeConfig{};
    sc.a = 1.0;
    sc.dt = dt;
    sc.iota = base ? base->iota : 0.5;
    CavityRun run;
    run.state = cavity_initial(cs);
    const long max_steps = std::lround(max_time / dt);
    for (long k = 1; k <= max_steps; ++k) {
        NSState next = ns_advance(run.state, re, sc, cs.problem).state;
        next.psi.t = next.omega.t = k * dt;
        double change = 0.0;
        for (std::size_t m = 0; m < next.psi.phi.size(); ++m)
            change = std::max(change, std::abs(next.psi.phi[m] - run.state.psi.phi[m]));
        run.state = std::move(next);
        run.steps = k;
        run.last_change = change;
        if (progress) progress(k, change);
        if (change < steady_tol) {
            run.steady = true;
            break;
        }
    }
    run.vortices = find_vortices(run.state.psi.phi);
    return run;
}

// ---------------------------------------------------------------------------------------------
// CSV output

namespace csv {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct ErrorRow {
    ErrorReport report;
    double dt;
    double iota;
    std::optional<double> order;
};

inline void write_errors(std::ostream& os, const std::vector<ErrorRow>& rows) {
    os << "case,nx,ny,dt,iota,t,l1,l2,linf,order\n";
    for (const ErrorRow& r : rows) {
        os << r.report.case_id << ',' << r.report.nx << ',' << r.report.ny << ',' << short_num(r.dt) << ','
           << short_num(r.iota) << ',' << short_num(r.report.t) << ',' << num(r.report.l1) << ',' << num(r.report.l2)
           << ',' << num(r.report.linf) << ',';
        if (r.order) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", *r.order);
            os << buf;
        }
        os << '\n';
    }
}

inline void write_transport_field(std::ostream& os, const ScalarField& phi, const ScalarField& exact) {
    const UniformGrid2D& g = phi.grid();
    os << "x,y,phi,exact\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            os << num(g.x(i)) << ',' << num(g.y(j)) << ',' << num(phi(i, j)) << ',' << num(exact(i, j)) << '\n';
}

inline void write_ns_field(std::ostream& os, const NSState& s) {
    const UniformGrid2D& g = s.psi.phi.grid();
    os << "x,y,psi,omega,u,v\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            os << num(g.x(i)) << ',' << num(g.y(j)) << ',' << num(s.psi.phi(i, j)) << ',' << num(s.omega.phi(i, j))
               << ',' << num(s.psi.phi_y(i, j)) << ',' << num(-s.psi.phi_x(i, j)) << '\n';
}

inline void write_vortices(std::ostream& os, double re, int n, const std::vector<Vortex>& vortices) {
    os << "re,grid,kind,region,psi,x,y\n";
    for (const Vortex& v : vortices) {
        os << short_num(re) << ',' << n << 'x' << n << ',' << to_string(v.kind) << ',' << to_string(v.region) << ','
           << num(v.value) << ',' << num(v.x) << ',' << num(v.y) << '\n';
    }
}

}  // namespace csv

/// Rows of a spatial or temporal sweep: the order column holds the L-infinity order against
/// the previous row with the same case id and time.
inline std::vector<csv::ErrorRow> with_orders(const std::vector<csv::ErrorRow>& rows) {
    std::vector<csv::ErrorRow> out = rows;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = i; j-- > 0;) {
            if (out[j].report.case_id == out[i].report.case_id && std::abs(out[j].report.t - out[i].report.t) < 1e-12) {
                if (out[j].report.linf > 0.0 && out[i].report.linf > 0.0)
                    out[i].order = observed_order(out[j].report.linf, out[i].report.linf);
                break;
            }
        }
    }
    return out;
}

/// Error rows of one run of a case with an exact solution.
inline std::vector<csv::ErrorRow> error_rows(const RunConfig& cfg) {
    std::vector<csv::ErrorRow> rows;
    if (cfg.case_id == CaseId::NSManufactured) {
        const NSRun r = march_ns_manufactured(cfg);
        for (const auto& e : r.psi_reports) rows.push_back({e, cfg.dt, cfg.iota, {}});
        for (const auto& e : r.omega_reports) rows.push_back({e, cfg.dt, cfg.iota, {}});
    } else {
        const TransportRun r = march_transport(cfg);
        for (const auto& e : r.reports) rows.push_back({e, cfg.dt, cfg.iota, {}});
    }
    return rows;
}

/// Spatial sweep with dt = h^2 (h = k) on each grid.
inline std::vector<csv::ErrorRow> convergence_sweep(RunConfig cfg, const std::vector<int>& grids, bool dt_h2 = true) {
    std::vector<csv::ErrorRow> rows;
    for (int n : grids) {
        cfg.nx = cfg.ny = n;
        if (dt_h2) {
            const double extent = cfg.case_id == CaseId::Gauss ? 2.0 : 1.0;
            const double h = extent / (n - 1);
            cfg.dt = h * h;
        }
        auto r = error_rows(cfg);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const csv::ErrorRow& a, const csv::ErrorRow& b) {
        if (a.report.case_id != b.report.case_id) return a.report.case_id < b.report.case_id;
        return a.report.t < b.report.t;
    });
    return with_orders(rows);
}

/// Temporal sweep at fixed grid.
inline std::vector<csv::ErrorRow> temporal_sweep(RunConfig cfg, const std::vector<double>& dts) {
    std::vector<csv::ErrorRow> rows;
    for (double dt : dts) {
        cfg.dt = dt;
        auto r = error_rows(cfg);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    std::stable_sort(rows.begin(), rows.end(), [](const csv::ErrorRow& a, const csv::ErrorRow& b) {
        if (a.report.case_id != b.report.case_id) return a.report.case_id < b.report.case_id;
        return a.report.t < b.report.t;
    });
    return with_orders(rows);
}

struct PerceivedOrderRow {
    std::string quantity;  // "u" or "v"
    std::string norm;      // "l1" or "l2"
    double t;
    double diff31;
    double diff32;
    double p;
};

/// Perceived order of the shear-layer velocities from three nested grids (coarse to fine),
/// with differences measured on the coarsest grid by injection.
inline std::vector<PerceivedOrderRow> shear_perceived_order(RunConfig cfg, const std::vector<int>& grids,
                                                            const std::vector<double>& dts) {
    if (grids.size() != 3 || dts.size() != 3) throw std::invalid_argument("shear_perceived_order: need three grids");
    std::vector<std::vector<ShearSnapshot>> runs;
    for (std::size_t m = 0; m < 3; ++m) {
        cfg.nx = cfg.ny = grids[m];
        cfg.dt = dts[m];
        runs.push_back(march_shear(cfg));
    }
    const UniformGrid2D coarse = shear_grid(grids[0]);
    const double h1 = 2.0 * pi / (grids[0] - 1), h2 = 2.0 * pi / (grids[1] - 1), h3 = 2.0 * pi / (grids[2] - 1);
    std::vector<PerceivedOrderRow> out;
    for (std::size_t s = 0; s < runs[0].size(); ++s) {
        const double t = runs[0][s].t;
        for (const char* q : {"u", "v"}) {
            auto field = [&](std::size_t m) {
                const NSState& st = runs[m][s].state;
                return restrict_to_common(std::string(q) == "u" ? st.u() : st.v(), coarse);
            };
            const ScalarField f1 = field(0), f2 = field(1), f3 = field(2);
            const ErrorReport d31 = error_norms(f1, f3), d32 = error_norms(f2, f3);
            out.push_back({q, "l1", t, d31.l1, d32.l1, perceived_order(d31.l1, d32.l1, h1, h2, h3)});
            out.push_back({q, "l2", t, d31.l2, d32.l2, perceived_order(d31.l2, d32.l2, h1, h2, h3)});
        }
    }
    return out;
}

namespace csv {

inline void write_perceived(std::ostream& os, const std::vector<int>& grids, const std::vector<PerceivedOrderRow>& rows) {
    os << "case,quantity,norm,t,grid1,grid2,grid3,diff31,diff32,p\n";
    for (const auto& r : rows) {
        char p[32];
        std::snprintf(p, sizeof p, "%.4f", r.p);
        os << "shear," << r.quantity << ',' << r.norm << ',' << short_num(r.t) << ',' << grids[0] << ',' << grids[1]
           << ',' << grids[2] << ',' << num(r.diff31) << ',' << num(r.diff32) << ',' << p << '\n';
    }
}

/// Non-dimensional characteristics of every scheme over kappa h in (0, pi] for each Pe (h = 1).
inline void write_wavenumber(std::ostream& os, const std::vector<double>& pes, int samples) {
    os << "pe,kappa_h,scheme,re_nd,im_nd\n";
    for (double pe : pes) {
        for (int m = 1; m <= samples; ++m) {
            const CharacteristicQuery q{pi * m / samples, 1.0, pe};
            for (SchemeId id : all_schemes) {
                const complex nd = nondimensional(characteristic(id, q), q);
                os << short_num(pe) << ',' << num(q.kappa_h) << ',' << to_string(id) << ',' << num(nd.real()) << ','
                   << num(nd.imag()) << '\n';
            }
        }
    }
}

inline void write_stability(std::ostream& os, const StabilityQuery& base, int samples) {
    os << "iota,theta_x,theta_y,A,B,abs_g\n";
    for (const StabilityQuery& q : theta_sweep(base, samples)) {
        const auto [A, B] = amplification_terms(q);
        os << short_num(q.iota) << ',' << num(q.theta_x) << ',' << num(q.theta_y) << ',' << num(A) << ',' << num(B)
           << ',' << num(std::abs(amplification_factor(q))) << '\n';
    }
}

}  // namespace csv

/// Sibling path with a suffix inserted before the extension: out.csv -> out_fields.csv.
inline std::string sibling_path(const std::string& out, const std::string& suffix) {
    const auto slash = out.find_last_of('/');
    const auto dot = out.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + suffix;
    return out.substr(0, dot) + suffix + out.substr(dot);
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    return os;
}

/// Runs one case and writes its primary table to cfg.out plus nodal fields to <out>_fields.csv.
/// Primary tables: errors (taylor, gauss, ns-manufactured), diagnostics (shear), vortices (cavity).
/// Returns a one-line summary.
inline std::string run_case(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.out.empty()) throw std::invalid_argument("run_case: output path required");
    std::ostringstream summary;
    summary << "case=" << to_string(cfg.case_id) << " nx=" << cfg.nx << " ny=" << cfg.ny;
    switch (cfg.case_id) {
        case CaseId::Taylor:
        case CaseId::Gauss: {
            const TransportRun r = march_transport(cfg);
            std::vector<csv::ErrorRow> rows;
            for (const auto& e : r.reports) rows.push_back({e, cfg.dt, cfg.iota, {}});
            auto os = open_output(cfg.out);
            csv::write_errors(os, rows);
            auto fs = open_output(sibling_path(cfg.out, "_fields"));
            csv::write_transport_field(fs, r.final_state.phi, r.final_exact);
            summary << " t=" << r.final_state.t << " linf=" << csv::num(r.reports.back().linf);
            break;
        }
        case CaseId::NSManufactured: {
            const NSRun r = march_ns_manufactured(cfg);
            std::vector<csv::ErrorRow> rows;
            for (const auto& e : r.psi_reports) rows.push_back({e, cfg.dt, cfg.iota, {}});
            for (const auto& e : r.omega_reports) rows.push_back({e, cfg.dt, cfg.iota, {}});
            auto os = open_output(cfg.out);
            csv::write_errors(os, rows);
            auto fs = open_output(sibling_path(cfg.out, "_fields"));
            csv::write_ns_field(fs, r.final_state);
            summary << " t=" << r.final_state.t() << " psi_linf=" << csv::num(r.psi_reports.back().linf)
                    << " omega_linf=" << csv::num(r.omega_reports.back().linf);
            break;
        }
        case CaseId::Shear: {
            auto os = open_output(cfg.out);
            os << "t,omega_mean,omega_max,kinetic_energy\n";
            RunConfig c = cfg;
            c.report_times.clear();
            const auto snaps = march_shear(c, [&](const NSState& s) {
                double wmax = 0.0, ke = 0.0;
                const ScalarField u = s.u(), v = s.v();
                const UniformGrid2D& g = u.grid();
                for (int j = 0; j < g.ny - 1; ++j)
                    for (int i = 0; i < g.nx - 1; ++i) {
                        wmax = std::max(wmax, std::abs(s.omega.phi(i, j)));
                        ke += 0.5 * (u(i, j) * u(i, j) + v(i, j) * v(i, j));
                    }
                ke /= static_cast<double>(g.nx - 1) * (g.ny - 1);
                os << csv::short_num(s.t()) << ',' << csv::num(periodic_mean(s.omega.phi)) << ',' << csv::num(wmax)
                   << ',' << csv::num(ke) << '\n';
            });
            auto fs = open_output(sibling_path(cfg.out, "_fields"));
            csv::write_ns_field(fs, snaps.back().state);
            summary << " t=" << snaps.back().t;
            break;
        }
        case CaseId::Cavity: {
            SchemeConfig sc = cfg.scheme(1.0);
            const CavityRun r = run_cavity(cfg.re, cfg.nx, cfg.dt, 1e-10, cfg.t_end, &sc);
            auto os = open_output(cfg.out);
            csv::write_vortices(os, cfg.re, cfg.nx, r.vortices);
            auto fs = open_output(sibling_path(cfg.out, "_fields"));
            csv::write_ns_field(fs, r.state);
            summary << " t=" << r.state.t() << " steady=" << (r.steady ? "yes" : "no")
                    << " last_change=" << csv::num(r.last_change);
            break;
        }
    }
    return summary.str();
}

}  // namespace cc4oc

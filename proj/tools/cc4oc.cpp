#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cc4oc/analysis.hpp"
#include "cc4oc/harness.hpp"

namespace {

const std::vector<std::string> case_names = {"taylor", "gauss", "ns-manufactured", "shear", "cavity"};

// Writes to PATH, or to stdout when PATH is empty.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream os = cc4oc::open_output(path);
    fn(os);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compact fourth-order convection-diffusion and psi-omega solver"};
    app.require_subcommand(1);

    // run
    std::string run_case_name = "taylor";
    cc4oc::RunConfig run_cfg;
    auto* run = app.add_subcommand("run", "March one case and write its table and fields");
    run->add_option("--case", run_case_name)->required()->check(CLI::IsMember(case_names));
    auto* run_nx = run->add_option("--nx", run_cfg.nx);
    auto* run_ny = run->add_option("--ny", run_cfg.ny);
    auto* run_dt = run->add_option("--dt", run_cfg.dt);
    run->add_option("--iota", run_cfg.iota)->check(CLI::Range(0.0, 1.0));
    auto* run_t_end = run->add_option("--t-end", run_cfg.t_end);
    auto* run_re = run->add_option("--re", run_cfg.re);
    run->add_option("--a", run_cfg.a);
    run->add_option("--c", run_cfg.c);
    run->add_option("--d", run_cfg.d);
    run->add_option("--out", run_cfg.out)->required();

    // convergence
    std::string conv_case = "taylor";
    std::vector<int> conv_grids = {11, 21, 41};
    std::string conv_dt_rule = "h2";
    double conv_dt = 0.0;
    double conv_iota = 0.5;
    double conv_t_end = 0.0;
    double conv_re = 1.0;
    std::string conv_out;
    auto* conv = app.add_subcommand("convergence", "Spatial convergence sweep");
    conv->add_option("--case", conv_case)->required()->check(CLI::IsMember({"taylor", "gauss", "ns-manufactured"}));
    conv->add_option("--grids", conv_grids)->delimiter(',');
    conv->add_option("--dt-rule", conv_dt_rule)->check(CLI::IsMember({"h2", "fixed"}));
    conv->add_option("--dt", conv_dt, "time step when --dt-rule fixed");
    conv->add_option("--iota", conv_iota)->check(CLI::Range(0.0, 1.0));
    conv->add_option("--t-end", conv_t_end);
    conv->add_option("--re", conv_re);
    conv->add_option("--out", conv_out);

    // temporal
    std::string temp_case = "taylor";
    int temp_nx = 21;
    std::vector<double> temp_dts = {0.01, 0.005, 0.0025};
    double temp_iota = 0.5;
    double temp_t_end = 0.0;
    std::string temp_out;
    auto* temp = app.add_subcommand("temporal", "Temporal convergence sweep on a fixed grid");
    temp->add_option("--case", temp_case)->required()->check(CLI::IsMember({"taylor", "gauss", "ns-manufactured"}));
    temp->add_option("--nx", temp_nx);
    temp->add_option("--dts", temp_dts)->delimiter(',');
    temp->add_option("--iota", temp_iota)->check(CLI::Range(0.0, 1.0));
    temp->add_option("--t-end", temp_t_end);
    temp->add_option("--out", temp_out);

    // wavenumber
    std::vector<double> wave_pe = {0.1, 100.0};
    int wave_samples = 200;
    std::string wave_out;
    auto* wave = app.add_subcommand("wavenumber", "Non-dimensional characteristics of the 1D schemes");
    wave->add_option("--pe", wave_pe)->delimiter(',');
    wave->add_option("--samples", wave_samples)->check(CLI::PositiveNumber);
    wave->add_option("--out", wave_out)->required();

    // stability
    cc4oc::StabilityQuery stab_base;
    int stab_samples = 64;
    std::string stab_out;
    auto* stab = app.add_subcommand("stability", "Amplification factor over a theta sweep");
    stab->add_option("--iota", stab_base.iota)->required()->check(CLI::Range(0.0, 1.0));
    stab->add_option("--samples", stab_samples)->check(CLI::PositiveNumber);
    stab->add_option("--c", stab_base.c);
    stab->add_option("--d", stab_base.d);
    stab->add_option("--hx", stab_base.h, "grid spacing in x");
    stab->add_option("--hy", stab_base.k, "grid spacing in y");
    stab->add_option("--dt", stab_base.dt);
    stab->add_option("--a", stab_base.a);
    stab->add_option("--out", stab_out)->required();

    // cavity
    int cav_re = 1000;
    double cav_max_time = 1000.0;
    std::string cav_out;
    auto* cav = app.add_subcommand("cavity", "Lid-driven cavity to steady state");
    cav->add_option("--re", cav_re)->required()->check(CLI::IsMember({1000, 3200, 5000, 7500}));
    cav->add_option("--max-time", cav_max_time);
    cav->add_option("--out", cav_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            const cc4oc::CaseId id = cc4oc::parse_case(run_case_name);
            cc4oc::RunConfig cfg = cc4oc::default_run_config(id);
            if (*run_nx) cfg.nx = run_cfg.nx;
            cfg.ny = *run_ny ? run_cfg.ny : cfg.nx;
            if (*run_dt) cfg.dt = run_cfg.dt;
            if (*run_t_end) cfg.t_end = run_cfg.t_end;
            if (*run_re) cfg.re = run_cfg.re;
            cfg.iota = run_cfg.iota;
            cfg.a = run_cfg.a;
            cfg.c = run_cfg.c;
            cfg.d = run_cfg.d;
            cfg.out = run_cfg.out;
            std::cout << cc4oc::run_case(cfg) << '\n';
        } else if (*conv) {
            cc4oc::RunConfig cfg = cc4oc::default_run_config(cc4oc::parse_case(conv_case));
            cfg.iota = conv_iota;
            cfg.re = conv_re;
            if (conv_t_end > 0.0) cfg.t_end = conv_t_end;
            const bool h2 = conv_dt_rule == "h2";
            if (!h2) {
                if (!(conv_dt > 0.0)) throw std::invalid_argument("--dt-rule fixed needs a positive --dt");
                cfg.dt = conv_dt;
            }
            const auto rows = cc4oc::convergence_sweep(cfg, conv_grids, h2);
            emit(conv_out, [&](std::ostream& os) { cc4oc::csv::write_errors(os, rows); });
        } else if (*temp) {
            cc4oc::RunConfig cfg = cc4oc::default_run_config(cc4oc::parse_case(temp_case));
            cfg.nx = cfg.ny = temp_nx;
            cfg.iota = temp_iota;
            if (temp_t_end > 0.0) cfg.t_end = temp_t_end;
            const auto rows = cc4oc::temporal_sweep(cfg, temp_dts);
            emit(temp_out, [&](std::ostream& os) { cc4oc::csv::write_errors(os, rows); });
        } else if (*wave) {
            emit(wave_out, [&](std::ostream& os) { cc4oc::csv::write_wavenumber(os, wave_pe, wave_samples); });
        } else if (*stab) {
            emit(stab_out, [&](std::ostream& os) { cc4oc::csv::write_stability(os, stab_base, stab_samples); });
        } else if (*cav) {
            const int n = cav_re == 1000 ? 65 : 129;
            cc4oc::RunConfig cfg = cc4oc::default_run_config(cc4oc::CaseId::Cavity);
            cfg.re = cav_re;
            cfg.nx = cfg.ny = n;
            cfg.dt = 0.01;
            cfg.t_end = cav_max_time;
            cfg.out = cav_out;
            std::cout << cc4oc::run_case(cfg) << '\n';
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "cc4oc: error: %s\n", e.what());
        return 1;
    }
    return 0;
}

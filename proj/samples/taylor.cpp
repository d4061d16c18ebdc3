// Marches the Taylor vortex on a 21x21 grid to t = 0.25 and prints the error norms.

#include <cstdio>

#include "cc4oc/harness.hpp"

using namespace cc4oc;

int main() {
    TransportProblem p = taylor_problem(21);
    SchemeConfig cfg = p.config;
    cfg.dt = 0.0025;
    TransportState st = p.initial_state();
    for (int n = 0; n < 100; ++n) st = advance(st, p.coeffs, cfg, p.bc).state;
    const ErrorReport e = error_norms(st.phi, sample(p.grid, p.exact, st.t));
    std::printf("t = %.4f  l1 = %.4e  l2 = %.4e  linf = %.4e\n", st.t, e.l1, e.l2, e.linf);
}

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cc4oc/errors.hpp"

namespace cc4oc {

using complex = std::complex<double>;

enum class SchemeId { Exact, CD, HOC, PDE, RHOC, CC4OC };

inline constexpr std::array<SchemeId, 6> all_schemes{SchemeId::Exact, SchemeId::CD,   SchemeId::HOC,
                                                     SchemeId::PDE,   SchemeId::RHOC, SchemeId::CC4OC};

inline std::string_view to_string(SchemeId id) {
    switch (id) {
        case SchemeId::Exact: return "Exact";
        case SchemeId::CD: return "CD";
        case SchemeId::HOC: return "HOC";
        case SchemeId::PDE: return "PDE";
        case SchemeId::RHOC: return "RHOC";
        case SchemeId::CC4OC: return "CC4OC";
    }
    return "?";
}

/// Fourier mode e^{I kappa x} on spacing h with convection speed c (cell Reynolds number Pe = c h).
struct CharacteristicQuery {
    double kappa_h = 0.0;
    double h = 1.0;
    double c = 0.0;

    double kappa() const { return kappa_h / h; }
    double peclet() const { return c * h; }
};

/// Characteristic lambda of -phi_xx + c phi_x under each 1D discretisation.
inline complex characteristic(SchemeId id, const CharacteristicQuery& q) {
    if (!(q.h > 0.0)) throw std::invalid_argument("characteristic: h must be positive");
    const double th = q.kappa_h;
    const double h = q.h;
    const double c = q.c;
    const double cs = std::cos(th);
    const double sn = std::sin(th);
    const complex I(0.0, 1.0);

    // Second-order central symbols.
    const double lambda1 = (2.0 - 2.0 * cs) / (h * h);
    const double lambda2 = sn / h;
    const double pe = q.peclet();

    switch (id) {
        case SchemeId::Exact: {
            const double kappa = q.kappa();
            return kappa * kappa + I * c * kappa;
        }
        case SchemeId::CD:
            return lambda1 + I * c * lambda2;
        case SchemeId::HOC: {
            const double alpha1 = 1.0 + pe * pe / 12.0;
            // c -> 0 limits: alpha2 -> h^2/12, alpha3 -> 0.
            const double alpha2 = c != 0.0 ? (1.0 - alpha1) / (c * c) + h * h / 6.0 : h * h / 12.0;
            const double alpha3 = c != 0.0 ? (1.0 - alpha1) / c : 0.0;
            return (alpha1 * lambda1 + I * c * lambda2) / ((1.0 - alpha2 * lambda1) + I * alpha3 * lambda2);
        }
        case SchemeId::PDE:
            // Symbol of the (1, 10, 1) second-derivative and (1, 4, 1) first-derivative stencils.
            return 12.0 * (1.0 - cs) / (h * h * (5.0 + cs)) + I * c * 3.0 * sn / (h * (2.0 + cs));
        case SchemeId::RHOC: {
            const double pe2 = pe * pe;
            const double beta1 = (1.0 - pe2 / 12.0 + pe2 * pe2 / 144.0) / (1.0 - pe2 / 6.0 + pe2 * pe2 / 36.0);
            const double beta2 = c != 0.0 ? (1.0 - beta1) / (c * c) + h * h / 6.0 : h * h / 12.0;
            const double beta3 = c != 0.0 ? (1.0 - beta1) / c : 0.0;
            return (beta1 * lambda1 + I * c * lambda2) / ((1.0 - beta2 * lambda1) + I * beta3 * lambda2);
        }
        case SchemeId::CC4OC:
            return (5.0 - 4.0 * cs - cs * cs) / (h * h * (2.0 + cs)) + I * c * 3.0 * sn / (h * (2.0 + cs));
    }
    throw std::invalid_argument("characteristic: unknown scheme");
}

/// Real part scaled by h^2, imaginary part by h/c (c = 0 leaves the imaginary part unscaled).
inline complex nondimensional(complex lambda, const CharacteristicQuery& q) {
    const double im_scale = q.c != 0.0 ? q.h / q.c : 1.0;
    return {lambda.real() * q.h * q.h, lambda.imag() * im_scale};
}

/// One von Neumann mode of the two-dimensional weighted-iota scheme with constant c, d and s = 0.
struct StabilityQuery {
    double theta_x = 0.0;
    double theta_y = 0.0;
    double h = 0.1;
    double k = 0.1;
    double c = 0.0;
    double d = 0.0;
    double a = 1.0;
    double dt = 0.01;
    double iota = 0.5;
};

struct AmplificationTerms {
    double A;  // diffusive part, never positive
    double B;  // convective (phase) part
};

inline AmplificationTerms amplification_terms(const StabilityQuery& q) {
    if (!(q.a > 0.0) || !(q.dt > 0.0)) throw std::invalid_argument("StabilityQuery: a and dt must be positive");
    auto diffusive = [](double theta, double spacing) {
        const double cs = std::cos(theta);
        return (cs * cs + 4.0 * cs - 5.0) / (spacing * spacing * (2.0 + cs));
    };
    auto convective = [](double theta, double spacing) {
        return 3.0 * std::sin(theta) / (spacing * (2.0 + std::cos(theta)));
    };
    const double r = q.dt / q.a;
    return {r * (diffusive(q.theta_x, q.h) + diffusive(q.theta_y, q.k)),
            r * (q.c * convective(q.theta_x, q.h) + q.d * convective(q.theta_y, q.k))};
}

/// G = [1 + (1 - iota)(A + IB)] / [1 - iota (A + IB)].
inline complex amplification_factor(const StabilityQuery& q) {
    const auto [A, B] = amplification_terms(q);
    const complex z(A, B);
    const complex den = 1.0 - q.iota * z;
    if (std::abs(den) < 1e-14) throw DomainError("amplification_factor: vanishing denominator");
    return (1.0 + (1.0 - q.iota) * z) / den;
}

struct StabilityScanResult {
    double max_abs_g = 0.0;
    double theta_x = 0.0;
    double theta_y = 0.0;
};

/// Supremum of |G| over a sweep of queries, each evaluated with the given iota.
inline StabilityScanResult stability_scan(double iota, const std::vector<StabilityQuery>& sweep) {
    if (sweep.empty()) throw std::invalid_argument("stability_scan: empty sweep");
    StabilityScanResult best{-1.0, 0.0, 0.0};
    for (StabilityQuery q : sweep) {
        q.iota = iota;
        const double g = std::abs(amplification_factor(q));
        if (g > best.max_abs_g) best = {g, q.theta_x, q.theta_y};
    }
    return best;
}

/// Uniform theta grid {2 pi m / n}^2 for one parameter set.
inline std::vector<StabilityQuery> theta_sweep(const StabilityQuery& base, int n) {
    std::vector<StabilityQuery> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int my = 0; my < n; ++my) {
        for (int mx = 0; mx < n; ++mx) {
            StabilityQuery q = base;
            q.theta_x = 2.0 * std::numbers::pi * mx / n;
            q.theta_y = 2.0 * std::numbers::pi * my / n;
            out.push_back(q);
        }
    }
    return out;
}

}  // namespace cc4oc

#pragma once

#include "qfe/errors.hpp"
#include "qfe/probe.hpp"

#include <cmath>
#include <stdexcept>

namespace qfe {

/// Per-shot Fisher information for the parameter pair (phi, vis).
struct FisherMatrix {
    double f_pp = 0.0;
    double f_pv = 0.0;
    double f_vv = 0.0;
};

/// Multinomial Fisher matrix of the four-setting measurement,
/// F_ab = sum_theta (dp/da)(dp/db)/p. Visibility is clamped just below 1 so
/// vanishing categories take their analytic limit instead of dividing by zero.
inline FisherMatrix fisher_matrix(const ProbeModel& probe, const PhasePoint& point) {
    if (!(point.vis >= 0.0 && point.vis <= 1.0))
        throw std::domain_error("visibility must lie in [0,1]");
    const double v = std::min(point.vis, 1.0 - 1e-12);
    const double k = probe.phase_multiplier;
    FisherMatrix f;
    for (double theta : probe.settings) {
        const double arg = 4.0 * k * theta - k * point.phi;
        const double c = std::cos(arg);
        const double s = std::sin(arg);
        const double p = 0.25 * (1.0 + v * c);
        const double dp_dphi = 0.25 * v * k * s;
        const double dp_dv = 0.25 * c;
        f.f_pp += dp_dphi * dp_dphi / p;
        f.f_pv += dp_dphi * dp_dv / p;
        f.f_vv += dp_dv * dp_dv / p;
    }
    return f;
}

/// Per-shot Fisher information for phi with the visibility treated as a
/// jointly estimated nuisance parameter: the Schur complement
/// f_pp - f_pv^2 / f_vv. When f_vv degenerates to zero there is no nuisance
/// direction and the full f_pp is returned.
inline double effective_phase_fisher(const ProbeModel& probe, const PhasePoint& point) {
    const FisherMatrix f = fisher_matrix(probe, point);
    if (f.f_vv < 1e-15) return f.f_pp;
    return f.f_pp - f.f_pv * f.f_pv / f.f_vv;
}

/// Closed-form effective Fisher information:
///   single photon  F = 2 v^2 / (4 - v^2 (1 - cos 4 phi))
///   N00N (N = 2)   F = 8 v^2 / (4 - v^2 (1 - cos 8 phi))
inline double closed_form_fisher(const ProbeModel& probe, const PhasePoint& point) {
    const double v2 = point.vis * point.vis;
    if (probe.kind == ProbeKind::Noon2)
        return 8.0 * v2 / (4.0 - v2 * (1.0 - std::cos(8.0 * point.phi)));
    return 2.0 * v2 / (4.0 - v2 * (1.0 - std::cos(4.0 * point.phi)));
}

/// Cramer-Rao variance bound 1/(n_shots * F) for the phase.
inline double crb_variance(const ProbeModel& probe, const PhasePoint& point,
                           long n_shots) {
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
    const double fisher = effective_phase_fisher(probe, point);
    if (fisher <= 0.0 || !std::isfinite(fisher))
        throw numerical_error("phase unidentifiable: effective Fisher information is zero");
    return 1.0 / (static_cast<double>(n_shots) * fisher);
}

/// Shots obtainable from a resource budget: one shot costs photons_per_shot
/// resources. A non-divisible budget rounds down (the caller may warn).
inline long shots_from_resources(const ProbeModel& probe, long n_resources) {
    if (n_resources < probe.photons_per_shot)
        throw std::invalid_argument("resource budget " + std::to_string(n_resources) +
                                    " is below the cost of one shot (" +
                                    std::to_string(probe.photons_per_shot) + ")");
    return n_resources / probe.photons_per_shot;
}

} // namespace qfe

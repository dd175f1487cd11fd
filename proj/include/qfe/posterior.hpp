#pragma once

#include "qfe/probe.hpp"
#include "qfe/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

/// Rectangular prior support for the joint (phi, vis) estimation.
struct PriorBox {
    double phi_lo = 0.0;
    double phi_hi = 0.0;
    double v_lo = 0.0;
    double v_hi = 1.0;
};

struct GridResolution {
    int n_phi = 512;
    int n_v = 256;
};

inline PriorBox default_support(const ProbeModel& probe) {
    return {0.0, probe.fundamental_period(), 0.0, 1.0};
}

/// Discretized joint posterior density over (phi, vis), row-major n_phi x n_v,
/// normalized so sum(density) * dphi * dv = 1.
struct PosteriorGrid {
    std::vector<double> phi_axis;
    std::vector<double> vis_axis;
    std::vector<double> density;

    double dphi() const { return phi_axis[1] - phi_axis[0]; }
    double dv() const { return vis_axis[1] - vis_axis[0]; }
    double at(std::size_t i, std::size_t j) const { return density[i * vis_axis.size() + j]; }

    double total_mass() const {
        double sum = 0.0;
        for (double d : density) sum += d;
        return sum * dphi() * dv();
    }
};

/// First and second posterior moments of phase and visibility.
struct PosteriorSummary {
    double phi_b = 0.0;
    double vis_b = 0.0;
    double var_phi = 0.0;
    double var_vis = 0.0;
};

/// Posterior density P_B proportional to prod_theta P_theta^{n_theta} with a
/// uniform prior on the support box. The product is accumulated in log space
/// with max-subtraction; probabilities are clamped below at 1e-300.
inline PosteriorGrid posterior_grid(const CountRecord& counts, const ProbeModel& probe,
                                    const PriorBox& support, GridResolution res = {}) {
    if (res.n_phi < 16 || res.n_v < 16)
        throw std::invalid_argument("posterior grid resolution must be at least 16x16");
    if (!(support.phi_hi > support.phi_lo) || !(support.v_hi > support.v_lo))
        throw std::invalid_argument("empty prior support");
    if (support.v_lo < 0.0 || support.v_hi > 1.0)
        throw std::invalid_argument("visibility support must lie within [0,1]");
    const double period = probe.fundamental_period();
    if (support.phi_hi - support.phi_lo > period * (1.0 + 1e-12))
        throw std::invalid_argument("phi support wider than the probe's fundamental domain (" +
                                    std::to_string(period) + " rad)");
    if (counts.counts.size() != probe.settings.size())
        throw std::invalid_argument("count record has " + std::to_string(counts.counts.size()) +
                                    " categories, probe has " +
                                    std::to_string(probe.settings.size()) + " settings");

    const std::size_t n_phi = static_cast<std::size_t>(res.n_phi);
    const std::size_t n_v = static_cast<std::size_t>(res.n_v);
    PosteriorGrid grid;
    grid.phi_axis.resize(n_phi);
    grid.vis_axis.resize(n_v);
    for (std::size_t i = 0; i < n_phi; ++i)
        grid.phi_axis[i] = support.phi_lo + (support.phi_hi - support.phi_lo) *
                                                static_cast<double>(i) / static_cast<double>(n_phi - 1);
    for (std::size_t j = 0; j < n_v; ++j)
        grid.vis_axis[j] = support.v_lo + (support.v_hi - support.v_lo) *
                                              static_cast<double>(j) / static_cast<double>(n_v - 1);

    const double k = probe.phase_multiplier;
    const std::size_t n_settings = probe.settings.size();

    // fringe cosine per (setting, phi-row); the v dependence is affine in it
    std::vector<double> cosines(n_settings * n_phi);
    for (std::size_t t = 0; t < n_settings; ++t)
        for (std::size_t i = 0; i < n_phi; ++i)
            cosines[t * n_phi + i] =
                std::cos(4.0 * k * probe.settings[t] - k * grid.phi_axis[i]);

    // impossible-data guard: a positive count whose category probability
    // vanishes over the whole support cannot be explained by the model
    for (std::size_t t = 0; t < n_settings; ++t) {
        if (counts.counts[t] <= 0) continue;
        double cmin = cosines[t * n_phi];
        double cmax = cmin;
        for (std::size_t i = 1; i < n_phi; ++i) {
            cmin = std::min(cmin, cosines[t * n_phi + i]);
            cmax = std::max(cmax, cosines[t * n_phi + i]);
        }
        double vc = support.v_lo * cmax;
        vc = std::max(vc, support.v_hi * cmax);
        vc = std::max(vc, support.v_lo * cmin);
        vc = std::max(vc, support.v_hi * cmin);
        const double pmax = 0.25 * (1.0 + vc);
        if (pmax < 1e-12)
            throw std::invalid_argument("data impossible under model: setting " + std::to_string(t) +
                                        " has counts but zero probability over the support");
    }

    std::vector<double> loglik(n_phi * n_v, 0.0);
    for (std::size_t t = 0; t < n_settings; ++t) {
        const double n_theta = static_cast<double>(counts.counts[t]);
        if (n_theta == 0.0) continue;
        for (std::size_t i = 0; i < n_phi; ++i) {
            const double c = cosines[t * n_phi + i];
            double* row = loglik.data() + i * n_v;
            for (std::size_t j = 0; j < n_v; ++j) {
                const double p = std::max(0.25 * (1.0 + grid.vis_axis[j] * c), 1e-300);
                row[j] += n_theta * std::log(p);
            }
        }
    }

    double max_ll = loglik[0];
    for (double ll : loglik) max_ll = std::max(max_ll, ll);
    grid.density.resize(n_phi * n_v);
    double sum = 0.0;
    for (std::size_t idx = 0; idx < loglik.size(); ++idx) {
        grid.density[idx] = std::exp(loglik[idx] - max_ll);
        sum += grid.density[idx];
    }
    const double norm = sum * grid.dphi() * grid.dv();
    for (double& d : grid.density) d /= norm;
    return grid;
}

/// Midpoint-rule moments of a normalized posterior grid. Variances are
/// second central moments, floored at zero against round-off.
inline PosteriorSummary posterior_moments(const PosteriorGrid& grid) {
    if (grid.phi_axis.size() < 2 || grid.vis_axis.size() < 2 ||
        grid.density.size() != grid.phi_axis.size() * grid.vis_axis.size())
        throw std::invalid_argument("malformed posterior grid");
    const double cell = grid.dphi() * grid.dv();
    if (std::abs(grid.total_mass() - 1.0) > 1e-9)
        throw std::invalid_argument("posterior grid is not normalized (mass " +
                                    std::to_string(grid.total_mass()) + ")");
    const std::size_t n_phi = grid.phi_axis.size();
    const std::size_t n_v = grid.vis_axis.size();
    PosteriorSummary s;
    for (std::size_t i = 0; i < n_phi; ++i)
        for (std::size_t j = 0; j < n_v; ++j) {
            const double w = grid.at(i, j) * cell;
            s.phi_b += w * grid.phi_axis[i];
            s.vis_b += w * grid.vis_axis[j];
        }
    for (std::size_t i = 0; i < n_phi; ++i) {
        const double dphi_c = grid.phi_axis[i] - s.phi_b;
        for (std::size_t j = 0; j < n_v; ++j) {
            const double w = grid.at(i, j) * cell;
            const double dv_c = grid.vis_axis[j] - s.vis_b;
            s.var_phi += w * dphi_c * dphi_c;
            s.var_vis += w * dv_c * dv_c;
        }
    }
    s.var_phi = std::max(s.var_phi, 0.0);
    s.var_vis = std::max(s.var_vis, 0.0);
    return s;
}

struct EstimateConfig {
    PriorBox support;
    GridResolution resolution;
    bool has_support = false; // default: probe's fundamental domain

    static EstimateConfig with_support(const PriorBox& box, GridResolution res = {}) {
        EstimateConfig cfg;
        cfg.support = box;
        cfg.resolution = res;
        cfg.has_support = true;
        return cfg;
    }
};

struct PointEstimate {
    PosteriorSummary summary;
    double boundary_mass = 0.0;
    bool boundary_warning = false;
};

/// End-to-end estimation of one fiducial point. Flags the result when more
/// than 1e-3 of the posterior mass sits in the outermost two grid rows or
/// columns, which signals a truncated (and therefore biased) posterior.
inline PointEstimate estimate_point(const CountRecord& counts, const ProbeModel& probe,
                                    const EstimateConfig& config = {}) {
    const PriorBox box = config.has_support ? config.support : default_support(probe);
    const PosteriorGrid grid = posterior_grid(counts, probe, box, config.resolution);
    PointEstimate result;
    result.summary = posterior_moments(grid);
    const std::size_t n_phi = grid.phi_axis.size();
    const std::size_t n_v = grid.vis_axis.size();
    const double cell = grid.dphi() * grid.dv();
    double edge = 0.0;
    for (std::size_t i = 0; i < n_phi; ++i)
        for (std::size_t j = 0; j < n_v; ++j)
            if (i < 2 || i >= n_phi - 2 || j < 2 || j >= n_v - 2)
                edge += grid.at(i, j) * cell;
    result.boundary_mass = edge;
    result.boundary_warning = edge > 1e-3;
    return result;
}

} // namespace qfe

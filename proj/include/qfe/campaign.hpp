#pragma once

#include "qfe/posterior.hpp"
#include "qfe/probe.hpp"
#include "qfe/response.hpp"
#include "qfe/rng.hpp"
#include "qfe/sampled_function.hpp"
#include "qfe/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

enum class CampaignMode { Full, CrbShortcut, Exact };

inline CampaignMode mode_from_name(const std::string& name) {
    if (name == "full") return CampaignMode::Full;
    if (name == "crb_shortcut" || name == "crb") return CampaignMode::CrbShortcut;
    if (name == "exact") return CampaignMode::Exact;
    throw std::invalid_argument("unknown campaign mode '" + name + "'");
}

inline const char* mode_name(CampaignMode m) {
    switch (m) {
    case CampaignMode::Full: return "full";
    case CampaignMode::CrbShortcut: return "crb_shortcut";
    case CampaignMode::Exact: return "exact";
    }
    return "?";
}

/// Everything needed to reproduce one resource-allocation sweep.
struct CampaignConfig {
    ResponseModel response = ResponseModel::default_sigmoid();
    std::vector<ProbeModel> probes = {ProbeModel::noon2(), ProbeModel::single_photon()};
    std::vector<long> n_resources_list = {800, 1900};
    int n_points_acquired = 100; // M
    std::vector<int> n_s_values = {2, 5, 10, 15, 20, 30, 40, 50, 60, 80, 100};
    std::vector<InterpolationMethod> methods = {InterpolationMethod::NearestNeighbour,
                                               InterpolationMethod::Linear};
    int reference_n_s = 500;
    long reference_n_resources = 60000;
    int mc_reps = 500;
    CampaignMode mode = CampaignMode::Full;
    ResourceConvention convention = ResourceConvention::PerShot;
    // Shift of the phase prior support; each probe estimates on
    // [phi_support_lo, phi_support_lo + period). The response range must fit.
    double phi_support_lo = 0.0;
    GridResolution resolution;
    std::uint64_t seed = 20200622;

    void validate() const {
        if (probes.empty() || n_resources_list.empty() || methods.empty() || n_s_values.empty())
            throw std::invalid_argument("campaign config: empty sweep axis");
        if (n_points_acquired < 2)
            throw std::invalid_argument("campaign config: need at least 2 acquired points");
        for (int n_s : n_s_values)
            if (n_s < 2 || n_s > n_points_acquired)
                throw std::invalid_argument("campaign config: n_s = " + std::to_string(n_s) +
                                            " exceeds acquired points (M = " +
                                            std::to_string(n_points_acquired) + ")");
        if (reference_n_s < 2)
            throw std::invalid_argument("campaign config: reference needs at least 2 points");
        if (mc_reps < 2)
            throw std::invalid_argument("campaign config: mc_reps must be >= 2");
    }
};

struct CampaignRow {
    std::string probe;
    long n_resources = 0;
    InterpolationMethod method = InterpolationMethod::NearestNeighbour;
    int n_s = 0;
    double delta2_mean = 0.0;
    double delta2_std = 0.0;
};

struct CampaignResult {
    std::vector<CampaignRow> rows;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    SampledFunction reference;
    // per-(probe, n_resources) estimated fiducial sets, in config order
    std::vector<SampledFunction> acquisitions;
};

namespace detail {

inline PriorBox campaign_support(const CampaignConfig& config, const ProbeModel& probe) {
    PriorBox box = default_support(probe);
    box.phi_lo += config.phi_support_lo;
    box.phi_hi += config.phi_support_lo;
    return box;
}

/// Bayesian-estimate each count record into a (x, phi_b, var_phi) grid.
inline SampledFunction estimate_records(const std::vector<CountRecord>& records,
                                        const ProbeModel& probe, const PriorBox& support,
                                        GridResolution res, const std::string& label) {
    SampledFunction out;
    out.label = label;
    out.xs.reserve(records.size());
    for (const CountRecord& rec : records) {
        const PointEstimate est =
            estimate_point(rec, probe, EstimateConfig::with_support(support, res));
        out.xs.push_back(rec.x);
        out.values.push_back(est.summary.phi_b);
        out.variances.push_back(est.summary.var_phi);
    }
    out.validate();
    return out;
}

inline std::uint64_t probe_stream_key(std::size_t probe_idx, std::size_t nr_idx) {
    return 0x100 + probe_idx * 64 + nr_idx;
}

} // namespace detail

/// Build the dense reference phi_ref(x): exactly (Exact), via the Gaussian
/// CRB sampler (CrbShortcut), or by full count acquisition and Bayesian
/// estimation with N00N probes at the reference resource budget (Full).
inline SampledFunction build_reference(const CampaignConfig& config, const SeededRng& rng) {
    const std::vector<double> xs =
        uniform_grid(config.response.x_min, config.response.x_max, config.reference_n_s);
    const ProbeModel probe = ProbeModel::noon2();
    SampledFunction ref;
    switch (config.mode) {
    case CampaignMode::Exact: {
        ref.label = "reference (exact)";
        ref.xs = xs;
        for (double x : xs) {
            ref.values.push_back(eval_response(config.response, x).phi);
            ref.variances.push_back(0.0);
        }
        break;
    }
    case CampaignMode::CrbShortcut: {
        ref = sample_crb_estimates(config.response, xs, probe, config.reference_n_resources,
                                   rng, config.convention);
        ref.label = "reference (crb shortcut)";
        break;
    }
    case CampaignMode::Full: {
        const std::vector<CountRecord> records =
            acquire_function(config.response, xs, probe, config.reference_n_resources, rng);
        ref = detail::estimate_records(records, probe,
                                       detail::campaign_support(config, probe),
                                       config.resolution, "reference (full)");
        break;
    }
    }
    ref.validate();
    return ref;
}

/// Monte-Carlo spread of the error functional: perturb each fiducial value
/// by a Gaussian of its own variance, re-interpolate onto the reference
/// grid, and collect delta^2 over the repetitions. Returns (mean, std) with
/// the standard deviation over repetitions (the paper's error bar).
inline std::pair<double, double> montecarlo_delta_error(const SampledFunction& points,
                                                        const SampledFunction& reference,
                                                        InterpolationMethod method, int reps,
                                                        const SeededRng& rng) {
    points.validate();
    if (!points.has_variances())
        throw std::invalid_argument("montecarlo_delta_error: points carry no variances");
    if (reps < 2) throw std::invalid_argument("montecarlo_delta_error: reps must be >= 2");
    std::vector<double> sigmas(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        sigmas[i] = std::sqrt(points.variances[i]);
    SampledFunction perturbed = points;
    std::vector<double> deltas(reps);
    for (int rep = 0; rep < reps; ++rep) {
        SeededRng stream = rng.derive(rep);
        for (std::size_t i = 0; i < points.size(); ++i)
            perturbed.values[i] = points.values[i] + stream.normal(0.0, sigmas[i]);
        deltas[rep] =
            delta_squared(interpolate(perturbed, method, reference.xs), reference);
    }
    const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
    if (*lo == *hi) return {*lo, 0.0}; // all-zero variances: exactly zero spread
    double mean = 0.0;
    for (double d : deltas) mean += d;
    mean /= reps;
    double ss = 0.0;
    for (double d : deltas) ss += (d - mean) * (d - mean);
    return {mean, std::sqrt(ss / (reps - 1))};
}

/// Run the whole sweep: acquire M fiducial points per (probe, N_r), then for
/// every (n_s, method) evaluate delta^2 against the reference with
/// Monte-Carlo uncertainties. Deterministic given config and seed. Rows are
/// streamed to `sink` (when given) before being collected, so a failure
/// mid-run still leaves the completed rows with the caller.
inline CampaignResult run_campaign(const CampaignConfig& config,
                                   const std::function<void(const CampaignRow&)>& sink = {}) {
    config.validate();
    const SeededRng root(config.seed, 0);
    CampaignResult result;
    result.seed = config.seed;
    result.reference = build_reference(config, root.derive(1));

    const std::vector<double> xs =
        uniform_grid(config.response.x_min, config.response.x_max, config.n_points_acquired);

    for (std::size_t pi = 0; pi < config.probes.size(); ++pi) {
        const ProbeModel& probe = config.probes[pi];
        for (std::size_t ri = 0; ri < config.n_resources_list.size(); ++ri) {
            const long n_resources = config.n_resources_list[ri];
            const SeededRng acq_rng = root.derive(detail::probe_stream_key(pi, ri));
            SampledFunction points;
            const std::string label =
                std::string(probe.name()) + " Nr=" + std::to_string(n_resources);
            switch (config.mode) {
            case CampaignMode::Exact: {
                points.label = label + " (exact)";
                points.xs = xs;
                for (double x : xs) {
                    points.values.push_back(eval_response(config.response, x).phi);
                    points.variances.push_back(0.0);
                }
                break;
            }
            case CampaignMode::CrbShortcut:
                points = sample_crb_estimates(config.response, xs, probe, n_resources,
                                              acq_rng, config.convention);
                points.label = label;
                break;
            case CampaignMode::Full: {
                const std::vector<CountRecord> records =
                    acquire_function(config.response, xs, probe, n_resources, acq_rng);
                points = detail::estimate_records(records, probe,
                                                  detail::campaign_support(config, probe),
                                                  config.resolution, label);
                break;
            }
            }
            result.acquisitions.push_back(points);

            for (InterpolationMethod method : config.methods) {
                for (std::size_t si = 0; si < config.n_s_values.size(); ++si) {
                    const int n_s = config.n_s_values[si];
                    const SampledFunction subset = select_subset(points, n_s);
                    const std::uint64_t key =
                        ((detail::probe_stream_key(pi, ri) * 131 +
                          (method == InterpolationMethod::Linear ? 1 : 0)) *
                         1031) + si;
                    const auto [mean, stddev] = montecarlo_delta_error(
                        subset, result.reference, method, config.mc_reps, root.derive(key));
                    CampaignRow row{probe.name(), n_resources, method, n_s, mean, stddev};
                    if (sink) sink(row);
                    result.rows.push_back(row);
                }
            }
        }
    }
    return result;
}

/// Per-curve saturation summary: the statistical floor (mean of the last two
/// delta^2 values) and the smallest n_s already compatible with it.
struct CurveSummary {
    std::string probe;
    long n_resources = 0;
    InterpolationMethod method = InterpolationMethod::NearestNeighbour;
    double floor = 0.0;
    double floor_std = 0.0;
    int n_s_star = 0;
    bool low_confidence = false;
};

inline std::vector<CurveSummary> crossover_analysis(const CampaignResult& result) {
    std::vector<CurveSummary> out;
    std::vector<std::size_t> curve; // indices into result.rows
    auto flush = [&]() {
        if (curve.empty()) return;
        if (curve.size() < 4)
            throw std::invalid_argument("crossover analysis needs at least 4 points per curve");
        const CampaignRow& last = result.rows[curve.back()];
        const CampaignRow& prev = result.rows[curve[curve.size() - 2]];
        CurveSummary s;
        s.probe = last.probe;
        s.n_resources = last.n_resources;
        s.method = last.method;
        s.floor = 0.5 * (last.delta2_mean + prev.delta2_mean);
        s.floor_std = 0.5 * std::hypot(last.delta2_std, prev.delta2_std);
        s.n_s_star = last.n_s;
        for (std::size_t idx : curve) {
            const CampaignRow& row = result.rows[idx];
            if (row.delta2_mean <= s.floor + 2.0 * std::hypot(row.delta2_std, s.floor_std)) {
                s.n_s_star = row.n_s;
                break;
            }
        }
        // flag curves that rise significantly somewhere along the sweep
        for (std::size_t i = 1; i < curve.size(); ++i) {
            const CampaignRow& a = result.rows[curve[i - 1]];
            const CampaignRow& b = result.rows[curve[i]];
            if (b.delta2_mean > a.delta2_mean + 2.0 * std::hypot(a.delta2_std, b.delta2_std))
                s.low_confidence = true;
        }
        out.push_back(s);
        curve.clear();
    };
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        if (!curve.empty()) {
            const CampaignRow& head = result.rows[curve.front()];
            const CampaignRow& row = result.rows[i];
            if (row.probe != head.probe || row.n_resources != head.n_resources ||
                row.method != head.method)
                flush();
        }
        curve.push_back(i);
    }
    flush();
    return out;
}

} // namespace qfe

#pragma once

#include "qfe/fisher.hpp"
#include "qfe/probe.hpp"
#include "qfe/response.hpp"
#include "qfe/rng.hpp"
#include "qfe/sampled_function.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

/// Detected event counts for one fiducial point, one entry per setting.
struct CountRecord {
    double x = 0.0;
    std::vector<long> counts;
    long n_shots = 0;
};

/// Accounting convention for turning a resource budget into the divisor of
/// the Cramer-Rao variance. PerShot divides by N_r / photons_per_shot (the
/// printed closed forms are per-shot quantities); PerResource divides by N_r.
enum class ResourceConvention { PerShot, PerResource };

inline ResourceConvention convention_from_name(const std::string& name) {
    if (name == "per_shot") return ResourceConvention::PerShot;
    if (name == "per_resource") return ResourceConvention::PerResource;
    throw std::invalid_argument("unknown resource convention '" + name + "'");
}

inline const char* convention_name(ResourceConvention c) {
    return c == ResourceConvention::PerShot ? "per_shot" : "per_resource";
}

inline long crb_divisor(const ProbeModel& probe, long n_resources, ResourceConvention conv) {
    return conv == ResourceConvention::PerShot ? shots_from_resources(probe, n_resources)
                                               : n_resources;
}

/// Draw n_shots categorical outcomes from the probe's outcome distribution.
inline CountRecord sample_counts(const ProbeModel& probe, const PhasePoint& point,
                                 long n_shots, SeededRng& rng, double x = 0.0) {
    if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
    const std::vector<double> probs = probability_vector(probe, point);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    CountRecord rec;
    rec.x = x;
    rec.n_shots = n_shots;
    rec.counts.assign(probs.size(), 0);
    for (long shot = 0; shot < n_shots; ++shot) {
        const double u = rng.uniform();
        std::size_t cat = 0;
        while (cat + 1 < cdf.size() && u >= cdf[cat]) ++cat;
        ++rec.counts[cat];
    }
    return rec;
}

/// Acquire one CountRecord per fiducial x, spending n_resources at each.
/// Every point draws from its own derived rng stream (keyed by point index)
/// so acquisitions parallelize without losing reproducibility.
inline std::vector<CountRecord> acquire_function(const ResponseModel& model,
                                                 const std::vector<double>& xs,
                                                 const ProbeModel& probe, long n_resources,
                                                 const SeededRng& rng) {
    if (xs.empty()) throw std::invalid_argument("no fiducial points given");
    const long shots = shots_from_resources(probe, n_resources);
    std::vector<CountRecord> records;
    records.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        SeededRng stream = rng.derive(i);
        records.push_back(sample_counts(probe, eval_response(model, xs[i]), shots, stream, xs[i]));
    }
    return records;
}

/// The paper's simulation shortcut: instead of sampling counts and running
/// the Bayesian estimator, perturb the true phase with Gaussian noise of
/// Cramer-Rao variance.
inline SampledFunction sample_crb_estimates(const ResponseModel& model,
                                            const std::vector<double>& xs,
                                            const ProbeModel& probe, long n_resources,
                                            const SeededRng& rng,
                                            ResourceConvention conv = ResourceConvention::PerShot) {
    if (xs.empty()) throw std::invalid_argument("no fiducial points given");
    const long divisor = crb_divisor(probe, n_resources, conv);
    SampledFunction out;
    out.label = std::string(probe.name()) + " crb-shortcut";
    out.xs = xs;
    out.values.reserve(xs.size());
    out.variances.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const PhasePoint truth = eval_response(model, xs[i]);
        const double var = crb_variance(probe, truth, divisor);
        SeededRng stream = rng.derive(i);
        out.values.push_back(truth.phi + stream.normal(0.0, std::sqrt(var)));
        out.variances.push_back(var);
    }
    out.validate();
    return out;
}

} // namespace qfe

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

enum class ProbeKind { SinglePhoton, Noon2 };

/// (phase, visibility) parameter pair at one signal value.
struct PhasePoint {
    double phi = 0.0;
    double vis = 1.0;
};

/// Interferometric probe: a single photon (classical benchmark) or a
/// two-photon N00N state. The fringe argument is 4*k*theta - k*phi, so the
/// N00N probe accumulates the relative phase twice as fast.
struct ProbeModel {
    ProbeKind kind = ProbeKind::SinglePhoton;
    int photons_per_shot = 1;
    int phase_multiplier = 1; // k
    std::vector<double> settings; // projection angles theta, radians

    static ProbeModel single_photon() {
        constexpr double pi = std::numbers::pi;
        return {ProbeKind::SinglePhoton, 1, 1, {0.0, pi / 8, pi / 4, 3 * pi / 8}};
    }

    static ProbeModel noon2() {
        constexpr double pi = std::numbers::pi;
        return {ProbeKind::Noon2, 2, 2, {0.0, pi / 16, pi / 8, 3 * pi / 16}};
    }

    /// Period of the likelihood in phi: 2*pi for single photons, pi for N00N.
    double fundamental_period() const {
        return 2.0 * std::numbers::pi / phase_multiplier;
    }

    const char* name() const {
        return kind == ProbeKind::Noon2 ? "noon2" : "single_photon";
    }
};

inline ProbeModel probe_from_name(const std::string& name) {
    if (name == "noon2" || name == "noon") return ProbeModel::noon2();
    if (name == "single_photon" || name == "single" || name == "classical")
        return ProbeModel::single_photon();
    throw std::invalid_argument("unknown probe '" + name +
                                "' (expected noon2 or single_photon)");
}

/// Postselected outcome probability P_theta = (1/4)(1 + v cos(4 k theta - k phi)).
inline double outcome_probability(const ProbeModel& probe, double theta,
                                  const PhasePoint& point) {
    if (!(point.vis >= 0.0 && point.vis <= 1.0))
        throw std::domain_error("visibility must lie in [0,1], got " +
                                std::to_string(point.vis));
    if (!std::isfinite(point.phi))
        throw std::domain_error("phase must be finite");
    const double k = probe.phase_multiplier;
    return 0.25 * (1.0 + point.vis * std::cos(4.0 * k * theta - k * point.phi));
}

/// Probabilities of the four-setting categorical measurement. With the
/// canonical settings (fringe arguments pi/2 apart) these sum to exactly 1.
inline std::vector<double> probability_vector(const ProbeModel& probe,
                                              const PhasePoint& point) {
    std::vector<double> probs;
    probs.reserve(probe.settings.size());
    double sum = 0.0;
    for (double theta : probe.settings) {
        const double p = outcome_probability(probe, theta, point);
        probs.push_back(p);
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument(
            "probe settings are not a normalized measurement: probabilities sum to " +
            std::to_string(sum) + " (deficit " + std::to_string(1.0 - sum) + ")");
    return probs;
}

} // namespace qfe

#include "qfe/fisher.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace qfe;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> test_visibilities() {
    std::vector<double> vs;
    for (int i = 1; i <= 9; ++i) vs.push_back(i / 10.0);
    vs.push_back(0.99);
    return vs;
}

} // namespace

TEST_CASE("hand-evaluated matrix at (noon2, pi/16, v=1)") {
    const FisherMatrix f = fisher_matrix(ProbeModel::noon2(), {pi / 16, 1.0});
    CHECK_THAT(f.f_pp, WithinAbs(4.0, 1e-8));
    CHECK_THAT(f.f_pv, WithinAbs(-2.0, 1e-8));
    CHECK_THAT(f.f_vv, WithinAbs(3.0, 1e-8));
    CHECK_THAT(effective_phase_fisher(ProbeModel::noon2(), {pi / 16, 1.0}),
               WithinAbs(8.0 / 3.0, 1e-8));
}

TEST_CASE("v = 0 kills every phase derivative") {
    for (const ProbeModel& probe : {ProbeModel::noon2(), ProbeModel::single_photon()}) {
        const FisherMatrix f = fisher_matrix(probe, {0.7, 0.0});
        CHECK_THAT(f.f_pp, WithinAbs(0.0, 1e-15));
        CHECK_THAT(f.f_pv, WithinAbs(0.0, 1e-15));
        CHECK(f.f_vv > 0.0); // visibility stays identifiable
    }
}

TEST_CASE("effective Fisher equals the printed closed forms") {
    for (const ProbeModel& probe : {ProbeModel::noon2(), ProbeModel::single_photon()}) {
        for (double phi = 0.0; phi < pi; phi += 0.01) {
            for (double v : test_visibilities()) {
                const double eff = effective_phase_fisher(probe, {phi, v});
                const double closed = closed_form_fisher(probe, {phi, v});
                REQUIRE_THAT(eff, WithinRel(closed, 1e-9));
            }
        }
    }
}

TEST_CASE("closed-form spot values") {
    CHECK_THAT(effective_phase_fisher(ProbeModel::noon2(), {pi / 8, 1.0}), WithinAbs(4.0, 1e-9));
    CHECK_THAT(effective_phase_fisher(ProbeModel::noon2(), {pi / 16, 1.0}),
               WithinAbs(8.0 / 3.0, 1e-9));
    CHECK_THAT(effective_phase_fisher(ProbeModel::single_photon(), {pi / 4, 1.0}),
               WithinAbs(1.0, 1e-9));
}

TEST_CASE("probe duality: F_q(phi, v) = 4 F_c(2 phi, v)") {
    const ProbeModel nn = ProbeModel::noon2();
    const ProbeModel sp = ProbeModel::single_photon();
    for (double phi = 0.0; phi < pi; phi += 0.01) {
        for (double v : test_visibilities()) {
            const double fq = effective_phase_fisher(nn, {phi, v});
            const double fc = effective_phase_fisher(sp, {2 * phi, v});
            REQUIRE_THAT(fq - 4.0 * fc, WithinAbs(0.0, 1e-12 * std::max(1.0, fq)));
        }
    }
}

TEST_CASE("nuisance penalty: effective Fisher never exceeds f_pp") {
    for (const ProbeModel& probe : {ProbeModel::noon2(), ProbeModel::single_photon()}) {
        for (double phi = 0.0; phi < pi; phi += 0.05) {
            for (double v : test_visibilities()) {
                const FisherMatrix f = fisher_matrix(probe, {phi, v});
                CHECK(effective_phase_fisher(probe, {phi, v}) <= f.f_pp + 1e-12);
                // PSD of the 2x2 matrix
                CHECK(f.f_pp >= 0.0);
                CHECK(f.f_vv >= 0.0);
                CHECK(f.f_pp * f.f_vv - f.f_pv * f.f_pv >= -1e-9);
            }
        }
    }
}

TEST_CASE("analytic derivatives agree with finite differences") {
    const double h = 1e-5;
    for (const ProbeModel& probe : {ProbeModel::noon2(), ProbeModel::single_photon()}) {
        for (double phi : {0.3, 0.9, 1.7}) {
            for (double v : {0.3, 0.7, 0.9}) {
                FisherMatrix fd;
                for (double theta : probe.settings) {
                    const double p = outcome_probability(probe, theta, {phi, v});
                    const double dphi = (outcome_probability(probe, theta, {phi + h, v}) -
                                         outcome_probability(probe, theta, {phi - h, v})) /
                                        (2 * h);
                    const double dv = (outcome_probability(probe, theta, {phi, v + h}) -
                                       outcome_probability(probe, theta, {phi, v - h})) /
                                      (2 * h);
                    fd.f_pp += dphi * dphi / p;
                    fd.f_pv += dphi * dv / p;
                    fd.f_vv += dv * dv / p;
                }
                const FisherMatrix f = fisher_matrix(probe, {phi, v});
                CHECK_THAT(fd.f_pp, WithinRel(f.f_pp, 1e-4));
                CHECK_THAT(fd.f_vv, WithinRel(f.f_vv, 1e-4));
                if (std::abs(f.f_pv) > 1e-6) CHECK_THAT(fd.f_pv, WithinRel(f.f_pv, 1e-4));
            }
        }
    }
}

TEST_CASE("Cramer-Rao variances") {
    CHECK_THAT(crb_variance(ProbeModel::noon2(), {pi / 8, 1.0}, 400), WithinRel(6.25e-4, 1e-9));
    CHECK_THAT(crb_variance(ProbeModel::noon2(), {pi / 8, 1.0}, 1), WithinRel(0.25, 1e-9));
    CHECK_THAT(crb_variance(ProbeModel::single_photon(), {pi / 4, 1.0}, 800),
               WithinRel(1.25e-3, 1e-9));
    CHECK_THROWS_AS(crb_variance(ProbeModel::noon2(), {0.3, 0.0}, 100), numerical_error);
    CHECK_THROWS_AS(crb_variance(ProbeModel::noon2(), {0.3, 0.9}, 0), std::invalid_argument);
}

TEST_CASE("shots from resources") {
    CHECK(shots_from_resources(ProbeModel::noon2(), 800) == 400);
    CHECK(shots_from_resources(ProbeModel::single_photon(), 1900) == 1900);
    CHECK(shots_from_resources(ProbeModel::noon2(), 3) == 1); // rounds down
    CHECK_THROWS_AS(shots_from_resources(ProbeModel::noon2(), 1), std::invalid_argument);
}

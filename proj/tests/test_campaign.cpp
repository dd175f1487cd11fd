#include "qfe/campaign.hpp"

#include "qfe/csv.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace qfe;
using Catch::Matchers::WithinAbs;

namespace {

CampaignConfig small_config() {
    CampaignConfig cfg;
    cfg.n_points_acquired = 40;
    cfg.n_s_values = {2, 5, 10, 20, 40};
    cfg.n_resources_list = {800};
    cfg.reference_n_s = 200;
    cfg.mc_reps = 50;
    cfg.mode = CampaignMode::CrbShortcut;
    cfg.phi_support_lo = -0.33;
    cfg.seed = 11;
    return cfg;
}

SampledFunction exact_samples(const ResponseModel& model, int n) {
    SampledFunction f;
    f.xs = uniform_grid(model.x_min, model.x_max, n);
    for (double x : f.xs) {
        f.values.push_back(model.phi_at(x));
        f.variances.push_back(0.0);
    }
    return f;
}

} // namespace

TEST_CASE("build_reference") {
    CampaignConfig cfg = small_config();
    SECTION("exact mode returns the response itself") {
        cfg.mode = CampaignMode::Exact;
        const auto ref = build_reference(cfg, SeededRng(1, 0));
        REQUIRE(static_cast<int>(ref.size()) == cfg.reference_n_s);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(ref.values[i] == cfg.response.phi_at(ref.xs[i]));
            CHECK(ref.variances[i] == 0.0);
        }
    }
    SECTION("crb shortcut at the reference budget is tight") {
        cfg.mode = CampaignMode::CrbShortcut;
        cfg.reference_n_resources = 60000;
        const auto ref = build_reference(cfg, SeededRng(1, 0));
        for (double var : ref.variances) CHECK(std::sqrt(var) < 0.01);
    }
    SECTION("full-mode reference grid spacing matches the paper's 0.006 V") {
        cfg.reference_n_s = 500;
        cfg.mode = CampaignMode::Exact; // spacing is mode-independent
        const auto ref = build_reference(cfg, SeededRng(1, 0));
        CHECK_THAT(ref.xs[1] - ref.xs[0], WithinAbs(3.0 / 499.0, 1e-12));
    }
}

TEST_CASE("montecarlo_delta_error") {
    const ResponseModel model = ResponseModel::default_sigmoid();
    const auto reference = exact_samples(model, 200);

    SECTION("zero variances give zero spread and the deterministic value") {
        auto points = exact_samples(model, 10);
        const auto [mean, stddev] = montecarlo_delta_error(
            points, reference, InterpolationMethod::NearestNeighbour, 50, SeededRng(1, 0));
        CHECK(stddev == 0.0);
        const auto det = delta_squared(
            interpolate(points, InterpolationMethod::NearestNeighbour, reference.xs), reference);
        CHECK(mean == det);
    }
    SECTION("missing variances are an error") {
        auto points = exact_samples(model, 10);
        points.variances.clear();
        CHECK_THROWS_WITH(montecarlo_delta_error(points, reference,
                                                 InterpolationMethod::Linear, 10, SeededRng(1, 0)),
                          Catch::Matchers::ContainsSubstring("variances"));
    }
    SECTION("reference-subset points with constant variance average to eps^2") {
        auto points = exact_samples(model, 200); // = reference grid, no interp bias
        const double eps2 = 4e-3;
        for (double& v : points.variances) v = eps2;
        const auto [mean, stddev] = montecarlo_delta_error(
            points, reference, InterpolationMethod::NearestNeighbour, 500, SeededRng(2, 0));
        CHECK_THAT(mean, WithinAbs(eps2, 0.1 * eps2));
    }
    SECTION("5-point toy instance matches the enumerated expectation") {
        // NN onto a 2-node reference uses only the endpoint samples:
        // E[delta^2] = bias + (sigma_0^2 + sigma_4^2)/2
        SampledFunction points;
        points.xs = {0.0, 0.75, 1.5, 2.25, 3.0};
        points.values = {0.1, 0.5, 1.1, 1.4, 2.2};
        points.variances = {0.01, 0.04, 0.02, 0.03, 0.05};
        SampledFunction ref2;
        ref2.xs = {0.0, 3.0};
        ref2.values = {0.0, 2.0};
        const double bias = 0.5 * (0.1 * 0.1 + 0.2 * 0.2);
        const double expected = bias + 0.5 * (0.01 + 0.05);
        const int reps = 4000;
        const auto [mean, stddev] = montecarlo_delta_error(
            points, ref2, InterpolationMethod::NearestNeighbour, reps, SeededRng(3, 0));
        CHECK_THAT(mean, WithinAbs(expected, 3.0 * stddev / std::sqrt(reps)));
    }
}

TEST_CASE("degenerate exact campaign reproduces the noise-free functional") {
    CampaignConfig cfg = small_config();
    cfg.mode = CampaignMode::Exact;
    const auto result = run_campaign(cfg);
    REQUIRE(result.rows.size() == cfg.probes.size() * cfg.n_resources_list.size() *
                                      cfg.methods.size() * cfg.n_s_values.size());
    for (const auto& row : result.rows) {
        CHECK(row.delta2_std == 0.0);
        const auto subset = select_subset(exact_samples(cfg.response, cfg.n_points_acquired),
                                          row.n_s);
        const auto ref = build_reference(cfg, SeededRng(cfg.seed, 0));
        const double expected =
            delta_squared(interpolate(subset, row.method, ref.xs), ref);
        CHECK(row.delta2_mean == expected);
    }
}

TEST_CASE("campaign is deterministic and serializes byte-identically") {
    const CampaignConfig cfg = small_config();
    const auto a = run_campaign(cfg);
    const auto b = run_campaign(cfg);
    std::ostringstream osa, osb;
    csv::write_campaign(osa, a);
    csv::write_campaign(osb, b);
    REQUIRE(osa.str() == osb.str());
    REQUIRE(!a.rows.empty());
}

TEST_CASE("campaign rows stream to the sink before completion") {
    const CampaignConfig cfg = small_config();
    std::size_t seen = 0;
    const auto result = run_campaign(cfg, [&](const CampaignRow&) { ++seen; });
    CHECK(seen == result.rows.size());
}

TEST_CASE("error decreases from sparse to full sampling") {
    CampaignConfig cfg = small_config();
    cfg.mc_reps = 200;
    const auto result = run_campaign(cfg);
    // group rows by curve; compare n_s = 5 against the densest n_s
    for (std::size_t i = 0; i + 4 < result.rows.size(); i += 5) {
        const CampaignRow& sparse = result.rows[i + 1]; // n_s = 5
        const CampaignRow& dense = result.rows[i + 4];  // n_s = 40
        REQUIRE(sparse.n_s == 5);
        REQUIRE(dense.n_s == 40);
        CHECK(dense.delta2_mean <=
              sparse.delta2_mean + 2.0 * std::hypot(sparse.delta2_std, dense.delta2_std));
    }
}

TEST_CASE("crossover analysis") {
    SECTION("synthetic a/n^2 + b curve") {
        CampaignResult result;
        const double a = 1.0, b = 0.01;
        for (int n_s : {5, 10, 20, 40, 80, 100})
            result.rows.push_back({"noon2", 800, InterpolationMethod::NearestNeighbour, n_s,
                                   a / (n_s * n_s) + b, 0.0});
        const auto summary = crossover_analysis(result);
        REQUIRE(summary.size() == 1);
        const double floor = 0.5 * (a / (80.0 * 80.0) + a / (100.0 * 100.0)) + b;
        CHECK_THAT(summary[0].floor, WithinAbs(floor, 1e-12));
        // hand enumeration: only n_s = 100 lies at or below the floor
        CHECK(summary[0].n_s_star == 100);
        CHECK_FALSE(summary[0].low_confidence);
    }
    SECTION("monotone noise-free curve saturates only at the end") {
        CampaignResult result;
        for (int n_s : {5, 10, 20, 40})
            result.rows.push_back({"noon2", 800, InterpolationMethod::Linear, n_s,
                                   1.0 / (n_s * n_s), 0.0});
        const auto summary = crossover_analysis(result);
        CHECK(summary[0].n_s_star == 40);
    }
    SECTION("flat curve saturates immediately") {
        CampaignResult result;
        for (int n_s : {5, 10, 20, 40})
            result.rows.push_back({"noon2", 800, InterpolationMethod::Linear, n_s, 0.5, 0.01});
        const auto summary = crossover_analysis(result);
        CHECK(summary[0].n_s_star == 5);
    }
    SECTION("noisy non-monotone curve is flagged") {
        CampaignResult result;
        const double d[] = {0.5, 0.1, 0.4, 0.12, 0.1, 0.11};
        int i = 0;
        for (int n_s : {5, 10, 20, 40, 80, 100})
            result.rows.push_back({"noon2", 800, InterpolationMethod::Linear, n_s, d[i++], 0.01});
        const auto summary = crossover_analysis(result);
        CHECK(summary[0].low_confidence);
    }
    SECTION("short curves are rejected") {
        CampaignResult result;
        for (int n_s : {5, 10, 20})
            result.rows.push_back({"noon2", 800, InterpolationMethod::Linear, n_s, 0.5, 0.0});
        CHECK_THROWS_AS(crossover_analysis(result), std::invalid_argument);
    }
}

TEST_CASE("campaign config validation") {
    CampaignConfig cfg = small_config();
    cfg.n_s_values = {2, 50};
    CHECK_THROWS_WITH(run_campaign(cfg), Catch::Matchers::ContainsSubstring("exceeds"));
    cfg = small_config();
    cfg.mc_reps = 1;
    CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);
}

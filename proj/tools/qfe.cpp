// Command-line front end for the response-function estimation pipeline.
//
// Subcommands:
//   fisher       per-shot Fisher information at one (phi, vis) point
//   simulate     synthetic count acquisition from a config
//   estimate     Bayesian point estimation of a counts CSV
//   interpolate  delta^2 of an interpolated point set against a reference
//   campaign     full resource-allocation sweep (campaign.csv + provenance)
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numerical failure.

#include "qfe/qfe.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

qfe::RunConfig load_config(const std::string& path) {
    return qfe::parse_config(path.empty() ? std::string{} : qfe::csv::slurp(path));
}

int cmd_fisher(const std::string& probe_name, double phi, double vis) {
    const qfe::ProbeModel probe = qfe::probe_from_name(probe_name);
    const qfe::PhasePoint point{phi, vis};
    const qfe::FisherMatrix m = qfe::fisher_matrix(probe, point);
    const double eff = qfe::effective_phase_fisher(probe, point);
    std::cout << "probe: " << probe.name() << "\n"
              << "effective_phase_fisher: " << qfe::csv::fmt(eff) << "\n"
              << "closed_form:            " << qfe::csv::fmt(qfe::closed_form_fisher(probe, point))
              << "\n"
              << "fisher_matrix:\n"
              << "  [ " << qfe::csv::fmt(m.f_pp) << "  " << qfe::csv::fmt(m.f_pv) << " ]\n"
              << "  [ " << qfe::csv::fmt(m.f_pv) << "  " << qfe::csv::fmt(m.f_vv) << " ]\n";
    return 0;
}

int cmd_simulate(const std::string& config_path) {
    const qfe::RunConfig cfg = load_config(config_path);
    const qfe::CampaignConfig& c = cfg.campaign;
    fs::create_directories(cfg.output_dir);
    const std::vector<double> xs =
        qfe::uniform_grid(c.response.x_min, c.response.x_max, c.n_points_acquired);
    const qfe::SeededRng root(c.seed, 0);
    std::size_t stream = 0;
    for (const qfe::ProbeModel& probe : c.probes) {
        for (long n_resources : c.n_resources_list) {
            if (n_resources % probe.photons_per_shot != 0)
                std::cerr << "warning: " << n_resources << " resources are not divisible by "
                          << probe.photons_per_shot << " photons per shot; rounding down\n";
            const auto records =
                qfe::acquire_function(c.response, xs, probe, n_resources, root.derive(stream++));
            const std::string path = cfg.output_dir + "/counts_" + probe.name() + "_" +
                                     std::to_string(n_resources) + ".csv";
            qfe::csv::to_file(path, [&](std::ostream& os) {
                os << "# probe = " << probe.name() << ", n_resources = " << n_resources
                   << ", seed = " << c.seed << "\n";
                qfe::csv::write_count_records(os, records);
            });
            std::cout << path << "\n";
        }
    }
    return 0;
}

int cmd_estimate(const std::string& in_path, const std::string& out_path,
                 const std::string& probe_name, double support_lo, bool has_support_lo,
                 int n_phi, int n_v) {
    const qfe::ProbeModel probe = qfe::probe_from_name(probe_name);
    std::istringstream in(qfe::csv::slurp(in_path));
    const auto records = qfe::csv::read_count_records(in);
    qfe::EstimateConfig ecfg;
    ecfg.resolution = {n_phi, n_v};
    if (has_support_lo) {
        qfe::PriorBox box = qfe::default_support(probe);
        box.phi_lo += support_lo;
        box.phi_hi += support_lo;
        ecfg = qfe::EstimateConfig::with_support(box, ecfg.resolution);
    }
    std::vector<qfe::csv::EstimatedPoint> points;
    for (const auto& rec : records) {
        const qfe::PointEstimate est = qfe::estimate_point(rec, probe, ecfg);
        if (est.boundary_warning)
            std::cerr << "warning: x = " << rec.x << ": " << est.boundary_mass
                      << " of the posterior mass lies at the support boundary\n";
        points.push_back({rec.x, est.summary, rec.n_shots});
    }
    auto write = [&](std::ostream& os) { qfe::csv::write_estimates(os, points); };
    if (out_path.empty())
        write(std::cout);
    else
        qfe::csv::to_file(out_path, write);
    return 0;
}

int cmd_interpolate(const std::string& points_path, const std::string& reference_path,
                    const std::string& method_name) {
    const qfe::InterpolationMethod method = qfe::method_from_name(method_name);
    std::istringstream pin(qfe::csv::slurp(points_path));
    std::istringstream rin(qfe::csv::slurp(reference_path));
    const qfe::SampledFunction points = qfe::csv::read_sampled_function(pin, points_path);
    const qfe::SampledFunction reference = qfe::csv::read_sampled_function(rin, reference_path);
    const qfe::SampledFunction estimate = qfe::interpolate(points, method, reference.xs);
    std::cout << qfe::csv::fmt(qfe::delta_squared(estimate, reference)) << "\n";
    return 0;
}

int cmd_campaign(const std::string& config_path, const std::string& out_dir_flag) {
    qfe::RunConfig cfg = load_config(config_path);
    if (!out_dir_flag.empty()) cfg.output_dir = out_dir_flag;
    fs::create_directories(cfg.output_dir);

    const std::string campaign_path = cfg.output_dir + "/campaign.csv";
    std::ofstream campaign_csv(campaign_path);
    if (!campaign_csv)
        throw std::invalid_argument("cannot write file: " + campaign_path);
    qfe::csv::write_campaign_header(campaign_csv);

    qfe::CampaignResult result;
    try {
        result = qfe::run_campaign(cfg.campaign, [&](const qfe::CampaignRow& row) {
            qfe::csv::write_campaign_row(campaign_csv, row);
            campaign_csv.flush();
        });
    } catch (...) {
        campaign_csv << "# FAILED: campaign aborted, rows above are partial\n";
        throw;
    }

    qfe::csv::to_file(cfg.output_dir + "/reference.csv", [&](std::ostream& os) {
        qfe::csv::write_sampled_function(os, result.reference);
    });
    std::size_t acq = 0;
    for (const qfe::ProbeModel& probe : cfg.campaign.probes)
        for (long n_resources : cfg.campaign.n_resources_list) {
            const std::string path = cfg.output_dir + "/points_" + std::string(probe.name()) +
                                     "_" + std::to_string(n_resources) + ".csv";
            qfe::csv::to_file(path, [&](std::ostream& os) {
                qfe::csv::write_sampled_function(os, result.acquisitions.at(acq));
            });
            ++acq;
        }
    qfe::csv::to_file(cfg.output_dir + "/provenance.txt", [&](std::ostream& os) {
        os << "config_hash = " << qfe::config_hash(cfg) << "\n"
           << "seed = " << cfg.campaign.seed << "\n"
           << "format_version = 1\n"
           << "# canonical configuration:\n"
           << qfe::serialize_config(cfg);
    });
    std::cout << campaign_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-enhanced response function estimation pipeline"};
    app.require_subcommand(1);

    std::string probe_name = "noon2";
    double phi = 0.0, vis = 1.0;
    auto* fisher = app.add_subcommand("fisher", "Per-shot Fisher information at one point");
    fisher->add_option("--probe", probe_name, "noon2 or single_photon");
    fisher->add_option("--phi", phi, "phase, radians")->required();
    fisher->add_option("--vis", vis, "visibility in [0,1]");

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "Generate synthetic count acquisitions");
    simulate->add_option("--config", config_path, "run configuration file");

    std::string in_path, out_path, est_probe = "noon2";
    double support_lo = 0.0;
    int n_phi = 512, n_v = 256;
    auto* estimate = app.add_subcommand("estimate", "Bayesian estimation of a counts CSV");
    estimate->add_option("--in", in_path, "counts CSV")->required();
    estimate->add_option("--out", out_path, "output CSV (default stdout)");
    estimate->add_option("--probe", est_probe, "noon2 or single_photon");
    auto* support_opt =
        estimate->add_option("--support-lo", support_lo, "lower edge of the phase prior");
    estimate->add_option("--n-phi", n_phi, "phase grid resolution");
    estimate->add_option("--n-v", n_v, "visibility grid resolution");

    std::string points_path, reference_path, interp_method = "linear";
    auto* interpolate = app.add_subcommand("interpolate", "delta^2 of points vs reference");
    interpolate->add_option("--points", points_path, "fiducial points CSV")->required();
    interpolate->add_option("--reference", reference_path, "reference CSV")->required();
    interpolate->add_option("--method", interp_method, "nearest or linear");

    std::string camp_config, camp_out;
    auto* campaign = app.add_subcommand("campaign", "Run the full resource-allocation sweep");
    campaign->add_option("--config", camp_config, "run configuration file");
    campaign->add_option("--out", camp_out, "output directory (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (fisher->parsed()) return cmd_fisher(probe_name, phi, vis);
        if (simulate->parsed()) return cmd_simulate(config_path);
        if (estimate->parsed())
            return cmd_estimate(in_path, out_path, est_probe, support_lo,
                                support_opt->count() > 0, n_phi, n_v);
        if (interpolate->parsed())
            return cmd_interpolate(points_path, reference_path, interp_method);
        if (campaign->parsed()) return cmd_campaign(camp_config, camp_out);
    } catch (const qfe::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

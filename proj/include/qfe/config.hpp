#pragma once

#include "qfe/campaign.hpp"
#include "qfe/csv.hpp"

#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

/// Parsed `key = value` run configuration mapping onto CampaignConfig.
struct RunConfig {
    CampaignConfig campaign;
    std::string output_dir = ".";
    // retained for provenance / lossless round-trips
    std::string response_name = "sigmoid";
    std::vector<double> response_params = {2.5, 3.0, 1.5};
    std::string response_file;
};

namespace detail {

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::size_t line, const std::string& key, const std::string& what)
        : std::invalid_argument("config line " + std::to_string(line) +
                                (key.empty() ? "" : " (key '" + key + "')") + ": " + what) {}
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    return out;
}

inline double to_double(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, key, "expected a number, got '" + v + "'");
    }
}

inline long to_long(const std::string& v, std::size_t line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError(line, key, "expected an integer, got '" + v + "'");
    }
}

} // namespace detail

/// Parse a `key = value` configuration (one pair per line, `#` comments).
/// Unknown and duplicated keys are rejected; every CampaignConfig invariant
/// is checked here with a line-numbered diagnostic.
inline RunConfig parse_config(const std::string& text) {
    using detail::ConfigError;
    RunConfig cfg;
    if (const char* env = std::getenv("QFE_OUTPUT_DIR"); env && *env) cfg.output_dir = env;

    std::map<std::string, std::pair<std::string, std::size_t>> kv; // key -> (value, line)
    {
        std::istringstream ss(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(ss, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(line_no, "", "expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
            if (kv.count(key))
                throw ConfigError(line_no, key, "duplicate key (first defined at line " +
                                                    std::to_string(kv[key].second) + ")");
            kv[key] = {value, line_no};
        }
    }

    static const std::set<std::string> known = {
        "response", "response_params", "response_file", "visibility", "domain",
        "probes", "n_resources", "n_points", "n_s_values", "methods",
        "reference_n_s", "reference_n_resources", "mc_reps", "mode",
        "resource_convention", "seed", "phi_support_lo", "n_phi", "n_v", "output_dir"};
    for (const auto& [key, value] : kv)
        if (!known.count(key))
            throw ConfigError(value.second, key, "unknown key");

    auto get = [&](const std::string& key) -> const std::pair<std::string, std::size_t>* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    CampaignConfig& c = cfg.campaign;

    double vis = 0.95;
    if (auto* e = get("visibility")) {
        vis = detail::to_double(e->first, e->second, "visibility");
        if (vis < 0.0 || vis > 1.0)
            throw ConfigError(e->second, "visibility", "must lie in [0,1]");
    }
    if (auto* e = get("response")) cfg.response_name = e->first;
    if (auto* e = get("response_params")) {
        cfg.response_params.clear();
        for (const auto& tok : detail::split_list(e->first))
            cfg.response_params.push_back(detail::to_double(tok, e->second, "response_params"));
    }
    if (auto* e = get("response_file")) cfg.response_file = e->first;

    {
        const std::size_t line = get("response") ? get("response")->second : 0;
        const auto& p = cfg.response_params;
        auto need = [&](std::size_t n) {
            if (p.size() != n)
                throw ConfigError(line, "response_params",
                                  "response '" + cfg.response_name + "' takes " +
                                      std::to_string(n) + " parameters, got " +
                                      std::to_string(p.size()));
        };
        if (cfg.response_name == "sigmoid") {
            if (!get("response_params"))
                c.response = ResponseModel::default_sigmoid(vis);
            else {
                need(3);
                c.response = ResponseModel::sigmoid(p[0], p[1], p[2], vis);
            }
        } else if (cfg.response_name == "linear") {
            need(2);
            c.response = ResponseModel::linear(p[0], p[1], vis);
        } else if (cfg.response_name == "sinusoid") {
            need(3);
            c.response = ResponseModel::sinusoid(p[0], p[1], p[2], vis);
        } else if (cfg.response_name == "sampled") {
            if (cfg.response_file.empty())
                throw ConfigError(line, "response_file", "required for response = sampled");
            std::istringstream file(csv::slurp(cfg.response_file));
            SampledFunction grid = csv::read_sampled_function(file, cfg.response_file);
            if (grid.has_variances()) {
                // third column of a response file is v(x), not a variance
                SampledFunction vis_grid;
                vis_grid.xs = grid.xs;
                vis_grid.values = grid.variances;
                grid.variances.clear();
                c.response = ResponseModel::sampled(std::move(grid), vis);
                c.response.set_visibility_table(std::move(vis_grid));
            } else {
                c.response = ResponseModel::sampled(std::move(grid), vis);
            }
        } else {
            throw ConfigError(line, "response",
                              "unknown response '" + cfg.response_name +
                                  "' (linear, sigmoid, sinusoid, sampled)");
        }
    }

    if (auto* e = get("domain")) {
        const auto toks = detail::split_list(e->first);
        if (toks.size() != 2)
            throw ConfigError(e->second, "domain", "expected 'x_min,x_max'");
        const double lo = detail::to_double(toks[0], e->second, "domain");
        const double hi = detail::to_double(toks[1], e->second, "domain");
        if (!(hi > lo)) throw ConfigError(e->second, "domain", "x_max must exceed x_min");
        if (c.response.kind == ResponseModel::Kind::Sampled &&
            (lo < c.response.x_min || hi > c.response.x_max))
            throw ConfigError(e->second, "domain", "outside the sampled response grid");
        c.response.x_min = lo;
        c.response.x_max = hi;
    }

    if (auto* e = get("probes")) {
        c.probes.clear();
        for (const auto& tok : detail::split_list(e->first)) {
            try {
                c.probes.push_back(probe_from_name(tok));
            } catch (const std::exception& ex) {
                throw ConfigError(e->second, "probes", ex.what());
            }
        }
        if (c.probes.empty()) throw ConfigError(e->second, "probes", "empty list");
    }
    if (auto* e = get("n_resources")) {
        c.n_resources_list.clear();
        for (const auto& tok : detail::split_list(e->first)) {
            const long n = detail::to_long(tok, e->second, "n_resources");
            if (n < 1) throw ConfigError(e->second, "n_resources", "must be positive");
            c.n_resources_list.push_back(n);
        }
        if (c.n_resources_list.empty()) throw ConfigError(e->second, "n_resources", "empty list");
    }
    if (auto* e = get("n_points")) {
        const long n = detail::to_long(e->first, e->second, "n_points");
        if (n < 2) throw ConfigError(e->second, "n_points", "need at least 2 points");
        c.n_points_acquired = static_cast<int>(n);
    }
    if (auto* e = get("n_s_values")) {
        c.n_s_values.clear();
        for (const auto& tok : detail::split_list(e->first))
            c.n_s_values.push_back(static_cast<int>(detail::to_long(tok, e->second, "n_s_values")));
        if (c.n_s_values.empty()) throw ConfigError(e->second, "n_s_values", "empty list");
    }
    {
        // constraint checked whether n_s_values came from the file or defaults
        const std::size_t line = get("n_s_values") ? get("n_s_values")->second : 0;
        for (int n_s : c.n_s_values) {
            if (n_s < 2) throw ConfigError(line, "n_s_values", "n_s must be >= 2");
            if (n_s > c.n_points_acquired)
                throw ConfigError(line, "n_s_values",
                                  "n_s exceeds acquired points (n_s = " + std::to_string(n_s) +
                                      ", M = " + std::to_string(c.n_points_acquired) + ")");
        }
    }
    if (auto* e = get("methods")) {
        c.methods.clear();
        for (const auto& tok : detail::split_list(e->first)) {
            try {
                c.methods.push_back(method_from_name(tok));
            } catch (const std::exception& ex) {
                throw ConfigError(e->second, "methods", ex.what());
            }
        }
        if (c.methods.empty()) throw ConfigError(e->second, "methods", "empty list");
    }
    if (auto* e = get("reference_n_s")) {
        const long n = detail::to_long(e->first, e->second, "reference_n_s");
        if (n < 2) throw ConfigError(e->second, "reference_n_s", "need at least 2 points");
        c.reference_n_s = static_cast<int>(n);
    }
    if (auto* e = get("reference_n_resources")) {
        const long n = detail::to_long(e->first, e->second, "reference_n_resources");
        if (n < 1) throw ConfigError(e->second, "reference_n_resources", "must be positive");
        c.reference_n_resources = n;
    }
    if (auto* e = get("mc_reps")) {
        const long n = detail::to_long(e->first, e->second, "mc_reps");
        if (n < 2) throw ConfigError(e->second, "mc_reps", "must be >= 2");
        c.mc_reps = static_cast<int>(n);
    }
    if (auto* e = get("mode")) {
        try {
            c.mode = mode_from_name(e->first);
        } catch (const std::exception& ex) {
            throw ConfigError(e->second, "mode", ex.what());
        }
    }
    if (auto* e = get("resource_convention")) {
        try {
            c.convention = convention_from_name(e->first);
        } catch (const std::exception& ex) {
            throw ConfigError(e->second, "resource_convention", ex.what());
        }
    }
    if (auto* e = get("seed"))
        c.seed = static_cast<std::uint64_t>(detail::to_long(e->first, e->second, "seed"));
    if (auto* e = get("phi_support_lo"))
        c.phi_support_lo = detail::to_double(e->first, e->second, "phi_support_lo");
    if (auto* e = get("n_phi")) {
        const long n = detail::to_long(e->first, e->second, "n_phi");
        if (n < 16) throw ConfigError(e->second, "n_phi", "must be >= 16");
        c.resolution.n_phi = static_cast<int>(n);
    }
    if (auto* e = get("n_v")) {
        const long n = detail::to_long(e->first, e->second, "n_v");
        if (n < 16) throw ConfigError(e->second, "n_v", "must be >= 16");
        c.resolution.n_v = static_cast<int>(n);
    }
    if (auto* e = get("output_dir")) cfg.output_dir = e->first;

    c.validate();
    return cfg;
}

/// Canonical serialization: parse_config(serialize_config(cfg)) reproduces
/// the configuration exactly. Also the input to the provenance hash.
inline std::string serialize_config(const RunConfig& cfg) {
    const CampaignConfig& c = cfg.campaign;
    std::ostringstream os;
    auto list = [&](auto begin, auto end, auto fmt_one) {
        std::string s;
        for (auto it = begin; it != end; ++it) {
            if (!s.empty()) s += ",";
            s += fmt_one(*it);
        }
        return s;
    };
    os << "response = " << cfg.response_name << "\n";
    if (cfg.response_name == "sampled")
        os << "response_file = " << cfg.response_file << "\n";
    else
        os << "response_params = "
           << list(cfg.response_params.begin(), cfg.response_params.end(),
                   [](double d) { return csv::fmt(d); })
           << "\n";
    os << "visibility = " << csv::fmt(c.response.vis_const) << "\n";
    os << "domain = " << csv::fmt(c.response.x_min) << "," << csv::fmt(c.response.x_max) << "\n";
    os << "probes = "
       << list(c.probes.begin(), c.probes.end(),
               [](const ProbeModel& p) { return std::string(p.name()); })
       << "\n";
    os << "n_resources = "
       << list(c.n_resources_list.begin(), c.n_resources_list.end(),
               [](long n) { return std::to_string(n); })
       << "\n";
    os << "n_points = " << c.n_points_acquired << "\n";
    os << "n_s_values = "
       << list(c.n_s_values.begin(), c.n_s_values.end(),
               [](int n) { return std::to_string(n); })
       << "\n";
    os << "methods = "
       << list(c.methods.begin(), c.methods.end(),
               [](InterpolationMethod m) { return std::string(method_name(m)); })
       << "\n";
    os << "reference_n_s = " << c.reference_n_s << "\n";
    os << "reference_n_resources = " << c.reference_n_resources << "\n";
    os << "mc_reps = " << c.mc_reps << "\n";
    os << "mode = " << mode_name(c.mode) << "\n";
    os << "resource_convention = " << convention_name(c.convention) << "\n";
    os << "seed = " << c.seed << "\n";
    os << "phi_support_lo = " << csv::fmt(c.phi_support_lo) << "\n";
    os << "n_phi = " << c.resolution.n_phi << "\n";
    os << "n_v = " << c.resolution.n_v << "\n";
    os << "output_dir = " << cfg.output_dir << "\n";
    return os.str();
}

/// FNV-1a hash of the canonical serialization, recorded in provenance files.
inline std::uint64_t config_hash(const RunConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace qfe

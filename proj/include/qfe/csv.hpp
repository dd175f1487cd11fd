#pragma once

#include "qfe/campaign.hpp"
#include "qfe/sampled_function.hpp"
#include "qfe/simulate.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {
namespace csv {

/// Doubles are serialized with 17 significant digits so every written value
/// re-parses to the identical bit pattern.
inline std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& tok, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": cannot parse number '" + tok + "'");
    }
}

inline long parse_long(const std::string& tok, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": cannot parse integer '" + tok + "'");
    }
}

} // namespace detail

// ---- SampledFunction: `x,phi[,var_phi]` (also reads `x,phi[,vis]` grids) ----

inline void write_sampled_function(std::ostream& os, const SampledFunction& f,
                                   const std::string& value_col = "phi",
                                   const std::string& var_col = "var_phi") {
    os << "x," << value_col;
    if (f.has_variances()) os << "," << var_col;
    os << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        os << fmt(f.xs[i]) << "," << fmt(f.values[i]);
        if (f.has_variances()) os << "," << fmt(f.variances[i]);
        os << "\n";
    }
}

inline SampledFunction read_sampled_function(std::istream& is, const std::string& label = "") {
    SampledFunction f;
    f.label = label;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    bool third_col = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto toks = detail::split(line);
        if (!header_seen) {
            if (toks.size() < 2 || toks[0] != "x")
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected header starting with 'x,'");
            third_col = toks.size() >= 3;
            header_seen = true;
            continue;
        }
        if (toks.size() < 2u + (third_col ? 1u : 0u))
            throw std::invalid_argument("line " + std::to_string(line_no) + ": too few columns");
        f.xs.push_back(detail::parse_double(toks[0], line_no));
        f.values.push_back(detail::parse_double(toks[1], line_no));
        if (third_col) f.variances.push_back(detail::parse_double(toks[2], line_no));
    }
    if (!header_seen) throw std::invalid_argument("empty CSV: no header found");
    f.validate();
    return f;
}

// ---- count records: `x,n_shots,n0,n1,...` ----

inline void write_count_records(std::ostream& os, const std::vector<CountRecord>& records) {
    if (records.empty()) throw std::invalid_argument("no count records to write");
    os << "x,n_shots";
    for (std::size_t t = 0; t < records.front().counts.size(); ++t) os << ",n" << t;
    os << "\n";
    for (const CountRecord& rec : records) {
        os << fmt(rec.x) << "," << rec.n_shots;
        for (long n : rec.counts) os << "," << n;
        os << "\n";
    }
}

inline std::vector<CountRecord> read_count_records(std::istream& is) {
    std::vector<CountRecord> records;
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_cat = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto toks = detail::split(line);
        if (!header_seen) {
            if (toks.size() < 3 || toks[0] != "x" || toks[1] != "n_shots")
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected header 'x,n_shots,n0,...'");
            n_cat = toks.size() - 2;
            header_seen = true;
            continue;
        }
        if (toks.size() != n_cat + 2)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": wrong column count");
        CountRecord rec;
        rec.x = detail::parse_double(toks[0], line_no);
        rec.n_shots = detail::parse_long(toks[1], line_no);
        long sum = 0;
        for (std::size_t t = 0; t < n_cat; ++t) {
            const long n = detail::parse_long(toks[t + 2], line_no);
            if (n < 0)
                throw std::invalid_argument("line " + std::to_string(line_no) + ": negative count");
            rec.counts.push_back(n);
            sum += n;
        }
        if (sum != rec.n_shots)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": counts sum to " + std::to_string(sum) +
                                        ", n_shots is " + std::to_string(rec.n_shots));
        records.push_back(rec);
    }
    if (!header_seen) throw std::invalid_argument("empty CSV: no header found");
    return records;
}

// ---- estimated points: `x,phi_b,var_phi,vis_b,var_vis,n_shots` ----

struct EstimatedPoint {
    double x;
    PosteriorSummary summary;
    long n_shots;
};

inline void write_estimates(std::ostream& os, const std::vector<EstimatedPoint>& points) {
    os << "x,phi_b,var_phi,vis_b,var_vis,n_shots\n";
    for (const auto& p : points)
        os << fmt(p.x) << "," << fmt(p.summary.phi_b) << "," << fmt(p.summary.var_phi) << ","
           << fmt(p.summary.vis_b) << "," << fmt(p.summary.var_vis) << "," << p.n_shots << "\n";
}

// ---- campaign results: `probe,n_resources,method,n_s,delta2,delta2_err` ----

inline void write_campaign_header(std::ostream& os) {
    os << "probe,n_resources,method,n_s,delta2,delta2_err\n";
}

inline void write_campaign_row(std::ostream& os, const CampaignRow& row) {
    os << row.probe << "," << row.n_resources << "," << method_name(row.method) << ","
       << row.n_s << "," << fmt(row.delta2_mean) << "," << fmt(row.delta2_std) << "\n";
}

inline void write_campaign(std::ostream& os, const CampaignResult& result) {
    write_campaign_header(os);
    for (const CampaignRow& row : result.rows) write_campaign_row(os, row);
}

inline CampaignResult read_campaign(std::istream& is) {
    CampaignResult result;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto toks = detail::split(line);
        if (!header_seen) {
            if (toks.size() != 6 || toks[0] != "probe")
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected campaign header");
            header_seen = true;
            continue;
        }
        if (toks.size() != 6)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": wrong column count");
        CampaignRow row;
        row.probe = toks[0];
        row.n_resources = detail::parse_long(toks[1], line_no);
        row.method = method_from_name(toks[2]);
        row.n_s = static_cast<int>(detail::parse_long(toks[3], line_no));
        row.delta2_mean = detail::parse_double(toks[4], line_no);
        row.delta2_std = detail::parse_double(toks[5], line_no);
        result.rows.push_back(row);
    }
    if (!header_seen) throw std::invalid_argument("empty CSV: no header found");
    return result;
}

// ---- file helpers ----

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <typename WriteFn>
inline void to_file(const std::string& path, WriteFn&& write) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    write(out);
}

} // namespace csv
} // namespace qfe

#pragma once

#include "qfe/probe.hpp"
#include "qfe/sampled_function.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

/// Synthetic or ingested stand-in for the device response phi(x), with an
/// attached visibility model (constant by default, v = 0.95).
struct ResponseModel {
    enum class Kind { Linear, Sigmoid, Sinusoid, Sampled };

    Kind kind = Kind::Sigmoid;
    // Analytic coefficients:
    //   Linear   phi = a x + b
    //   Sigmoid  phi = a / (1 + exp(-b (x - c)))
    //   Sinusoid phi = a sin(b x + c)
    double a = 2.5, b = 3.0, c = 1.5;
    SampledFunction table;      // Sampled: ingested (x, phi) grid
    SampledFunction vis_table;  // optional v(x) grid
    double vis_const = 0.95;
    double x_min = 0.0, x_max = 3.0;

    static ResponseModel linear(double slope, double intercept = 0.0,
                                double vis = 0.95) {
        ResponseModel m;
        m.kind = Kind::Linear;
        m.a = slope;
        m.b = intercept;
        m.c = 0.0;
        m.vis_const = vis;
        return m;
    }

    static ResponseModel sigmoid(double amplitude, double steepness, double midpoint,
                                 double vis = 0.95) {
        ResponseModel m;
        m.kind = Kind::Sigmoid;
        m.a = amplitude;
        m.b = steepness;
        m.c = midpoint;
        m.vis_const = vis;
        return m;
    }

    static ResponseModel sinusoid(double amplitude, double frequency, double offset,
                                  double vis = 0.95) {
        ResponseModel m;
        m.kind = Kind::Sinusoid;
        m.a = amplitude;
        m.b = frequency;
        m.c = offset;
        m.vis_const = vis;
        return m;
    }

    /// Smooth monotone default used throughout the campaign tests:
    /// phi(x) = 2.5 / (1 + exp(-3 (x - 1.5))) on [0, 3] V.
    static ResponseModel default_sigmoid(double vis = 0.95) {
        return sigmoid(2.5, 3.0, 1.5, vis);
    }

    static ResponseModel sampled(SampledFunction phi_grid, double vis = 0.95) {
        phi_grid.validate();
        if (phi_grid.size() < 2)
            throw std::invalid_argument("sampled response needs at least 2 grid points");
        ResponseModel m;
        m.kind = Kind::Sampled;
        m.table = std::move(phi_grid);
        m.vis_const = vis;
        m.x_min = m.table.xs.front();
        m.x_max = m.table.xs.back();
        return m;
    }

    void set_visibility_table(SampledFunction vis_grid) {
        vis_grid.validate();
        for (double v : vis_grid.values)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("visibility table value outside [0,1]");
        vis_table = std::move(vis_grid);
    }

    double phi_at(double x) const {
        switch (kind) {
        case Kind::Linear: return a * x + b;
        case Kind::Sigmoid: return a / (1.0 + std::exp(-b * (x - c)));
        case Kind::Sinusoid: return a * std::sin(b * x + c);
        case Kind::Sampled:
            return detail::interp_one(table, InterpolationMethod::Linear, x);
        }
        return 0.0;
    }

    double vis_at(double x) const {
        if (vis_table.size() >= 2)
            return detail::interp_one(vis_table, InterpolationMethod::Linear, x);
        return vis_const;
    }
};

/// Evaluate the response model, returning the (phi, vis) pair at x.
inline PhasePoint eval_response(const ResponseModel& model, double x) {
    if (x < model.x_min || x > model.x_max)
        throw std::out_of_range("x = " + std::to_string(x) + " outside response domain [" +
                                std::to_string(model.x_min) + ", " +
                                std::to_string(model.x_max) + "]");
    return {model.phi_at(x), model.vis_at(x)};
}

/// Uniform fiducial grid over the model domain, endpoints included.
inline std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 2) throw std::invalid_argument("grid needs at least 2 points");
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return xs;
}

} // namespace qfe

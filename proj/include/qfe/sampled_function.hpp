#pragma once

#include "qfe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfe {

/// Ordered grid of signal values with phase estimates and optional
/// per-point variances.
struct SampledFunction {
    std::vector<double> xs;        // volts, strictly increasing
    std::vector<double> values;    // radians
    std::vector<double> variances; // radians^2, empty when absent
    std::string label;

    bool has_variances() const { return !variances.empty(); }
    std::size_t size() const { return xs.size(); }

    void validate() const {
        if (xs.size() != values.size())
            throw std::invalid_argument("sampled function: xs/values length mismatch");
        if (!variances.empty() && variances.size() != xs.size())
            throw std::invalid_argument("sampled function: variances length mismatch");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1]))
                throw std::invalid_argument("sampled function: xs not strictly increasing at index " +
                                            std::to_string(i));
        for (double var : variances)
            if (!(var >= 0.0))
                throw std::invalid_argument("sampled function: negative variance");
    }
};

enum class InterpolationMethod { NearestNeighbour, Linear };

inline const char* method_name(InterpolationMethod m) {
    return m == InterpolationMethod::NearestNeighbour ? "nearest" : "linear";
}

inline InterpolationMethod method_from_name(const std::string& name) {
    if (name == "nearest" || name == "nn" || name == "nearest_neighbour")
        return InterpolationMethod::NearestNeighbour;
    if (name == "linear") return InterpolationMethod::Linear;
    throw std::invalid_argument("unknown interpolation method '" + name + "'");
}

/// Pick n_s of the M acquired points, uniformly by index with both endpoints
/// included: j_m = round(m (M-1)/(n_s-1)), round half up. Collisions are
/// deduplicated.
inline SampledFunction select_subset(const SampledFunction& points, int n_s) {
    points.validate();
    const std::size_t m_total = points.size();
    if (n_s < 2) throw std::invalid_argument("subset needs at least 2 points");
    if (static_cast<std::size_t>(n_s) > m_total)
        throw std::invalid_argument("subset size " + std::to_string(n_s) +
                                    " exceeds acquired points (" + std::to_string(m_total) + ")");
    SampledFunction out;
    out.label = points.label;
    std::size_t prev = static_cast<std::size_t>(-1);
    for (int m = 0; m < n_s; ++m) {
        const double pos = static_cast<double>(m) * static_cast<double>(m_total - 1) /
                           static_cast<double>(n_s - 1);
        const std::size_t j = static_cast<std::size_t>(std::floor(pos + 0.5));
        if (j == prev) continue;
        prev = j;
        out.xs.push_back(points.xs[j]);
        out.values.push_back(points.values[j]);
        if (points.has_variances()) out.variances.push_back(points.variances[j]);
    }
    return out;
}

namespace detail {

inline double interp_one(const SampledFunction& f, InterpolationMethod method, double x) {
    const auto& xs = f.xs;
    if (x < xs.front() || x > xs.back())
        throw std::out_of_range("interpolation target x = " + std::to_string(x) +
                                " outside sampled range [" + std::to_string(xs.front()) +
                                ", " + std::to_string(xs.back()) + "]");
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return f.values.front();
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi < xs.size() && xs[hi] == x) return f.values[hi];
    const std::size_t lo = hi - 1;
    if (method == InterpolationMethod::NearestNeighbour) {
        // exact midpoint goes to the lower-x sample
        return (x - xs[lo] > xs[hi] - x) ? f.values[hi] : f.values[lo];
    }
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return f.values[lo] + t * (f.values[hi] - f.values[lo]);
}

} // namespace detail

/// Evaluate the interpolant of `subset` at each target x. Extrapolation is
/// refused. Both methods are exact at the sample locations.
inline SampledFunction interpolate(const SampledFunction& subset, InterpolationMethod method,
                                   const std::vector<double>& target_xs) {
    subset.validate();
    if (subset.size() < 2)
        throw std::invalid_argument("interpolation needs at least 2 samples");
    SampledFunction out;
    out.label = subset.label;
    out.xs = target_xs;
    out.values.reserve(target_xs.size());
    for (double x : target_xs)
        out.values.push_back(detail::interp_one(subset, method, x));
    return out;
}

/// Discrete error functional: delta^2 = (1/L) sum_i |est(x_i) - ref(x_i)|^2 w_i dx
/// over the reference grid, with endpoint weights halved so the sum is the
/// trapezoid-rule approximation of the continuous functional.
inline double delta_squared(const SampledFunction& estimate, const SampledFunction& reference) {
    estimate.validate();
    reference.validate();
    const std::size_t n = reference.size();
    if (n < 2) throw std::invalid_argument("reference needs at least 2 nodes");
    if (estimate.size() != n)
        throw std::invalid_argument("estimate/reference grid size mismatch (" +
                                    std::to_string(estimate.size()) + " vs " +
                                    std::to_string(n) + ")");
    const double span = reference.xs.back() - reference.xs.front();
    const double dx = span / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(estimate.xs[i] - reference.xs[i]) > 1e-9 * std::max(1.0, std::abs(reference.xs[i])))
            throw std::invalid_argument("estimate not sampled on the reference grid: first mismatch at x = " +
                                        std::to_string(estimate.xs[i]) + " (expected " +
                                        std::to_string(reference.xs[i]) + ")");
        const double step = (i + 1 < n) ? reference.xs[i + 1] - reference.xs[i] : dx;
        if (i + 1 < n && std::abs(step - dx) > 1e-9 * std::max(1.0, std::abs(dx)))
            throw std::invalid_argument("reference grid is not uniform near x = " +
                                        std::to_string(reference.xs[i]));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = estimate.values[i] - reference.values[i];
        const double weight = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        sum += weight * diff * diff;
    }
    return sum * dx / span;
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole,
                               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0)
        throw numerical_error("adaptive quadrature did not converge on [" +
                              std::to_string(a) + ", " + std::to_string(b) + "]");
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

/// Continuous error functional (1/L) integral |ref(x) - interp(x)|^2 dx over
/// the subset's span, by adaptive Simpson quadrature split at the
/// interpolant's breakpoints. Used as the synthetic-model oracle for the
/// discrete functional.
inline double continuous_delta(const std::function<double(double)>& reference,
                               const SampledFunction& subset, InterpolationMethod method,
                               double rel_tol = 1e-8) {
    subset.validate();
    if (subset.size() < 2)
        throw std::invalid_argument("interpolation needs at least 2 samples");
    const double lo = subset.xs.front();
    const double hi = subset.xs.back();
    const double span = hi - lo;
    auto integrand = [&](double x) {
        const double diff = reference(x) - detail::interp_one(subset, method, x);
        return diff * diff;
    };
    // breakpoints: sample nodes, plus cell midpoints for nearest-neighbour
    std::vector<double> breaks;
    breaks.push_back(lo);
    for (std::size_t i = 1; i < subset.size(); ++i) {
        if (method == InterpolationMethod::NearestNeighbour)
            breaks.push_back(0.5 * (subset.xs[i - 1] + subset.xs[i]));
        breaks.push_back(subset.xs[i]);
    }
    // rough scale for the absolute tolerance handed to the quadrature
    double scale = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        scale = std::max(scale, std::abs(subset.values[i]));
    const double abs_tol = std::max(rel_tol * scale * scale * span, 1e-300);
    double total = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i)
        total += detail::integrate(integrand, breaks[i - 1], breaks[i],
                                   abs_tol * (breaks[i] - breaks[i - 1]) / span);
    return total / span;
}

} // namespace qfe

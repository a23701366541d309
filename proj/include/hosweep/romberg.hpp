// Romberg integration on [0,1] for piecewise-smooth face integrands.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hosweep {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RombergResult {
    double value = 0.0;
    bool converged = false;
    int levels = 0;
};

namespace detail {

inline double inf_norm(double v) { return std::abs(v); }
inline double inf_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

inline bool has_nan(double v) { return std::isnan(v); }
inline bool has_nan(const Eigen::VectorXd& v) { return v.hasNaN(); }

}  // namespace detail

/// Romberg tableau over successive trapezoid halvings of [0,1]. The value
/// type V is double or Eigen::VectorXd (all components integrated with a
/// shared sampling). Converged when two successive diagonal entries agree
/// to `tol` in the max norm; otherwise the best estimate is returned with
/// `converged = false`. No convergence is declared before `min_levels`
/// halvings: coarse dyadic samples can alias integrands that vanish on the
/// endpoints and midpoint (nodal basis products do exactly that).
template <typename V, typename F>
RombergResult romberg(F&& f, double tol, int max_levels, V& out, int min_levels = 3) {
    if (tol <= 0.0) throw std::invalid_argument("romberg: tol must be positive");
    if (max_levels < 1) throw std::invalid_argument("romberg: need max_levels >= 1");
    min_levels = std::min(min_levels, max_levels);

    std::vector<V> diag;  // current tableau row, diag[j] = R(k, j)
    diag.reserve(max_levels + 1);

    V f0 = f(0.0);
    V f1 = f(1.0);
    if (detail::has_nan(f0) || detail::has_nan(f1))
        throw IntegrationError("romberg: integrand returned NaN");
    V trap = 0.5 * (f0 + f1);
    diag.push_back(trap);

    RombergResult res;
    res.levels = 0;
    long n = 1;  // panel count at the previous level
    for (int k = 1; k <= max_levels; ++k) {
        // Refine the trapezoid sum with the new midpoints.
        const double h = 1.0 / (2.0 * n);
        V sum = f(h);
        if (detail::has_nan(sum)) throw IntegrationError("romberg: integrand returned NaN");
        for (long i = 1; i < n; ++i) {
            V fi = f((2 * i + 1) * h);
            if (detail::has_nan(fi)) throw IntegrationError("romberg: integrand returned NaN");
            sum += fi;
        }
        trap = 0.5 * trap + h * sum;
        n *= 2;

        // Richardson extrapolation along the new row.
        std::vector<V> row;
        row.reserve(k + 1);
        row.push_back(trap);
        double pow4 = 1.0;
        for (int j = 1; j <= k; ++j) {
            pow4 *= 4.0;
            row.push_back(row[j - 1] + (row[j - 1] - diag[j - 1]) / (pow4 - 1.0));
        }
        const double diff = detail::inf_norm(V(row[k] - diag[k - 1]));
        diag = std::move(row);
        res.levels = k;
        if (diff < tol && k >= min_levels) {
            res.converged = true;
            break;
        }
    }
    out = diag.back();
    return res;
}

/// Scalar Romberg integral of f over [0,1].
inline RombergResult romberg_face_integral(const std::function<double(double)>& f,
                                           double tol = 1e-10, int max_levels = 16,
                                           int min_levels = 3) {
    double value = 0.0;
    RombergResult res = romberg<double>(f, tol, max_levels, value, min_levels);
    res.value = value;
    return res;
}

}  // namespace hosweep

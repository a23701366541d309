// Gauss-Legendre and Gauss-Lobatto rules on [0,1], plus tensor-product
// volume quadrature on the reference square.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hosweep {

/// One-dimensional quadrature rule on [0,1].
struct Quad1D {
    std::vector<double> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

namespace detail {

// Legendre P_n and P_n' at x via the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) { p = p0; dp = 0.0; return; }
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
inline Quad1D gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
    Quad1D rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            detail::legendre(n, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        detail::legendre(n, x, p, dp);
        // Map from [-1,1]; roots come out in descending order.
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

/// n Gauss-Lobatto points on [0,1] (endpoints included), n >= 2.
inline std::vector<double> gauss_lobatto(int n) {
    if (n < 2) throw std::invalid_argument("gauss_lobatto: need n >= 2");
    std::vector<double> pts(n);
    pts.front() = 0.0;
    pts.back() = 1.0;
    const int m = n - 1;  // interior points are roots of P_m'
    for (int i = 1; i < m; ++i) {
        double x = std::cos(M_PI * i / m);
        for (int it = 0; it < 100; ++it) {
            double p, dp;
            detail::legendre(m, x, p, dp);
            // P_m'' from the Legendre ODE: (1-x^2) P'' = 2x P' - m(m+1) P.
            const double ddp = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x);
            const double dx = dp / ddp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        pts[m - i] = 0.5 * (x + 1.0);
    }
    return pts;
}

/// Tensor-product quadrature on the reference square [0,1]^2.
struct VolumeQuadrature {
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }

    /// Tensor Gauss-Legendre with `per_axis` points in each direction;
    /// exact for Q_{2*per_axis-1}.
    static VolumeQuadrature tensor_gauss(int per_axis) {
        const Quad1D line = gauss_legendre(per_axis);
        VolumeQuadrature q;
        q.points.reserve(per_axis * per_axis);
        q.weights.reserve(per_axis * per_axis);
        for (int j = 0; j < per_axis; ++j)
            for (int i = 0; i < per_axis; ++i) {
                q.points.emplace_back(line.points[i], line.points[j]);
                q.weights.push_back(line.weights[i] * line.weights[j]);
            }
        return q;
    }
};

}  // namespace hosweep

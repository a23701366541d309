// Manufactured-solution verification: closed-form angular flux, the
// matching volumetric source, scalar-flux L2 error and observed-order fits.
#pragma once

#include "hosweep/assembly.hpp"
#include "hosweep/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hosweep {

/// Imposed angular flux psi_d(x, y) = S(x, y) * (mu_d^2 + eta_d) with
/// S = 0.5 (1 + x^2 + y^2) + cos(3x + 3y/2), together with the volumetric
/// source that makes it solve the transport equation for the given
/// quadrature and constant cross sections. The scattering sum uses the
/// discrete quadrature, so the manufactured problem is consistent with the
/// solver's angular discretization. The angular factor is negative for some
/// ordinates; a signed flux is fine for verification purposes.
class ManufacturedSolution {
  public:
    ManufacturedSolution(AngularQuadrature quad, double sigma_t, double sigma_s)
        : quad_(std::move(quad)), sigma_t_(sigma_t), sigma_s_(sigma_s) {
        angular_sum_ = 0.0;
        for (const Ordinate& o : quad_.ordinates)
            angular_sum_ += o.weight * angular_factor(o.mu(), o.eta());
    }

    static double spatial(const Vec2& x) {
        return 0.5 * (1.0 + x[0] * x[0] + x[1] * x[1]) + std::cos(3.0 * x[0] + 1.5 * x[1]);
    }

    static Vec2 spatial_gradient(const Vec2& x) {
        const double s = std::sin(3.0 * x[0] + 1.5 * x[1]);
        return {x[0] - 3.0 * s, x[1] - 1.5 * s};
    }

    static double angular_factor(double mu, double eta) { return mu * mu + eta; }

    double sigma_t() const { return sigma_t_; }
    double sigma_s() const { return sigma_s_; }
    const AngularQuadrature& quadrature() const { return quad_; }

    /// Discrete angular moment sum over the quadrature weights.
    double scattering_sum_factor() const { return angular_sum_; }

    double psi(int d, const Vec2& x) const {
        return psi_direction(x, quad_[d].mu(), quad_[d].eta());
    }

    double psi_direction(const Vec2& x, double mu, double eta) const {
        return spatial(x) * angular_factor(mu, eta);
    }

    /// Volumetric source for ordinate d: streaming + collision of psi_d
    /// minus the discrete isotropic scattering source.
    double source(int d, const Vec2& x) const {
        return source_direction(x, quad_[d].mu(), quad_[d].eta());
    }

    double source_direction(const Vec2& x, double mu, double eta) const {
        const double factor = angular_factor(mu, eta);
        const Vec2 grad = spatial_gradient(x);
        const double streaming = factor * (mu * grad[0] + eta * grad[1]);
        const double collision = sigma_t_ * factor * spatial(x);
        const double scattering =
            sigma_s_ / (4.0 * M_PI) * angular_sum_ * spatial(x);
        return streaming + collision - scattering;
    }

    /// Exact scalar flux under the discrete quadrature.
    double phi(const Vec2& x) const { return angular_sum_ * spatial(x); }

    SourceSpec source_spec() const {
        SourceSpec s;
        s.volumetric = [this](int d, const Vec2& x) { return source(d, x); };
        s.incident = [this](int d, const Vec2& x) { return psi(d, x); };
        return s;
    }

  private:
    AngularQuadrature quad_;
    double sigma_t_;
    double sigma_s_;
    double angular_sum_;
};

/// L2 error of the discrete scalar flux against a reference field, with an
/// elevated quadrature (2s+3 points per axis).
inline double l2_error(const HighOrderMesh& mesh, const ReferenceBasis& basis,
                       const Eigen::VectorXd& phi,
                       const std::function<double(const Vec2&)>& reference,
                       int points_per_axis = 0) {
    const int npa = points_per_axis > 0 ? points_per_axis : 2 * basis.order() + 3;
    const VolumeQuadrature quad = VolumeQuadrature::tensor_gauss(npa);
    const int nu = basis.size();
    double total = 0.0;
    Eigen::VectorXd values;
    Eigen::Matrix2d J;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto dofs = phi.segment(e * nu, nu);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2& xi = quad.points[q];
            const double det = mesh.jacobian(e, xi, J);
            basis.values(xi, values);
            const double diff = values.dot(dofs) - reference(mesh.map_point(e, xi));
            total += quad.weights[q] * det * diff * diff;
        }
    }
    return std::sqrt(total);
}

struct OrderFit {
    double order = 0.0;
    bool monotone = true;  // false warns that errors did not decrease cleanly
};

/// Least-squares slope of log(E) against log(h) over >= 3 refinement levels.
inline OrderFit convergence_order(const std::vector<std::pair<double, double>>& levels) {
    if (levels.size() < 3)
        throw std::invalid_argument("convergence_order: need at least 3 refinement levels");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    OrderFit fit;
    for (size_t i = 0; i < levels.size(); ++i) {
        const double x = std::log(levels[i].first), y = std::log(levels[i].second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        if (i > 0 && !(levels[i].second < levels[i - 1].second) &&
            levels[i].first < levels[i - 1].first)
            fit.monotone = false;
    }
    const double n = static_cast<double>(levels.size());
    fit.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

struct MmsResult {
    double error = 0.0;
    int unknowns = 0;  // scalar-flux DOF count
    double h = 0.0;    // characteristic spacing, 1/sqrt(elements)
    int iterations = 0;
    bool converged = false;
};

/// Assemble, solve and measure one manufactured-solution case.
inline MmsResult run_mms(const HighOrderMesh& mesh, int dg_order,
                         const AngularQuadrature& quad, double sigma_t, double sigma_s,
                         SolveOptions solve_opts = {}, AssemblyOptions asm_opts = {}) {
    ReferenceBasis basis(dg_order);
    ManufacturedSolution mms(quad, sigma_t, sigma_s);
    TransportOperator op =
        assemble_transport_operator(mesh, basis, quad,
                                    CrossSectionField::constant(sigma_t, sigma_s),
                                    mms.source_spec(), asm_opts);
    SweepSolver solver(op, solve_opts);
    auto [state, history] = solver.source_iteration();
    MmsResult res;
    res.error = l2_error(mesh, basis, state.phi, [&](const Vec2& x) { return mms.phi(x); });
    res.unknowns = op.num_dofs();
    res.h = 1.0 / std::sqrt(static_cast<double>(mesh.num_elements()));
    res.iterations = history.iterations();
    res.converged = history.converged;
    return res;
}

}  // namespace hosweep

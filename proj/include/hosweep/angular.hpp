// Level-symmetric S_N angular quadrature sets.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hosweep {

/// One discrete ordinate: weight and unit direction (mu, eta, xi) with
/// cosines taken against the x, y, z axes.
struct Ordinate {
    double weight;
    std::array<double, 3> dir;

    double mu() const { return dir[0]; }
    double eta() const { return dir[1]; }
    double xi() const { return dir[2]; }
};

/// Quadrature set {(w_d, Omega_d)}; weights are positive and sum to 4*pi.
struct AngularQuadrature {
    std::vector<Ordinate> ordinates;
    int size() const { return static_cast<int>(ordinates.size()); }
    const Ordinate& operator[](int d) const { return ordinates[d]; }

    double weight_sum() const {
        double s = 0.0;
        for (const auto& o : ordinates) s += o.weight;
        return s;
    }
};

/// Full 3D level-symmetric set: S_2 has 8 ordinates, S_4 has 24.
/// Direction cosines follow the standard level-symmetric recursion with
/// mu_1 = sqrt(1/3) for S_2 and mu_1 = 0.3500212 for S_4; all ordinates
/// carry equal weight.
inline AngularQuadrature level_symmetric(int n) {
    const double four_pi = 4.0 * M_PI;
    AngularQuadrature quad;
    if (n == 2) {
        const double a = std::sqrt(3.0) / 3.0;
        const double w = four_pi / 8.0;
        for (int sz = -1; sz <= 1; sz += 2)
            for (int sy = -1; sy <= 1; sy += 2)
                for (int sx = -1; sx <= 1; sx += 2)
                    quad.ordinates.push_back({w, {sx * a, sy * a, sz * a}});
    } else if (n == 4) {
        const double mu1 = 0.3500212;
        const double mu2 = std::sqrt(mu1 * mu1 + (1.0 - 3.0 * mu1 * mu1));
        const double w = four_pi / 24.0;
        // Three permutations of (mu1, mu1, mu2) per octant.
        const std::array<std::array<double, 3>, 3> base = {{
            {mu2, mu1, mu1}, {mu1, mu2, mu1}, {mu1, mu1, mu2}}};
        for (int sz = -1; sz <= 1; sz += 2)
            for (int sy = -1; sy <= 1; sy += 2)
                for (int sx = -1; sx <= 1; sx += 2)
                    for (const auto& b : base)
                        quad.ordinates.push_back({w, {sx * b[0], sy * b[1], sz * b[2]}});
    } else {
        throw std::invalid_argument("level_symmetric: only S_2 and S_4 are supported");
    }
    return quad;
}

/// 2D reduction of a 3D set: keep ordinates with xi > 0 and double their
/// weights, preserving the 4*pi normalization. Streaming in 2D uses the
/// (mu, eta) components.
inline AngularQuadrature upper_hemisphere(const AngularQuadrature& full) {
    AngularQuadrature quad;
    for (const auto& o : full.ordinates)
        if (o.xi() > 0.0) quad.ordinates.push_back({2.0 * o.weight, o.dir});
    return quad;
}

/// Convenience: the 2D ordinate set for S_N.
inline AngularQuadrature level_symmetric_2d(int n) {
    return upper_hemisphere(level_symmetric(n));
}

}  // namespace hosweep

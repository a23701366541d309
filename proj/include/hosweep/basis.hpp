// Tensor-product Lagrange bases on the reference square [0,1]^2.
#pragma once

#include "hosweep/quadrature.hpp"

#include <Eigen/Core>

#include <cassert>
#include <stdexcept>
#include <vector>

namespace hosweep {

/// Lagrange interpolation basis on a fixed 1D node set.
class Lagrange1D {
  public:
    explicit Lagrange1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 1) throw std::invalid_argument("Lagrange1D: empty node set");
    }

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }

    /// L_j(x), product form. Exact Kronecker at the nodes.
    double value(int j, double x) const {
        const int n = size();
        double v = 1.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            v *= (x - nodes_[k]) / (nodes_[j] - nodes_[k]);
        }
        return v;
    }

    /// L_j'(x).
    double derivative(int j, double x) const {
        const int n = size();
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            double term = 1.0 / (nodes_[j] - nodes_[i]);
            for (int k = 0; k < n; ++k) {
                if (k == j || k == i) continue;
                term *= (x - nodes_[k]) / (nodes_[j] - nodes_[k]);
            }
            d += term;
        }
        return d;
    }

    void values(double x, double* out) const {
        for (int j = 0; j < size(); ++j) out[j] = value(j, x);
    }
    void derivatives(double x, double* out) const {
        for (int j = 0; j < size(); ++j) out[j] = derivative(j, x);
    }

  private:
    std::vector<double> nodes_;
};

/// Order-p nodal basis for Q_p on [0,1]^2, with nodes at tensor
/// Gauss-Lobatto points. Node m = iy*(p+1) + ix sits at
/// (t_ix, t_iy), so basis m is the product L_ix(x) * L_iy(y).
class ReferenceBasis {
  public:
    explicit ReferenceBasis(int order)
        : order_(order), line_(gauss_lobatto(order + 1)) {
        if (order < 1 || order >= kMaxPointsPerAxis)
            throw std::invalid_argument("ReferenceBasis: order out of range");
    }

    int order() const { return order_; }
    int points_per_axis() const { return order_ + 1; }
    int size() const { return points_per_axis() * points_per_axis(); }
    const Lagrange1D& line() const { return line_; }

    int index(int ix, int iy) const { return iy * points_per_axis() + ix; }

    Eigen::Vector2d node(int m) const {
        const int n1 = points_per_axis();
        return {line_.nodes()[m % n1], line_.nodes()[m / n1]};
    }

    double value(int m, const Eigen::Vector2d& xi) const {
        const int n1 = points_per_axis();
        return line_.value(m % n1, xi[0]) * line_.value(m / n1, xi[1]);
    }

    Eigen::Vector2d gradient(int m, const Eigen::Vector2d& xi) const {
        const int n1 = points_per_axis();
        const int ix = m % n1, iy = m / n1;
        return {line_.derivative(ix, xi[0]) * line_.value(iy, xi[1]),
                line_.value(ix, xi[0]) * line_.derivative(iy, xi[1])};
    }

    /// All basis values at xi, as a length-size() vector.
    void values(const Eigen::Vector2d& xi, Eigen::VectorXd& out) const {
        const int n1 = points_per_axis();
        assert(n1 <= kMaxPointsPerAxis);
        double vx[kMaxPointsPerAxis], vy[kMaxPointsPerAxis];
        line_.values(xi[0], vx);
        line_.values(xi[1], vy);
        out.resize(size());
        for (int iy = 0; iy < n1; ++iy)
            for (int ix = 0; ix < n1; ++ix) out[index(ix, iy)] = vx[ix] * vy[iy];
    }

    /// All basis gradients at xi, as a size() x 2 matrix.
    void gradients(const Eigen::Vector2d& xi, Eigen::MatrixX2d& out) const {
        const int n1 = points_per_axis();
        assert(n1 <= kMaxPointsPerAxis);
        double vx[kMaxPointsPerAxis], vy[kMaxPointsPerAxis];
        double dx[kMaxPointsPerAxis], dy[kMaxPointsPerAxis];
        line_.values(xi[0], vx);
        line_.values(xi[1], vy);
        line_.derivatives(xi[0], dx);
        line_.derivatives(xi[1], dy);
        out.resize(size(), 2);
        for (int iy = 0; iy < n1; ++iy)
            for (int ix = 0; ix < n1; ++ix) {
                const int m = index(ix, iy);
                out(m, 0) = dx[ix] * vy[iy];
                out(m, 1) = vx[ix] * dy[iy];
            }
    }

    static constexpr int kMaxPointsPerAxis = 32;

  private:
    int order_;
    Lagrange1D line_;
};

/// Basis values/gradients tabulated at a fixed quadrature rule.
struct BasisTable {
    Eigen::MatrixXd values;   // n_points x n_basis
    Eigen::MatrixXd grad_x;   // n_points x n_basis
    Eigen::MatrixXd grad_y;   // n_points x n_basis

    static BasisTable tabulate(const ReferenceBasis& basis, const VolumeQuadrature& quad) {
        BasisTable t;
        const int nq = quad.size(), nb = basis.size();
        t.values.resize(nq, nb);
        t.grad_x.resize(nq, nb);
        t.grad_y.resize(nq, nb);
        Eigen::VectorXd v;
        Eigen::MatrixX2d g;
        for (int q = 0; q < nq; ++q) {
            basis.values(quad.points[q], v);
            basis.gradients(quad.points[q], g);
            t.values.row(q) = v.transpose();
            t.grad_x.row(q) = g.col(0).transpose();
            t.grad_y.row(q) = g.col(1).transpose();
        }
        return t;
    }
};

}  // namespace hosweep

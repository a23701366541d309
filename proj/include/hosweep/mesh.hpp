// High-order curved quadrilateral meshes: element mappings, Jacobians,
// face adjacency and geometry.
#pragma once

#include "hosweep/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hosweep {

using Vec2 = Eigen::Vector2d;

struct MeshError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One element: (r+1)^2 control-point indices in lexicographic order
/// (x fastest), plus a material region attribute.
struct ElementRecord {
    std::vector<int> nodes;
    int region = 1;
};

/// Domain-boundary face, identified by element and local face index.
struct BoundaryFace {
    int elem = -1;
    int local_face = -1;
    int attr = 1;
};

/// Interior face between two elements. `orientation` is +1 when both
/// elements traverse the face parameter in the same direction, -1 when the
/// right element traverses it in reverse.
struct FaceRecord {
    int elem_left = -1;
    int elem_right = -1;
    int local_face_left = -1;
    int local_face_right = -1;
    int orientation = +1;
};

/// Point, outward unit normal and surface Jacobian of a face at one
/// parameter value. The normal is outward with respect to the element the
/// query was made from.
struct FaceGeometry {
    Vec2 point;
    Vec2 normal;
    double surface_jacobian;
};

namespace reface {

// Local faces of the reference square [0,1]^2, parameterized over t in
// [0,1]: 0 = bottom (t,0), 1 = right (1,t), 2 = top (t,1), 3 = left (0,t).
inline Vec2 param_point(int face, double t) {
    switch (face) {
        case 0: return {t, 0.0};
        case 1: return {1.0, t};
        case 2: return {t, 1.0};
        case 3: return {0.0, t};
        default: throw std::out_of_range("reface: bad local face index");
    }
}

inline Vec2 param_tangent(int face) {
    return (face == 0 || face == 2) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
}

inline Vec2 outward_normal(int face) {
    switch (face) {
        case 0: return {0.0, -1.0};
        case 1: return {1.0, 0.0};
        case 2: return {0.0, 1.0};
        case 3: return {-1.0, 0.0};
        default: throw std::out_of_range("reface: bad local face index");
    }
}

/// Local node indices along a face, ordered with increasing t, for an
/// order-p lexicographic node layout.
inline std::vector<int> edge_nodes(int face, int order) {
    const int n1 = order + 1;
    std::vector<int> idx(n1);
    for (int k = 0; k < n1; ++k) {
        switch (face) {
            case 0: idx[k] = k; break;
            case 1: idx[k] = order + k * n1; break;
            case 2: idx[k] = order * n1 + k; break;
            case 3: idx[k] = k * n1; break;
            default: throw std::out_of_range("reface: bad local face index");
        }
    }
    return idx;
}

}  // namespace reface

enum class MeshValidation {
    full,           // topology + geometry (positive Jacobians, face traces)
    topology_only,  // skip geometric checks; used for straightened meshes
};

/// Immutable curved 2D mesh of order-r quadrilateral elements. The element
/// mapping is the order-r tensor Lagrange interpolant of the element's
/// control points (geometric nodes at tensor Gauss-Lobatto locations).
class HighOrderMesh {
  public:
    static HighOrderMesh build(int order, std::vector<Vec2> control_points,
                               std::vector<ElementRecord> elements,
                               std::vector<BoundaryFace> boundary_faces,
                               MeshValidation validation = MeshValidation::full) {
        HighOrderMesh mesh(order, std::move(control_points), std::move(elements),
                           std::move(boundary_faces));
        mesh.check_connectivity();
        mesh.build_faces();
        if (validation == MeshValidation::full) {
            mesh.check_jacobians();
            mesh.check_face_traces();
        }
        return mesh;
    }

    int order() const { return order_; }
    const ReferenceBasis& geom_basis() const { return geom_basis_; }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_control_points() const { return static_cast<int>(control_points_.size()); }
    const std::vector<Vec2>& control_points() const { return control_points_; }
    const std::vector<ElementRecord>& elements() const { return elements_; }
    const ElementRecord& element(int e) const { return elements_.at(e); }
    const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }
    const std::vector<FaceRecord>& interior_faces() const { return interior_faces_; }

    /// Physical position of reference point xi in element e.
    Vec2 map_point(int e, const Vec2& xi) const {
        const ElementRecord& el = element_checked(e);
        Eigen::VectorXd v;
        geom_basis_.values(xi, v);
        Vec2 x = Vec2::Zero();
        for (int m = 0; m < geom_basis_.size(); ++m) x += v[m] * control_points_[el.nodes[m]];
        return x;
    }

    /// Jacobian of the element mapping at xi; returns det(J).
    double jacobian(int e, const Vec2& xi, Eigen::Matrix2d& J) const {
        const ElementRecord& el = element_checked(e);
        Eigen::MatrixX2d g;
        geom_basis_.gradients(xi, g);
        J.setZero();
        for (int m = 0; m < geom_basis_.size(); ++m) {
            const Vec2& x = control_points_[el.nodes[m]];
            J(0, 0) += x[0] * g(m, 0);
            J(0, 1) += x[0] * g(m, 1);
            J(1, 0) += x[1] * g(m, 0);
            J(1, 1) += x[1] * g(m, 1);
        }
        return J.determinant();
    }

    double jacobian_det(int e, const Vec2& xi) const {
        Eigen::Matrix2d J;
        return jacobian(e, xi, J);
    }

    /// Geometry of local face `f` of element `e` at face parameter t:
    /// physical point, unit normal outward from e, and the surface
    /// Jacobian |J^Gamma| = |d(face mapping)/dt|.
    FaceGeometry face_geometry(int e, int f, double t) const {
        const Vec2 xi = reface::param_point(f, t);
        Eigen::Matrix2d J;
        const double det = jacobian(e, xi, J);
        const Vec2 tau = J * reface::param_tangent(f);
        const double sj = tau.norm();
        if (sj < 1e-14 * element_diameter(e))
            throw GeometryError("face_geometry: degenerate tangent on element " +
                                std::to_string(e) + " face " + std::to_string(f));
        // For det(J) > 0 the image of the reference outward normal under
        // J^{-T} stays outward.
        (void)det;
        const Vec2 nref = reface::outward_normal(f);
        Vec2 n = J.inverse().transpose() * nref;
        n.normalize();
        FaceGeometry fg;
        fg.point = map_point(e, xi);
        fg.normal = n;
        fg.surface_jacobian = sj;
        return fg;
    }

    /// Max corner-to-corner distance of element e.
    double element_diameter(int e) const {
        const ElementRecord& el = element_checked(e);
        const int r = order_;
        const int n1 = r + 1;
        const std::array<int, 4> corners = {0, r, r * n1, r * n1 + r};
        double d = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                d = std::max(d, (control_points_[el.nodes[corners[i]]] -
                                 control_points_[el.nodes[corners[j]]])
                                    .norm());
        return d;
    }

    /// First element (if any) with det(J) <= 0 somewhere on an
    /// (order+2)^2 sample lattice.
    std::optional<int> first_invalid_element() const {
        const int ns = order_ + 2;
        for (int e = 0; e < num_elements(); ++e)
            for (int j = 0; j < ns; ++j)
                for (int i = 0; i < ns; ++i) {
                    const Vec2 xi(i / double(ns - 1), j / double(ns - 1));
                    if (jacobian_det(e, xi) <= 0.0) return e;
                }
        return std::nullopt;
    }

    /// Global control-point indices along a local face, ordered by t.
    std::vector<int> face_global_nodes(int e, int f) const {
        const ElementRecord& el = element_checked(e);
        std::vector<int> out;
        for (int m : reface::edge_nodes(f, order_)) out.push_back(el.nodes[m]);
        return out;
    }

  private:
    HighOrderMesh(int order, std::vector<Vec2> points, std::vector<ElementRecord> elements,
                  std::vector<BoundaryFace> boundary)
        : order_(order),
          geom_basis_(order),
          control_points_(std::move(points)),
          elements_(std::move(elements)),
          boundary_faces_(std::move(boundary)) {}

    const ElementRecord& element_checked(int e) const {
        if (e < 0 || e >= num_elements())
            throw std::out_of_range("mesh: element index " + std::to_string(e) +
                                    " out of range");
        return elements_[e];
    }

    void check_connectivity() const {
        const int expected = geom_basis_.size();
        for (int e = 0; e < num_elements(); ++e) {
            const ElementRecord& el = elements_[e];
            if (static_cast<int>(el.nodes.size()) != expected)
                throw MeshError("mesh: element " + std::to_string(e) + " has " +
                                std::to_string(el.nodes.size()) + " nodes, expected " +
                                std::to_string(expected));
            for (int idx : el.nodes)
                if (idx < 0 || idx >= num_control_points())
                    throw MeshError("mesh: element " + std::to_string(e) +
                                    " references control point " + std::to_string(idx) +
                                    " out of range");
        }
        for (const BoundaryFace& b : boundary_faces_) {
            if (b.elem < 0 || b.elem >= num_elements() || b.local_face < 0 || b.local_face > 3)
                throw MeshError("mesh: boundary face record (elem " + std::to_string(b.elem) +
                                ", face " + std::to_string(b.local_face) + ") out of range");
        }
    }

    void build_faces() {
        interior_faces_.clear();
        // Identify faces by their corner control-point pair.
        std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> by_corners;
        for (int e = 0; e < num_elements(); ++e)
            for (int f = 0; f < 4; ++f) {
                const std::vector<int> nodes = face_global_nodes(e, f);
                std::pair<int, int> key(nodes.front(), nodes.back());
                if (key.first > key.second) std::swap(key.first, key.second);
                by_corners[key].push_back({e, f});
            }

        std::vector<std::vector<bool>> paired(num_elements(), std::vector<bool>(4, false));
        for (const auto& [key, sides] : by_corners) {
            if (sides.size() > 2)
                throw MeshError("mesh: face with corner nodes (" + std::to_string(key.first) +
                                "," + std::to_string(key.second) + ") is shared by " +
                                std::to_string(sides.size()) + " elements");
            if (sides.size() != 2) continue;

            const auto [e0, f0] = sides[0];
            const auto [e1, f1] = sides[1];
            const std::vector<int> n0 = face_global_nodes(e0, f0);
            std::vector<int> n1 = face_global_nodes(e1, f1);
            int orientation;
            if (n0 == n1) {
                orientation = +1;
            } else {
                std::reverse(n1.begin(), n1.end());
                if (n0 != n1)
                    throw MeshError("mesh: elements " + std::to_string(e0) + " and " +
                                    std::to_string(e1) +
                                    " share face corners but edge nodes do not match");
                orientation = -1;
            }
            FaceRecord rec;
            rec.elem_left = e0;
            rec.elem_right = e1;
            rec.local_face_left = f0;
            rec.local_face_right = f1;
            rec.orientation = orientation;
            interior_faces_.push_back(rec);
            paired[e0][f0] = paired[e1][f1] = true;
        }

        // Every unpaired face must be declared as boundary, and vice versa.
        std::vector<std::vector<bool>> declared(num_elements(), std::vector<bool>(4, false));
        for (const BoundaryFace& b : boundary_faces_) {
            if (paired[b.elem][b.local_face])
                throw MeshError("mesh: boundary record for interior face (elem " +
                                std::to_string(b.elem) + ", face " +
                                std::to_string(b.local_face) + ")");
            if (declared[b.elem][b.local_face])
                throw MeshError("mesh: duplicate boundary record (elem " +
                                std::to_string(b.elem) + ", face " +
                                std::to_string(b.local_face) + ")");
            declared[b.elem][b.local_face] = true;
        }
        for (int e = 0; e < num_elements(); ++e)
            for (int f = 0; f < 4; ++f)
                if (!paired[e][f] && !declared[e][f])
                    throw MeshError("mesh: face (elem " + std::to_string(e) + ", face " +
                                    std::to_string(f) +
                                    ") is neither interior nor declared boundary");
    }

    void check_jacobians() const {
        if (auto bad = first_invalid_element())
            throw MeshError("mesh: element " + std::to_string(*bad) +
                            " has non-positive Jacobian");
    }

    void check_face_traces() const {
        for (size_t i = 0; i < interior_faces_.size(); ++i) {
            const FaceRecord& fr = interior_faces_[i];
            const double tol = 1e-12 * element_diameter(fr.elem_left);
            for (int k = 0; k < 5; ++k) {
                const double t = k / 4.0;
                const double tr = fr.orientation > 0 ? t : 1.0 - t;
                const Vec2 xl =
                    map_point(fr.elem_left, reface::param_point(fr.local_face_left, t));
                const Vec2 xr =
                    map_point(fr.elem_right, reface::param_point(fr.local_face_right, tr));
                if ((xl - xr).norm() > tol)
                    throw MeshError("mesh: interior face " + std::to_string(i) +
                                    " traces disagree between elements " +
                                    std::to_string(fr.elem_left) + " and " +
                                    std::to_string(fr.elem_right));
            }
        }
    }

    int order_;
    ReferenceBasis geom_basis_;
    std::vector<Vec2> control_points_;
    std::vector<ElementRecord> elements_;
    std::vector<BoundaryFace> boundary_faces_;
    std::vector<FaceRecord> interior_faces_;
};

}  // namespace hosweep

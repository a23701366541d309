// Test-mesh factories (uniform grids, nested annuli in a square, distorted
// grids) and projection of high-order meshes onto refined linear meshes.
#pragma once

#include "hosweep/mesh.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace hosweep {

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

/// Axis-aligned nx-by-ny grid of order-r elements with geometric nodes at
/// tensor Gauss-Lobatto points of each cell. Boundary attributes:
/// 1 = bottom, 2 = right, 3 = top, 4 = left.
inline HighOrderMesh generate_uniform(int nx, int ny, int order, const Rect& domain = {}) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("generate_uniform: need nx, ny >= 1");
    if (order < 1) throw std::invalid_argument("generate_uniform: need order >= 1");

    const int r = order;
    const std::vector<double> gl = gauss_lobatto(r + 1);
    const int npx = nx * r + 1, npy = ny * r + 1;
    const double hx = domain.width() / nx, hy = domain.height() / ny;

    // Global node (I, J): I = cell*r + k maps to x0 + cell*hx + gl[k]*hx.
    auto coord = [&](int idx, double origin, double h) {
        const int cell = std::min(idx / r, (idx == 0 ? 0 : (idx - 1) / r));
        const int k = idx - cell * r;
        return origin + cell * h + gl[k] * h;
    };
    std::vector<Vec2> points(static_cast<size_t>(npx) * npy);
    for (int J = 0; J < npy; ++J)
        for (int I = 0; I < npx; ++I)
            points[J * npx + I] = {coord(I, domain.x0, hx), coord(J, domain.y0, hy)};

    std::vector<ElementRecord> elements;
    elements.reserve(static_cast<size_t>(nx) * ny);
    for (int cj = 0; cj < ny; ++cj)
        for (int ci = 0; ci < nx; ++ci) {
            ElementRecord el;
            el.nodes.reserve((r + 1) * (r + 1));
            for (int iy = 0; iy <= r; ++iy)
                for (int ix = 0; ix <= r; ++ix)
                    el.nodes.push_back((cj * r + iy) * npx + (ci * r + ix));
            elements.push_back(std::move(el));
        }

    std::vector<BoundaryFace> boundary;
    for (int ci = 0; ci < nx; ++ci) {
        boundary.push_back({ci, 0, 1});
        boundary.push_back({(ny - 1) * nx + ci, 2, 3});
    }
    for (int cj = 0; cj < ny; ++cj) {
        boundary.push_back({cj * nx + nx - 1, 1, 2});
        boundary.push_back({cj * nx, 3, 4});
    }
    return HighOrderMesh::build(order, std::move(points), std::move(elements),
                                std::move(boundary));
}

/// Parameters for the nested-annuli-in-a-square mesh. The domain is the
/// square [-half_width, half_width]^2 with the disk of radius r1 removed.
/// Region 1 covers the annulus [r1, r2], region 2 the annulus [r2, r_blend],
/// and region 3 the transition from the circle r_blend out to the square
/// (including its corners). Boundary attributes: 1 = square perimeter,
/// 2 = inner circle.
struct AnnulusSpec {
    double r1 = 0.4;
    double r2 = 0.45;
    double half_width = 0.6;
    int segments = 16;      // angular subdivisions; must be a multiple of 8
    int layers_inner = 1;   // radial layers in [r1, r2]
    int layers_outer = 1;   // radial layers in [r2, r_blend]
    int layers_blend = 2;   // layers from the circle r_blend to the square
    int order = 3;
    double blend_fraction = 0.5;  // r_blend = r2 + blend_fraction*(half_width - r2)
};

inline HighOrderMesh generate_annulus_in_square(const AnnulusSpec& spec) {
    if (!(0.0 < spec.r1 && spec.r1 < spec.r2 && spec.r2 < spec.half_width))
        throw std::invalid_argument("annulus: need 0 < r1 < r2 < half_width");
    if (spec.order < 2)
        throw std::invalid_argument("annulus: order >= 2 required to curve the circles");
    if (spec.segments < 8 || spec.segments % 8 != 0)
        throw std::invalid_argument("annulus: segments must be a positive multiple of 8");
    if (spec.layers_inner < 1 || spec.layers_outer < 1 || spec.layers_blend < 1)
        throw std::invalid_argument("annulus: all layer counts must be >= 1");
    if (!(spec.blend_fraction > 0.0 && spec.blend_fraction < 1.0))
        throw std::invalid_argument("annulus: blend_fraction must be in (0,1)");

    const int r = spec.order;
    const std::vector<double> gl = gauss_lobatto(r + 1);
    const double r_blend = spec.r2 + spec.blend_fraction * (spec.half_width - spec.r2);

    // Radial node rows: per-layer Gauss-Lobatto subdivision, shared at layer
    // boundaries. Rows 0..n_polar cover [r1, r_blend] as circle radii; rows
    // beyond carry the blend parameter u in [0,1].
    std::vector<double> ring_radius;  // for polar rows
    auto append_layers = [&](double a, double b, int layers, std::vector<double>& rows) {
        for (int l = 0; l < layers; ++l) {
            const double lo = a + (b - a) * l / layers;
            const double hi = a + (b - a) * (l + 1) / layers;
            for (int k = (rows.empty() ? 0 : 1); k <= r; ++k)
                rows.push_back(lo + (hi - lo) * gl[k]);
        }
    };
    append_layers(spec.r1, spec.r2, spec.layers_inner, ring_radius);
    append_layers(spec.r2, r_blend, spec.layers_outer, ring_radius);
    std::vector<double> blend_u;
    append_layers(0.0, 1.0, spec.layers_blend, blend_u);  // starts at u = 0 = circle row

    const int n_polar_rows = static_cast<int>(ring_radius.size());
    const int n_blend_rows = static_cast<int>(blend_u.size()) - 1;  // u=0 row is shared
    const int n_rows = n_polar_rows + n_blend_rows;
    const int n_cols = spec.segments * r;  // angular nodes, wrapping

    // Radial projection of an angle onto the square perimeter.
    auto square_point = [&](double theta) {
        const double c = std::cos(theta), s = std::sin(theta);
        const double scale = spec.half_width / std::max(std::abs(c), std::abs(s));
        return Vec2{scale * c, scale * s};
    };

    std::vector<Vec2> points(static_cast<size_t>(n_rows) * n_cols);
    auto node_id = [&](int row, int col) { return row * n_cols + (col % n_cols); };
    for (int col = 0; col < n_cols; ++col) {
        const int seg = col / r, k = col % r;
        const double t0 = 2.0 * M_PI * seg / spec.segments;
        const double dt = 2.0 * M_PI / spec.segments;
        const double theta = t0 + gl[k] * dt;
        const Vec2 unit{std::cos(theta), std::sin(theta)};
        for (int row = 0; row < n_polar_rows; ++row)
            points[node_id(row, col)] = ring_radius[row] * unit;
        for (int row = n_polar_rows; row < n_rows; ++row) {
            const double u = blend_u[row - n_polar_rows + 1];
            points[node_id(row, col)] = (1.0 - u) * r_blend * unit + u * square_point(theta);
        }
    }

    const int layers_polar = spec.layers_inner + spec.layers_outer;
    const int total_layers = layers_polar + spec.layers_blend;
    std::vector<ElementRecord> elements;
    elements.reserve(static_cast<size_t>(total_layers) * spec.segments);
    // Reference xi_0 runs radially outward and xi_1 counterclockwise, which
    // keeps det(J) positive.
    for (int layer = 0; layer < total_layers; ++layer)
        for (int seg = 0; seg < spec.segments; ++seg) {
            ElementRecord el;
            el.nodes.reserve((r + 1) * (r + 1));
            for (int iy = 0; iy <= r; ++iy)
                for (int ix = 0; ix <= r; ++ix)
                    el.nodes.push_back(node_id(layer * r + ix, seg * r + iy));
            el.region = layer < spec.layers_inner          ? 1
                        : layer < layers_polar             ? 2
                                                           : 3;
            elements.push_back(std::move(el));
        }

    std::vector<BoundaryFace> boundary;
    for (int seg = 0; seg < spec.segments; ++seg) {
        boundary.push_back({seg, 3, 2});  // inner circle
        boundary.push_back({(total_layers - 1) * spec.segments + seg, 1, 1});  // square
    }
    return HighOrderMesh::build(spec.order, std::move(points), std::move(elements),
                                std::move(boundary));
}

/// Uniform grid on [0,1]^2 whose interior geometric nodes are displaced by
/// a divergence-free sin/cos field of amplitude `amplitude`; the domain
/// boundary is left exactly on the unit square. Displacement ramps to zero
/// over the boundary cell layer. Amplitudes around 0.1/max(nx,ny) and above
/// produce re-entrant curved faces and sweep cycles. A nonzero `swirl`
/// superposes a domain-scale vortex mode: it merges the local cycles into
/// large strongly connected blobs, the regime where the choice of edge
/// weighting starts to matter.
inline HighOrderMesh generate_distorted(int nx, int ny, int order, double amplitude,
                                        double swirl = 0.0) {
    HighOrderMesh base = generate_uniform(nx, ny, order, Rect{0.0, 0.0, 1.0, 1.0});
    const double f = 0.6 * std::max(nx, ny);
    auto displace = [&](const Vec2& p) -> Vec2 {
        const double sx = 2.0 * M_PI * f * p[0] + 0.7;
        const double sy = 2.0 * M_PI * f * p[1] + 0.3;
        // Stream-function fields: divergence-free, so the continuous map
        // keeps det(J) positive away from the boundary ramp for
        // amplitude < 1/(2 pi f).
        const Vec2 wiggle{std::sin(sx) * std::cos(sy), -std::cos(sx) * std::sin(sy)};
        const Vec2 vortex{std::sin(M_PI * p[0]) * std::cos(M_PI * p[1]),
                          -std::cos(M_PI * p[0]) * std::sin(M_PI * p[1])};
        const double edge = std::min({p[0], 1.0 - p[0], p[1], 1.0 - p[1]});
        const double ramp = std::clamp(0.5 * edge * std::max(nx, ny), 0.0, 1.0);
        return ramp * ramp * (3.0 - 2.0 * ramp) * (amplitude * wiggle + swirl * vortex);
    };
    std::vector<Vec2> points = base.control_points();
    for (Vec2& p : points) p += displace(p);

    std::vector<ElementRecord> elements = base.elements();
    std::vector<BoundaryFace> boundary = base.boundary_faces();
    return HighOrderMesh::build(order, std::move(points), std::move(elements),
                                std::move(boundary));
}

/// Result of projecting a high-order mesh onto a refined linear mesh:
/// sub-elements whose corner Jacobians are not strictly positive.
struct StraightenReport {
    std::vector<int> invalid_elements;  // element ids in the output mesh
    bool valid() const { return invalid_elements.empty(); }
};

/// Replace each element by n_ref^2 bilinear elements whose vertices sample
/// the high-order mapping on a uniform (n_ref+1)^2 lattice. Invalid
/// sub-elements are reported, not rejected.
inline std::pair<HighOrderMesh, StraightenReport> straighten(const HighOrderMesh& mesh,
                                                             int n_ref) {
    if (n_ref < 1) throw std::invalid_argument("straighten: need n_ref >= 1");

    // Deduplicate sampled vertices by quantized coordinates.
    double scale = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e)
        scale = std::max(scale, mesh.element_diameter(e));
    const double snap = 1e-12 * std::max(scale, 1.0);

    std::map<std::pair<long long, long long>, int> seen;
    std::vector<Vec2> points;
    auto intern = [&](const Vec2& p) {
        const std::pair<long long, long long> key(std::llround(p[0] / snap),
                                                  std::llround(p[1] / snap));
        auto [it, fresh] = seen.try_emplace(key, static_cast<int>(points.size()));
        if (fresh) points.push_back(p);
        return it->second;
    };

    std::vector<ElementRecord> elements;
    std::vector<BoundaryFace> boundary;
    StraightenReport report;
    // Parent boundary lookup: (elem, local face) -> attr.
    std::map<std::pair<int, int>, int> parent_boundary;
    for (const BoundaryFace& b : mesh.boundary_faces())
        parent_boundary[{b.elem, b.local_face}] = b.attr;

    for (int e = 0; e < mesh.num_elements(); ++e) {
        // Lattice of vertex ids for this parent element.
        std::vector<int> lattice((n_ref + 1) * (n_ref + 1));
        for (int j = 0; j <= n_ref; ++j)
            for (int i = 0; i <= n_ref; ++i)
                lattice[j * (n_ref + 1) + i] =
                    intern(mesh.map_point(e, Vec2(i / double(n_ref), j / double(n_ref))));

        for (int j = 0; j < n_ref; ++j)
            for (int i = 0; i < n_ref; ++i) {
                ElementRecord el;
                const int v00 = lattice[j * (n_ref + 1) + i];
                const int v10 = lattice[j * (n_ref + 1) + i + 1];
                const int v01 = lattice[(j + 1) * (n_ref + 1) + i];
                const int v11 = lattice[(j + 1) * (n_ref + 1) + i + 1];
                el.nodes = {v00, v10, v01, v11};
                el.region = mesh.element(e).region;
                const int sub_id = static_cast<int>(elements.size());

                // Corner Jacobians of the bilinear map: cross products of the
                // two edge vectors meeting at each corner.
                auto corner_det = [&](int a, int b, int c) {
                    const Vec2 u = points[b] - points[a];
                    const Vec2 v = points[c] - points[a];
                    return u[0] * v[1] - u[1] * v[0];
                };
                const bool ok = corner_det(v00, v10, v01) > 0.0 &&
                                corner_det(v10, v11, v00) > 0.0 &&
                                corner_det(v01, v00, v11) > 0.0 &&
                                corner_det(v11, v01, v10) > 0.0;
                if (!ok) report.invalid_elements.push_back(sub_id);

                // Sub-faces on the parent boundary inherit its attribute.
                auto inherit = [&](int parent_face, int sub_face, bool on_edge) {
                    if (!on_edge) return;
                    auto it = parent_boundary.find({e, parent_face});
                    if (it != parent_boundary.end())
                        boundary.push_back({sub_id, sub_face, it->second});
                };
                inherit(0, 0, j == 0);
                inherit(1, 1, i == n_ref - 1);
                inherit(2, 2, j == n_ref - 1);
                inherit(3, 3, i == 0);
                elements.push_back(std::move(el));
            }
    }

    HighOrderMesh out = HighOrderMesh::build(1, std::move(points), std::move(elements),
                                             std::move(boundary),
                                             MeshValidation::topology_only);
    return {std::move(out), std::move(report)};
}

}  // namespace hosweep

// Assembly of the per-ordinate DG transport operator: streaming blocks,
// mass matrices, upwind face blocks and source moments, all evaluated by
// reference-element quadrature. Face integrals use Romberg integration so
// that re-entrant faces (where Omega . n changes sign) are handled to
// tolerance; the four blocks of each interior face share one sampling, which
// makes the discrete face fluxes telescope exactly in balance sums.
#pragma once

#include "hosweep/angular.hpp"
#include "hosweep/mesh.hpp"
#include "hosweep/parallel.hpp"
#include "hosweep/romberg.hpp"
#include "hosweep/xsec.hpp"

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <vector>

namespace hosweep {

struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Face-integration settings. The Gauss rule is only valid on straight
/// faces with one-signed Omega . n; it exists to cross-check Romberg on
/// affine meshes. min_levels guards against upwind weights supported on a
/// narrow sliver of the face: such integrands sample as exactly zero on
/// coarse dyadic grids, so convergence may not be declared before the
/// sampling is at least 2^min_levels panels fine.
struct FaceIntegration {
    enum class Rule { romberg, gauss };
    Rule rule = Rule::romberg;
    double tol = 1e-10;
    int max_levels = 16;
    int min_levels = 6;
    int gauss_points = 8;
};

struct AssemblyOptions {
    int volume_points_per_axis = 0;  // 0: basis order + 2
    FaceIntegration face;
};

namespace detail {

/// Per-element volume quadrature data shared by all ordinates.
struct ElementQuadData {
    Eigen::MatrixXd u;            // n_q x n_u basis values
    Eigen::MatrixXd gx, gy;       // n_q x n_u physical gradients
    Eigen::VectorXd wdet;         // n_q quadrature weight * |J|
    Eigen::VectorXd sigma_t, sigma_s;
    std::vector<Vec2> x;          // physical points
};

inline ElementQuadData element_quad_data(const HighOrderMesh& mesh, const ReferenceBasis& basis,
                                         const CrossSectionField& xsec,
                                         const VolumeQuadrature& quad, int e) {
    const int nq = quad.size(), nu = basis.size();
    ElementQuadData d;
    d.u.resize(nq, nu);
    d.gx.resize(nq, nu);
    d.gy.resize(nq, nu);
    d.wdet.resize(nq);
    d.sigma_t.resize(nq);
    d.sigma_s.resize(nq);
    d.x.resize(nq);
    Eigen::VectorXd values;
    Eigen::MatrixX2d grads;
    Eigen::Matrix2d J;
    const int region = mesh.element(e).region;
    for (int q = 0; q < nq; ++q) {
        const Vec2& xi = quad.points[q];
        const double det = mesh.jacobian(e, xi, J);
        if (det <= 0.0 || !std::isfinite(det))
            throw AssemblyError("assembly: singular Jacobian in element " + std::to_string(e));
        const Eigen::Matrix2d K = J.inverse();
        basis.values(xi, values);
        basis.gradients(xi, grads);
        d.u.row(q) = values.transpose();
        // J^{-T} grad: chain rule to physical derivatives.
        d.gx.row(q) = (K(0, 0) * grads.col(0) + K(1, 0) * grads.col(1)).transpose();
        d.gy.row(q) = (K(0, 1) * grads.col(0) + K(1, 1) * grads.col(1)).transpose();
        d.wdet[q] = quad.weights[q] * det;
        d.x[q] = mesh.map_point(e, xi);
        const CrossSections xs = xsec.at(d.x[q], region);
        d.sigma_t[q] = xs.sigma_t;
        d.sigma_s[q] = xs.sigma_s;
    }
    return d;
}

/// Basis trace values and face geometry at one face parameter value.
struct FaceSample {
    double surface_jacobian;
    double omega_dot_n;
    Vec2 point;
    Eigen::VectorXd u_left, u_right;  // u_right empty on boundary faces
};

inline FaceSample face_sample(const HighOrderMesh& mesh, const ReferenceBasis& basis,
                              int elem_left, int face_left, int elem_right, int face_right,
                              int orientation, const Vec2& omega, double t) {
    FaceSample s;
    const FaceGeometry fg = mesh.face_geometry(elem_left, face_left, t);
    s.surface_jacobian = fg.surface_jacobian;
    s.omega_dot_n = omega[0] * fg.normal[0] + omega[1] * fg.normal[1];
    s.point = fg.point;
    basis.values(reface::param_point(face_left, t), s.u_left);
    if (elem_right >= 0) {
        const double tr = orientation > 0 ? t : 1.0 - t;
        basis.values(reface::param_point(face_right, tr), s.u_right);
    }
    return s;
}

/// Integrate a vector-valued face integrand with the configured rule.
/// Returns false when Romberg hit max_levels without reaching tol.
template <typename F>
bool integrate_face(const FaceIntegration& opts, F&& f, Eigen::VectorXd& out) {
    if (opts.rule == FaceIntegration::Rule::gauss) {
        const Quad1D rule = gauss_legendre(opts.gauss_points);
        out = Eigen::VectorXd::Zero(f(0.5).size());
        for (int i = 0; i < rule.size(); ++i) out += rule.weights[i] * f(rule.points[i]);
        return true;
    }
    return romberg<Eigen::VectorXd>(f, opts.tol, opts.max_levels, out, opts.min_levels)
        .converged;
}

}  // namespace detail

/// Volume blocks of one ordinate: stream = G_e (transport term), plus the
/// ordinate-independent mass matrices M_t and M_s.
struct VolumeBlocks {
    std::vector<Eigen::MatrixXd> stream;
    std::vector<Eigen::MatrixXd> mass_total;
    std::vector<Eigen::MatrixXd> mass_scatter;
};

inline VolumeBlocks assemble_volume(const HighOrderMesh& mesh, const ReferenceBasis& basis,
                                    const CrossSectionField& xsec, const Vec2& omega,
                                    int points_per_axis = 0) {
    const int npa = points_per_axis > 0 ? points_per_axis : basis.order() + 2;
    const VolumeQuadrature quad = VolumeQuadrature::tensor_gauss(npa);
    VolumeBlocks out;
    out.stream.resize(mesh.num_elements());
    out.mass_total.resize(mesh.num_elements());
    out.mass_scatter.resize(mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const detail::ElementQuadData d =
            detail::element_quad_data(mesh, basis, xsec, quad, e);
        const Eigen::MatrixXd dir = omega[0] * d.gx + omega[1] * d.gy;
        out.stream[e].noalias() = -dir.transpose() * d.wdet.asDiagonal() * d.u;
        out.mass_total[e].noalias() =
            d.u.transpose() * (d.wdet.cwiseProduct(d.sigma_t)).asDiagonal() * d.u;
        out.mass_scatter[e].noalias() =
            d.u.transpose() * (d.wdet.cwiseProduct(d.sigma_s)).asDiagonal() * d.u;
    }
    return out;
}

/// Off-diagonal face block F_{downwind, upwind}: couples the downwind
/// element's equations to the upwind element's trace. Entries are <= 0.
struct FaceCoupling {
    int face = -1;  // index into mesh.interior_faces()
    int downwind = -1;
    int upwind = -1;
    Eigen::MatrixXd block;
};

struct FaceBlocks {
    std::vector<Eigen::MatrixXd> outflow;           // per element: F_e diagonal block
    std::vector<FaceCoupling> couplings;            // nonzero off-diagonal blocks
    std::vector<Eigen::MatrixXd> boundary_outflow;  // per boundary-face index
    std::vector<double> face_length;                // per interior face
    std::vector<int> unconverged_faces;             // Romberg hit max_levels
};

/// Assemble all face blocks for one ordinate direction. For each interior
/// face the two diagonal contributions and both couplings are integrated
/// with a single shared sampling.
inline FaceBlocks assemble_faces(const HighOrderMesh& mesh, const ReferenceBasis& basis,
                                 const Vec2& omega, const FaceIntegration& opts = {}) {
    const int nu = basis.size();
    FaceBlocks out;
    out.outflow.assign(mesh.num_elements(), Eigen::MatrixXd::Zero(nu, nu));
    out.face_length.resize(mesh.interior_faces().size());

    const int nfi = static_cast<int>(mesh.interior_faces().size());
    for (int fi = 0; fi < nfi; ++fi) {
        const FaceRecord& fr = mesh.interior_faces()[fi];
        // Packed integrand: [LL+ | RR- | LR- | RL+ | length], so the four
        // blocks and the face length come from one tableau.
        auto integrand = [&](double t) {
            const detail::FaceSample s =
                detail::face_sample(mesh, basis, fr.elem_left, fr.local_face_left,
                                    fr.elem_right, fr.local_face_right, fr.orientation,
                                    omega, t);
            const double wplus = 0.5 * (s.omega_dot_n + std::abs(s.omega_dot_n));
            const double wminus = 0.5 * (std::abs(s.omega_dot_n) - s.omega_dot_n);
            Eigen::VectorXd v(4 * nu * nu + 1);
            int k = 0;
            for (int m = 0; m < nu; ++m)
                for (int n = 0; n < nu; ++n)
                    v[k++] = wplus * s.u_left[m] * s.u_left[n] * s.surface_jacobian;
            for (int m = 0; m < nu; ++m)
                for (int n = 0; n < nu; ++n)
                    v[k++] = wminus * s.u_right[m] * s.u_right[n] * s.surface_jacobian;
            for (int m = 0; m < nu; ++m)
                for (int n = 0; n < nu; ++n)
                    v[k++] = wminus * s.u_left[m] * s.u_right[n] * s.surface_jacobian;
            for (int m = 0; m < nu; ++m)
                for (int n = 0; n < nu; ++n)
                    v[k++] = wplus * s.u_right[m] * s.u_left[n] * s.surface_jacobian;
            v[k] = s.surface_jacobian;
            return v;
        };
        Eigen::VectorXd packed;
        if (!detail::integrate_face(opts, integrand, packed))
            out.unconverged_faces.push_back(fi);

        const double length = packed[4 * nu * nu];
        out.face_length[fi] = length;
        const double eps_edge = 1e-12 * length;

        using MatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                      Eigen::RowMajor>>;
        const MatMap ll(packed.data(), nu, nu);
        const MatMap rr(packed.data() + nu * nu, nu, nu);
        const MatMap lr(packed.data() + 2 * nu * nu, nu, nu);
        const MatMap rl(packed.data() + 3 * nu * nu, nu, nu);

        out.outflow[fr.elem_left] += ll;
        out.outflow[fr.elem_right] += rr;
        if (lr.cwiseAbs().maxCoeff() > eps_edge)
            out.couplings.push_back({fi, fr.elem_left, fr.elem_right, -lr});
        if (rl.cwiseAbs().maxCoeff() > eps_edge)
            out.couplings.push_back({fi, fr.elem_right, fr.elem_left, -rl});
    }

    const int nfb = static_cast<int>(mesh.boundary_faces().size());
    out.boundary_outflow.resize(nfb);
    for (int bi = 0; bi < nfb; ++bi) {
        const BoundaryFace& bf = mesh.boundary_faces()[bi];
        auto integrand = [&](double t) {
            const detail::FaceSample s = detail::face_sample(
                mesh, basis, bf.elem, bf.local_face, -1, -1, +1, omega, t);
            const double wplus = 0.5 * (s.omega_dot_n + std::abs(s.omega_dot_n));
            Eigen::VectorXd v(nu * nu);
            int k = 0;
            for (int m = 0; m < nu; ++m)
                for (int n = 0; n < nu; ++n)
                    v[k++] = wplus * s.u_left[m] * s.u_left[n] * s.surface_jacobian;
            return v;
        };
        Eigen::VectorXd packed;
        if (!detail::integrate_face(opts, integrand, packed))
            out.unconverged_faces.push_back(nfi + bi);
        using MatMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                      Eigen::RowMajor>>;
        out.boundary_outflow[bi] = MatMap(packed.data(), nu, nu);
        out.outflow[bf.elem] += out.boundary_outflow[bi];
    }
    return out;
}

/// Per-ordinate source moments: the volume part integrates the volumetric
/// source against the basis; the boundary part carries the incident-flux
/// inflow functional on domain-boundary faces.
struct SourceMoments {
    Eigen::VectorXd volume;
    Eigen::VectorXd boundary;
};

inline SourceMoments assemble_source(const HighOrderMesh& mesh, const ReferenceBasis& basis,
                                     const std::function<double(const Vec2&)>& volumetric,
                                     const std::function<double(const Vec2&)>& incident,
                                     const Vec2& omega, const AssemblyOptions& opts = {}) {
    const int nu = basis.size();
    const int npa =
        opts.volume_points_per_axis > 0 ? opts.volume_points_per_axis : basis.order() + 2;
    const VolumeQuadrature quad = VolumeQuadrature::tensor_gauss(npa);
    SourceMoments out;
    out.volume = Eigen::VectorXd::Zero(mesh.num_elements() * nu);
    out.boundary = Eigen::VectorXd::Zero(mesh.num_elements() * nu);

    Eigen::VectorXd values;
    Eigen::Matrix2d J;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        auto block = out.volume.segment(e * nu, nu);
        for (int q = 0; q < quad.size(); ++q) {
            const Vec2& xi = quad.points[q];
            const double det = mesh.jacobian(e, xi, J);
            basis.values(xi, values);
            block += quad.weights[q] * det * volumetric(mesh.map_point(e, xi)) * values;
        }
    }

    for (const BoundaryFace& bf : mesh.boundary_faces()) {
        auto integrand = [&](double t) {
            const detail::FaceSample s = detail::face_sample(
                mesh, basis, bf.elem, bf.local_face, -1, -1, +1, omega, t);
            const double wminus = 0.5 * (std::abs(s.omega_dot_n) - s.omega_dot_n);
            return Eigen::VectorXd(wminus * incident(s.point) * s.surface_jacobian * s.u_left);
        };
        Eigen::VectorXd moments;
        detail::integrate_face(opts.face, integrand, moments);
        out.boundary.segment(bf.elem * nu, nu) += moments;
    }
    return out;
}

/// Per-ordinate volumetric source and incident boundary flux.
struct SourceSpec {
    std::function<double(int, const Vec2&)> volumetric;  // (ordinate, x)
    std::function<double(int, const Vec2&)> incident;    // (ordinate, x) on the boundary

    static SourceSpec isotropic(double q, double inflow) {
        SourceSpec s;
        s.volumetric = [q](int, const Vec2&) { return q; };
        s.incident = [inflow](int, const Vec2&) { return inflow; };
        return s;
    }
};

/// Assembled transport operator for every ordinate of a quadrature set.
/// The diagonal blocks hold G_e + F_e + M_t,e; face couplings are stored
/// per (downwind, upwind) pair; boundary outflow blocks and the split
/// source moments support exact balance bookkeeping.
struct TransportOperator {
    const HighOrderMesh* mesh = nullptr;
    const ReferenceBasis* basis = nullptr;
    AngularQuadrature quad;

    std::vector<Eigen::MatrixXd> mass_total;    // per element
    std::vector<Eigen::MatrixXd> mass_scatter;  // per element
    std::vector<double> face_length;            // per interior face

    struct PerOrdinate {
        std::vector<Eigen::MatrixXd> diag;  // G_e + F_e + M_t,e
        std::vector<FaceCoupling> couplings;
        std::vector<std::vector<int>> incoming;  // element -> coupling indices into it
        std::vector<Eigen::MatrixXd> boundary_outflow;
        Eigen::VectorXd source_volume;
        Eigen::VectorXd source_boundary;
        int unconverged_faces = 0;
    };
    std::vector<PerOrdinate> ordinates;

    int block_size() const { return basis->size(); }
    int num_elements() const { return mesh->num_elements(); }
    int num_dofs() const { return num_elements() * block_size(); }

    Eigen::VectorXd source_total(int d) const {
        return ordinates[d].source_volume + ordinates[d].source_boundary;
    }
};

inline TransportOperator assemble_transport_operator(
    const HighOrderMesh& mesh, const ReferenceBasis& basis, const AngularQuadrature& quad,
    const CrossSectionField& xsec, const SourceSpec& source,
    const AssemblyOptions& opts = {}) {
    TransportOperator op;
    op.mesh = &mesh;
    op.basis = &basis;
    op.quad = quad;
    op.ordinates.resize(quad.size());

    {
        // Mass matrices are ordinate-independent: assemble once.
        const VolumeBlocks vol = assemble_volume(mesh, basis, xsec, Vec2::Zero(),
                                                 opts.volume_points_per_axis);
        op.mass_total = vol.mass_total;
        op.mass_scatter = vol.mass_scatter;
    }

    parallel_for(quad.size(), [&](int d) {
        // Each worker evaluates through its own basis copy; ReferenceBasis
        // evaluation is const but cheap to duplicate.
        const Vec2 omega(quad[d].mu(), quad[d].eta());
        TransportOperator::PerOrdinate& ord = op.ordinates[d];

        const VolumeBlocks vol =
            assemble_volume(mesh, basis, xsec, omega, opts.volume_points_per_axis);
        FaceBlocks faces = assemble_faces(mesh, basis, omega, opts.face);
        if (d == 0) op.face_length = faces.face_length;

        ord.diag.resize(mesh.num_elements());
        for (int e = 0; e < mesh.num_elements(); ++e)
            ord.diag[e] = vol.stream[e] + faces.outflow[e] + op.mass_total[e];
        ord.couplings = std::move(faces.couplings);
        ord.boundary_outflow = std::move(faces.boundary_outflow);
        ord.unconverged_faces = static_cast<int>(faces.unconverged_faces.size());

        ord.incoming.assign(mesh.num_elements(), {});
        for (size_t c = 0; c < ord.couplings.size(); ++c)
            ord.incoming[ord.couplings[c].downwind].push_back(static_cast<int>(c));

        const SourceMoments q = assemble_source(
            mesh, basis, [&](const Vec2& x) { return source.volumetric(d, x); },
            [&](const Vec2& x) { return source.incident(d, x); }, omega, opts);
        ord.source_volume = q.volume;
        ord.source_boundary = q.boundary;
    });
    return op;
}

}  // namespace hosweep

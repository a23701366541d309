// Source iteration with lagged element-by-element transport sweeps, the
// exact per-ordinate direct solve used as an oracle, and conservation
// diagnostics.
#pragma once

#include "hosweep/assembly.hpp"
#include "hosweep/parallel.hpp"
#include "hosweep/sweepgraph.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace hosweep {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    enum class Mode { sweep, direct_oracle };
    double tolerance = 1e-14;  // L_inf of successive iterate differences
    int max_iterations = 400;
    Mode mode = Mode::sweep;
    EdgeWeighting weighting = EdgeWeighting::face;
    int exact_fas_threshold = 10;
};

struct ConvergenceHistory {
    std::vector<double> error;                      // per iteration, max over ordinates
    std::vector<std::vector<double>> per_ordinate;  // error[it][d]
    bool converged = false;
    int iterations() const { return static_cast<int>(error.size()); }
};

struct SolverState {
    std::vector<Eigen::VectorXd> psi;  // per ordinate, length num_dofs
    Eigen::VectorXd phi;               // scalar flux, length num_dofs
    int iterations = 0;
};

/// Runs transport solves against an assembled operator. Local factorizations
/// are cached per (element, ordinate); global factorizations are built
/// lazily per ordinate for the oracle mode.
class SweepSolver {
  public:
    SweepSolver(const TransportOperator& op, const SolveOptions& opts = {})
        : op_(op), opts_(opts) {
        const int nd = op.quad.size();
        orderings_.resize(nd);
        local_lu_.resize(nd);
        lagged_.resize(nd);
        parallel_for(nd, [&](int d) {
            const DependencyGraph g = build_graph(op_, d, opts_.weighting);
            orderings_[d] = sweep_ordering(g, opts_.exact_fas_threshold);
            // Per-coupling lag flags for the sweep loop.
            const auto& ord = op_.ordinates[d];
            lagged_[d].assign(ord.couplings.size(), false);
            for (size_t c = 0; c < ord.couplings.size(); ++c)
                lagged_[d][c] = orderings_[d].is_lagged_position(ord.couplings[c].upwind,
                                                                 ord.couplings[c].downwind);
            local_lu_[d].reserve(op_.num_elements());
            for (int e = 0; e < op_.num_elements(); ++e) {
                local_lu_[d].emplace_back(ord.diag[e]);
                const double rc = local_lu_[d].back().rcond();
                if (!(rc > 1e-14))
                    throw SolverError("local streaming+collision block is singular "
                                      "(element " + std::to_string(e) + ", ordinate " +
                                      std::to_string(d) + ")");
            }
        });
        oracle_lu_.resize(nd);
    }

    const SweepOrdering& ordering(int d) const { return orderings_.at(d); }
    const SolveOptions& options() const { return opts_; }

    /// Number of lagged face couplings over all ordinates.
    int total_lagged_edges() const {
        int n = 0;
        for (const auto& ord : orderings_) n += static_cast<int>(ord.lagged_edges.size());
        return n;
    }

    /// Solve the local system A_e psi_e = rhs for one element and ordinate.
    Eigen::VectorXd local_solve(int e, int d, const Eigen::VectorXd& rhs) const {
        return local_lu_.at(d).at(e).solve(rhs);
    }

    /// One lagged transport sweep for ordinate d: visits elements in the
    /// precomputed order, using freshly computed upwind values on retained
    /// edges and previous-iterate values on lagged edges.
    Eigen::VectorXd sweep(int d, const Eigen::VectorXd& phi,
                          const Eigen::VectorXd& psi_old) const {
        const auto& ord = op_.ordinates[d];
        const int nu = op_.block_size();
        Eigen::VectorXd psi_new(op_.num_dofs());
        Eigen::VectorXd rhs(nu);
        for (int e : orderings_[d].order) {
            rhs = ord.source_volume.segment(e * nu, nu) +
                  ord.source_boundary.segment(e * nu, nu);
            rhs.noalias() +=
                (1.0 / (4.0 * M_PI)) * op_.mass_scatter[e] * phi.segment(e * nu, nu);
            for (int c : ord.incoming[e]) {
                const FaceCoupling& fc = ord.couplings[c];
                const auto& upwind = lagged_[d][c] ? psi_old : psi_new;
                rhs.noalias() -= fc.block * upwind.segment(fc.upwind * nu, nu);
            }
            psi_new.segment(e * nu, nu) = local_lu_[d][e].solve(rhs);
        }
        return psi_new;
    }

    /// Exact solve of the per-ordinate streaming+collision system with the
    /// given scalar flux in the scattering source.
    Eigen::VectorXd direct_oracle(int d, const Eigen::VectorXd& phi) const {
        build_oracle(d);
        const auto& ord = op_.ordinates[d];
        const int nu = op_.block_size();
        Eigen::VectorXd rhs = ord.source_volume + ord.source_boundary;
        for (int e = 0; e < op_.num_elements(); ++e)
            rhs.segment(e * nu, nu).noalias() +=
                (1.0 / (4.0 * M_PI)) * op_.mass_scatter[e] * phi.segment(e * nu, nu);
        const Eigen::VectorXd psi = oracle_lu_[d]->solve(rhs);
        if (oracle_lu_[d]->info() != Eigen::Success)
            throw SolverError("direct oracle: solve failed for ordinate " + std::to_string(d));
        return psi;
    }

    /// Fixed-point source iteration (sweep or oracle mode per options).
    std::pair<SolverState, ConvergenceHistory> source_iteration() const {
        const int nd = op_.quad.size();
        SolverState state;
        state.psi.assign(nd, Eigen::VectorXd::Zero(op_.num_dofs()));
        state.phi = Eigen::VectorXd::Zero(op_.num_dofs());
        ConvergenceHistory history;

        std::vector<Eigen::VectorXd> psi_next(nd);
        for (int it = 0; it < opts_.max_iterations; ++it) {
            parallel_for(nd, [&](int d) {
                psi_next[d] = opts_.mode == SolveOptions::Mode::sweep
                                  ? sweep(d, state.phi, state.psi[d])
                                  : direct_oracle(d, state.phi);
            });
            std::vector<double> errs(nd);
            double err = 0.0;
            for (int d = 0; d < nd; ++d) {
                errs[d] = (psi_next[d] - state.psi[d]).lpNorm<Eigen::Infinity>();
                err = std::max(err, errs[d]);
                state.psi[d] = std::move(psi_next[d]);
            }
            state.phi.setZero();
            for (int d = 0; d < nd; ++d) state.phi += op_.quad[d].weight * state.psi[d];
            history.error.push_back(err);
            history.per_ordinate.push_back(std::move(errs));
            state.iterations = it + 1;
            if (err < opts_.tolerance) {
                history.converged = true;
                break;
            }
        }
        return {std::move(state), std::move(history)};
    }

  private:
    void build_oracle(int d) const {
        if (oracle_lu_[d]) return;
        const auto& ord = op_.ordinates[d];
        const int nu = op_.block_size();
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve((ord.diag.size() + ord.couplings.size()) * nu * nu);
        for (int e = 0; e < op_.num_elements(); ++e)
            for (int i = 0; i < nu; ++i)
                for (int j = 0; j < nu; ++j)
                    trips.emplace_back(e * nu + i, e * nu + j, ord.diag[e](i, j));
        for (const FaceCoupling& fc : ord.couplings)
            for (int i = 0; i < nu; ++i)
                for (int j = 0; j < nu; ++j)
                    trips.emplace_back(fc.downwind * nu + i, fc.upwind * nu + j,
                                       fc.block(i, j));
        Eigen::SparseMatrix<double> A(op_.num_dofs(), op_.num_dofs());
        A.setFromTriplets(trips.begin(), trips.end());
        auto lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        lu->compute(A);
        if (lu->info() != Eigen::Success)
            throw SolverError("direct oracle: factorization failed for ordinate " +
                              std::to_string(d));
        oracle_lu_[d] = std::move(lu);
    }

    const TransportOperator& op_;
    SolveOptions opts_;
    std::vector<SweepOrdering> orderings_;
    std::vector<std::vector<bool>> lagged_;  // per ordinate, per coupling
    std::vector<std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>>> local_lu_;
    mutable std::vector<std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>>>
        oracle_lu_;
};

/// Conservation functionals of a converged state. All terms are evaluated
/// with the assembled blocks, so the residual reflects only iteration error,
/// not quadrature differences:
///   residual = volumetric source + inflow - absorption - outflow.
struct BalanceReport {
    double source_volume = 0.0;
    double inflow = 0.0;
    double source_total = 0.0;  // source_volume + inflow
    double absorption = 0.0;
    double outflow = 0.0;
    double net_leakage = 0.0;  // outflow - inflow
    double residual = 0.0;
    std::map<int, double> outflow_by_attr;  // keyed by boundary attribute
};

inline BalanceReport balance_report(const TransportOperator& op, const SolverState& state) {
    const int nu = op.block_size();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(nu);
    BalanceReport rep;
    for (int d = 0; d < op.quad.size(); ++d) {
        const auto& ord = op.ordinates[d];
        const double w = op.quad[d].weight;
        rep.source_volume += w * ord.source_volume.sum();
        rep.inflow += w * ord.source_boundary.sum();
        for (size_t bi = 0; bi < op.mesh->boundary_faces().size(); ++bi) {
            const BoundaryFace& bf = op.mesh->boundary_faces()[bi];
            const double out =
                w * ones.dot(ord.boundary_outflow[bi] *
                             state.psi[d].segment(bf.elem * nu, nu));
            rep.outflow += out;
            rep.outflow_by_attr[bf.attr] += out;
        }
    }
    for (int e = 0; e < op.num_elements(); ++e)
        rep.absorption += ones.dot((op.mass_total[e] - op.mass_scatter[e]) *
                                   state.phi.segment(e * nu, nu));
    rep.source_total = rep.source_volume + rep.inflow;
    rep.net_leakage = rep.outflow - rep.inflow;
    rep.residual = rep.source_volume + rep.inflow - rep.absorption - rep.outflow;
    return rep;
}

}  // namespace hosweep

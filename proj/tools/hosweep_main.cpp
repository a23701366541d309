// hosweep: discrete-ordinates DG transport on curved 2D meshes with
// graph-scheduled sweeps. Subcommands: generate-mesh, straighten,
// graph-info, solve, mms.

#include "hosweep/config.hpp"
#include "hosweep/generators.hpp"
#include "hosweep/mesh_io.hpp"
#include "hosweep/sweepgraph.hpp"
#include "hosweep/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace hosweep;
namespace fs = std::filesystem;

// Shortest round-trip formatting for deterministic CSV output.
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Flags seed the base configuration; keys present in the config file
// override them.
RunConfig load_config(const std::string& path, const RunConfig& base = {}) {
    if (path.empty()) return base;
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return config_from_json(j, base);
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

void write_convergence_csv(const fs::path& path, const ConvergenceHistory& history) {
    std::ofstream out = open_out(path);
    out << "iteration,error";
    if (!history.per_ordinate.empty())
        for (size_t d = 0; d < history.per_ordinate[0].size(); ++d) out << ",err_" << d;
    out << "\n";
    for (size_t it = 0; it < history.error.size(); ++it) {
        out << (it + 1) << "," << fmt(history.error[it]);
        for (double e : history.per_ordinate[it]) out << "," << fmt(e);
        out << "\n";
    }
}

void write_balance_json(const fs::path& path, const BalanceReport& rep) {
    nlohmann::json j;
    j["source_volume"] = rep.source_volume;
    j["inflow"] = rep.inflow;
    j["source_total"] = rep.source_total;
    j["absorption"] = rep.absorption;
    j["outflow"] = rep.outflow;
    j["net_leakage"] = rep.net_leakage;
    j["residual"] = rep.residual;
    nlohmann::json by_attr = nlohmann::json::object();
    for (const auto& [attr, value] : rep.outflow_by_attr)
        by_attr[std::to_string(attr)] = value;
    j["outflow_by_attr"] = by_attr;
    open_out(path) << j.dump(1) << "\n";
}

void write_solution_csv(const fs::path& path, const Problem& p, const SolverState& state) {
    std::ofstream out = open_out(path);
    out << "element,node,x,y,phi\n";
    const int nu = p.basis->size();
    for (int e = 0; e < p.mesh->num_elements(); ++e)
        for (int m = 0; m < nu; ++m) {
            const Vec2 x = p.mesh->map_point(e, p.basis->node(m));
            out << e << "," << m << "," << fmt(x[0]) << "," << fmt(x[1]) << ","
                << fmt(state.phi[e * nu + m]) << "\n";
        }
}

int cmd_generate_mesh(const std::string& kind, int nx, int ny, int order, double amplitude,
                      double swirl, const std::vector<double>& rect,
                      const AnnulusSpec& annulus, const std::string& output) {
    HighOrderMesh mesh = [&] {
        if (kind == "uniform")
            return generate_uniform(nx, ny, order, Rect{rect[0], rect[1], rect[2], rect[3]});
        if (kind == "distorted") return generate_distorted(nx, ny, order, amplitude, swirl);
        if (kind == "annulus") return generate_annulus_in_square(annulus);
        throw std::invalid_argument("unknown mesh kind '" + kind + "'");
    }();
    write_mesh(mesh, output);
    std::cout << "wrote " << output << ": order " << mesh.order() << ", "
              << mesh.num_elements() << " elements, " << mesh.num_control_points()
              << " control points, " << mesh.interior_faces().size() << " interior faces\n";
    return 0;
}

int cmd_straighten(const std::string& mesh_path, int n_ref, const std::string& output,
                   const std::string& report_path) {
    const HighOrderMesh mesh = read_mesh(mesh_path);
    auto [flat, report] = straighten(mesh, n_ref);
    write_mesh(flat, output);
    std::cout << "wrote " << output << ": " << flat.num_elements() << " linear elements ("
              << n_ref << "x" << n_ref << " per input element), "
              << report.invalid_elements.size() << " with non-positive corner Jacobians\n";
    if (!report_path.empty()) {
        nlohmann::json j;
        j["n_ref"] = n_ref;
        j["elements"] = flat.num_elements();
        j["invalid_elements"] = report.invalid_elements;
        open_out(report_path) << j.dump(1) << "\n";
    }
    return report.valid() ? 0 : 2;
}

int cmd_graph_info(const std::string& mesh_path, const RunConfig& config,
                   const std::string& weighting_arg, const std::string& csv_path,
                   const std::string& dot_dir, const std::string& edges_dir) {
    const HighOrderMesh mesh = read_mesh(mesh_path);
    Problem p = build_problem(mesh, config);

    std::vector<EdgeWeighting> weightings;
    if (weighting_arg == "all")
        weightings = {EdgeWeighting::unity, EdgeWeighting::face,
                      EdgeWeighting::sig_inv_face};
    else
        weightings = {parse_weighting(weighting_arg)};

    std::optional<std::ofstream> csv;
    if (!csv_path.empty()) {
        csv.emplace(open_out(csv_path));
        *csv << "ordinate,mu,eta,weighting,edges,simple_sccs,large_sccs,large_scc_sizes,"
                "lagged_edges,lagged_weight\n";
    }

    std::printf("%3s %9s %9s %11s %6s %7s %6s %8s %7s %12s\n", "ord", "mu", "eta",
                "weighting", "edges", "simple", "large", "sizes", "lagged", "W_L");
    for (int d = 0; d < p.quad.size(); ++d) {
        for (EdgeWeighting w : weightings) {
            const DependencyGraph g = build_graph(p.op, d, w);
            const SweepOrdering ord = sweep_ordering(g, config.solver.exact_fas_threshold);
            const GraphSummary s = summarize_graph(g, ord);
            std::string sizes;
            for (size_t i = 0; i < s.large_scc_sizes.size(); ++i)
                sizes += (i ? ";" : "") + std::to_string(s.large_scc_sizes[i]);
            std::printf("%3d %9.5f %9.5f %11s %6d %7d %6d %8s %7d %12.5g\n", d,
                        p.quad[d].mu(), p.quad[d].eta(), to_string(w), s.total_edges,
                        s.simple_sccs, s.large_sccs, sizes.empty() ? "-" : sizes.c_str(),
                        s.lagged_edges, s.lagged_weight);
            if (csv)
                *csv << d << "," << fmt(p.quad[d].mu()) << "," << fmt(p.quad[d].eta()) << ","
                     << to_string(w) << "," << s.total_edges << "," << s.simple_sccs << ","
                     << s.large_sccs << "," << sizes << "," << s.lagged_edges << ","
                     << fmt(s.lagged_weight) << "\n";
            if (!dot_dir.empty()) {
                std::ofstream dot = open_out(fs::path(dot_dir) /
                                             ("ordinate_" + std::to_string(d) + "_" +
                                              to_string(w) + ".dot"));
                write_dot(dot, g, ord);
            }
            if (!edges_dir.empty()) {
                // Block-sparsity pattern as a plain edge list: "e e' weight".
                std::ofstream list = open_out(fs::path(edges_dir) /
                                              ("ordinate_" + std::to_string(d) + "_" +
                                               to_string(w) + ".txt"));
                for (const auto& edge : g.edges)
                    list << edge.from << " " << edge.to << " " << fmt(edge.weight) << "\n";
            }
        }
    }
    return 0;
}

int cmd_solve(const std::string& mesh_path, const RunConfig& config) {
    const std::string mesh_file = mesh_path.empty() ? config.mesh : mesh_path;
    if (mesh_file.empty()) throw ConfigError("solve: no mesh given (flag or config)");
    const HighOrderMesh mesh = read_mesh(mesh_file);
    Problem p = build_problem(mesh, config);
    const fs::path out(config.output_dir);

    const bool run_sweep = config.solver.mode == "sweep" || config.solver.mode == "both";
    const bool run_oracle = config.solver.mode == "oracle" || config.solver.mode == "both";
    bool all_converged = true;

    std::optional<SolverState> primary_state;
    if (run_sweep) {
        SweepSolver solver(p.op, p.solve_options);
        auto [state, history] = solver.source_iteration();
        write_convergence_csv(out / "convergence.csv", history);
        std::cout << "sweep: " << history.iterations() << " iterations, final error "
                  << fmt(history.error.empty() ? 0.0 : history.error.back())
                  << ", lagged edges " << solver.total_lagged_edges()
                  << (history.converged ? "" : " (NOT converged)") << "\n";
        all_converged = all_converged && history.converged;
        primary_state = std::move(state);
    }
    if (run_oracle) {
        SolveOptions oracle_options = p.solve_options;
        oracle_options.mode = SolveOptions::Mode::direct_oracle;
        SweepSolver solver(p.op, oracle_options);
        auto [state, history] = solver.source_iteration();
        write_convergence_csv(out / "convergence_oracle.csv", history);
        std::cout << "oracle: " << history.iterations() << " iterations, final error "
                  << fmt(history.error.empty() ? 0.0 : history.error.back())
                  << (history.converged ? "" : " (NOT converged)") << "\n";
        all_converged = all_converged && history.converged;
        if (!primary_state) primary_state = std::move(state);
    }

    write_balance_json(out / "balance.json", balance_report(p.op, *primary_state));
    write_solution_csv(out / "solution.csv", p, *primary_state);
    if (p.mms) {
        const double err = l2_error(*p.mesh, *p.basis, primary_state->phi,
                                    [&](const Vec2& x) { return p.mms->phi(x); });
        std::cout << "mms L2 error: " << fmt(err) << "\n";
    }
    return all_converged ? 0 : 2;
}

int cmd_mms(RunConfig config, const std::vector<std::string>& mesh_paths,
            const std::string& csv_path) {
    config.source.type = "mms";
    config.boundary.type = "mms";

    struct Row {
        std::string mesh;
        int unknowns;
        double h;
        double error;
    };
    std::vector<Row> rows;
    for (const std::string& path : mesh_paths) {
        const HighOrderMesh mesh = read_mesh(path);
        Problem p = build_problem(mesh, config);
        SweepSolver solver(p.op, p.solve_options);
        auto [state, history] = solver.source_iteration();
        if (!history.converged)
            throw SolverError("mms: source iteration did not converge on " + path);
        const double err = l2_error(*p.mesh, *p.basis, state.phi,
                                    [&](const Vec2& x) { return p.mms->phi(x); });
        rows.push_back({path, p.op.num_dofs(),
                        1.0 / std::sqrt(double(p.mesh->num_elements())), err});
    }

    std::optional<std::ofstream> csv;
    if (!csv_path.empty()) {
        csv.emplace(open_out(csv_path));
        *csv << "mesh,unknowns,l2_error";
        if (rows.size() > 1) *csv << ",order";
        *csv << "\n";
    }
    std::printf("%-40s %10s %14s %8s\n", "mesh", "unknowns", "l2_error", "order");
    for (size_t i = 0; i < rows.size(); ++i) {
        std::string order;
        if (i > 0)
            order = fmt(std::log(rows[i - 1].error / rows[i].error) /
                        std::log(rows[i - 1].h / rows[i].h));
        std::printf("%-40s %10d %14.6e %8s\n", rows[i].mesh.c_str(), rows[i].unknowns,
                    rows[i].error, order.empty() ? "-" : order.c_str());
        if (csv) {
            *csv << rows[i].mesh << "," << rows[i].unknowns << "," << fmt(rows[i].error);
            if (rows.size() > 1) *csv << "," << order;
            *csv << "\n";
        }
    }
    if (rows.size() >= 3) {
        std::vector<std::pair<double, double>> levels;
        for (const Row& r : rows) levels.push_back({r.h, r.error});
        const OrderFit fit = convergence_order(levels);
        std::cout << "observed order (least squares): " << fmt(fit.order)
                  << (fit.monotone ? "" : "  [warning: errors not monotone]") << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-order DG discrete-ordinates transport with graph-scheduled sweeps.\n"
                 "Worker threads are capped by the HOSWEEP_THREADS environment variable."};
    app.require_subcommand(1);

    // generate-mesh
    auto* gen = app.add_subcommand("generate-mesh", "Write a generated mesh as JSON");
    std::string kind, output;
    int nx = 4, ny = 4, order = 3;
    double amplitude = 0.0, swirl = 0.0;
    std::vector<double> rect = {0.0, 0.0, 1.0, 1.0};
    AnnulusSpec annulus;
    std::vector<int> layers = {1, 1, 2};
    gen->add_option("kind", kind, "uniform | annulus | distorted")->required();
    gen->add_option("-o,--output", output, "output mesh file")->required();
    gen->add_option("--nx", nx, "cells in x");
    gen->add_option("--ny", ny, "cells in y");
    gen->add_option("--order", order, "geometric polynomial order");
    gen->add_option("--amplitude", amplitude, "distortion amplitude");
    gen->add_option("--swirl", swirl, "domain-scale vortex amplitude");
    gen->add_option("--rect", rect, "domain rectangle x0 y0 x1 y1")->expected(4);
    gen->add_option("--r1", annulus.r1, "inner circle radius");
    gen->add_option("--r2", annulus.r2, "outer circle radius");
    gen->add_option("--half-width", annulus.half_width, "square half-width");
    gen->add_option("--segments", annulus.segments, "angular segments (multiple of 8)");
    gen->add_option("--layers", layers, "radial layers: inner outer blend")->expected(3);
    gen->add_option("--blend-fraction", annulus.blend_fraction,
                    "relative position of the blend circle in (0,1)");

    // straighten
    auto* str = app.add_subcommand("straighten", "Project a mesh onto a refined linear mesh");
    std::string mesh_path, report_path;
    int n_ref = 1;
    str->add_option("--mesh", mesh_path, "input mesh file")->required();
    str->add_option("--nref", n_ref, "subdivisions per direction")->required();
    str->add_option("-o,--output", output, "output mesh file")->required();
    str->add_option("--report", report_path, "validity report JSON");

    // graph-info
    auto* gi = app.add_subcommand("graph-info", "Per-ordinate sweep-graph summary");
    std::string config_path, weighting = "all", csv_path, dot_dir, edges_dir;
    int dg_order_override = 0, quad_override = 0;
    gi->add_option("--mesh", mesh_path, "mesh file")->required();
    gi->add_option("--config", config_path, "run configuration JSON");
    gi->add_option("--weighting", weighting, "unity | face | siginvface | all");
    gi->add_option("--dg-order", dg_order_override, "override DG order");
    gi->add_option("--quad", quad_override, "override S_N order (2 or 4)");
    gi->add_option("--csv", csv_path, "summary CSV output");
    gi->add_option("--dot", dot_dir, "directory for DOT graph exports");
    gi->add_option("--edges", edges_dir, "directory for plain edge-list dumps");

    // solve
    auto* sol = app.add_subcommand("solve", "Run source iteration");
    std::string mode, out_dir;
    sol->add_option("--mesh", mesh_path, "mesh file (config value used when omitted)");
    sol->add_option("--config", config_path, "run configuration JSON");
    sol->add_option("--mode", mode, "sweep | oracle | both (config value wins if set there)");
    sol->add_option("-o,--output", out_dir, "output directory (config value wins if set there)");

    // mms
    auto* mms = app.add_subcommand("mms", "Manufactured-solution error study");
    std::vector<std::string> mesh_paths;
    mms->add_option("--mesh", mesh_paths, "mesh files, coarse to fine")->required();
    mms->add_option("--config", config_path, "run configuration JSON");
    mms->add_option("--csv", csv_path, "error table CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            annulus.order = order;
            annulus.layers_inner = layers[0];
            annulus.layers_outer = layers[1];
            annulus.layers_blend = layers[2];
            return cmd_generate_mesh(kind, nx, ny, order, amplitude, swirl, rect, annulus, output);
        }
        if (str->parsed()) return cmd_straighten(mesh_path, n_ref, output, report_path);

        // Flags seed the configuration; the config file overrides them.
        RunConfig base;
        if (dg_order_override > 0) base.dg_order = dg_order_override;
        if (quad_override > 0) base.quadrature = quad_override;
        if (!mode.empty()) base.solver.mode = mode;
        if (!out_dir.empty()) base.output_dir = out_dir;
        const RunConfig config = load_config(config_path, base);
        if (gi->parsed())
            return cmd_graph_info(mesh_path, config, weighting, csv_path, dot_dir,
                                  edges_dir);
        if (sol->parsed()) return cmd_solve(mesh_path, config);
        if (mms->parsed()) return cmd_mms(config, mesh_paths, csv_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

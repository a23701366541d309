// Run configuration: JSON schema, strict parsing and serialization, plus
// construction of the assembled problem a configuration describes.
#pragma once

#include "hosweep/angular.hpp"
#include "hosweep/assembly.hpp"
#include "hosweep/solver.hpp"
#include "hosweep/verification.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace hosweep {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declarative description of one transport run. Source and boundary
/// values are named presets rather than free-form expressions.
struct RunConfig {
    std::string mesh;  // optional mesh file path; CLI flags may override
    int dg_order = 1;
    int quadrature = 4;  // S_N order: 2 or 4
    std::map<int, CrossSections> cross_sections = {{0, {1.0, 0.0}}};

    struct Source {
        std::string type = "constant";  // constant | triple-point | mms
        double value = 1.0;
    } source;

    struct Boundary {
        std::string type = "vacuum";  // vacuum | constant | mms
        double value = 0.0;
    } boundary;

    std::string weighting = "face";  // unity | face | siginvface

    struct Solver {
        double tolerance = 1e-14;
        int max_iterations = 400;
        std::string mode = "sweep";  // sweep | oracle | both
        int exact_fas_threshold = 10;
    } solver;

    std::string output_dir = ".";
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw ConfigError("config: unknown key '" + key + "' in " + where);
}

}  // namespace detail

inline EdgeWeighting parse_weighting(const std::string& name) {
    if (name == "unity") return EdgeWeighting::unity;
    if (name == "face") return EdgeWeighting::face;
    if (name == "siginvface") return EdgeWeighting::sig_inv_face;
    throw ConfigError("config: unknown weighting '" + name + "'");
}

/// Parse a configuration, starting from `base`: keys present in the JSON
/// override the base values (so a config file takes precedence over any
/// command-line flags baked into the base), absent keys keep them.
inline RunConfig config_from_json(const nlohmann::json& j, const RunConfig& base = {}) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    detail::reject_unknown_keys(j,
                                {"mesh", "dg_order", "quadrature", "cross_sections",
                                 "source", "boundary", "weighting", "solver", "output_dir"},
                                "top level");
    RunConfig c = base;
    c.mesh = j.value("mesh", c.mesh);
    c.dg_order = j.value("dg_order", c.dg_order);
    if (c.dg_order < 1) throw ConfigError("config: dg_order must be >= 1");
    if (j.contains("quadrature")) {
        const std::string q = j.at("quadrature").get<std::string>();
        if (q == "S2")
            c.quadrature = 2;
        else if (q == "S4")
            c.quadrature = 4;
        else
            throw ConfigError("config: quadrature must be \"S2\" or \"S4\"");
    }
    if (j.contains("cross_sections")) {
        c.cross_sections.clear();
        for (const auto& [key, xs] : j.at("cross_sections").items()) {
            detail::reject_unknown_keys(xs, {"sigma_t", "sigma_s"},
                                        "cross_sections." + key);
            int region = 0;
            try {
                region = std::stoi(key);
            } catch (const std::exception&) {
                throw ConfigError("config: cross-section key '" + key +
                                  "' is not a region attribute");
            }
            c.cross_sections[region] = {xs.at("sigma_t").get<double>(),
                                        xs.at("sigma_s").get<double>()};
        }
        if (c.cross_sections.empty())
            throw ConfigError("config: cross_sections must not be empty");
    }
    if (j.contains("source")) {
        detail::reject_unknown_keys(j.at("source"), {"type", "value"}, "source");
        c.source.type = j.at("source").value("type", c.source.type);
        c.source.value = j.at("source").value("value", c.source.value);
        if (c.source.type != "constant" && c.source.type != "triple-point" &&
            c.source.type != "mms")
            throw ConfigError("config: unknown source type '" + c.source.type + "'");
    }
    if (j.contains("boundary")) {
        detail::reject_unknown_keys(j.at("boundary"), {"type", "value"}, "boundary");
        c.boundary.type = j.at("boundary").value("type", c.boundary.type);
        c.boundary.value = j.at("boundary").value("value", c.boundary.value);
        if (c.boundary.type != "vacuum" && c.boundary.type != "constant" &&
            c.boundary.type != "mms")
            throw ConfigError("config: unknown boundary type '" + c.boundary.type + "'");
    }
    c.weighting = j.value("weighting", c.weighting);
    parse_weighting(c.weighting);  // validates
    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        detail::reject_unknown_keys(
            s, {"tolerance", "max_iterations", "mode", "exact_fas_threshold"}, "solver");
        c.solver.tolerance = s.value("tolerance", c.solver.tolerance);
        c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
        c.solver.mode = s.value("mode", c.solver.mode);
        c.solver.exact_fas_threshold =
            s.value("exact_fas_threshold", c.solver.exact_fas_threshold);
        if (c.solver.tolerance <= 0.0) throw ConfigError("config: tolerance must be > 0");
        if (c.solver.mode != "sweep" && c.solver.mode != "oracle" && c.solver.mode != "both")
            throw ConfigError("config: solver mode must be sweep, oracle or both");
        if (c.solver.exact_fas_threshold < 1 || c.solver.exact_fas_threshold > 20)
            throw ConfigError("config: exact_fas_threshold must be in [1, 20]");
    }
    c.output_dir = j.value("output_dir", c.output_dir);

    // Manufactured runs prescribe their own boundary values.
    if (c.source.type == "mms") c.boundary.type = "mms";
    if (c.boundary.type == "mms" && c.source.type != "mms")
        throw ConfigError("config: boundary type mms requires source type mms");
    return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["mesh"] = c.mesh;
    j["dg_order"] = c.dg_order;
    j["quadrature"] = c.quadrature == 2 ? "S2" : "S4";
    nlohmann::json xs = nlohmann::json::object();
    for (const auto& [region, s] : c.cross_sections)
        xs[std::to_string(region)] = {{"sigma_t", s.sigma_t}, {"sigma_s", s.sigma_s}};
    j["cross_sections"] = xs;
    j["source"] = {{"type", c.source.type}, {"value", c.source.value}};
    j["boundary"] = {{"type", c.boundary.type}, {"value", c.boundary.value}};
    j["weighting"] = c.weighting;
    j["solver"] = {{"tolerance", c.solver.tolerance},
                   {"max_iterations", c.solver.max_iterations},
                   {"mode", c.solver.mode},
                   {"exact_fas_threshold", c.solver.exact_fas_threshold}};
    j["output_dir"] = c.output_dir;
    return j;
}

/// A configuration materialized against a mesh: stable storage for the
/// mesh/basis plus the assembled operator and solver options.
struct Problem {
    std::unique_ptr<HighOrderMesh> mesh;
    std::unique_ptr<ReferenceBasis> basis;
    AngularQuadrature quad;
    std::unique_ptr<ManufacturedSolution> mms;  // set for mms runs
    TransportOperator op;
    SolveOptions solve_options;
};

inline Problem build_problem(HighOrderMesh mesh_in, const RunConfig& config) {
    Problem p;
    p.mesh = std::make_unique<HighOrderMesh>(std::move(mesh_in));
    p.basis = std::make_unique<ReferenceBasis>(config.dg_order);
    p.quad = level_symmetric_2d(config.quadrature);

    CrossSectionField xsec = CrossSectionField::by_region(config.cross_sections);
    SourceSpec source;
    if (config.source.type == "mms") {
        // Manufactured runs use spatially constant cross sections; take the
        // first table entry.
        const CrossSections xs = config.cross_sections.begin()->second;
        p.mms = std::make_unique<ManufacturedSolution>(p.quad, xs.sigma_t, xs.sigma_s);
        xsec = CrossSectionField::constant(xs.sigma_t, xs.sigma_s);
        source = p.mms->source_spec();
    } else {
        if (config.source.type == "triple-point") {
            source.volumetric = [](int, const Vec2& x) {
                const double s = std::sin(2.0 * x[0] + x[1]);
                return 1.0 + s * s;
            };
        } else {
            const double q = config.source.value;
            source.volumetric = [q](int, const Vec2&) { return q; };
        }
        const double inc = config.boundary.type == "constant" ? config.boundary.value : 0.0;
        source.incident = [inc](int, const Vec2&) { return inc; };
    }

    p.op = assemble_transport_operator(*p.mesh, *p.basis, p.quad, xsec, source);

    p.solve_options.tolerance = config.solver.tolerance;
    p.solve_options.max_iterations = config.solver.max_iterations;
    p.solve_options.weighting = parse_weighting(config.weighting);
    p.solve_options.exact_fas_threshold = config.solver.exact_fas_threshold;
    return p;
}

}  // namespace hosweep

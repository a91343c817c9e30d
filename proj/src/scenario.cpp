#include "nambu/scenario.hpp"

#include "nambu/builtins.hpp"
#include "nambu/dynamics.hpp"
#include "nambu/embedding.hpp"
#include "nambu/expr.hpp"
#include "nambu/fields.hpp"
#include "nambu/rng.hpp"
#include "nambu/statmech.hpp"
#include "nambu/verify.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace nambu {

namespace {

using json = nlohmann::ordered_json;

struct ScenarioError : std::runtime_error {
    int exit_code;
    ScenarioError(const std::string& what, int code)
        : std::runtime_error(what), exit_code(code) {}
};

// -----------------------------------------------------------------------------
// System loading
// -----------------------------------------------------------------------------

struct LoadedSystem {
    std::string label;
    std::optional<BuiltinBundle> builtin;
    std::optional<HamiltonianSystem> inline_hamiltonian;
    std::optional<NambuSystem> inline_nambu;
    std::optional<VariableMap> inline_map;
    std::vector<ScalarField> inline_map_constraints;
};

std::vector<std::string> name_list(const json& j, const char* key) {
    std::vector<std::string> names;
    for (const auto& n : j.at(key)) names.push_back(n.get<std::string>());
    return names;
}

LoadedSystem load_system(const json& spec) {
    LoadedSystem sys;
    if (spec.contains("builtin")) {
        BuiltinParams params;
        if (spec.contains("params")) {
            const auto& p = spec["params"];
            params.mass = p.value("mass", 1.0);
            params.frequency = p.value("frequency", 1.0);
            params.light_speed = p.value("light-speed", 1.0);
        }
        sys.builtin = make_builtin(spec.at("builtin").get<std::string>(), params);
        sys.label = sys.builtin->name;
        return sys;
    }
    if (!spec.contains("inline"))
        throw ScenarioError("system must name a builtin or give an inline definition", 1);

    const auto& def = spec["inline"];
    const std::string kind = def.at("kind").get<std::string>();
    if (kind == "hamiltonian") {
        const int pairs = def.at("pairs").get<int>();
        const auto names = name_list(def, "coordinates");
        if ((int)names.size() != 2 * pairs)
            throw ScenarioError("inline hamiltonian: need 2*pairs coordinates", 1);
        sys.inline_hamiltonian = make_hamiltonian_system(
            pairs, expression_field(def.at("hamiltonian").get<std::string>(), names));
        sys.label = "inline-hamiltonian";
        return sys;
    }
    if (kind == "nambu") {
        const int arity = def.at("arity").get<int>();
        const auto names = name_list(def, "coordinates");
        if ((int)names.size() != arity)
            throw ScenarioError("inline nambu: coordinates must match arity", 1);
        std::vector<ScalarField> constraints;
        for (const auto& c : def.at("constraints"))
            constraints.push_back(expression_field(c.get<std::string>(), names));
        sys.inline_nambu = make_nambu_system(
            multiplet_layout(1, arity),
            expression_field(def.at("hamiltonian").get<std::string>(), names),
            std::move(constraints));
        sys.label = "inline-nambu";
        return sys;
    }
    if (kind == "map") {
        const auto chart_names = name_list(def, "chart");
        if (chart_names.size() % 2 != 0)
            throw ScenarioError("inline map: chart needs whole doublets", 1);
        std::vector<ScalarField> components;
        for (const auto& c : def.at("components"))
            components.push_back(expression_field(c.get<std::string>(), chart_names));
        sys.inline_map = make_variable_map(doublet_layout((int)chart_names.size() / 2),
                                           std::move(components));
        std::vector<std::string> image_names;
        if (def.contains("image-coordinates")) {
            image_names = name_list(def, "image-coordinates");
        } else {
            for (int i = 0; i < sys.inline_map->image_dim; ++i)
                image_names.push_back("x" + std::to_string(i + 1));
        }
        for (const auto& c : def.at("constraints"))
            sys.inline_map_constraints.push_back(
                expression_field(c.get<std::string>(), image_names));
        sys.label = "inline-map";
        return sys;
    }
    throw ScenarioError("inline system kind must be hamiltonian, nambu, or map", 1);
}

// -----------------------------------------------------------------------------
// Shared helpers
// -----------------------------------------------------------------------------

std::vector<std::vector<double>> sample_points(std::uint64_t seed, int count, int dim,
                                               double lo, double hi) {
    const CounterRng rng{seed};
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < dim; ++j)
            pts[i][j] = rng.uniform((std::uint64_t)j, (std::uint64_t)i, lo, hi);
    return pts;
}

std::string resolve_output(const std::string& out_dir, const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (!out_dir.empty() && p.is_relative()) p = fs::path(out_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot open for writing: " + path, 1);
    out << text << "\n";
}

std::vector<double> state_from_json(const json& j) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

IntegratorConfig integrator_from_json(const json& cfg) {
    IntegratorConfig ic;
    ic.dt = cfg.value("dt", 1e-3);
    ic.steps = cfg.value("steps", 1000L);
    ic.variational = cfg.value("variational", false);
    const std::string method = cfg.value("method", std::string("rk4"));
    if (method == "rk4")
        ic.method = IntegratorConfig::Method::rk4;
    else if (method == "explicit-euler")
        ic.method = IntegratorConfig::Method::explicit_euler;
    else
        throw ScenarioError("unknown integrator method: " + method, 1);
    return ic;
}

PartitionConfig partition_from_json(const json& cfg, std::uint64_t seed) {
    PartitionConfig pc;
    pc.beta = cfg.value("beta", 1.0);
    pc.radius = cfg.value("radius", 8.0);
    pc.samples = cfg.value("samples", (std::int64_t)1'000'000);
    pc.points_per_axis = cfg.value("points-per-axis", 64);
    pc.seed = seed;
    const std::string est = cfg.value("estimator", std::string("monte-carlo"));
    if (est == "monte-carlo")
        pc.estimator = PartitionConfig::Estimator::monte_carlo;
    else if (est == "tensor-quadrature")
        pc.estimator = PartitionConfig::Estimator::tensor_quadrature;
    else
        throw ScenarioError("unknown estimator: " + est, 1);
    if (cfg.contains("bounds"))
        for (const auto& b : cfg["bounds"])
            pc.bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
    return pc;
}

json estimate_to_json(const PartitionEstimate& est) {
    json j;
    j["value"] = est.value;
    j["stderr"] = est.stderr_;
    j["method"] = est.method;
    j["beta"] = est.beta;
    j["seed"] = est.seed;
    j["excluded_mass_bound"] = est.excluded_mass_bound;
    j["branch_count"] = est.branch_count;
    j["tail_bound"] = est.tail_bound;
    j["excluded_count"] = est.excluded_count;
    return j;
}

// -----------------------------------------------------------------------------
// Tasks
// -----------------------------------------------------------------------------

ScenarioResult run_simulate(const LoadedSystem& sys, const json& scenario,
                            const ScenarioOverrides& overrides) {
    const json cfg = scenario.value("simulate", json::object());
    const IntegratorConfig ic = integrator_from_json(cfg);
    const std::string formulation = cfg.value("formulation", std::string("nambu"));

    VelocityField rhs;
    std::vector<double> start;
    std::vector<Observable> observables;

    auto initial_or_chart = [&](const VariableMap& map) {
        if (cfg.contains("initial-chart")) return map.apply(state_from_json(cfg["initial-chart"]));
        return state_from_json(cfg.at("initial"));
    };

    if (sys.builtin) {
        const auto& b = *sys.builtin;
        if (formulation == "hamiltonian") {
            rhs = hamiltonian_rhs_field(b.hamiltonian_system);
            start = state_from_json(cfg.at("initial"));
            observables.push_back({"H", b.hamiltonian_system.hamiltonian});
        } else if (formulation == "nambu" && b.nambu) {
            rhs = nambu_rhs_field(*b.nambu);
            start = initial_or_chart(b.map);
            observables = nambu_observables(*b.nambu);
        } else if (formulation == "generalized" && b.generalized) {
            rhs = generalized_nambu_rhs_field(*b.generalized);
            start = initial_or_chart(b.map);
            observables.push_back({"H", b.generalized->hamiltonian});
            int gi = 0;
            for (const auto& block : b.generalized->blocks)
                for (const auto& c : block.constraints)
                    observables.push_back({"G" + std::to_string(++gi), c});
        } else if (formulation == "least-action" && b.nambu) {
            rhs = least_action_rhs_field(b.map, b.nambu->hamiltonian);
            start = initial_or_chart(b.map);
            observables = nambu_observables(*b.nambu);
        } else {
            throw ScenarioError("formulation '" + formulation + "' not available for " +
                                    sys.label,
                                1);
        }
    } else if (sys.inline_hamiltonian) {
        rhs = hamiltonian_rhs_field(*sys.inline_hamiltonian);
        start = state_from_json(cfg.at("initial"));
        observables.push_back({"H", sys.inline_hamiltonian->hamiltonian});
    } else if (sys.inline_nambu) {
        rhs = nambu_rhs_field(*sys.inline_nambu);
        start = state_from_json(cfg.at("initial"));
        observables = nambu_observables(*sys.inline_nambu);
    } else {
        throw ScenarioError("simulate needs a simulatable system", 1);
    }

    const Trajectory traj = integrate(rhs, start, ic, observables);

    const json outputs = scenario.value("outputs", json::object());
    if (outputs.contains("trajectory"))
        write_trajectory_csv(traj, resolve_output(overrides.out_dir,
                                                  outputs["trajectory"].get<std::string>()));

    json report;
    report["task"] = "simulate";
    report["system"] = sys.label;
    report["formulation"] = formulation;
    report["method"] = cfg.value("method", std::string("rk4"));
    report["dt"] = ic.dt;
    report["steps"] = ic.steps;
    report["truncated"] = traj.truncated;
    if (traj.truncated) report["error"] = traj.error;
    report["final_time"] = traj.times.back();
    report["final_state"] = traj.states.back();
    json diag;
    for (size_t i = 0; i < traj.diagnostic_names.size(); ++i)
        diag[traj.diagnostic_names[i]] = traj.diagnostics.back()[i];
    report["final_diagnostics"] = diag;
    if (outputs.contains("report"))
        write_text(resolve_output(overrides.out_dir, outputs["report"].get<std::string>()),
                   report.dump(2));

    std::ostringstream msg;
    msg << "simulate " << sys.label << " (" << formulation << "): " << traj.size() - 1
        << " steps to t=" << traj.times.back();
    if (traj.truncated) {
        msg << " [truncated: " << traj.error << "]";
        return {1, msg.str()};
    }
    return {0, msg.str()};
}

ScenarioResult run_verify(const LoadedSystem& sys, const json& scenario,
                          const ScenarioOverrides& overrides, std::uint64_t seed) {
    const json cfg = scenario.value("verify", json::object());
    const int count = cfg.value("points", 100);
    const double lo = cfg.contains("range") ? cfg["range"].at(0).get<double>() : 0.35;
    const double hi = cfg.contains("range") ? cfg["range"].at(1).get<double>() : 1.35;
    double threshold = cfg.value("threshold", 1e-8);
    if (overrides.tolerance) threshold = *overrides.tolerance;

    json parts;
    double residual = 0.0;
    if (sys.builtin) {
        const auto& b = *sys.builtin;
        const auto points = sample_points(seed, count, b.map.chart.dim(), lo, hi);
        if (b.nambu) {
            const double r = verify_induced_constraints(b.map, b.nambu->constraints, points);
            parts["induced_constraints"] = r;
            residual = std::max(residual, r);
        }
        if (b.generalized) {
            const auto r = verify_generalized_conditions(*b.generalized, b.map, points);
            parts["xx"] = r.xx;
            parts["xz"] = r.xz;
            parts["zz"] = r.zz;
            residual = std::max(residual, r.max());
        }
        if (!b.nambu && !b.generalized)
            throw ScenarioError("verify: builtin carries no extended description", 1);
    } else if (sys.inline_map) {
        const auto points = sample_points(seed, count, sys.inline_map->chart.dim(), lo, hi);
        residual = verify_induced_constraints(*sys.inline_map, sys.inline_map_constraints,
                                              points);
        parts["induced_constraints"] = residual;
    } else {
        throw ScenarioError("verify needs a builtin or an inline map", 1);
    }

    json report;
    report["task"] = "verify";
    report["system"] = sys.label;
    report["points"] = count;
    report["seed"] = seed;
    report["threshold"] = threshold;
    report["residuals"] = parts;
    report["max_residual"] = residual;
    report["pass"] = residual <= threshold;

    const json outputs = scenario.value("outputs", json::object());
    if (outputs.contains("report"))
        write_text(resolve_output(overrides.out_dir, outputs["report"].get<std::string>()),
                   report.dump(2));

    std::ostringstream msg;
    msg << "verify " << sys.label << ": max residual " << residual << " vs threshold "
        << threshold << (residual <= threshold ? " [pass]" : " [fail]");
    return {residual <= threshold ? 0 : 2, msg.str()};
}

ScenarioResult run_partition(const LoadedSystem& sys, const json& scenario,
                             const ScenarioOverrides& overrides, std::uint64_t seed) {
    if (!sys.builtin || !sys.builtin->nambu || !sys.builtin->branches)
        throw ScenarioError("partition needs a builtin with a branch solver", 1);
    const auto& b = *sys.builtin;
    const PartitionConfig pc =
        partition_from_json(scenario.value("partition", json::object()), seed);

    const NormalizationResult result =
        normalization_factor(*b.nambu, b.map, *b.branches, b.hamiltonian_system, pc);

    json report;
    report["task"] = "partition";
    report["system"] = sys.label;
    report["ratio"] = result.ratio;
    report["ratio_stderr"] = result.stderr_;
    report["predicted_branches"] = result.predicted_branches;
    report["nambu"] = estimate_to_json(result.nambu);
    report["hamiltonian"] = estimate_to_json(result.hamiltonian);

    const json outputs = scenario.value("outputs", json::object());
    if (outputs.contains("report"))
        write_text(resolve_output(overrides.out_dir, outputs["report"].get<std::string>()),
                   report.dump(2));

    std::ostringstream msg;
    msg << "partition " << sys.label << ": Z_N/Z_H = " << result.ratio << " +/- "
        << result.stderr_ << " (predicted " << result.predicted_branches << ")";
    return {0, msg.str()};
}

ScenarioResult run_lift(const LoadedSystem& sys, const json& scenario,
                        const ScenarioOverrides& overrides, std::uint64_t seed) {
    const NambuSystem* source = nullptr;
    if (sys.builtin && sys.builtin->nambu)
        source = &*sys.builtin->nambu;
    else if (sys.inline_nambu)
        source = &*sys.inline_nambu;
    else
        throw ScenarioError("lift needs a Nambu source system", 1);

    const json cfg = scenario.value("lift", json::object());
    const int N = source->layout.arity;
    std::vector<std::string> names;
    for (int i = 0; i < N; ++i) names.push_back("x" + std::to_string(i + 1));

    std::vector<ScalarField> extra;
    for (const auto& e : cfg.at("extra"))
        extra.push_back(expression_field(e.get<std::string>(), names));
    LiftSpec spec = make_graph_lift(*source, std::move(extra));

    const int count = cfg.value("points", 50);
    const double lo = cfg.contains("range") ? cfg["range"].at(0).get<double>() : 0.35;
    const double hi = cfg.contains("range") ? cfg["range"].at(1).get<double>() : 1.35;
    double threshold = cfg.value("threshold", 1e-8);
    if (overrides.tolerance) threshold = *overrides.tolerance;
    const auto points = sample_points(seed, count, N, lo, hi);

    const double residual = verify_lift_conditions(spec, points);
    json report;
    report["task"] = "lift";
    report["system"] = sys.label;
    report["extra_maps"] = (int)spec.candidates.size();
    report["seed"] = seed;
    report["threshold"] = threshold;
    report["condition_residual"] = residual;
    report["pass"] = residual <= threshold;

    double projection_error = 0.0;
    if (residual <= threshold && cfg.contains("initial")) {
        const NambuSystem lifted = lift_nambu_system(spec, points, threshold);
        const IntegratorConfig ic = integrator_from_json(cfg);
        const auto x0 = state_from_json(cfg["initial"]);
        const auto y0 = lift_point(spec, x0);
        const Trajectory source_traj = integrate(nambu_rhs_field(*source), x0, ic);
        const Trajectory lifted_traj = integrate(nambu_rhs_field(lifted), y0, ic);
        for (long s = 0; s < source_traj.size(); ++s)
            for (int i = 0; i < N; ++i)
                projection_error = std::max(
                    projection_error,
                    std::abs(source_traj.states[s][i] - lifted_traj.states[s][i]));
        report["projection_error"] = projection_error;

        const json outputs = scenario.value("outputs", json::object());
        if (outputs.contains("trajectory"))
            write_trajectory_csv(
                lifted_traj,
                resolve_output(overrides.out_dir, outputs["trajectory"].get<std::string>()));
    }

    const json outputs = scenario.value("outputs", json::object());
    if (outputs.contains("report"))
        write_text(resolve_output(overrides.out_dir, outputs["report"].get<std::string>()),
                   report.dump(2));

    std::ostringstream msg;
    msg << "lift " << sys.label << ": condition residual " << residual
        << (residual <= threshold ? " [pass]" : " [fail]");
    return {residual <= threshold ? 0 : 2, msg.str()};
}

} // namespace

ScenarioResult run_scenario(const std::string& path, const ScenarioOverrides& overrides) {
    try {
        std::ifstream in(path);
        if (!in) return {1, "cannot open scenario: " + path};
        json scenario;
        try {
            in >> scenario;
        } catch (const json::exception& e) {
            return {1, "scenario parse error: " + std::string(e.what())};
        }

        const LoadedSystem sys = load_system(scenario.at("system"));
        std::uint64_t seed = scenario.value("seed", (std::uint64_t)0x5EEDBA5Eull);
        if (overrides.seed) seed = *overrides.seed;

        std::string task = scenario.value("task", std::string());
        if (overrides.task) task = *overrides.task;
        if (task == "simulate") return run_simulate(sys, scenario, overrides);
        if (task == "verify") return run_verify(sys, scenario, overrides, seed);
        if (task == "partition") return run_partition(sys, scenario, overrides, seed);
        if (task == "lift") return run_lift(sys, scenario, overrides, seed);
        return {1, "unknown task: '" + task + "'"};
    } catch (const ParseError& e) {
        return {1, e.what()};
    } catch (const ScenarioError& e) {
        return {e.exit_code, e.what()};
    } catch (const json::exception& e) {
        return {1, "scenario error: " + std::string(e.what())};
    } catch (const std::exception& e) {
        return {1, e.what()};
    }
}

} // namespace nambu

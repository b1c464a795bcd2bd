#include <CLI11.hpp>

#include <cstdio>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "hjb/config.hpp"
#include "hjb/equivalence.hpp"
#include "hjb/harness.hpp"
#include "hjb/io.hpp"
#include "hjb/oracle.hpp"
#include "hjb/solver.hpp"
#include "hjb/synthesis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariance = 3;
constexpr int kExitGuard = 4;

struct Overrides {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<std::string> policy;
    std::optional<int> levels;
    bool corrupt = false;
};

hjb::RunConfig load_config(const Overrides& ov) {
    hjb::RunConfig cfg = hjb::parse_config_file(ov.config_path);
    if (ov.out_dir) {
        cfg.output_dir = *ov.out_dir;
    }
    if (ov.workers) {
        cfg.workers = *ov.workers;
    }
    if (ov.policy) {
        if (*ov.policy == "strict") {
            cfg.policy = hjb::BoundaryPolicy::strict;
        } else if (*ov.policy == "project") {
            cfg.policy = hjb::BoundaryPolicy::project;
        } else {
            throw hjb::ConfigError("policy must be 'strict' or 'project'");
        }
    }
    if (ov.levels) {
        if (*ov.levels < 1) {
            throw hjb::ConfigError("levels must be >= 1");
        }
        if (cfg.study) {
            cfg.study->levels = *ov.levels;
        }
        if (cfg.lemma1) {
            cfg.lemma1->levels = *ov.levels;
        }
        if (cfg.interp) {
            cfg.interp->levels = *ov.levels;
        }
    }
    return cfg;
}

std::filesystem::path prepare_out_dir(const hjb::RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int cmd_solve(const Overrides& ov) {
    const auto cfg = load_config(ov);
    const auto problem = cfg.build_problem();
    const auto mesh = hjb::Mesh::build(cfg.domain(), cfg.subdivisions);
    const auto grid = cfg.build_grid(problem);
    const auto controls = hjb::discretize_controls(cfg.controls);

    const auto invariance = hjb::check_invariance(problem, mesh, grid, controls);
    if (!invariance.ok && cfg.policy == hjb::BoundaryPolicy::strict) {
        const auto& v = invariance.violations.front();
        std::cout << "error: invariance: " << invariance.violations.size()
                  << " violations under strict policy; first node=" << v.node
                  << " control=" << v.control << " level=" << v.time_level << "\n";
        return kExitInvariance;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto result =
        hjb::solve(problem, mesh, grid, controls, {cfg.policy, cfg.workers});
    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();

    const auto dir = prepare_out_dir(cfg);
    hjb::write_value_dump((dir / "value.tsv").string(), problem, mesh, grid, controls,
                          result, cfg.policy);
    hjb::write_policy_dump((dir / "policy.tsv").string(), mesh, controls, result);
    hjb::write_solve_metadata((dir / "solve.meta.json").string(), problem, mesh, grid,
                              controls, result, invariance, cfg.policy, wall);
    std::cout << "solve: ok nodes=" << mesh.num_vertices() << " steps=" << grid.num_steps
              << " clamps=" << result.clamp_count << "\n";
    return kExitOk;
}

int cmd_oracle(const Overrides& ov) {
    if (!ov.config_path.empty()) {
        // Single-instance check against the configured problem.
        const auto cfg = load_config(ov);
        const auto problem = cfg.build_problem();
        const auto mesh = hjb::Mesh::build(cfg.domain(), cfg.subdivisions);
        const auto grid = cfg.build_grid(problem);
        const auto controls = hjb::discretize_controls(cfg.controls);
        const auto result = hjb::solve(problem, mesh, grid, controls, {cfg.policy, 1});

        double worst = 0.0;
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
            const auto bf = hjb::brute_force_value(mesh.vertex(i), 0, problem, mesh, grid,
                                                   controls, cfg.policy);
            worst = std::max(worst, std::abs(bf.value - result.value.at(0, i)));
        }
        std::cout << "oracle: instance gap=" << worst << "\n";
        return worst <= 1e-10 ? kExitOk : kExitAssertion;
    }

    const auto cases = hjb::default_equivalence_suite();
    const auto outcomes = hjb::run_equivalence_suite(cases, 1e-10, ov.corrupt);
    std::size_t failures = 0;
    double worst = 0.0;
    for (const auto& o : outcomes) {
        worst = std::max({worst, o.gap_characterization, o.gap_policy});
        if (!o.pass) {
            ++failures;
        }
    }
    std::cout << "oracle: cases=" << cases.size() << " evaluations=" << outcomes.size()
              << " failures=" << failures << " worst_gap=" << worst << "\n";
    return failures == 0 ? kExitOk : kExitAssertion;
}

int cmd_converge(const Overrides& ov) {
    const auto cfg = load_config(ov);
    if (!cfg.study) {
        throw hjb::ConfigError("converge requires a 'study' block");
    }
    const auto problem = cfg.build_problem();
    const auto controls = hjb::discretize_controls(cfg.controls);

    hjb::ConvergenceStudyConfig study{
        .domain = cfg.domain(),
        .base_subdivisions = cfg.subdivisions,
        .base_steps = cfg.steps,
        .levels = cfg.study->levels,
        .subdomain = cfg.study->subdomain_lower.empty()
                         ? cfg.domain()
                         : hjb::BoxDomain::create(cfg.study->subdomain_lower,
                                                  cfg.study->subdomain_upper),
        .norm = cfg.study->norm,
        .policy = cfg.policy,
        .workers = cfg.workers,
        .allow_reference = cfg.study->allow_reference,
        .seed = cfg.seed,
    };
    const auto report = hjb::run_convergence(problem, controls, study);
    const auto dir = prepare_out_dir(cfg);
    hjb::write_convergence_report((dir / "convergence.tsv").string(), report);
    std::cout << "converge: levels=" << report.levels.size() << " rate="
              << (report.rate_defined ? std::to_string(report.fitted_rate) : "n/a")
              << " lu_growth=" << (report.lu_growth_flag ? 1 : 0) << "\n";
    return kExitOk;
}

int cmd_lemma1(const Overrides& ov) {
    const auto cfg = load_config(ov);
    if (!cfg.lemma1) {
        throw hjb::ConfigError("lemma1 requires a 'lemma1' block");
    }
    const auto problem = cfg.build_problem();

    hjb::PiecewiseConstantControl base;
    base.start_level = 0;
    base.values.assign(static_cast<std::size_t>(cfg.steps), cfg.lemma1->control);

    hjb::Lemma1StudyConfig study{
        .domain = cfg.domain(),
        .base_subdivisions = cfg.subdivisions,
        .base_steps = cfg.steps,
        .levels = cfg.lemma1->levels,
        .x = cfg.lemma1->x,
        .base_control = std::move(base),
        .substeps = cfg.lemma1->substeps,
        .policy = cfg.policy,
    };
    const auto report = hjb::lemma1_study(problem, study);
    const auto dir = prepare_out_dir(cfg);
    hjb::write_convergence_report((dir / "lemma1.tsv").string(), report);
    std::cout << "lemma1: levels=" << report.levels.size() << " rate="
              << (report.rate_defined ? std::to_string(report.fitted_rate) : "n/a (exact)")
              << "\n";
    return kExitOk;
}

int cmd_simulate(const Overrides& ov) {
    const auto cfg = load_config(ov);
    if (!cfg.simulate) {
        throw hjb::ConfigError("simulate requires a 'simulate' block");
    }
    const auto problem = cfg.build_problem();
    const auto mesh = hjb::Mesh::build(cfg.domain(), cfg.subdivisions);
    const auto grid = cfg.build_grid(problem);
    const auto controls = hjb::discretize_controls(cfg.controls);
    const auto result = hjb::solve(problem, mesh, grid, controls, {cfg.policy, cfg.workers});

    const auto dir = prepare_out_dir(cfg);
    for (std::size_t s = 0; s < cfg.simulate->initial_states.size(); ++s) {
        const auto traj = hjb::simulate(result.value, cfg.simulate->initial_states[s],
                                        cfg.simulate->start_level, problem, mesh, grid,
                                        controls, cfg.policy);
        std::ostringstream name;
        name << "trajectory_" << s << ".tsv";
        hjb::write_trajectory((dir / name.str()).string(), traj, grid);
        std::cout << "simulate: x0 #" << s << " total=" << traj.total
                  << " clamps=" << traj.clamp_count << "\n";
    }
    return kExitOk;
}

int cmd_interp_check(const Overrides& ov) {
    const auto cfg = load_config(ov);
    if (!cfg.interp) {
        throw hjb::ConfigError("interp-check requires an 'interp' block");
    }
    const auto problem = cfg.build_problem();
    const double lip = problem.metadata.lip_g.value_or(0.0);
    const auto report = hjb::interp_error_study(
        problem.terminal_cost, lip, cfg.domain(), cfg.subdivisions, cfg.interp->levels,
        cfg.interp->samples, cfg.seed);
    const auto dir = prepare_out_dir(cfg);
    hjb::write_interp_report((dir / "interp.tsv").string(), report);

    bool bound_ok = true;
    if (problem.metadata.lip_g) {
        for (const auto& level : report.levels) {
            bound_ok = bound_ok && level.bound_ok;
        }
    }
    std::cout << "interp-check: levels=" << report.levels.size() << " rate="
              << (report.rate_defined ? std::to_string(report.fitted_rate) : "n/a")
              << " bound_ok=" << (bound_ok ? 1 : 0) << "\n";
    return bound_ok ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-Lagrangian dynamic-programming solver for finite-horizon "
                 "optimal control"};
    app.require_subcommand(1);

    Overrides ov;
    std::string command;
    for (const char* name : {"solve", "oracle", "converge", "lemma1", "simulate",
                             "interp-check"}) {
        auto* sub = app.add_subcommand(name);
        auto* cfg_opt = sub->add_option("--config", ov.config_path, "Run configuration file");
        if (std::string(name) != "oracle") {
            cfg_opt->required();
        }
        sub->add_option("--out", [&ov](const CLI::results_t& r) {
            ov.out_dir = r[0];
            return true;
        }, "Output directory override");
        sub->add_option("--workers", [&ov](const CLI::results_t& r) {
            ov.workers = std::stoi(r[0]);
            return true;
        }, "Worker thread count override");
        sub->add_option("--policy", [&ov](const CLI::results_t& r) {
            ov.policy = r[0];
            return true;
        }, "Boundary policy override (strict|project)");
        sub->add_option("--levels", [&ov](const CLI::results_t& r) {
            ov.levels = std::stoi(r[0]);
            return true;
        }, "Refinement level count override");
        if (std::string(name) == "oracle") {
            sub->add_flag("--corrupt", ov.corrupt)->group("");  // negative-control hook
        }
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cout << "error: cli: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (command == "solve") {
            return cmd_solve(ov);
        }
        if (command == "oracle") {
            return cmd_oracle(ov);
        }
        if (command == "converge") {
            return cmd_converge(ov);
        }
        if (command == "lemma1") {
            return cmd_lemma1(ov);
        }
        if (command == "simulate") {
            return cmd_simulate(ov);
        }
        if (command == "interp-check") {
            return cmd_interp_check(ov);
        }
        std::cout << "error: cli: unknown subcommand\n";
        return kExitConfig;
    } catch (const hjb::ConfigError& e) {
        std::cout << "error: config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const hjb::InvarianceError& e) {
        std::cout << "error: invariance: " << e.what() << "\n";
        return kExitInvariance;
    } catch (const hjb::SearchSpaceError& e) {
        std::cout << "error: guard: " << e.what() << "\n";
        return kExitGuard;
    } catch (const hjb::InsufficientDataError& e) {
        std::cout << "error: insufficient-data: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        std::cout << "error: runtime: " << e.what() << "\n";
        return kExitAssertion;
    }
}

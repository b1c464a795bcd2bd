#include "hjb/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hjb {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("io: cannot open '" + path + "' for writing");
    }
    return out;
}

const char* policy_name(BoundaryPolicy policy) {
    return policy == BoundaryPolicy::strict ? "strict" : "project";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_value_dump(const std::string& path, const ProblemSpec& problem, const Mesh& mesh,
                      const TimeGrid& grid, const ControlSet& controls,
                      const SolveResult& result, BoundaryPolicy policy) {
    auto out = open_out(path);
    out << "# problem\t" << problem.name << "\n";
    out << "# d\t" << mesh.dim() << "\n";
    out << "# N\t" << grid.num_steps << "\n";
    out << "# h\t" << format_double(grid.step) << "\n";
    out << "# k\t" << format_double(mesh.mesh_size()) << "\n";
    out << "# lambda\t" << format_double(problem.discount) << "\n";
    out << "# num_controls\t" << controls.size() << "\n";
    out << "# policy\t" << policy_name(policy) << "\n";
    out << "n\ti";
    for (std::size_t a = 0; a < mesh.dim(); ++a) {
        out << "\tx" << a;
    }
    out << "\tvalue\targmin\n";
    const int N = grid.num_steps;
    for (int n = 0; n <= N; ++n) {
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
            out << n << "\t" << i;
            for (double c : mesh.vertex(i)) {
                out << "\t" << format_double(c);
            }
            out << "\t" << format_double(result.value.values[n][i]) << "\t";
            if (n < N) {
                out << result.policy.argmin[n][i];
            } else {
                out << -1;
            }
            out << "\n";
        }
    }
}

void write_policy_dump(const std::string& path, const Mesh& mesh, const ControlSet& controls,
                       const SolveResult& result) {
    auto out = open_out(path);
    out << "n\ti\targmin";
    for (std::size_t a = 0; a < controls.control_dim(); ++a) {
        out << "\tu" << a;
    }
    out << "\n";
    for (std::size_t n = 0; n < result.policy.argmin.size(); ++n) {
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
            const int index = result.policy.argmin[n][i];
            out << n << "\t" << i << "\t" << index;
            for (double c : controls[static_cast<std::size_t>(index)]) {
                out << "\t" << format_double(c);
            }
            out << "\n";
        }
    }
}

void write_solve_metadata(const std::string& path, const ProblemSpec& problem,
                          const Mesh& mesh, const TimeGrid& grid, const ControlSet& controls,
                          const SolveResult& result, const InvarianceReport& invariance,
                          BoundaryPolicy policy, double wall_seconds) {
    nlohmann::json j;
    j["problem"] = problem.name;
    j["mesh"] = nlohmann::json::parse(mesh.describe());
    j["time"] = {{"t", grid.t_begin},
                 {"T", grid.t_end},
                 {"steps", grid.num_steps},
                 {"h", grid.step},
                 {"delta_h", grid.one_step_discount}};
    j["num_controls"] = controls.size();
    j["policy"] = policy_name(policy);
    j["clamp_count"] = result.clamp_count;
    j["invariance_ok"] = invariance.ok;
    j["invariance_violations"] = invariance.violations.size();
    j["nondeterministic"] = {{"wall_seconds", wall_seconds}};
    open_out(path) << j.dump(2) << "\n";
}

void write_convergence_report(const std::string& path, const ConvergenceReport& report) {
    auto out = open_out(path);
    out << "h\tk\tnum_controls\terror\texact\tLu\tclamps\n";
    for (const auto& level : report.levels) {
        out << format_double(level.h) << "\t" << format_double(level.k) << "\t"
            << level.num_controls << "\t" << format_double(level.error) << "\t"
            << (level.exact ? 1 : 0) << "\t" << format_double(level.Lu) << "\t"
            << level.clamp_count << "\n";
    }

    nlohmann::json j;
    j["problem"] = report.problem;
    j["norm"] = report.norm == ErrorNorm::max ? "max" : "mean";
    j["fitted_rate"] = report.fitted_rate;
    j["rate_defined"] = report.rate_defined;
    j["lu_growth_flag"] = report.lu_growth_flag;
    if (report.subdomain) {
        j["subdomain"] = {{"lower", report.subdomain->lower},
                          {"upper", report.subdomain->upper}};
    }
    j["notes"] = report.notes;
    nlohmann::json wall = nlohmann::json::array();
    for (const auto& level : report.levels) {
        wall.push_back(level.wall_seconds);
    }
    j["nondeterministic"] = {{"wall_seconds", wall}};
    open_out(path + ".meta.json") << j.dump(2) << "\n";
}

void write_interp_report(const std::string& path, const InterpStudyReport& report) {
    auto out = open_out(path);
    out << "k\tsup_error\tbound_ok\n";
    for (const auto& level : report.levels) {
        out << format_double(level.k) << "\t" << format_double(level.sup_error) << "\t"
            << (level.bound_ok ? 1 : 0) << "\n";
    }
    nlohmann::json j;
    j["fitted_rate"] = report.fitted_rate;
    j["rate_defined"] = report.rate_defined;
    open_out(path + ".meta.json") << j.dump(2) << "\n";
}

void write_trajectory(const std::string& path, const Trajectory& traj, const TimeGrid& grid) {
    auto out = open_out(path);
    const std::size_t d = traj.states.front().size();
    const std::size_t m = traj.controls.empty() ? 0 : traj.controls.front().size();
    out << "level\ttime";
    for (std::size_t a = 0; a < d; ++a) {
        out << "\tx" << a;
    }
    for (std::size_t a = 0; a < m; ++a) {
        out << "\tu" << a;
    }
    out << "\tstage_cost\tdiscounted_total\n";
    double accum = 0.0;
    double discount = 1.0;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const int level = traj.start_level + static_cast<int>(s);
        out << level << "\t" << format_double(grid.level_time(level));
        for (double c : traj.states[s]) {
            out << "\t" << format_double(c);
        }
        const bool has_control = s < traj.controls.size();
        for (std::size_t a = 0; a < m; ++a) {
            out << "\t" << (has_control ? format_double(traj.controls[s][a]) : "");
        }
        if (has_control) {
            accum += grid.step * discount * traj.stage_costs[s];
            discount *= grid.one_step_discount;
            out << "\t" << format_double(traj.stage_costs[s]);
        } else {
            accum += traj.terminal_contribution;
            out << "\t";
        }
        out << "\t" << format_double(accum) << "\n";
    }
}

}  // namespace hjb

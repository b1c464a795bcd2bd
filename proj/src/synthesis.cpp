#include "hjb/synthesis.hpp"

#include <cmath>
#include <sstream>

namespace hjb {

int feedback_control_index(const ValueFunction& value, const Point& x, int level,
                           const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                           const ControlSet& controls, BoundaryPolicy policy,
                           std::uint64_t* clamp_count) {
    const int N = grid.num_steps;
    if (level < 0 || level >= N) {
        throw SolverError("feedback_control: level out of range");
    }
    const auto& v_next = value.values[static_cast<std::size_t>(level) + 1];
    const double h = grid.step;
    const double tn = grid.level_time(level);
    const double tol = kGeomTol * mesh.domain().diameter();

    std::vector<double> candidate(controls.size());
    for (std::size_t c = 0; c < controls.size(); ++c) {
        const Point vel = problem.dynamics(x, controls[c], tn);
        Point foot(x);
        for (std::size_t a = 0; a < foot.size(); ++a) {
            foot[a] += h * vel[a];
        }
        if (!mesh.domain().contains(foot, tol)) {
            if (policy == BoundaryPolicy::strict) {
                std::ostringstream os;
                os << "feedback_control: foot point escaped at level " << level
                   << ", control " << c;
                throw InvarianceError(os.str());
            }
            if (clamp_count != nullptr) {
                ++*clamp_count;
            }
        }
        foot = mesh.domain().clamp(std::move(foot));
        candidate[c] = h * problem.running_cost(x, controls[c], tn) +
                       grid.one_step_discount * mesh.interp_scalar(v_next, foot);
    }
    double best = candidate[0];
    for (std::size_t c = 1; c < controls.size(); ++c) {
        best = std::min(best, candidate[c]);
    }
    for (std::size_t c = 0; c < controls.size(); ++c) {
        if (candidate[c] <= best + kArgminTol) {
            return static_cast<int>(c);
        }
    }
    return 0;
}

Control feedback_control(const ValueFunction& value, const Point& x, int level,
                         const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                         const ControlSet& controls, BoundaryPolicy policy) {
    return controls[static_cast<std::size_t>(
        feedback_control_index(value, x, level, problem, mesh, grid, controls, policy))];
}

Trajectory simulate(const ValueFunction& value, const Point& x0, int start_level,
                    const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                    const ControlSet& controls, BoundaryPolicy policy) {
    const int N = grid.num_steps;
    if (start_level < 0 || start_level >= N) {
        throw SolverError("simulate: start level out of range");
    }
    const double tol = kGeomTol * mesh.domain().diameter();

    Trajectory traj;
    traj.start_level = start_level;
    Point y = x0;
    traj.states.push_back(y);

    double discount = 1.0;
    double running = 0.0;
    for (int j = start_level; j < N; ++j) {
        const int index = feedback_control_index(value, y, j, problem, mesh, grid, controls,
                                                 policy, &traj.clamp_count);
        const Control& u = controls[static_cast<std::size_t>(index)];
        const double tj = grid.level_time(j);
        const double stage = problem.running_cost(y, u, tj);
        running += grid.step * discount * stage;
        discount *= grid.one_step_discount;

        const Point vel = problem.dynamics(y, u, tj);
        for (std::size_t a = 0; a < y.size(); ++a) {
            y[a] += grid.step * vel[a];
        }
        if (!mesh.domain().contains(y, tol)) {
            if (policy == BoundaryPolicy::strict) {
                std::ostringstream os;
                os << "simulate: trajectory escaped the domain at step " << j;
                throw InvarianceError(os.str());
            }
            ++traj.clamp_count;
        }
        y = mesh.domain().clamp(std::move(y));

        traj.controls.push_back(u);
        traj.stage_costs.push_back(stage);
        traj.states.push_back(y);
    }
    traj.terminal_contribution =
        problem.terminal_cost(y) *
        std::exp(-problem.discount * (grid.t_end - grid.level_time(start_level)));
    traj.total = running + traj.terminal_contribution;
    return traj;
}

BlendedControl blended_control_sequence(const PolicyTable& policy, const Point& x, int level,
                                        const Mesh& mesh, const TimeGrid& grid,
                                        const ProblemSpec& problem, const ControlSet& controls,
                                        BoundaryPolicy boundary) {
    const NodeControlSequences seqs =
        sequences_from_policy(x, level, policy, mesh, grid, problem, controls, boundary);
    const auto [value, traj] =
        discrete_functional(x, seqs, problem, mesh, grid, boundary);
    (void)value;

    const auto& row = policy.argmin[static_cast<std::size_t>(level)];
    const std::size_t m = controls.control_dim();

    BlendedControl blended;
    blended.inadmissible_blend = !controls.convex_hull_admissible();
    blended.control.start_level = level;
    for (int j = level; j < grid.num_steps; ++j) {
        const auto& loc = traj.locations[static_cast<std::size_t>(j - level)];
        Control u(m, 0.0);
        for (std::size_t s = 0; s < loc.weights.size(); ++s) {
            if (loc.weights[s] == 0.0) {
                continue;
            }
            const Control& nodal =
                controls[static_cast<std::size_t>(row[loc.vertex_indices[s]])];
            for (std::size_t a = 0; a < m; ++a) {
                u[a] += loc.weights[s] * nodal[a];
            }
        }
        blended.control.values.push_back(std::move(u));
    }
    return blended;
}

}  // namespace hjb

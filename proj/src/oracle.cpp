#include "hjb/oracle.hpp"

#include <cmath>
#include <sstream>

namespace hjb {

namespace {

Point advance_or_clamp(Point y, const Point& velocity, double h, const Mesh& mesh,
                       BoundaryPolicy policy, int step_level) {
    for (std::size_t a = 0; a < y.size(); ++a) {
        y[a] += h * velocity[a];
    }
    const double tol = kGeomTol * mesh.domain().diameter();
    if (!mesh.domain().contains(y, tol) && policy == BoundaryPolicy::strict) {
        std::ostringstream os;
        os << "trajectory escaped the domain at step " << step_level;
        throw InvarianceError(os.str());
    }
    return mesh.domain().clamp(std::move(y));
}

}  // namespace

std::pair<double, DiscreteTrajectory> discrete_functional(const Point& x,
                                                          const NodeControlSequences& seqs,
                                                          const ProblemSpec& problem,
                                                          const Mesh& mesh,
                                                          const TimeGrid& grid,
                                                          BoundaryPolicy policy) {
    const int n = seqs.start_level;
    const int N = grid.num_steps;
    if (n < 0 || n >= N) {
        throw OracleError("discrete_functional: start level out of range");
    }
    if (seqs.per_node.size() != mesh.num_vertices()) {
        throw OracleError("discrete_functional: sequences must cover every node");
    }
    for (const auto& seq : seqs.per_node) {
        if (static_cast<int>(seq.size()) != N - n) {
            throw OracleError("discrete_functional: sequence length mismatch");
        }
    }
    const double h = grid.step;
    const double delta = grid.one_step_discount;

    DiscreteTrajectory traj;
    Point y = x;
    traj.states.push_back(y);

    double cost = 0.0;
    double discount = 1.0;
    for (int j = n; j < N; ++j) {
        const auto loc = mesh.locate(y);
        const double tj = grid.level_time(j);
        const int offset = j - n;
        const double stage = mesh.interp_node_scalar(loc, [&](std::size_t idx) {
            return problem.running_cost(mesh.vertex(idx), seqs.per_node[idx][offset], tj);
        });
        const Point velocity = mesh.interp_node_vector(loc, [&](std::size_t idx) {
            return problem.dynamics(mesh.vertex(idx), seqs.per_node[idx][offset], tj);
        });
        cost += h * discount * stage;
        discount *= delta;
        traj.locations.push_back(loc);
        y = advance_or_clamp(std::move(y), velocity, h, mesh, policy, j);
        traj.states.push_back(y);
    }
    const auto terminal_loc = mesh.locate(y);
    const double g_interp = mesh.interp_node_scalar(
        terminal_loc, [&](std::size_t idx) { return problem.terminal_cost(mesh.vertex(idx)); });
    traj.locations.push_back(terminal_loc);
    const double tn = grid.level_time(n);
    cost += g_interp * std::exp(-problem.discount * (grid.t_end - tn));
    if (!std::isfinite(cost)) {
        throw OracleError("discrete_functional: non-finite cost");
    }
    return {cost, std::move(traj)};
}

BruteForceResult brute_force_value(const Point& x, int level, const ProblemSpec& problem,
                                   const Mesh& mesh, const TimeGrid& grid,
                                   const ControlSet& controls, BoundaryPolicy policy) {
    const int N = grid.num_steps;
    if (level < 0 || level >= N) {
        throw OracleError("brute_force_value: level out of range");
    }
    const std::size_t n_s = mesh.num_vertices();
    const std::size_t steps = static_cast<std::size_t>(N - level);
    const std::size_t positions = n_s * steps;
    const double total = std::pow(static_cast<double>(controls.size()),
                                  static_cast<double>(positions));
    if (!(total <= kBruteForceGuard)) {
        std::ostringstream os;
        os << "brute_force_value: search space of " << total
           << " assignments exceeds guard of " << kBruteForceGuard;
        throw SearchSpaceError(os.str());
    }

    // Digit p = i*steps + j holds the control index of node i at step
    // level+j; enumeration is lexicographic with the last digit fastest, so
    // the first minimizer found is the lexicographically smallest.
    std::vector<std::size_t> digits(positions, 0);
    NodeControlSequences seqs;
    seqs.start_level = level;
    seqs.per_node.assign(n_s, std::vector<Control>(steps, controls[0]));

    BruteForceResult result;
    bool first = true;
    for (;;) {
        const auto [value, traj] = discrete_functional(x, seqs, problem, mesh, grid, policy);
        (void)traj;
        if (first || value < result.value) {
            result.value = value;
            result.minimizer = seqs;
            first = false;
        }
        // Odometer increment.
        std::size_t p = positions;
        while (p-- > 0) {
            if (++digits[p] < controls.size()) {
                seqs.per_node[p / steps][p % steps] = controls[digits[p]];
                break;
            }
            digits[p] = 0;
            seqs.per_node[p / steps][p % steps] = controls[0];
            if (p == 0) {
                return result;
            }
        }
    }
}

NodeControlSequences sequences_from_policy(const Point& x, int level,
                                           const PolicyTable& policy, const Mesh& mesh,
                                           const TimeGrid& grid, const ProblemSpec& problem,
                                           const ControlSet& controls,
                                           BoundaryPolicy boundary, PolicyReading reading) {
    const int N = grid.num_steps;
    if (level < 0 || level >= N) {
        throw OracleError("sequences_from_policy: level out of range");
    }
    if (policy.argmin.size() != static_cast<std::size_t>(N) ||
        policy.argmin[static_cast<std::size_t>(level)].size() != mesh.num_vertices()) {
        throw OracleError("sequences_from_policy: policy shape mismatch");
    }
    const std::size_t steps = static_cast<std::size_t>(N - level);

    NodeControlSequences seqs;
    seqs.start_level = level;
    seqs.per_node.assign(mesh.num_vertices(), std::vector<Control>(steps, controls[0]));

    Point y = x;
    for (int j = level; j < N; ++j) {
        const auto loc = mesh.locate(y);
        const int offset = j - level;
        const auto& row = policy.argmin[static_cast<std::size_t>(
            reading == PolicyReading::start_level ? level : j)];
        for (std::size_t s = 0; s < loc.weights.size(); ++s) {
            if (loc.weights[s] != 0.0) {
                const std::size_t idx = loc.vertex_indices[s];
                seqs.per_node[idx][offset] =
                    controls[static_cast<std::size_t>(row[idx])];
            }
        }
        const double tj = grid.level_time(j);
        const Point velocity = mesh.interp_node_vector(loc, [&](std::size_t idx) {
            return problem.dynamics(mesh.vertex(idx), seqs.per_node[idx][offset], tj);
        });
        y = advance_or_clamp(std::move(y), velocity, grid.step, mesh, boundary, j);
    }
    return seqs;
}

namespace {

Point rk4_step(const ProblemSpec& problem, const Point& y, const Control& u, double time,
               double ds) {
    const std::size_t d = y.size();
    const Point k1 = problem.dynamics(y, u, time);
    Point tmp(d);
    for (std::size_t a = 0; a < d; ++a) {
        tmp[a] = y[a] + 0.5 * ds * k1[a];
    }
    const Point k2 = problem.dynamics(tmp, u, time + 0.5 * ds);
    for (std::size_t a = 0; a < d; ++a) {
        tmp[a] = y[a] + 0.5 * ds * k2[a];
    }
    const Point k3 = problem.dynamics(tmp, u, time + 0.5 * ds);
    for (std::size_t a = 0; a < d; ++a) {
        tmp[a] = y[a] + ds * k3[a];
    }
    const Point k4 = problem.dynamics(tmp, u, time + ds);
    Point next(d);
    for (std::size_t a = 0; a < d; ++a) {
        next[a] = y[a] + ds / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    return next;
}

}  // namespace

double continuous_cost(const Point& x, int level, const PiecewiseConstantControl& control,
                       const ProblemSpec& problem, const TimeGrid& grid, int substeps) {
    const int N = grid.num_steps;
    if (level < 0 || level >= N) {
        throw OracleError("continuous_cost: level out of range");
    }
    if (control.start_level != level ||
        static_cast<int>(control.values.size()) != N - level) {
        throw OracleError("continuous_cost: control does not span [t_n, T)");
    }
    if (substeps < 1) {
        throw OracleError("continuous_cost: substeps must be >= 1");
    }
    const int m = substeps + (substeps % 2);  // Simpson needs an even count
    const double tn = grid.level_time(level);
    const double lambda = problem.discount;

    Point y = x;
    double cost = 0.0;
    std::vector<double> integrand(static_cast<std::size_t>(m) + 1);
    for (int l = level; l < N; ++l) {
        const Control& u = control.values[static_cast<std::size_t>(l - level)];
        const double tl = grid.level_time(l);
        const double ds = grid.step / m;
        integrand[0] = problem.running_cost(y, u, tl) * std::exp(-lambda * (tl - tn));
        for (int s = 0; s < m; ++s) {
            const double time = tl + s * ds;
            y = rk4_step(problem, y, u, time, ds);
            integrand[static_cast<std::size_t>(s) + 1] =
                problem.running_cost(y, u, time + ds) * std::exp(-lambda * (time + ds - tn));
        }
        double simpson = integrand[0] + integrand[static_cast<std::size_t>(m)];
        for (int s = 1; s < m; ++s) {
            simpson += (s % 2 == 1 ? 4.0 : 2.0) * integrand[static_cast<std::size_t>(s)];
        }
        cost += ds / 3.0 * simpson;
    }
    cost += problem.terminal_cost(y) * std::exp(-lambda * (grid.t_end - tn));
    if (!std::isfinite(cost)) {
        throw OracleError("continuous_cost: non-finite cost");
    }
    return cost;
}

}  // namespace hjb

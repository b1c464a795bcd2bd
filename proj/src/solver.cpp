#include "hjb/solver.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <sstream>

#include "hjb/parallel.hpp"

namespace hjb {

TimeGrid TimeGrid::create(double t, double T, int N, double lambda) {
    if (!(t < T)) {
        throw SolverError("time grid: requires t < T");
    }
    if (N < 1) {
        throw SolverError("time grid: requires N >= 1");
    }
    if (lambda < 0.0) {
        throw SolverError("time grid: requires lambda >= 0");
    }
    TimeGrid g;
    g.t_begin = t;
    g.t_end = T;
    g.num_steps = N;
    g.step = (T - t) / N;
    if (!(lambda * g.step < 1.0)) {
        std::ostringstream os;
        os << "time grid: lambda*h = " << lambda * g.step << " must be < 1";
        throw SolverError(os.str());
    }
    g.one_step_discount = 1.0 - lambda * g.step;
    return g;
}

std::pair<double, int> bellman_update(const ProblemSpec& problem, const Mesh& mesh,
                                      const TimeGrid& grid, const ControlSet& controls,
                                      int level, std::size_t node,
                                      std::span<const double> v_next, BoundaryPolicy policy,
                                      std::uint64_t* clamp_count) {
    if (v_next.size() != mesh.num_vertices()) {
        throw SolverError("bellman_update: v_next length mismatch");
    }
    const double h = grid.step;
    const double tn = grid.level_time(level);
    const double tol = kGeomTol * mesh.domain().diameter();
    const Point xi = mesh.vertex(node);

    std::vector<double> candidate(controls.size());
    for (std::size_t c = 0; c < controls.size(); ++c) {
        const Point vel = problem.dynamics(xi, controls[c], tn);
        Point foot(xi);
        for (std::size_t a = 0; a < foot.size(); ++a) {
            foot[a] += h * vel[a];
        }
        if (!mesh.domain().contains(foot, tol)) {
            if (policy == BoundaryPolicy::strict) {
                std::ostringstream os;
                os << "invariance violated at node " << node << ", control " << c
                   << ", level " << level;
                throw InvarianceError(os.str());
            }
            foot = mesh.domain().clamp(std::move(foot));
            if (clamp_count != nullptr) {
                ++*clamp_count;
            }
        } else {
            foot = mesh.domain().clamp(std::move(foot));  // absorb sub-tolerance overshoot
        }
        candidate[c] = h * problem.running_cost(xi, controls[c], tn) +
                       grid.one_step_discount * mesh.interp_scalar(v_next, foot);
    }
    double best = candidate[0];
    for (std::size_t c = 1; c < controls.size(); ++c) {
        best = std::min(best, candidate[c]);
    }
    int argmin = 0;
    for (std::size_t c = 0; c < controls.size(); ++c) {
        if (candidate[c] <= best + kArgminTol) {
            argmin = static_cast<int>(c);
            break;
        }
    }
    return {best, argmin};
}

SolveResult solve(const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                  const ControlSet& controls, const SolveOptions& options) {
    if (controls.size() == 0) {
        throw SolverError("solve: empty control set");
    }
    const std::size_t n_s = mesh.num_vertices();
    const int N = grid.num_steps;

    SolveResult result;
    result.value.values.assign(N + 1, std::vector<double>(n_s, 0.0));
    result.policy.argmin.assign(N, std::vector<int>(n_s, 0));

    parallel_for(n_s, options.workers, [&](std::size_t i) {
        result.value.values[N][i] = problem.terminal_cost(mesh.vertex(i));
    });

    std::atomic<std::uint64_t> clamps{0};
    for (int n = N - 1; n >= 0; --n) {
        const std::span<const double> v_next(result.value.values[n + 1]);
        parallel_for(n_s, options.workers, [&](std::size_t i) {
            std::uint64_t local_clamps = 0;
            auto [value, argmin] = bellman_update(problem, mesh, grid, controls, n, i,
                                                  v_next, options.policy, &local_clamps);
            if (!std::isfinite(value)) {
                std::ostringstream os;
                os << "non-finite value at level " << n << ", node " << i;
                throw SolverError(os.str());
            }
            result.value.values[n][i] = value;
            result.policy.argmin[n][i] = argmin;
            if (local_clamps != 0) {
                clamps.fetch_add(local_clamps, std::memory_order_relaxed);
            }
        });
    }
    result.clamp_count = clamps.load();
    return result;
}

namespace {

double pair_quotient(const Mesh& mesh, const ControlSet& controls,
                     const std::vector<int>& row, std::size_t i, std::size_t j) {
    const Control& ui = controls[static_cast<std::size_t>(row[i])];
    const Control& uj = controls[static_cast<std::size_t>(row[j])];
    double du = 0.0;
    for (std::size_t a = 0; a < ui.size(); ++a) {
        du += (ui[a] - uj[a]) * (ui[a] - uj[a]);
    }
    if (du == 0.0) {
        return 0.0;
    }
    const Point xi = mesh.vertex(i);
    const Point xj = mesh.vertex(j);
    double dx = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) {
        dx += (xi[a] - xj[a]) * (xi[a] - xj[a]);
    }
    return std::sqrt(du) / std::sqrt(dx);
}

}  // namespace

double compute_Lu(const PolicyTable& policy, const Mesh& mesh, const ControlSet& controls,
                  int level, LuMode mode, std::size_t sample_pairs, std::uint64_t seed) {
    if (level < 0 || static_cast<std::size_t>(level) >= policy.argmin.size()) {
        throw SolverError("compute_Lu: level out of range");
    }
    const std::size_t n_s = mesh.num_vertices();
    if (n_s < 2) {
        throw SolverError("compute_Lu: undefined for fewer than 2 nodes");
    }
    const auto& row = policy.argmin[static_cast<std::size_t>(level)];
    double best = 0.0;
    if (mode == LuMode::all_pairs) {
        for (std::size_t i = 0; i < n_s; ++i) {
            for (std::size_t j = i + 1; j < n_s; ++j) {
                best = std::max(best, pair_quotient(mesh, controls, row, i, j));
            }
        }
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n_s - 1);
        for (std::size_t s = 0; s < sample_pairs; ++s) {
            const std::size_t i = pick(rng);
            const std::size_t j = pick(rng);
            if (i == j) {
                continue;
            }
            best = std::max(best, pair_quotient(mesh, controls, row, i, j));
        }
    }
    return best;
}

double compute_Lu_auto(const PolicyTable& policy, const Mesh& mesh,
                       const ControlSet& controls, int level, std::uint64_t seed) {
    const LuMode mode =
        mesh.num_vertices() <= kLuAllPairsLimit ? LuMode::all_pairs : LuMode::sampled;
    return compute_Lu(policy, mesh, controls, level, mode, 100000, seed);
}

}  // namespace hjb

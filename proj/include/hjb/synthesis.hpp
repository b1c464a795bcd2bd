#pragma once

#include <cstdint>
#include <vector>

#include "hjb/mesh.hpp"
#include "hjb/oracle.hpp"
#include "hjb/problem.hpp"
#include "hjb/solver.hpp"

namespace hjb {

/// Closed-loop trajectory under the synthesized feedback law, with the
/// discounted cost bookkeeping needed to recompute the total.
struct Trajectory {
    int start_level = 0;
    std::vector<Point> states;        // y_n .. y_N
    std::vector<Control> controls;    // u_n .. u_{N-1}
    std::vector<double> stage_costs;  // L(y_j, u_j, t_j)
    double terminal_contribution = 0.0;
    double total = 0.0;
    std::uint64_t clamp_count = 0;
};

/// Argmin control index of the one-step Bellman expression at an arbitrary
/// state; at a node this reproduces the stored policy.
int feedback_control_index(const ValueFunction& value, const Point& x, int level,
                           const ProblemSpec& problem, const Mesh& mesh,
                           const TimeGrid& grid, const ControlSet& controls,
                           BoundaryPolicy policy = BoundaryPolicy::strict,
                           std::uint64_t* clamp_count = nullptr);

Control feedback_control(const ValueFunction& value, const Point& x, int level,
                         const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                         const ControlSet& controls,
                         BoundaryPolicy policy = BoundaryPolicy::strict);

/// Explicit Euler closed-loop rollout from x0 at level n0 using the feedback
/// law; the same step as the scheme, so cost/value agreement is an internal
/// consistency check.
Trajectory simulate(const ValueFunction& value, const Point& x0, int start_level,
                    const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                    const ControlSet& controls,
                    BoundaryPolicy policy = BoundaryPolicy::strict);

struct BlendedControl {
    PiecewiseConstantControl control;
    /// Set when the control set's convex hull is not admissible; the blend
    /// may then leave the finite set and is usable only as a diagnostic.
    bool inadmissible_blend = false;
};

/// Barycentric average of the level-n nodal argmin controls along the
/// interpolated Euler trajectory: u_l = sum_j mu_j(y_l) u_n^j.
BlendedControl blended_control_sequence(const PolicyTable& policy, const Point& x, int level,
                                        const Mesh& mesh, const TimeGrid& grid,
                                        const ProblemSpec& problem, const ControlSet& controls,
                                        BoundaryPolicy boundary = BoundaryPolicy::strict);

}  // namespace hjb

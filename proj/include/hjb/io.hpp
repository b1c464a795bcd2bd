#pragma once

#include <string>

#include "hjb/harness.hpp"
#include "hjb/mesh.hpp"
#include "hjb/problem.hpp"
#include "hjb/solver.hpp"
#include "hjb/synthesis.hpp"

namespace hjb {

/// Shortest round-trip decimal form; identical across runs for identical
/// doubles, so dumps are byte-reproducible.
std::string format_double(double v);

/// Tab-separated value-function dump: header block, then one row
/// (n, i, coordinates..., value, argmin index; -1 at the terminal level).
void write_value_dump(const std::string& path, const ProblemSpec& problem, const Mesh& mesh,
                      const TimeGrid& grid, const ControlSet& controls,
                      const SolveResult& result, BoundaryPolicy policy);

/// Tab-separated policy dump: one row (n, i, argmin index, control coords).
void write_policy_dump(const std::string& path, const Mesh& mesh, const ControlSet& controls,
                       const SolveResult& result);

/// JSON sidecar: clamp counts, invariance summary, and wall time (the wall
/// time is marked non-deterministic).
void write_solve_metadata(const std::string& path, const ProblemSpec& problem,
                          const Mesh& mesh, const TimeGrid& grid, const ControlSet& controls,
                          const SolveResult& result, const InvarianceReport& invariance,
                          BoundaryPolicy policy, double wall_seconds);

/// Tab-separated convergence table plus matching ".meta.json" sidecar.
void write_convergence_report(const std::string& path, const ConvergenceReport& report);

void write_interp_report(const std::string& path, const InterpStudyReport& report);

/// Tab-separated trajectory export:
/// (level, time, state..., control..., stage cost, discounted accumulator).
void write_trajectory(const std::string& path, const Trajectory& traj, const TimeGrid& grid);

}  // namespace hjb

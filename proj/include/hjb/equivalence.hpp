#pragma once

#include <string>
#include <vector>

#include "hjb/mesh.hpp"
#include "hjb/oracle.hpp"
#include "hjb/problem.hpp"
#include "hjb/solver.hpp"

namespace hjb {

/// One tiny instance on which the brute-force characterization of the scheme
/// is checked against the backward recursion.
struct EquivalenceCase {
    std::string label;
    ProblemSpec problem;
    Mesh mesh;
    TimeGrid grid;
    ControlSet controls;
    int level = 0;
    std::vector<Point> eval_points;  // nodes plus random interior points
};

struct EquivalenceOutcome {
    std::string label;
    Point x;
    double solver_value = 0.0;       // interpolated v_{h,k}^n(x)
    double brute_force_value = 0.0;  // inf of the discrete functional
    double policy_value = 0.0;       // functional on policy-induced sequences
    double gap_characterization = 0.0;
    double gap_policy = 0.0;
    bool pass = false;
};

/// Default suite: 24 one-dimensional instances with 2-3 nodes, 1-3 steps,
/// 2-3 controls, discounted and undiscounted, time-dependent and
/// time-independent dynamics and costs. Each instance evaluates at every
/// node plus 10 seeded interior points.
std::vector<EquivalenceCase> default_equivalence_suite(std::uint64_t seed = 20240817);

/// Runs both characterization checks on each case. `corrupt` perturbs the
/// solver values (negative-control hook for the test harness).
std::vector<EquivalenceOutcome> run_equivalence_suite(const std::vector<EquivalenceCase>& cases,
                                                      double tolerance = 1e-10,
                                                      bool corrupt = false);

}  // namespace hjb

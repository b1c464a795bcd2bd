#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "hjb/mesh.hpp"
#include "hjb/problem.hpp"
#include "hjb/solver.hpp"

namespace hjb {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Search-space guard for the brute-force enumerator.
class SearchSpaceError : public OracleError {
public:
    using OracleError::OracleError;
};

inline constexpr double kBruteForceGuard = 1e7;

/// One control sequence per mesh node, starting at a common time level:
/// per_node[i][j - start_level] is the control assigned to node i for the
/// step t_j -> t_{j+1}. Entries may leave the finite control set only for
/// blended diagnostics, in which case `blended` is set.
struct NodeControlSequences {
    int start_level = 0;
    std::vector<std::vector<Control>> per_node;
    bool blended = false;
};

/// States of the interpolated Euler recursion together with the barycentric
/// locations used at each state (including the terminal one).
struct DiscreteTrajectory {
    std::vector<Point> states;
    std::vector<BarycentricLocation> locations;
};

/// Control constant on each interval [t_l, t_{l+1}), l = start_level..N-1.
struct PiecewiseConstantControl {
    int start_level = 0;
    std::vector<Control> values;
};

/// Fully discrete cost functional J_{h,k}^n: discounted rectangle sum of the
/// node-wise interpolated running cost along the interpolated Euler
/// trajectory, plus the interpolated terminal cost weighted by
/// exp(-lambda (T - t_n)).
std::pair<double, DiscreteTrajectory> discrete_functional(
    const Point& x, const NodeControlSequences& seqs, const ProblemSpec& problem,
    const Mesh& mesh, const TimeGrid& grid, BoundaryPolicy policy = BoundaryPolicy::strict);

struct BruteForceResult {
    double value = 0.0;
    NodeControlSequences minimizer;
};

/// Exact minimum of the discrete functional over all per-node control
/// sequences, enumerated lexicographically over (node, time, control index);
/// the first minimizer encountered is reported. Refuses instances with more
/// than kBruteForceGuard candidate assignments.
BruteForceResult brute_force_value(const Point& x, int level, const ProblemSpec& problem,
                                   const Mesh& mesh, const TimeGrid& grid,
                                   const ControlSet& controls,
                                   BoundaryPolicy policy = BoundaryPolicy::strict);

/// Which policy row supplies the nodal control at trajectory step j.
enum class PolicyReading {
    start_level,    // always the argmin computed at the start level n
    current_level,  // the argmin computed at level j
};

/// Per-node sequences induced by the computed nodal argmin controls:
/// walking the trajectory, every node with nonzero weight at step j is
/// assigned its stored argmin (row chosen by `reading`); zero-weight nodes
/// get the first control set element (weight-irrelevant).
NodeControlSequences sequences_from_policy(const Point& x, int level,
                                           const PolicyTable& policy, const Mesh& mesh,
                                           const TimeGrid& grid, const ProblemSpec& problem,
                                           const ControlSet& controls,
                                           BoundaryPolicy boundary = BoundaryPolicy::strict,
                                           PolicyReading reading = PolicyReading::start_level);

/// High-accuracy reference for the continuous cost functional under a
/// piecewise-constant control: RK4 integration of the dynamics at step
/// h/substeps with composite Simpson quadrature for the cost integral on the
/// same subgrid. Accuracy O((h/substeps)^4).
double continuous_cost(const Point& x, int level, const PiecewiseConstantControl& control,
                       const ProblemSpec& problem, const TimeGrid& grid, int substeps = 64);

}  // namespace hjb

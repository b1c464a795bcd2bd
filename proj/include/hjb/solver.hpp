#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hjb/mesh.hpp"
#include "hjb/problem.hpp"

namespace hjb {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvarianceError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Absolute tolerance for argmin ties; the lowest control index within this
/// tolerance of the minimum wins.
inline constexpr double kArgminTol = 1e-12;

/// Uniform time levels t_n = t + n h with one-step discount delta_h = 1 - lambda h.
struct TimeGrid {
    double t_begin = 0.0;
    double t_end = 1.0;
    int num_steps = 1;          // N
    double step = 1.0;          // h
    double one_step_discount = 1.0;  // delta_h

    /// Requires t < T, N >= 1 and lambda*h < 1.
    static TimeGrid create(double t, double T, int N, double lambda);

    double level_time(int n) const { return t_begin + n * step; }
};

/// How Euler foot points that leave the domain are handled.
enum class BoundaryPolicy {
    strict,   // any escape is an error
    project,  // clamp into the domain and count the clamp
};

struct SolveOptions {
    BoundaryPolicy policy = BoundaryPolicy::strict;
    int workers = 1;
};

/// Nodal values v_{h,k}^n(x_i) for n = 0..N, i = 0..n_s-1.
struct ValueFunction {
    std::vector<std::vector<double>> values;  // [level][node]

    double at(int level, std::size_t node) const { return values[level][node]; }
};

/// Argmin control index per (level n < N, node).
struct PolicyTable {
    std::vector<std::vector<int>> argmin;  // [level][node]
};

struct SolveResult {
    ValueFunction value;
    PolicyTable policy;
    std::uint64_t clamp_count = 0;
};

/// One Bellman minimization at node i, level n, against the level-(n+1)
/// nodal values. Returns (value, argmin control index).
std::pair<double, int> bellman_update(const ProblemSpec& problem, const Mesh& mesh,
                                      const TimeGrid& grid, const ControlSet& controls,
                                      int level, std::size_t node,
                                      std::span<const double> v_next,
                                      BoundaryPolicy policy = BoundaryPolicy::strict,
                                      std::uint64_t* clamp_count = nullptr);

/// Backward sweep n = N-1..0 of the fully discrete scheme; terminal row is g
/// at the nodes. Output is independent of the worker count.
SolveResult solve(const ProblemSpec& problem, const Mesh& mesh, const TimeGrid& grid,
                  const ControlSet& controls, const SolveOptions& options = {});

enum class LuMode { all_pairs, sampled };

/// Maximum difference quotient ||u_n^i - u_n^j|| / ||x_i - x_j|| of the nodal
/// argmin controls at one time level. all_pairs is exact; sampled draws
/// `sample_pairs` node pairs from the given seed.
double compute_Lu(const PolicyTable& policy, const Mesh& mesh, const ControlSet& controls,
                  int level, LuMode mode = LuMode::all_pairs,
                  std::size_t sample_pairs = 100000, std::uint64_t seed = 0);

/// all_pairs up to this node count, sampled above (solve-time default).
inline constexpr std::size_t kLuAllPairsLimit = 2000;

double compute_Lu_auto(const PolicyTable& policy, const Mesh& mesh,
                       const ControlSet& controls, int level, std::uint64_t seed = 0);

}  // namespace hjb

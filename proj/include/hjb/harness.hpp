#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hjb/mesh.hpp"
#include "hjb/oracle.hpp"
#include "hjb/problem.hpp"
#include "hjb/solver.hpp"

namespace hjb {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public HarnessError {
public:
    using HarnessError::HarnessError;
};

/// Errors at or below this are treated as exact (zero) and excluded from
/// rate fits.
inline constexpr double kZeroErrorFloor = 1e-13;

/// Least-squares slope of log(error) against log(scale). Entries with error
/// <= kZeroErrorFloor are excluded; fewer than 2 usable pairs is an error.
double estimate_rate(const std::vector<std::pair<double, double>>& scale_error_pairs);

enum class ErrorNorm { max, mean };

struct ConvergenceLevel {
    double h = 0.0;
    double k = 0.0;
    std::size_t num_controls = 0;
    double error = 0.0;
    bool exact = false;  // error at or below the zero floor
    double Lu = 0.0;
    std::uint64_t clamp_count = 0;
    double wall_seconds = 0.0;
};

struct ConvergenceReport {
    std::string problem;
    ErrorNorm norm = ErrorNorm::max;
    std::vector<ConvergenceLevel> levels;  // sorted by decreasing h+k
    double fitted_rate = 0.0;
    bool rate_defined = false;
    bool lu_growth_flag = false;  // L_u more than doubled on some halving
    std::optional<BoxDomain> subdomain;
    std::string notes;
};

struct ConvergenceStudyConfig {
    BoxDomain domain;
    std::vector<int> base_subdivisions;
    int base_steps = 8;
    int levels = 5;
    BoxDomain subdomain;
    ErrorNorm norm = ErrorNorm::max;
    BoundaryPolicy policy = BoundaryPolicy::project;
    int workers = 1;
    /// When the problem declares no exact value function, compare against a
    /// 4x finer self-solve instead of failing.
    bool allow_reference = false;
    std::uint64_t seed = 0;
};

/// Refinement study of the solver error against the exact (or reference)
/// value function at the initial time level, measured over subdomain nodes.
ConvergenceReport run_convergence(const ProblemSpec& problem, const ControlSet& controls,
                                  const ConvergenceStudyConfig& config);

struct Lemma1StudyConfig {
    BoxDomain domain;
    std::vector<int> base_subdivisions;
    int base_steps = 8;
    int levels = 5;
    Point x;
    /// Control at the coarsest level, one value per base interval; finer
    /// levels repeat each value so the control stays representable.
    PiecewiseConstantControl base_control;
    int substeps = 64;
    BoundaryPolicy policy = BoundaryPolicy::strict;
};

/// Gap between the continuous cost (RK4 + Simpson reference) and the fully
/// discrete functional with all node sequences equal to a fixed
/// piecewise-constant control, across simultaneous refinement.
ConvergenceReport lemma1_study(const ProblemSpec& problem, const Lemma1StudyConfig& config);

struct InterpStudyLevel {
    double k = 0.0;
    double sup_error = 0.0;
    bool bound_ok = false;  // sup_error <= L_g * k
};

struct InterpStudyReport {
    std::vector<InterpStudyLevel> levels;
    double fitted_rate = 0.0;
    bool rate_defined = false;
};

/// Sup-norm interpolation error of g over deterministic sample points at each
/// refinement level, checked against the Lipschitz bound L_g * k.
InterpStudyReport interp_error_study(const std::function<double(const Point&)>& g,
                                     double lipschitz_g, const BoxDomain& domain,
                                     const std::vector<int>& base_subdivisions, int levels,
                                     std::size_t samples = 10000, std::uint64_t seed = 0);

}  // namespace hjb

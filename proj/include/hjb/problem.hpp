#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjb/mesh.hpp"

namespace hjb {

using Control = std::vector<double>;

class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Finite-horizon optimal control instance: dynamics f, running cost L,
/// terminal cost g, discount lambda and horizon [t_begin, t_end]. All
/// callables must be pure and total on the domain of interest.
struct ProblemSpec {
    std::string name;
    std::size_t state_dim = 0;
    std::size_t control_dim = 0;

    std::function<Point(const Point&, const Control&, double)> dynamics;       // f
    std::function<double(const Point&, const Control&, double)> running_cost;  // L
    std::function<double(const Point&)> terminal_cost;                         // g

    double discount = 0.0;  // lambda >= 0
    double t_begin = 0.0;
    double t_end = 1.0;

    struct Metadata {
        std::optional<double> bound_f;  // M_f
        std::optional<double> bound_L;  // M_L
        std::optional<double> bound_g;  // M_g
        std::optional<double> lip_f;    // L_f
        std::optional<double> lip_L;    // L_L
        std::optional<double> lip_g;    // L_g
        /// Exact value function v(x, t) when a closed form is known.
        std::function<double(const Point&, double)> exact_value;
    } metadata;

    bool has_exact_value() const { return static_cast<bool>(metadata.exact_value); }
};

/// Description of a finite control set: an explicit list, a uniformly sampled
/// interval/box, or points on a circle.
struct ControlSetSpec {
    enum class Kind { explicit_list, interval, box, circle };
    Kind kind = Kind::interval;

    std::vector<Control> elements;       // explicit_list
    std::vector<double> lower, upper;    // interval (size 1) / box
    std::size_t count = 0;               // samples per axis, or around the circle
    double radius = 1.0;                 // circle
};

/// Finite ordered control set; element order is fixed at construction and is
/// the tie-breaking key everywhere.
class ControlSet {
public:
    static ControlSet from_spec(const ControlSetSpec& spec);

    std::size_t size() const { return elements_.size(); }
    const Control& operator[](std::size_t i) const { return elements_[i]; }
    const std::vector<Control>& elements() const { return elements_; }
    std::size_t control_dim() const { return elements_.empty() ? 0 : elements_[0].size(); }

    /// True when the convex hull of the set stays admissible (interval/box
    /// samplings); blended controls from other sets are diagnostic-only.
    bool convex_hull_admissible() const { return convex_hull_admissible_; }

private:
    std::vector<Control> elements_;
    bool convex_hull_admissible_ = false;
};

ControlSet discretize_controls(const ControlSetSpec& spec);

struct TimeGrid;  // solver.hpp

struct InvarianceViolation {
    std::size_t node;
    std::size_t control;
    int time_level;
    Point escaped;
};

struct InvarianceReport {
    bool ok = true;
    std::vector<InvarianceViolation> violations;
};

/// Checks x_i + h f(x_i, u, t_n) in the closed domain for every node,
/// control, and time level. Violations are data, not errors.
InvarianceReport check_invariance(const ProblemSpec& problem, const Mesh& mesh,
                                  const TimeGrid& grid, const ControlSet& controls);

/// Componentwise clamp into the box; identity on interior points.
Point project_to_domain(Point x, const BoxDomain& domain);

/// Benchmark registry. Registered names: eikonal1d, eikonal2d,
/// discounted_rest, advect_lin.
ProblemSpec make_problem(const std::string& name, const std::map<std::string, double>& params);

std::vector<std::string> registered_problems();

}  // namespace hjb

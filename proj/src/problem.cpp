#include "hjb/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "hjb/solver.hpp"

namespace hjb {

namespace {

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    const std::set<std::string>& allowed, const std::string& name) {
    for (const auto& [key, value] : params) {
        (void)value;
        if (!allowed.contains(key)) {
            throw ProblemError(name + ": unknown parameter '" + key + "'");
        }
    }
}

void check_horizon(double t, double T, const std::string& name) {
    if (!(t < T)) {
        throw ProblemError(name + ": horizon requires t < T");
    }
}

double norm2(const Control& u) {
    double s = 0.0;
    for (double v : u) {
        s += v * v;
    }
    return std::sqrt(s);
}

ProblemSpec make_eikonal(std::size_t d, const std::map<std::string, double>& params,
                         const std::string& name) {
    reject_unknown(params, {"umax", "t", "T"}, name);
    const double umax = get_param(params, "umax", 1.0);
    if (!(umax > 0.0)) {
        throw ProblemError(name + ": umax must be positive");
    }
    ProblemSpec p;
    p.name = name;
    p.state_dim = d;
    p.control_dim = d;
    p.t_begin = get_param(params, "t", 0.0);
    p.t_end = get_param(params, "T", 1.0);
    check_horizon(p.t_begin, p.t_end, name);
    p.discount = 0.0;
    p.dynamics = [](const Point&, const Control& u, double) { return Point(u); };
    p.running_cost = [](const Point&, const Control&, double) { return 0.0; };
    p.terminal_cost = [](const Point& x) { return norm2(x); };
    const double T = p.t_end;
    p.metadata.bound_f = umax;
    p.metadata.bound_L = 0.0;
    p.metadata.lip_f = 0.0;
    p.metadata.lip_L = 0.0;
    p.metadata.lip_g = 1.0;
    p.metadata.exact_value = [umax, T](const Point& x, double t) {
        return std::max(norm2(x) - umax * (T - t), 0.0);
    };
    return p;
}

}  // namespace

ProblemSpec make_problem(const std::string& name, const std::map<std::string, double>& params) {
    if (name == "eikonal1d") {
        return make_eikonal(1, params, name);
    }
    if (name == "eikonal2d") {
        return make_eikonal(2, params, name);
    }
    if (name == "discounted_rest") {
        reject_unknown(params, {"c", "g", "lambda", "dim", "t", "T"}, name);
        const double c = get_param(params, "c", 1.0);
        const double gval = get_param(params, "g", 0.0);
        const double lambda = get_param(params, "lambda", 0.0);
        const auto d = static_cast<std::size_t>(get_param(params, "dim", 1.0));
        if (lambda < 0.0) {
            throw ProblemError(name + ": lambda must be >= 0");
        }
        if (d < 1) {
            throw ProblemError(name + ": dim must be >= 1");
        }
        ProblemSpec p;
        p.name = name;
        p.state_dim = d;
        p.control_dim = d;
        p.t_begin = get_param(params, "t", 0.0);
        p.t_end = get_param(params, "T", 1.0);
        check_horizon(p.t_begin, p.t_end, name);
        p.discount = lambda;
        p.dynamics = [d](const Point&, const Control&, double) { return Point(d, 0.0); };
        p.running_cost = [c](const Point&, const Control& u, double) {
            double s = c;
            for (double v : u) {
                s += v * v;
            }
            return s;
        };
        p.terminal_cost = [gval](const Point&) { return gval; };
        p.metadata.bound_f = 0.0;
        p.metadata.lip_f = 0.0;
        p.metadata.lip_L = 0.0;
        p.metadata.lip_g = 0.0;
        p.metadata.bound_g = std::abs(gval);
        const double T = p.t_end;
        // Closed form assumes the control set contains u = 0, where the
        // running cost attains its minimum c.
        p.metadata.exact_value = [c, gval, lambda, T](const Point&, double t) {
            const double tau = T - t;
            const double accum = (lambda > 0.0) ? (1.0 - std::exp(-lambda * tau)) / lambda : tau;
            return c * accum + gval * std::exp(-lambda * tau);
        };
        return p;
    }
    if (name == "advect_lin") {
        reject_unknown(params, {"a0", "a1", "lambda", "dim", "t", "T"}, name);
        const double a0 = get_param(params, "a0", 0.5);
        const double a1 = get_param(params, "a1", -0.5);
        const double lambda = get_param(params, "lambda", 0.0);
        const auto d = static_cast<std::size_t>(get_param(params, "dim", 1.0));
        if (lambda < 0.0) {
            throw ProblemError(name + ": lambda must be >= 0");
        }
        if (d < 1) {
            throw ProblemError(name + ": dim must be >= 1");
        }
        ProblemSpec p;
        p.name = name;
        p.state_dim = d;
        p.control_dim = d;
        p.t_begin = get_param(params, "t", 0.0);
        p.t_end = get_param(params, "T", 1.0);
        check_horizon(p.t_begin, p.t_end, name);
        p.discount = lambda;
        p.dynamics = [a0, a1, d](const Point&, const Control& u, double s) {
            Point v(d);
            const double a = a0 + a1 * s;
            for (std::size_t i = 0; i < d; ++i) {
                v[i] = a + u[i];
            }
            return v;
        };
        p.running_cost = [](const Point&, const Control& u, double) {
            double s = 0.0;
            for (double v : u) {
                s += v * v;
            }
            return s;
        };
        p.terminal_cost = [](const Point& x) { return norm2(x); };
        p.metadata.lip_f = std::abs(a1);
        p.metadata.lip_L = 0.0;
        p.metadata.lip_g = 1.0;
        return p;
    }
    std::ostringstream os;
    os << "unknown problem '" << name << "'; registered:";
    for (const auto& key : registered_problems()) {
        os << " " << key;
    }
    throw ProblemError(os.str());
}

std::vector<std::string> registered_problems() {
    return {"advect_lin", "discounted_rest", "eikonal1d", "eikonal2d"};
}

ControlSet ControlSet::from_spec(const ControlSetSpec& spec) {
    ControlSet set;
    switch (spec.kind) {
        case ControlSetSpec::Kind::explicit_list: {
            if (spec.elements.empty()) {
                throw ProblemError("control set: explicit list is empty");
            }
            const std::size_t m = spec.elements.front().size();
            for (const auto& u : spec.elements) {
                if (u.size() != m) {
                    throw ProblemError("control set: inconsistent control dimension");
                }
            }
            set.elements_ = spec.elements;
            break;
        }
        case ControlSetSpec::Kind::interval: {
            if (spec.count == 0) {
                throw ProblemError("control set: sample count must be positive");
            }
            if (spec.lower.size() != 1 || spec.upper.size() != 1 ||
                !(spec.lower[0] < spec.upper[0])) {
                throw ProblemError("control set: interval requires lower < upper in 1-D");
            }
            const double a = spec.lower[0];
            const double b = spec.upper[0];
            if (spec.count == 1) {
                set.elements_.push_back({0.5 * (a + b)});
            } else {
                for (std::size_t i = 0; i < spec.count; ++i) {
                    set.elements_.push_back(
                        {a + (b - a) * static_cast<double>(i) /
                                 static_cast<double>(spec.count - 1)});
                }
            }
            set.convex_hull_admissible_ = true;
            break;
        }
        case ControlSetSpec::Kind::box: {
            if (spec.count == 0) {
                throw ProblemError("control set: sample count must be positive");
            }
            const std::size_t m = spec.lower.size();
            if (m == 0 || spec.upper.size() != m) {
                throw ProblemError("control set: box bounds dimension mismatch");
            }
            for (std::size_t a = 0; a < m; ++a) {
                if (!(spec.lower[a] < spec.upper[a])) {
                    throw ProblemError("control set: box lower >= upper on axis " +
                                       std::to_string(a));
                }
            }
            // Cartesian product, axis 0 slowest.
            std::size_t total = 1;
            for (std::size_t a = 0; a < m; ++a) {
                total *= spec.count;
            }
            for (std::size_t idx = 0; idx < total; ++idx) {
                Control u(m);
                std::size_t rem = idx;
                for (std::size_t a = m; a-- > 0;) {
                    const std::size_t ia = rem % spec.count;
                    rem /= spec.count;
                    u[a] = (spec.count == 1)
                               ? 0.5 * (spec.lower[a] + spec.upper[a])
                               : spec.lower[a] + (spec.upper[a] - spec.lower[a]) *
                                                     static_cast<double>(ia) /
                                                     static_cast<double>(spec.count - 1);
                }
                set.elements_.push_back(std::move(u));
            }
            set.convex_hull_admissible_ = true;
            break;
        }
        case ControlSetSpec::Kind::circle: {
            if (spec.count == 0) {
                throw ProblemError("control set: sample count must be positive");
            }
            if (!(spec.radius > 0.0)) {
                throw ProblemError("control set: circle radius must be positive");
            }
            const double snap = 1e-12 * spec.radius;
            for (std::size_t j = 0; j < spec.count; ++j) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) /
                                     static_cast<double>(spec.count);
                double cx = spec.radius * std::cos(angle);
                double cy = spec.radius * std::sin(angle);
                if (std::abs(cx) < snap) {
                    cx = 0.0;
                }
                if (std::abs(cy) < snap) {
                    cy = 0.0;
                }
                set.elements_.push_back({cx, cy});
            }
            break;
        }
    }
    for (std::size_t i = 0; i < set.elements_.size(); ++i) {
        for (std::size_t j = i + 1; j < set.elements_.size(); ++j) {
            if (set.elements_[i] == set.elements_[j]) {
                throw ProblemError("control set: duplicate element at indices " +
                                   std::to_string(i) + " and " + std::to_string(j));
            }
        }
    }
    return set;
}

ControlSet discretize_controls(const ControlSetSpec& spec) {
    return ControlSet::from_spec(spec);
}

InvarianceReport check_invariance(const ProblemSpec& problem, const Mesh& mesh,
                                  const TimeGrid& grid, const ControlSet& controls) {
    InvarianceReport report;
    const double tol = kGeomTol * mesh.domain().diameter();
    for (int n = 0; n < grid.num_steps; ++n) {
        const double tn = grid.level_time(n);
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
            const Point xi = mesh.vertex(i);
            for (std::size_t c = 0; c < controls.size(); ++c) {
                const Point v = problem.dynamics(xi, controls[c], tn);
                Point foot(xi);
                for (std::size_t a = 0; a < foot.size(); ++a) {
                    foot[a] += grid.step * v[a];
                }
                if (!mesh.domain().contains(foot, tol)) {
                    report.violations.push_back({i, c, n, std::move(foot)});
                }
            }
        }
    }
    report.ok = report.violations.empty();
    return report;
}

Point project_to_domain(Point x, const BoxDomain& domain) {
    return domain.clamp(std::move(x));
}

}  // namespace hjb

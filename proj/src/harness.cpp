#include "hjb/harness.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace hjb {

double estimate_rate(const std::vector<std::pair<double, double>>& scale_error_pairs) {
    std::vector<std::pair<double, double>> usable;
    for (const auto& [scale, error] : scale_error_pairs) {
        if (!(scale > 0.0)) {
            throw HarnessError("estimate_rate: scales must be positive");
        }
        if (error > kZeroErrorFloor) {
            usable.emplace_back(scale, error);
        }
    }
    if (usable.size() < 2) {
        throw InsufficientDataError(
            "estimate_rate: fewer than 2 usable (positive-error) pairs");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [scale, error] : usable) {
        const double lx = std::log(scale);
        const double ly = std::log(error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const auto count = static_cast<double>(usable.size());
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

namespace {

void finish_report(ConvergenceReport& report) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& level : report.levels) {
        pairs.emplace_back(level.h + level.k, level.error);
    }
    try {
        report.fitted_rate = estimate_rate(pairs);
        report.rate_defined = true;
    } catch (const InsufficientDataError&) {
        report.rate_defined = false;
        if (!report.notes.empty()) {
            report.notes += "; ";
        }
        report.notes += "rate undefined: errors at the zero floor on all but <2 levels";
    }
    for (std::size_t l = 0; l + 1 < report.levels.size(); ++l) {
        if (report.levels[l + 1].Lu > 2.0 * report.levels[l].Lu) {
            report.lu_growth_flag = true;
        }
    }
}

}  // namespace

ConvergenceReport run_convergence(const ProblemSpec& problem, const ControlSet& controls,
                                  const ConvergenceStudyConfig& config) {
    if (config.levels < 1) {
        throw HarnessError("run_convergence: needs at least 1 level");
    }
    if (!config.domain.contains_box(config.subdomain)) {
        throw HarnessError("run_convergence: subdomain must lie inside the domain");
    }
    if (!problem.has_exact_value() && !config.allow_reference) {
        throw HarnessError(
            "run_convergence: problem has no exact value function and the reference "
            "mode is disabled");
    }

    ConvergenceReport report;
    report.problem = problem.name;
    report.norm = config.norm;
    report.subdomain = config.subdomain;
    if (!problem.has_exact_value()) {
        report.notes = "reference mode: errors measured against a 4x finer self-solve";
    }

    for (int l = 0; l < config.levels; ++l) {
        const int factor = 1 << l;
        std::vector<int> subdivisions = config.base_subdivisions;
        for (int& s : subdivisions) {
            s *= factor;
        }
        const Mesh mesh = Mesh::build(config.domain, subdivisions);
        const TimeGrid grid = TimeGrid::create(problem.t_begin, problem.t_end,
                                               config.base_steps * factor, problem.discount);

        const auto start = std::chrono::steady_clock::now();
        const SolveResult run =
            solve(problem, mesh, grid, controls, {config.policy, config.workers});

        std::vector<double> reference;
        const Mesh* fine_mesh = nullptr;
        Mesh fine_storage = mesh;  // reused only in reference mode
        if (!problem.has_exact_value()) {
            std::vector<int> fine_subdivisions = subdivisions;
            for (int& s : fine_subdivisions) {
                s *= 4;
            }
            fine_storage = Mesh::build(config.domain, fine_subdivisions);
            const TimeGrid fine_grid =
                TimeGrid::create(problem.t_begin, problem.t_end,
                                 config.base_steps * factor * 4, problem.discount);
            const SolveResult fine =
                solve(problem, fine_storage, fine_grid, controls,
                      {config.policy, config.workers});
            reference = fine.value.values[0];
            fine_mesh = &fine_storage;
        }

        double max_err = 0.0;
        double sum_err = 0.0;
        std::size_t counted = 0;
        for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
            const Point xi = mesh.vertex(i);
            if (!config.subdomain.contains(xi, kGeomTol * config.domain.diameter())) {
                continue;
            }
            const double truth =
                problem.has_exact_value()
                    ? problem.metadata.exact_value(xi, problem.t_begin)
                    : fine_mesh->interp_scalar(reference, xi);
            const double err = std::abs(run.value.values[0][i] - truth);
            max_err = std::max(max_err, err);
            sum_err += err;
            ++counted;
        }
        if (counted == 0) {
            throw HarnessError("run_convergence: no mesh nodes inside the subdomain");
        }
        const auto stop = std::chrono::steady_clock::now();

        ConvergenceLevel level;
        level.h = grid.step;
        level.k = mesh.mesh_size();
        level.num_controls = controls.size();
        level.error = config.norm == ErrorNorm::max ? max_err
                                                    : sum_err / static_cast<double>(counted);
        level.exact = level.error <= kZeroErrorFloor;
        level.Lu = compute_Lu_auto(run.policy, mesh, controls, 0, config.seed);
        level.clamp_count = run.clamp_count;
        level.wall_seconds = std::chrono::duration<double>(stop - start).count();
        report.levels.push_back(level);
    }
    finish_report(report);
    return report;
}

ConvergenceReport lemma1_study(const ProblemSpec& problem, const Lemma1StudyConfig& config) {
    if (config.levels < 1) {
        throw HarnessError("lemma1_study: needs at least 1 level");
    }
    if (config.base_control.start_level != 0 ||
        static_cast<int>(config.base_control.values.size()) != config.base_steps) {
        throw HarnessError(
            "lemma1_study: base control must supply one value per coarsest interval");
    }

    ConvergenceReport report;
    report.problem = problem.name;
    report.notes = "lemma1: gap between continuous cost and discrete functional";

    for (int l = 0; l < config.levels; ++l) {
        const int factor = 1 << l;
        std::vector<int> subdivisions = config.base_subdivisions;
        for (int& s : subdivisions) {
            s *= factor;
        }
        const Mesh mesh = Mesh::build(config.domain, subdivisions);
        const TimeGrid grid = TimeGrid::create(problem.t_begin, problem.t_end,
                                               config.base_steps * factor, problem.discount);

        PiecewiseConstantControl refined;
        refined.start_level = 0;
        for (const Control& u : config.base_control.values) {
            for (int r = 0; r < factor; ++r) {
                refined.values.push_back(u);
            }
        }

        NodeControlSequences seqs;
        seqs.start_level = 0;
        seqs.per_node.assign(mesh.num_vertices(), refined.values);

        const auto start = std::chrono::steady_clock::now();
        const double exact =
            continuous_cost(config.x, 0, refined, problem, grid, config.substeps);
        const auto [discrete, traj] =
            discrete_functional(config.x, seqs, problem, mesh, grid, config.policy);
        (void)traj;
        const auto stop = std::chrono::steady_clock::now();

        ConvergenceLevel level;
        level.h = grid.step;
        level.k = mesh.mesh_size();
        level.error = std::abs(exact - discrete);
        level.exact = level.error <= kZeroErrorFloor;
        level.wall_seconds = std::chrono::duration<double>(stop - start).count();
        report.levels.push_back(level);
    }
    finish_report(report);
    return report;
}

InterpStudyReport interp_error_study(const std::function<double(const Point&)>& g,
                                     double lipschitz_g, const BoxDomain& domain,
                                     const std::vector<int>& base_subdivisions, int levels,
                                     std::size_t samples, std::uint64_t seed) {
    if (levels < 1) {
        throw HarnessError("interp_error_study: needs at least 1 level");
    }
    InterpStudyReport report;
    for (int l = 0; l < levels; ++l) {
        const int factor = 1 << l;
        std::vector<int> subdivisions = base_subdivisions;
        for (int& s : subdivisions) {
            s *= factor;
        }
        const Mesh mesh = Mesh::build(domain, subdivisions);
        std::vector<double> nodal(mesh.num_vertices());
        for (std::size_t i = 0; i < nodal.size(); ++i) {
            nodal[i] = g(mesh.vertex(i));
        }

        std::mt19937_64 rng(seed);  // same points at every level
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double sup = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            Point x(domain.dim());
            for (std::size_t a = 0; a < x.size(); ++a) {
                x[a] = domain.lower[a] + domain.edge(a) * unit(rng);
            }
            sup = std::max(sup, std::abs(mesh.interp_scalar(nodal, x) - g(x)));
        }

        InterpStudyLevel level;
        level.k = mesh.mesh_size();
        level.sup_error = sup;
        level.bound_ok = sup <= lipschitz_g * mesh.mesh_size() + kZeroErrorFloor;
        report.levels.push_back(level);
    }
    std::vector<std::pair<double, double>> pairs;
    for (const auto& level : report.levels) {
        pairs.emplace_back(level.k, level.sup_error);
    }
    try {
        report.fitted_rate = estimate_rate(pairs);
        report.rate_defined = true;
    } catch (const InsufficientDataError&) {
        report.rate_defined = false;
    }
    return report;
}

}  // namespace hjb

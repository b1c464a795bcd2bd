#include "hjb/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hjb {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError("config: '" + where + "' must be an object");
    }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.contains(key)) {
            throw ConfigError("config: unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
T get_required(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) {
        throw ConfigError("config: missing key '" + key + "' in " + where);
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

template <class T>
T get_optional(const json& j, const std::string& key, const std::string& where, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "' in " + where);
    }
}

ControlSetSpec parse_controls(const json& j) {
    require_object(j, "controls");
    reject_unknown_keys(j, {"kind", "elements", "lower", "upper", "count", "radius"},
                        "controls");
    ControlSetSpec spec;
    const auto kind = get_required<std::string>(j, "kind", "controls");
    if (kind == "explicit") {
        spec.kind = ControlSetSpec::Kind::explicit_list;
        spec.elements = get_required<std::vector<Control>>(j, "elements", "controls");
    } else if (kind == "interval") {
        spec.kind = ControlSetSpec::Kind::interval;
        spec.lower = get_required<std::vector<double>>(j, "lower", "controls");
        spec.upper = get_required<std::vector<double>>(j, "upper", "controls");
        spec.count = get_required<std::size_t>(j, "count", "controls");
    } else if (kind == "box") {
        spec.kind = ControlSetSpec::Kind::box;
        spec.lower = get_required<std::vector<double>>(j, "lower", "controls");
        spec.upper = get_required<std::vector<double>>(j, "upper", "controls");
        spec.count = get_required<std::size_t>(j, "count", "controls");
    } else if (kind == "circle") {
        spec.kind = ControlSetSpec::Kind::circle;
        spec.count = get_required<std::size_t>(j, "count", "controls");
        spec.radius = get_optional<double>(j, "radius", "controls", 1.0);
    } else {
        throw ConfigError("config: controls.kind must be one of explicit, interval, box, "
                          "circle (got '" + kind + "')");
    }
    return spec;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    require_object(j, "root");
    reject_unknown_keys(j,
                        {"problem", "mesh", "time", "controls", "policy", "output_dir",
                         "seed", "workers", "study", "lemma1", "simulate", "interp"},
                        "root");

    RunConfig cfg;

    const json& problem = j.contains("problem") ? j.at("problem") : json::object();
    require_object(problem, "problem");
    reject_unknown_keys(problem, {"name", "params"}, "problem");
    cfg.problem_name = get_required<std::string>(problem, "name", "problem");
    if (problem.contains("params")) {
        require_object(problem.at("params"), "problem.params");
        for (const auto& [key, value] : problem.at("params").items()) {
            if (!value.is_number()) {
                throw ConfigError("config: problem.params." + key + " must be a number");
            }
            cfg.problem_params[key] = value.get<double>();
        }
    }

    const json& mesh = j.contains("mesh") ? j.at("mesh") : json::object();
    require_object(mesh, "mesh");
    reject_unknown_keys(mesh, {"lower", "upper", "subdivisions"}, "mesh");
    cfg.domain_lower = get_required<std::vector<double>>(mesh, "lower", "mesh");
    cfg.domain_upper = get_required<std::vector<double>>(mesh, "upper", "mesh");
    cfg.subdivisions = get_required<std::vector<int>>(mesh, "subdivisions", "mesh");

    const json& time = j.contains("time") ? j.at("time") : json::object();
    require_object(time, "time");
    reject_unknown_keys(time, {"t", "T", "steps"}, "time");
    cfg.t_begin = get_optional<double>(time, "t", "time", 0.0);
    cfg.t_end = get_optional<double>(time, "T", "time", 1.0);
    cfg.steps = get_required<int>(time, "steps", "time");

    if (!j.contains("controls")) {
        throw ConfigError("config: missing 'controls' block");
    }
    cfg.controls = parse_controls(j.at("controls"));

    const auto policy = get_optional<std::string>(j, "policy", "root", "strict");
    if (policy == "strict") {
        cfg.policy = BoundaryPolicy::strict;
    } else if (policy == "project") {
        cfg.policy = BoundaryPolicy::project;
    } else {
        throw ConfigError("config: policy must be 'strict' or 'project'");
    }
    cfg.output_dir = get_optional<std::string>(j, "output_dir", "root", "out");
    cfg.seed = get_optional<std::uint64_t>(j, "seed", "root", 0);
    cfg.workers = get_optional<int>(j, "workers", "root", 1);
    if (cfg.workers < 1) {
        throw ConfigError("config: workers must be >= 1");
    }

    if (j.contains("study")) {
        const json& study = j.at("study");
        require_object(study, "study");
        reject_unknown_keys(study,
                            {"levels", "subdomain_lower", "subdomain_upper", "norm",
                             "allow_reference"},
                            "study");
        RunConfig::StudyBlock block;
        block.levels = get_optional<int>(study, "levels", "study", 5);
        block.subdomain_lower =
            get_optional<std::vector<double>>(study, "subdomain_lower", "study", cfg.domain_lower);
        block.subdomain_upper =
            get_optional<std::vector<double>>(study, "subdomain_upper", "study", cfg.domain_upper);
        const auto norm = get_optional<std::string>(study, "norm", "study", "max");
        if (norm == "max") {
            block.norm = ErrorNorm::max;
        } else if (norm == "mean") {
            block.norm = ErrorNorm::mean;
        } else {
            throw ConfigError("config: study.norm must be 'max' or 'mean'");
        }
        block.allow_reference = get_optional<bool>(study, "allow_reference", "study", false);
        cfg.study = block;
    }

    if (j.contains("lemma1")) {
        const json& lemma1 = j.at("lemma1");
        require_object(lemma1, "lemma1");
        reject_unknown_keys(lemma1, {"x", "control", "levels", "substeps"}, "lemma1");
        RunConfig::Lemma1Block block;
        block.x = get_required<Point>(lemma1, "x", "lemma1");
        block.control = get_required<Control>(lemma1, "control", "lemma1");
        block.levels = get_optional<int>(lemma1, "levels", "lemma1", 5);
        block.substeps = get_optional<int>(lemma1, "substeps", "lemma1", 64);
        cfg.lemma1 = block;
    }

    if (j.contains("simulate")) {
        const json& simulate = j.at("simulate");
        require_object(simulate, "simulate");
        reject_unknown_keys(simulate, {"x0", "start_level"}, "simulate");
        RunConfig::SimulateBlock block;
        block.initial_states = get_required<std::vector<Point>>(simulate, "x0", "simulate");
        block.start_level = get_optional<int>(simulate, "start_level", "simulate", 0);
        cfg.simulate = block;
    }

    if (j.contains("interp")) {
        const json& interp = j.at("interp");
        require_object(interp, "interp");
        reject_unknown_keys(interp, {"levels", "samples"}, "interp");
        RunConfig::InterpBlock block;
        block.levels = get_optional<int>(interp, "levels", "interp", 5);
        block.samples = get_optional<std::size_t>(interp, "samples", "interp", 10000);
        cfg.interp = block;
    }

    // Cross-field validation happens on build: domain shape, lambda*h < 1.
    (void)cfg.domain();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

ProblemSpec RunConfig::build_problem() const {
    auto params = problem_params;
    params["t"] = t_begin;
    params["T"] = t_end;
    try {
        return make_problem(problem_name, params);
    } catch (const ProblemError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

TimeGrid RunConfig::build_grid(const ProblemSpec& problem) const {
    try {
        return TimeGrid::create(t_begin, t_end, steps, problem.discount);
    } catch (const SolverError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

}  // namespace hjb

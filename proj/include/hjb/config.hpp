#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjb/harness.hpp"
#include "hjb/mesh.hpp"
#include "hjb/problem.hpp"
#include "hjb/solver.hpp"

namespace hjb {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration. The on-disk format is strict JSON: unknown keys
/// anywhere are rejected so that misconfigured studies fail loudly.
struct RunConfig {
    std::string problem_name;
    std::map<std::string, double> problem_params;

    std::vector<double> domain_lower, domain_upper;
    std::vector<int> subdivisions;

    double t_begin = 0.0;
    double t_end = 1.0;
    int steps = 1;

    ControlSetSpec controls;

    BoundaryPolicy policy = BoundaryPolicy::strict;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int workers = 1;

    struct StudyBlock {
        int levels = 5;
        std::vector<double> subdomain_lower, subdomain_upper;
        ErrorNorm norm = ErrorNorm::max;
        bool allow_reference = false;
    };
    std::optional<StudyBlock> study;

    struct Lemma1Block {
        Point x;
        Control control;  // constant over the horizon
        int levels = 5;
        int substeps = 64;
    };
    std::optional<Lemma1Block> lemma1;

    struct SimulateBlock {
        std::vector<Point> initial_states;
        int start_level = 0;
    };
    std::optional<SimulateBlock> simulate;

    struct InterpBlock {
        int levels = 5;
        std::size_t samples = 10000;
    };
    std::optional<InterpBlock> interp;

    BoxDomain domain() const { return BoxDomain::create(domain_lower, domain_upper); }
    ProblemSpec build_problem() const;
    TimeGrid build_grid(const ProblemSpec& problem) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace hjb

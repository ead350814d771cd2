#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "rtrace/tracer.hpp"

namespace rtrace {

/// A study configuration file is flat `key = value` text with dotted section
/// keys; `#` comments and blank lines are ignored, unknown keys are rejected.
///
///   potential.kind           gaussian | square_well | morse | yukawa |
///                            lennard_jones | none
///   potential.params.<name>  kind-specific shape parameter (see potentials.hpp);
///                            names: width (gaussian), a (square_well),
///                            alpha,r0 (morse), mu (yukawa), sigma (lennard_jones)
///   l                        angular momentum (default 0)
///   grid.r_end               asymptotic boundary R          (required)
///   grid.n_points            grid intervals                 (required)
///   lambda.min, lambda.max   continuation window            (required)
///   seed = <im_k> <lambda>          explicit bound-state start (repeatable)
///   seed = auto <lo> <hi> <lambda>  bracketed search           (repeatable)
///   step.ds, step.ds_min, step.ds_max, step.newton_tol
///   step.newton_max_iter, step.max_steps
///   study.im_k_floor         stop branches below this Im k (default -3)
///   output.dir               where cmd_trace writes (default "study_out")
struct StudyConfig {
    std::string potential_kind = "gaussian";
    std::map<std::string, double> potential_params;
    int l = 0;
    double grid_r_end = 0.0;
    int grid_n_points = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::vector<Seed> seeds;
    StepControl step;
    int max_steps = 600;
    double im_k_floor = -3.0;
    std::string output_dir = "study_out";
};

/// Throws ConfigError on syntax errors, unknown keys, or missing
/// required keys.
StudyConfig parse_study_config(std::istream& in);
StudyConfig parse_study_config_file(const std::string& path);

/// Builds the potential (validating shape-parameter names) and the full
/// study definition; throws ConfigError when inconsistent.
RadialPotential build_potential(const std::string& kind,
                                const std::map<std::string, double>& params);
StudyDefinition to_study(const StudyConfig& cfg);

/// Complex CLI literal: "a", "bi", "a+bi", "a-bi" (e.g. "0+0.93i", "2.1i").
Complex parse_complex(const std::string& text);

}  // namespace rtrace

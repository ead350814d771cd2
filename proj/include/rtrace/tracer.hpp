#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtrace/continuation.hpp"
#include "rtrace/solver.hpp"

namespace rtrace {

enum class StateClass { bound, virtual_state, resonance, threshold };
const char* state_class_name(StateClass c);

/// Pole classification from x = (Re k, Im k, lambda): threshold when
/// |k| < 1e-4, bound/virtual on the imaginary axis (|Re k| <= 1e-6) by the
/// sign of Im k, resonance off the axis.
StateClass classify(const Eigen::Vector3d& x);

struct Seed {
    double lambda = 0.0;
    std::optional<double> im_k;  // explicit start; empty = search the bracket
    double bracket_lo = 0.05;
    double bracket_hi = 3.0;
};

struct StudyDefinition {
    RadialPotential potential;
    int l = 0;
    RadialGrid grid;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::vector<Seed> seeds;
    StepControl step;
    int max_steps = 600;
    double im_k_floor = -3.0;  // deep-resonance cap: stop when Im k drops below
    double seed_tol = 1e-8;    // seed residual tolerance, relative to scale
    double short_range_threshold = 1e-7;
};

/// Throws ConfigError when the definition is inconsistent (no seeds, seeds
/// outside the lambda range, potential not negligible at r_end, ...).
void validate(const StudyDefinition& study);

/// Continuation evaluator for the study's radial problem: x = (Re k, Im k,
/// lambda) -> (Re F_l, Im F_l), with scale = max(1, |k|^{2l+1}).
ResidualMap make_residual_map(std::shared_ptr<const RadialSolver> solver);

struct SeedResult {
    double im_k = 0.0;
    double residual = 0.0;
    bool multiple_zeros = false;  // several zeros in the bracket; nearest to hi kept
};

/// Locates Im k with F_l(i Im k, lambda) = 0 inside the bracket.  F is
/// checked for axis purity first (for real potentials it is purely
/// imaginary on the positive imaginary k-axis); the live component drives a
/// 1-D bisection/secant search, with a pinned-Re-k Gauss-Newton fallback
/// when neither component is numerically pure.  Throws DomainError when the
/// bracket holds no zero.
SeedResult find_bound_state(const StudyDefinition& study, double lambda, double lo,
                            double hi);

struct TracedBranch {
    int id = 0;
    int parent_branch = -1;  // -1: launched from a seed
    int parent_event = -1;   // event index within the parent branch
    double seed_lambda = 0.0;
    double seed_im_k = 0.0;
    Branch branch;
};

struct StudyResult {
    std::vector<TracedBranch> branches;
    std::vector<std::string> failures;  // seeds that could not be started
};

/// One branch per seed, continued toward decreasing lambda; at each simple
/// bifurcation both arms of every ABE tangent transverse to the incoming
/// direction are launched as separate branches.  Seeds run concurrently.
StudyResult run_study(const StudyDefinition& study);

}  // namespace rtrace

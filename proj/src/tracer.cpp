#include "rtrace/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "rtrace/errors.hpp"
#include "rtrace/specfun.hpp"

namespace rtrace {
namespace {

constexpr int kScanSamples = 129;

struct AxisEval {
    // F on the imaginary axis as a function of gamma = Im k
    const RadialSolver& solver;
    double lambda;
    std::optional<Eigen::Vector2d> operator()(double gamma) const {
        try {
            return solver.residual(Eigen::Vector3d(0.0, gamma, lambda));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
};

// -1: use Re F, +1: use Im F, 0: neither component is pure
int live_component(const std::vector<std::optional<Eigen::Vector2d>>& samples) {
    double max_re = 0.0, max_im = 0.0, max_norm = 0.0;
    for (const auto& s : samples) {
        if (!s) continue;
        max_re = std::max(max_re, std::abs((*s)[0]));
        max_im = std::max(max_im, std::abs((*s)[1]));
        max_norm = std::max(max_norm, s->norm());
    }
    if (max_norm == 0.0) return 0;
    if (max_re <= 1e-8 * max_norm) return +1;
    if (max_im <= 1e-8 * max_norm) return -1;
    return 0;
}

double refine_bisection(const AxisEval& eval, int comp, double a, double fa, double b,
                        double /*fb*/) {
    // plain bisection on the live component; 60 halvings reach roundoff
    for (int i = 0; i < 60 && (b - a) > 1e-14 * std::max(1.0, b); ++i) {
        const double mid = 0.5 * (a + b);
        const auto fm = eval(mid);
        if (!fm) {  // isolated evaluation gap; nudge off the midpoint
            const double mid2 = mid + 0.05 * (b - a);
            const auto fm2 = eval(mid2);
            if (!fm2) break;
            if (std::signbit((*fm2)[comp]) == std::signbit(fa))
                a = mid2;
            else
                b = mid2;
            continue;
        }
        const double g = (*fm)[comp];
        if (std::signbit(g) == std::signbit(fa)) {
            a = mid;
            fa = g;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

// Gauss-Newton on gamma with Re k pinned to 0, for the (unexpected) case
// where F is not axis-pure.
std::optional<double> pinned_gauss_newton(const AxisEval& eval, double gamma0,
                                          double tol) {
    double gamma = gamma0;
    for (int it = 0; it < 60; ++it) {
        const auto f = eval(gamma);
        if (!f) return std::nullopt;
        if (f->norm() <= tol) return gamma;
        const double h = 1e-7 * std::max(1.0, std::abs(gamma));
        const auto fp = eval(gamma + h);
        const auto fm = eval(gamma - h);
        if (!fp || !fm) return std::nullopt;
        const Eigen::Vector2d jac = (*fp - *fm) / (2.0 * h);
        const double denom = jac.squaredNorm();
        if (!(denom > 0.0)) return std::nullopt;
        gamma -= jac.dot(*f) / denom;
    }
    return std::nullopt;
}

}  // namespace

const char* state_class_name(StateClass c) {
    switch (c) {
        case StateClass::bound: return "bound";
        case StateClass::virtual_state: return "virtual";
        case StateClass::resonance: return "resonance";
        case StateClass::threshold: return "threshold";
    }
    return "?";
}

StateClass classify(const Eigen::Vector3d& x) {
    const double abs_k = std::hypot(x[0], x[1]);
    if (abs_k < 1e-4) return StateClass::threshold;
    if (std::abs(x[0]) <= 1e-6)
        return x[1] > 0.0 ? StateClass::bound : StateClass::virtual_state;
    return StateClass::resonance;
}

void validate(const StudyDefinition& study) {
    if (!(study.grid.r_end > 0.0) || study.grid.n_points < 16)
        throw ConfigError("invalid grid: need r_end > 0 and n_points >= 16");
    if (study.l < 0 || study.l > specfun::kMaxL)
        throw ConfigError("l must be in [0, " + std::to_string(specfun::kMaxL) + "]");
    if (!(study.lambda_min <= study.lambda_max))
        throw ConfigError("lambda range: min must not exceed max");
    if (study.seeds.empty()) throw ConfigError("no seeds");
    for (const auto& s : study.seeds) {
        if (s.lambda < study.lambda_min || s.lambda > study.lambda_max)
            throw ConfigError("seed lambda " + std::to_string(s.lambda) +
                              " outside the lambda range");
        if (s.im_k && !(*s.im_k > 0.0))
            throw ConfigError("bound-state seeds need Im k > 0");
        if (!s.im_k && !(0.0 < s.bracket_lo && s.bracket_lo < s.bracket_hi))
            throw ConfigError("auto seed needs 0 < bracket_lo < bracket_hi");
    }
    if (!is_negligible_at(study.potential, study.grid.r_end, study.lambda_max,
                          study.short_range_threshold))
        throw ConfigError("potential is not negligible at r_end (short-range check)");
}

ResidualMap make_residual_map(std::shared_ptr<const RadialSolver> solver) {
    ResidualMap map;
    map.dim = 2;
    map.eval = [solver](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return solver->residual(Eigen::Vector3d(x[0], x[1], x[2]));
    };
    map.scale = [solver](const Eigen::VectorXd& x) {
        return solver->scale(Eigen::Vector3d(x[0], x[1], x[2]));
    };
    return map;
}

SeedResult find_bound_state(const StudyDefinition& study, double lambda, double lo,
                            double hi) {
    if (!(0.0 < lo && lo < hi))
        throw DomainError("find_bound_state: need 0 < lo < hi");
    const RadialSolver solver(study.potential, study.grid, study.l);
    const AxisEval eval{solver, lambda};

    std::vector<double> gammas(kScanSamples);
    std::vector<std::optional<Eigen::Vector2d>> samples(kScanSamples);
    for (int i = 0; i < kScanSamples; ++i) {
        gammas[i] = lo + (hi - lo) * i / (kScanSamples - 1);
        samples[i] = eval(gammas[i]);
    }
    const int comp_sign = live_component(samples);
    const double tol = study.seed_tol *
                       residual_scale(study.l, Complex(0.0, 0.5 * (lo + hi)));

    std::vector<double> zeros;
    if (comp_sign != 0) {
        const int comp = comp_sign > 0 ? 1 : 0;
        for (int i = 0; i + 1 < kScanSamples; ++i) {
            if (!samples[i] || !samples[i + 1]) continue;
            const double ga = (*samples[i])[comp];
            const double gb = (*samples[i + 1])[comp];
            if (ga == 0.0) {
                zeros.push_back(gammas[i]);
                continue;
            }
            if (std::signbit(ga) != std::signbit(gb))
                zeros.push_back(
                    refine_bisection(eval, comp, gammas[i], ga, gammas[i + 1], gb));
        }
    } else {
        // fall back to the pinned 2-D Newton from the sample with smallest |F|
        int best = -1;
        double best_norm = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kScanSamples; ++i)
            if (samples[i] && samples[i]->norm() < best_norm) {
                best_norm = samples[i]->norm();
                best = i;
            }
        if (best >= 0)
            if (auto g = pinned_gauss_newton(eval, gammas[best], tol))
                if (*g > lo && *g < hi) zeros.push_back(*g);
    }

    if (zeros.empty())
        throw DomainError("find_bound_state: no zero of F on the bracket");
    std::sort(zeros.begin(), zeros.end());
    SeedResult result;
    result.im_k = zeros.back();  // closest to hi
    result.multiple_zeros = zeros.size() > 1;
    const auto f = eval(result.im_k);
    result.residual = f ? f->norm() : std::numeric_limits<double>::infinity();
    if (!(result.residual <= tol))
        throw DomainError("find_bound_state: refined seed residual " +
                          std::to_string(result.residual) + " above tolerance");
    return result;
}

namespace {

struct SeedOutcome {
    std::optional<TracedBranch> seed_branch;
    std::vector<TracedBranch> arms;  // ids assigned later
    std::vector<std::string> failures;
};

SeedOutcome trace_seed(const StudyDefinition& study, const ResidualMap& map,
                       const Seed& seed, int seed_index) {
    SeedOutcome out;
    double gamma;
    double residual = 0.0;
    try {
        if (seed.im_k) {
            gamma = *seed.im_k;
            const auto f = map.eval(Eigen::Vector3d(0.0, gamma, seed.lambda));
            residual = f.norm();
            if (residual > study.seed_tol * map.scale(Eigen::Vector3d(0, gamma, seed.lambda))) {
                const auto polished = find_bound_state(study, seed.lambda, 0.7 * gamma,
                                                       1.3 * gamma);
                gamma = polished.im_k;
                residual = polished.residual;
            }
        } else {
            const auto found =
                find_bound_state(study, seed.lambda, seed.bracket_lo, seed.bracket_hi);
            gamma = found.im_k;
            residual = found.residual;
            if (found.multiple_zeros)
                out.failures.push_back("seed " + std::to_string(seed_index) +
                                       ": multiple zeros in bracket, kept the one "
                                       "closest to the upper end");
        }
    } catch (const std::exception& e) {
        out.failures.push_back("seed " + std::to_string(seed_index) +
                               ": " + e.what());
        return out;
    }

    StopRules stop;
    stop.lambda_min = study.lambda_min;
    stop.lambda_max = study.lambda_max;
    stop.max_steps = study.max_steps;
    const double floor = study.im_k_floor;
    stop.stop_when = [floor](const Eigen::VectorXd& x) { return x[1] < floor; };

    Eigen::Vector3d start(0.0, gamma, seed.lambda);
    Eigen::Vector3d hint(0.0, 0.0, -1.0);  // toward decreasing lambda

    TracedBranch tb;
    tb.seed_lambda = seed.lambda;
    tb.seed_im_k = gamma;
    try {
        tb.branch = run_branch(map, start, hint, study.step, stop);
    } catch (const std::exception& e) {
        out.failures.push_back("seed " + std::to_string(seed_index) + ": " + e.what());
        return out;
    }

    // launch both arms of each transverse ABE direction
    for (std::size_t e = 0; e < tb.branch.events.size(); ++e) {
        const auto& ev = tb.branch.events[e];
        if (ev.point_index < 0 ||
            ev.point_index >= static_cast<int>(tb.branch.points.size()))
            continue;
        const Eigen::VectorXd incoming = tb.branch.points[ev.point_index].tangent;
        for (const auto& dir : switching_tangents(ev, incoming)) {
            for (const double sign : {+1.0, -1.0}) {
                TracedBranch arm;
                arm.parent_event = static_cast<int>(e);
                arm.seed_lambda = seed.lambda;
                arm.seed_im_k = gamma;
                try {
                    arm.branch = run_branch(map, ev.x_t, sign * dir, study.step, stop);
                } catch (const std::exception& err) {
                    out.failures.push_back("switched branch (seed " +
                                           std::to_string(seed_index) +
                                           "): " + err.what());
                    continue;
                }
                out.arms.push_back(std::move(arm));
            }
        }
    }
    out.seed_branch = std::move(tb);
    return out;
}

}  // namespace

StudyResult run_study(const StudyDefinition& study) {
    validate(study);
    auto solver = std::make_shared<const RadialSolver>(study.potential, study.grid,
                                                       study.l);
    const ResidualMap map = make_residual_map(solver);

    std::vector<std::future<SeedOutcome>> futures;
    futures.reserve(study.seeds.size());
    for (std::size_t i = 0; i < study.seeds.size(); ++i)
        futures.push_back(std::async(std::launch::async, trace_seed, std::cref(study),
                                     std::cref(map), std::cref(study.seeds[i]),
                                     static_cast<int>(i)));

    StudyResult result;
    std::vector<SeedOutcome> outcomes;
    outcomes.reserve(futures.size());
    for (auto& f : futures) outcomes.push_back(f.get());

    // ids: seed branches in seed order, then switched arms in discovery order
    int next_id = 0;
    std::vector<int> seed_branch_ids(outcomes.size(), -1);
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        if (outcomes[i].seed_branch) {
            outcomes[i].seed_branch->id = next_id;
            seed_branch_ids[i] = next_id;
            ++next_id;
            result.branches.push_back(std::move(*outcomes[i].seed_branch));
        }
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        for (auto& arm : outcomes[i].arms) {
            arm.id = next_id++;
            arm.parent_branch = seed_branch_ids[i];
            result.branches.push_back(std::move(arm));
        }
    for (auto& o : outcomes)
        for (auto& msg : o.failures) result.failures.push_back(std::move(msg));
    return result;
}

}  // namespace rtrace

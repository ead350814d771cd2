#include "rtrace/continuation.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "rtrace/errors.hpp"

namespace rtrace {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double map_scale(const ResidualMap& f, const VectorXd& x) {
    return f.scale ? f.scale(x) : 1.0;
}

int initial_thread_cap() {
    if (const char* env = std::getenv("RESONANCE_TRACER_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 0) return v;
    }
    return 0;  // auto
}

std::atomic<int>& thread_cap() {
    static std::atomic<int> cap{initial_thread_cap()};
    return cap;
}

struct EvalOutcome {
    std::optional<VectorXd> value;
    std::string error;
};

// Evaluates f at each point, at most eval_threads() concurrently.  Failures
// are collected per point, never thrown across threads.
std::vector<EvalOutcome> eval_many(const ResidualMap& f, const std::vector<VectorXd>& xs) {
    std::vector<EvalOutcome> out(xs.size());
    auto work = [&](std::size_t i) {
        try {
            out[i].value = f.eval(xs[i]);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        } catch (...) {
            out[i].error = "unknown evaluator failure";
        }
    };
    int cap = thread_cap().load();
    if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
    if (cap <= 0) cap = 1;
    cap = std::min<int>(cap, static_cast<int>(xs.size()));
    if (cap <= 1 || xs.size() <= 1) {
        for (std::size_t i = 0; i < xs.size(); ++i) work(i);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(cap);
    for (int w = 0; w < cap; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < xs.size(); i += cap) work(i);
        });
    for (auto& t : pool) t.join();
    return out;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

MatrixXd bordered(const MatrixXd& jac, const VectorXd& tangent) {
    MatrixXd m(jac.rows() + 1, jac.cols());
    m.topRows(jac.rows()) = jac;
    m.row(jac.rows()) = tangent.transpose();
    return m;
}

// One localization trial or one branch point: correct, then tangent and
// determinant seeded with the previous tangent.
struct SteppedPoint {
    ContinuationPoint point;
    int iterations = 0;
    CorrectStatus status = CorrectStatus::no_convergence;
};

SteppedPoint step_to(const ResidualMap& f, const ContinuationPoint& from, double ds,
                     const StepControl& ctl, std::string* warning = nullptr) {
    SteppedPoint sp;
    const VectorXd xp = predict(from, ds);
    CorrectionResult cr = correct(f, xp, from.tangent, ctl);
    sp.status = cr.status;
    sp.iterations = cr.iterations;
    if (cr.status != CorrectStatus::converged) return sp;
    ContinuationPoint pt;
    pt.x = cr.x;
    pt.residual_norm = cr.residual_norm;
    pt.ortho_residual = cr.ortho_residual;
    pt.arclength = from.arclength + ds;
    MatrixXd jac;
    try {
        jac = fd_jacobian(f, pt.x, ctl.fd_eps0);
    } catch (const std::exception& e) {
        sp.status = CorrectStatus::eval_failure;
        if (warning) *warning = e.what();
        return sp;
    }
    try {
        pt.tangent = next_tangent(jac, from.tangent);
    } catch (const SingularSystemError& e) {
        // landed (numerically) on a singular point; keep the incoming direction
        pt.tangent = from.tangent;
        if (warning) *warning = std::string("tangent fallback: ") + e.what();
    }
    pt.aug_det = augmented_det(jac, pt.tangent);
    sp.point = std::move(pt);
    return sp;
}

}  // namespace

void set_eval_threads(int cap) { thread_cap().store(cap < 0 ? 0 : cap); }
int eval_threads() { return thread_cap().load(); }

MatrixXd fd_jacobian(const ResidualMap& f, const VectorXd& x, double eps0) {
    const int n = f.dim;
    const int m = static_cast<int>(x.size());
    std::vector<VectorXd> probes;
    probes.reserve(2 * m);
    std::vector<double> eps(m);
    for (int j = 0; j < m; ++j) {
        eps[j] = eps0 * std::max(1.0, std::abs(x[j]));
        VectorXd xp = x, xm = x;
        xp[j] += eps[j];
        xm[j] -= eps[j];
        probes.push_back(std::move(xp));
        probes.push_back(std::move(xm));
    }
    const auto results = eval_many(f, probes);
    MatrixXd jac(n, m);
    for (int j = 0; j < m; ++j) {
        const auto& plus = results[2 * j];
        const auto& minus = results[2 * j + 1];
        if (!plus.value || !minus.value)
            throw EvaluationError(
                "jacobian evaluation failed: " + (plus.value ? minus.error : plus.error),
                j);
        jac.col(j) = (*plus.value - *minus.value) / (2.0 * eps[j]);
    }
    return jac;
}

VectorXd predict(const ContinuationPoint& p, double ds) { return p.x + ds * p.tangent; }

CorrectionResult correct(const ResidualMap& f, const VectorXd& x_pred,
                         const VectorXd& tangent_prev, const StepControl& ctl) {
    CorrectionResult res;
    res.x = x_pred;
    for (int it = 0; it <= ctl.newton_max_iter; ++it) {
        VectorXd r;
        try {
            r = f.eval(res.x);
        } catch (const std::exception&) {
            res.status = CorrectStatus::eval_failure;
            return res;
        }
        const double c = (res.x - x_pred).dot(tangent_prev);
        res.residual_norm = r.norm();
        res.ortho_residual = std::abs(c);
        if (res.residual_norm <= ctl.newton_tol * map_scale(f, res.x) &&
            res.ortho_residual <= 1e-12 * std::max(1.0, res.x.norm())) {
            res.iterations = it;
            res.status = CorrectStatus::converged;
            return res;
        }
        if (it == ctl.newton_max_iter) break;
        MatrixXd jac;
        try {
            jac = fd_jacobian(f, res.x, ctl.fd_eps0);
        } catch (const std::exception&) {
            res.status = CorrectStatus::eval_failure;
            return res;
        }
        const MatrixXd m = bordered(jac, tangent_prev);
        Eigen::FullPivLU<MatrixXd> lu(m);
        if (!lu.isInvertible()) {
            res.status = CorrectStatus::singular_system;
            return res;
        }
        VectorXd rhs(m.rows());
        rhs.head(r.size()) = -r;
        rhs[r.size()] = -c;
        res.x += lu.solve(rhs);
    }
    res.status = CorrectStatus::no_convergence;
    return res;
}

VectorXd next_tangent(const MatrixXd& jac, const VectorXd& tangent_prev) {
    const MatrixXd m = bordered(jac, tangent_prev);
    Eigen::FullPivLU<MatrixXd> lu(m);
    if (!lu.isInvertible())
        throw SingularSystemError("bordered tangent system is singular");
    VectorXd rhs = VectorXd::Zero(m.rows());
    rhs[m.rows() - 1] = 1.0;
    VectorXd t = lu.solve(rhs);
    const double norm = t.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw SingularSystemError("bordered tangent solve produced no direction");
    return t / norm;
}

double augmented_det(const MatrixXd& jac, const VectorXd& tangent) {
    return bordered(jac, tangent).determinant();
}

std::optional<BifurcationEvent> detect_and_locate_bifurcation(const ResidualMap& f,
                                                              const ContinuationPoint& a,
                                                              const ContinuationPoint& b,
                                                              const StepControl& ctl) {
    const int sa = sign_of(a.aug_det);
    const int sb = sign_of(b.aug_det);
    if (sa == 0 || sb == 0 || sa == sb) return std::nullopt;

    ContinuationPoint lo = a;
    ContinuationPoint hi = b;
    for (int iter = 0; iter < 60; ++iter) {
        const double gap = hi.arclength - lo.arclength;
        if (gap < ctl.bifurcation_tol_s) break;
        double ds = gap / 2.0;
        SteppedPoint mid;
        for (int attempt = 0; attempt < 3; ++attempt) {
            mid = step_to(f, lo, ds, ctl);
            if (mid.status == CorrectStatus::converged) break;
            ds /= 2.0;
        }
        if (mid.status != CorrectStatus::converged)
            throw BifurcationError("bifurcation localization: correction failed");
        if (sign_of(mid.point.aug_det) == sa)
            lo = mid.point;
        else
            hi = mid.point;
    }
    if (hi.arclength - lo.arclength >= ctl.bifurcation_tol_s)
        throw BifurcationError("bifurcation localization: no convergence in 60 bisections");

    BifurcationEvent ev;
    ev.x_t = 0.5 * (lo.x + hi.x);
    ev.det_before = lo.aug_det;
    ev.det_after = hi.aug_det;
    ev.arclength = 0.5 * (lo.arclength + hi.arclength);
    return ev;
}

std::vector<Eigen::Vector2d> abe_roots(double c11, double c12, double c22) {
    const double m = std::max({std::abs(c11), std::abs(c12), std::abs(c22)});
    if (!(m > 0.0)) throw BifurcationError("ABE coefficients all vanish");
    c11 /= m;
    c12 /= m;
    c22 /= m;
    constexpr double tiny = 1e-9;
    auto unit = [](double a, double b) {
        const double n = std::hypot(a, b);
        return Eigen::Vector2d(a / n, b / n);
    };
    std::vector<Eigen::Vector2d> roots;
    if (std::abs(c11) <= tiny && std::abs(c22) <= tiny) {
        // 2 c12 ab = 0
        roots.push_back(Eigen::Vector2d(1.0, 0.0));
        roots.push_back(Eigen::Vector2d(0.0, 1.0));
        return roots;
    }
    if (std::abs(c11) <= tiny) {
        // b (2 c12 a + c22 b) = 0
        roots.push_back(Eigen::Vector2d(1.0, 0.0));
        roots.push_back(unit(-c22, 2.0 * c12));
        return roots;
    }
    if (std::abs(c22) <= tiny) {
        // a (c11 a + 2 c12 b) = 0
        roots.push_back(Eigen::Vector2d(0.0, 1.0));
        roots.push_back(unit(-2.0 * c12, c11));
        return roots;
    }
    const double disc = c12 * c12 - c11 * c22;
    if (disc < -tiny)
        throw BifurcationError("ABE roots are complex: no real branch directions");
    const double sq = std::sqrt(std::max(disc, 0.0));
    // c11 t^2 + 2 c12 t + c22 = 0, t = alpha/beta, stable two-root form
    const double q = -(c12 + std::copysign(sq, c12));
    roots.push_back(unit(q / c11, 1.0));
    roots.push_back(unit(c22 / q, 1.0));
    return roots;
}

std::vector<VectorXd> solve_abe(const ResidualMap& f, const VectorXd& x_t,
                                const StepControl& ctl) {
    const int n = f.dim;
    const MatrixXd jac = fd_jacobian(f, x_t, ctl.fd_eps0);
    Eigen::JacobiSVD<MatrixXd> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma[i] > ctl.sigma_tol * sigma[0]) ++rank;
    const int null_dim = n + 1 - rank;
    if (null_dim != 2)
        throw BifurcationError("not a simple bifurcation: nullspace dimension " +
                               std::to_string(null_dim));
    const VectorXd t1 = svd.matrixV().col(n - 1);
    const VectorXd t2 = svd.matrixV().col(n);
    const VectorXd n1 = svd.matrixU().col(n - 1);

    // directional second differences d(v) = n1 . (F(x+hv) - 2F(x) + F(x-hv))/h^2
    const double h = std::sqrt(ctl.fd_eps0) * std::max(1.0, x_t.lpNorm<Eigen::Infinity>());
    const VectorXd t12 = t1 + t2;
    std::vector<VectorXd> probes = {x_t,           x_t + h * t1,  x_t - h * t1,
                                    x_t + h * t2,  x_t - h * t2,  x_t + h * t12,
                                    x_t - h * t12};
    const auto r = eval_many(f, probes);
    for (const auto& o : r)
        if (!o.value) throw EvaluationError("ABE Hessian evaluation failed: " + o.error);
    const VectorXd f0 = *r[0].value;
    auto contract = [&](const VectorXd& fp, const VectorXd& fm) {
        return n1.dot(fp - 2.0 * f0 + fm) / (h * h);
    };
    const double c11 = contract(*r[1].value, *r[2].value);
    const double c22 = contract(*r[3].value, *r[4].value);
    const double c12 = 0.5 * (contract(*r[5].value, *r[6].value) - c11 - c22);

    std::vector<VectorXd> tangents;
    for (const auto& ab : abe_roots(c11, c12, c22)) {
        VectorXd v = ab[0] * t1 + ab[1] * t2;
        tangents.push_back(v / v.norm());
    }
    return tangents;
}

std::vector<VectorXd> switching_tangents(const BifurcationEvent& event,
                                         const VectorXd& incoming_tangent,
                                         double parallel_threshold) {
    std::vector<VectorXd> out;
    for (const auto& t : event.tangents_out)
        if (std::abs(t.dot(incoming_tangent)) < parallel_threshold) out.push_back(t);
    return out;
}

Branch run_branch(const ResidualMap& f, const VectorXd& start,
                  const VectorXd& direction_hint, const StepControl& ctl,
                  const StopRules& stop) {
    Branch branch;
    const int n = f.dim;
    const int lambda_index = n;  // continuation parameter is the last coordinate
    if (start.size() != n + 1)
        throw DomainError("run_branch: start must have n+1 components");
    if (!(direction_hint.norm() > 0.0))
        throw DomainError("run_branch: direction hint must be non-zero");

    // entry check: 100x the per-step tolerance, then one polish to full tolerance
    VectorXd r0;
    try {
        r0 = f.eval(start);
    } catch (const std::exception& e) {
        throw DomainError(std::string("run_branch: start not evaluable: ") + e.what());
    }
    if (r0.norm() > 100.0 * ctl.newton_tol * map_scale(f, start))
        throw DomainError("run_branch: start is not a solution (|F| = " +
                          std::to_string(r0.norm()) + ")");
    const VectorXd hint = direction_hint.normalized();
    CorrectionResult polish = correct(f, start, hint, ctl);
    if (polish.status != CorrectStatus::converged)
        throw DomainError("run_branch: could not polish start to tolerance");

    ContinuationPoint cur;
    cur.x = polish.x;
    cur.residual_norm = polish.residual_norm;
    cur.ortho_residual = polish.ortho_residual;
    cur.arclength = 0.0;
    bool singular_start = false;
    try {
        const MatrixXd jac0 = fd_jacobian(f, cur.x, ctl.fd_eps0);
        cur.tangent = next_tangent(jac0, hint);
        cur.aug_det = augmented_det(jac0, cur.tangent);
    } catch (const SingularSystemError&) {
        // launching from a bifurcation point: trust the ABE direction
        singular_start = true;
        cur.tangent = hint;
        cur.aug_det = 0.0;
        branch.warnings.push_back("singular start: using direction hint as tangent");
    }
    branch.points.push_back(cur);

    double ds = std::clamp(ctl.ds, ctl.ds_min, ctl.ds_max);
    int steps = 0;
    while (true) {
        if (cur.x[lambda_index] <= stop.lambda_min ||
            cur.x[lambda_index] >= stop.lambda_max) {
            branch.termination = Termination::lambda_bound;
            break;
        }
        if (stop.stop_when && stop.stop_when(cur.x)) {
            branch.termination = Termination::user_stop;
            break;
        }
        if (steps >= stop.max_steps) {
            branch.termination = Termination::max_steps;
            break;
        }
        std::string warning;
        SteppedPoint next = step_to(f, cur, ds, ctl, &warning);
        if (next.status != CorrectStatus::converged) {
            if (ds > ctl.ds_min * (1.0 + 1e-12)) {
                ds = std::max(ds / 2.0, ctl.ds_min);
                continue;  // retry with the smaller step
            }
            branch.termination = Termination::solver_failure;
            branch.warnings.push_back("correction failed at ds_min");
            break;
        }
        if (!warning.empty()) branch.warnings.push_back(warning);
        ++steps;

        // determinant sign check; the interval out of a singular start has a
        // noise-sign determinant and is skipped
        const bool detect = !(singular_start && branch.points.size() == 1);
        if (detect && sign_of(cur.aug_det) != 0 &&
            sign_of(next.point.aug_det) != 0 &&
            sign_of(cur.aug_det) != sign_of(next.point.aug_det)) {
            try {
                auto ev = detect_and_locate_bifurcation(f, cur, next.point, ctl);
                if (ev) {
                    ev->point_index = static_cast<int>(branch.points.size()) - 1;
                    try {
                        ev->tangents_out = solve_abe(f, ev->x_t, ctl);
                    } catch (const std::exception& e) {
                        branch.warnings.push_back(std::string("ABE failed: ") + e.what());
                    }
                    branch.events.push_back(std::move(*ev));
                }
            } catch (const std::exception& e) {
                branch.warnings.push_back(std::string("bifurcation localization failed: ") +
                                          e.what());
            }
        }

        branch.points.push_back(next.point);
        cur = next.point;
        if (next.iterations <= 3) ds = std::min(1.3 * ds, ctl.ds_max);
    }
    return branch;
}

}  // namespace rtrace

#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rtrace {

/// Black-box evaluator of a map R^{n+1} -> R^n whose zero set is traced.
/// `eval` throws EvaluationError (or any std::exception) on failure; the
/// engine treats failures as data, never as crashes.  `scale`, when set,
/// normalizes residual norms for the convergence tests (default 1).
/// Both callables must be thread-safe: Jacobian columns are evaluated
/// concurrently.
struct ResidualMap {
    int dim = 2;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
    std::function<double(const Eigen::VectorXd&)> scale;
};

struct StepControl {
    double ds = 1e-2;
    double ds_min = 1e-4;
    double ds_max = 5e-2;
    double newton_tol = 1e-10;
    int newton_max_iter = 8;
    // tuning knobs beyond the basic step fields
    double fd_eps0 = std::cbrt(std::numeric_limits<double>::epsilon());
    double sigma_tol = 1e-6;          // nullspace rank threshold, relative to sigma_max
    double bifurcation_tol_s = 1e-6;  // localization window in arclength
};

struct StopRules {
    double lambda_min = -std::numeric_limits<double>::infinity();
    double lambda_max = std::numeric_limits<double>::infinity();
    int max_steps = 1000;
    std::function<bool(const Eigen::VectorXd&)> stop_when;  // optional user stop
};

struct ContinuationPoint {
    Eigen::VectorXd x;        // (u, lambda), lambda last
    Eigen::VectorXd tangent;  // unit
    double residual_norm = 0.0;
    double arclength = 0.0;
    double aug_det = 0.0;         // det [J ; tangent^T]
    double ortho_residual = 0.0;  // |(x - x_pred) . tangent_prev| at acceptance
};

enum class Termination { lambda_bound, max_steps, solver_failure, user_stop };

struct BifurcationEvent {
    Eigen::VectorXd x_t;
    std::vector<Eigen::VectorXd> tangents_out;  // unit ABE directions (2 when simple)
    double det_before = 0.0;
    double det_after = 0.0;
    double arclength = 0.0;
    int point_index = -1;  // last accepted point before the event
};

struct Branch {
    std::vector<ContinuationPoint> points;
    std::vector<BifurcationEvent> events;
    Termination termination = Termination::max_steps;
    std::vector<std::string> warnings;
};

/// Cap on concurrent evaluator calls (Jacobian columns, ABE differences).
/// 0 = auto (hardware concurrency).  Initialized from RESONANCE_TRACER_THREADS.
void set_eval_threads(int cap);
int eval_threads();

/// Central-difference Jacobian, column j formed with eps_j = eps0 max(1,|x_j|).
/// Evaluation failures rethrow as EvaluationError carrying the column index.
Eigen::MatrixXd fd_jacobian(const ResidualMap& f, const Eigen::VectorXd& x,
                            double eps0 = StepControl{}.fd_eps0);

/// Euler predictor x + ds * tangent.
Eigen::VectorXd predict(const ContinuationPoint& p, double ds);

enum class CorrectStatus { converged, no_convergence, singular_system, eval_failure };

struct CorrectionResult {
    Eigen::VectorXd x;
    double residual_norm = 0.0;
    int iterations = 0;
    CorrectStatus status = CorrectStatus::no_convergence;
    double ortho_residual = 0.0;
};

/// Newton iteration on the augmented system { F(x) = 0, (x - x_pred) . t = 0 }.
CorrectionResult correct(const ResidualMap& f, const Eigen::VectorXd& x_pred,
                         const Eigen::VectorXd& tangent_prev, const StepControl& ctl);

/// Solves the bordered system [J ; tangent_prev^T] t = (0,...,0,1) and
/// normalizes.  The result spans ker J and keeps t . tangent_prev > 0.
/// Throws SingularSystemError when the bordered matrix is singular (the
/// expected situation at a bifurcation point).
Eigen::VectorXd next_tangent(const Eigen::MatrixXd& jac,
                             const Eigen::VectorXd& tangent_prev);

/// det [J ; tangent^T]; its sign change along a branch brackets a simple
/// bifurcation.
double augmented_det(const Eigen::MatrixXd& jac, const Eigen::VectorXd& tangent);

/// If the augmented determinants of a and b differ in sign, bisects in
/// arclength (predict + correct at each trial) until the bracket is below
/// ctl.bifurcation_tol_s and returns the located event (tangents_out not yet
/// filled).  Returns nullopt when the signs agree.  Throws BifurcationError
/// when the localization fails (correction failure or > 60 bisections).
std::optional<BifurcationEvent> detect_and_locate_bifurcation(
    const ResidualMap& f, const ContinuationPoint& a, const ContinuationPoint& b,
    const StepControl& ctl);

/// Real unit roots (alpha, beta) of C11 a^2 + 2 C12 ab + C22 b^2 = 0 with
/// a^2 + b^2 = 1, both sign classes represented once.  Throws
/// BifurcationError for complex roots or a degenerate equation.
std::vector<Eigen::Vector2d> abe_roots(double c11, double c12, double c22);

/// Algebraic bifurcation equation at a (near-)singular point: extracts the
/// two-dimensional Jacobian nullspace and the left nullvector with an SVD,
/// contracts the Hessian against them with three directional second
/// differences, and returns the departing unit tangents.
std::vector<Eigen::VectorXd> solve_abe(const ResidualMap& f, const Eigen::VectorXd& x_t,
                                       const StepControl& ctl);

/// ABE tangents transverse to the incoming direction (|dot| < threshold);
/// these are the branches worth launching after an event.
std::vector<Eigen::VectorXd> switching_tangents(const BifurcationEvent& event,
                                                const Eigen::VectorXd& incoming_tangent,
                                                double parallel_threshold = 0.9);

/// Pseudo-arclength continuation from a converged start point.  The initial
/// tangent comes from the bordered system seeded with the (normalized)
/// direction hint; if that system is singular — a branch launched from a
/// bifurcation point — the hint itself is trusted and detection skips the
/// first interval.  Step size grows by 1.3 after corrections that take at
/// most 3 Newton iterations and halves on failure; failure at ds_min ends
/// the branch.  Every accepted step is checked for a determinant sign flip,
/// located events get their ABE tangents attached, and the walk continues
/// through the bifurcation along the incoming branch.
Branch run_branch(const ResidualMap& f, const Eigen::VectorXd& start,
                  const Eigen::VectorXd& direction_hint, const StepControl& ctl,
                  const StopRules& stop);

}  // namespace rtrace

#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>
#include <vector>

#include "rtrace/potentials.hpp"

namespace rtrace {

using Complex = std::complex<double>;

/// Uniform grid r_i = i h, i = 0..n_points, h = r_end / n_points.
struct RadialGrid {
    double r_end = 0.0;
    int n_points = 0;
    double spacing() const { return r_end / n_points; }
};

/// Wave function and derivative at the asymptotic boundary R, in an
/// arbitrary common normalization.
struct EndpointSolution {
    Complex psi;
    Complex psi_prime;
};

/// A_l, B_l of psi -> A hhat+ + B hhat-, the S-matrix S = -A/B, and the
/// regularized function F = k^{2l+1}/(S-1).  `f` is empty when S = 1 to
/// within 1e-12 (no scattering; F undefined).
struct ScatteringAmplitudes {
    Complex a;
    Complex b;
    Complex s;
    std::optional<Complex> f;
};

/// z^p by repeated multiplication; exact on the real and imaginary axes.
Complex pow_int(Complex z, int p);

/// max(1, |k|^{2l+1}); residual norms are compared against this so that
/// tolerances stay meaningful for l > 0 near the origin.
double residual_scale(int l, Complex k);

/// Integrates psi'' = (2 V_eff - k^2) psi outward from psi(0) = 0 with the
/// renormalized Numerov recursion (ratio of successive transformed values,
/// so the e^{|Im k| r} growth never overflows) and recovers psi(R), psi'(R)
/// with an O(h^4) endpoint formula.  Throws DomainError for k = 0 and
/// NumericOverflowError (with the grid index) if the recursion degenerates.
EndpointSolution integrate_numerov(const RadialPotential& p, const RadialGrid& grid,
                                   int l, Complex k, double lambda);

/// Wronskian extraction at R:
///   A = W(psi, hhat-) / W(hhat+, hhat-),  B = -W(psi, hhat+) / W(hhat+, hhat-),
///   S = W(psi, hhat-) / W(psi, hhat+).
/// F is formed as i k^{2l+1} W(psi, hhat+) / (2 W(psi, jhat)), which equals
/// k^{2l+1}/(S-1) exactly but stays well-conditioned when S -> 1 near k = 0.
ScatteringAmplitudes extract_amplitudes(const EndpointSolution& sol, int l, Complex k,
                                        double r_end);

/// The map handed to the continuation engine: x = (Re k, Im k, lambda) ->
/// (Re F, Im F).  Zeros are the poles of S.  Throws DomainError for
/// |k| < 1e-12 and propagates solver/extraction errors.
Eigen::Vector2d residual_F(const RadialPotential& p, const RadialGrid& grid, int l,
                           const Eigen::Vector3d& x);

/// Same physics with the lambda-independent part of the potential tabulated
/// once; the continuation engine calls the residual thousands of times.
/// Thread-safe: all state is immutable after construction.
class RadialSolver {
public:
    RadialSolver(RadialPotential p, RadialGrid grid, int l);

    EndpointSolution integrate(Complex k, double lambda) const;
    ScatteringAmplitudes amplitudes(Complex k, double lambda) const;
    Eigen::Vector2d residual(const Eigen::Vector3d& x) const;
    double scale(const Eigen::Vector3d& x) const;

    const RadialPotential& potential() const { return pot_; }
    const RadialGrid& grid() const { return grid_; }
    int l() const { return l_; }

private:
    RadialPotential pot_;
    RadialGrid grid_;
    int l_;
    std::vector<double> v0_;      // V(r_i, lambda = 1), i = 0..n+1
    std::vector<double> a_part_;  // l(l+1)/(12 i^2), the centrifugal piece of T_i
};

}  // namespace rtrace

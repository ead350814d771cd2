#include "rtrace/solver.hpp"

#include <cmath>

#include "rtrace/errors.hpp"
#include "rtrace/specfun.hpp"

namespace rtrace {
namespace {

constexpr double kMinAbsK = 1e-12;
constexpr double kSUnityTol = 1e-12;
constexpr double kFreeWaveTol = 1e-7;

void check_grid(const RadialGrid& grid) {
    if (!(grid.r_end > 0.0)) throw DomainError("grid: r_end must be positive");
    if (grid.n_points < 16) throw DomainError("grid: need at least 16 points");
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Renormalized Numerov over tabulated data.  The recursion propagates
// R_i = Fhat_{i+1}/Fhat_i with Fhat = (1 - T) psi,
//   R_1 = U_1,  R_i = U_i - 1/R_{i-1},  U_i = (2 + 10 T_i)/(1 - T_i),
// but in the deviation variable D_i = R_i - 1,
//   D_i = D_{i-1}/(1 + D_{i-1}) + S_i,  S_i = 12 T_i/(1 - T_i),
// which is the same algebra with the small quantities kept separate: T is
// O(h^2) in the asymptotic region, and storing U (= 2 + S) or 1 - T directly
// would quantize the k^2 and lambda dependence at the ULP of an O(1) number,
// leaving F with a ~1e-8 noise floor that the 1e-10 Newton tolerance of the
// continuation could never reach.
//
// a_part[i] = l(l+1)/(12 i^2) is the centrifugal piece of T_i, exact in i,
// so T_i = a_part[i] + (h^2/12)(2 lambda v0_i - k^2) is small-first.  The
// endpoint derivative is the O(h^4) formula
//   psi'(R) = [(1-2T_{n+1}) psi_{n+1} - (1-2T_{n-1}) psi_{n-1}] / (2h)
// which needs one integration step past r_end.
EndpointSolution numerov_core(const std::vector<double>& v0,
                              const std::vector<double>& a_part,
                              const RadialGrid& grid, Complex k, double lambda) {
    if (std::abs(k) == 0.0) throw DomainError("integrate_numerov: k = 0");
    const int n = grid.n_points;
    const double h = grid.spacing();
    const double c2 = h * h / 12.0;
    const Complex wq = c2 * (k * k);

    auto t_of = [&](int i) -> Complex {
        return (a_part[i] + 2.0 * c2 * lambda * v0[i]) - wq;
    };
    auto s_of = [&](Complex t) -> Complex { return 12.0 * t / (1.0 - t); };

    Complex t_prev = t_of(1);
    Complex d_prev = 1.0 + s_of(t_prev);  // D_1 = U_1 - 1 (Fhat_0 = 0)
    if (!finite(d_prev)) throw NumericOverflowError("numerov ratio not finite", 1);
    Complex t_nm1{}, d_nm1{};
    for (int i = 2; i <= n; ++i) {
        const Complex t = t_of(i);
        const Complex d = d_prev / (1.0 + d_prev) + s_of(t);
        if (!finite(d)) throw NumericOverflowError("numerov ratio not finite", i);
        if (i == n) {
            t_nm1 = t_prev;  // at node n-1
            d_nm1 = d_prev;  // R_{n-1} - 1
        }
        t_prev = t;
        d_prev = d;
    }
    // rebuild the endpoint values with Fhat_n = 1
    const Complex t_n = t_prev;
    const Complex t_np1 = t_of(n + 1);
    const Complex psi_n = 1.0 / (1.0 - t_n);
    const Complex psi_np1 = (1.0 + d_prev) / (1.0 - t_np1);
    const Complex psi_nm1 = 1.0 / ((1.0 + d_nm1) * (1.0 - t_nm1));
    const Complex psi_prime =
        ((1.0 - 2.0 * t_np1) * psi_np1 - (1.0 - 2.0 * t_nm1) * psi_nm1) / (2.0 * h);
    if (!finite(psi_n) || !finite(psi_prime))
        throw NumericOverflowError("numerov endpoint not finite", n);
    if (psi_n == Complex(0, 0) && psi_prime == Complex(0, 0))
        throw NumericOverflowError("numerov endpoint vanished", n);
    return {psi_n, psi_prime};
}

std::vector<double> tabulate_v0(const RadialPotential& p, const RadialGrid& grid) {
    const int n = grid.n_points;
    const double h = grid.spacing();
    std::vector<double> v0(n + 2);
    v0[0] = 0.0;  // never used; psi(0) = 0 removes node 0 from the recursion
    for (int i = 1; i <= n + 1; ++i) v0[i] = evaluate(p, i * h, 1.0);
    return v0;
}

std::vector<double> tabulate_a_part(int l, int n) {
    std::vector<double> a(n + 2);
    const double ll1 = static_cast<double>(l) * (l + 1);
    a[0] = 0.0;
    for (int i = 1; i <= n + 1; ++i)
        a[i] = ll1 / (12.0 * static_cast<double>(i) * static_cast<double>(i));
    return a;
}

}  // namespace

Complex pow_int(Complex z, int p) {
    Complex acc(1.0, 0.0);
    Complex base = z;
    for (int e = p; e > 0; e >>= 1) {
        if (e & 1) acc *= base;
        base *= base;
    }
    return acc;
}

double residual_scale(int l, Complex k) {
    return std::max(1.0, std::pow(std::abs(k), 2 * l + 1));
}

EndpointSolution integrate_numerov(const RadialPotential& p, const RadialGrid& grid,
                                   int l, Complex k, double lambda) {
    check_grid(grid);
    return numerov_core(tabulate_v0(p, grid), tabulate_a_part(l, grid.n_points), grid,
                        k, lambda);
}

ScatteringAmplitudes extract_amplitudes(const EndpointSolution& sol, int l, Complex k,
                                        double r_end) {
    using specfun::HankelKind;
    if (std::abs(k) == 0.0) throw DomainError("extract_amplitudes: k = 0");
    const Complex z = k * r_end;
    const auto hp = specfun::riccati_hankel_pair(HankelKind::plus, l, z);
    const auto hm = specfun::riccati_hankel_pair(HankelKind::minus, l, z);
    const auto bj = specfun::riccati_bessel_j_pair(l, z);

    // r-Wronskians: the chain rule turns hhat'(z) into k hhat'(kr)
    const Complex wp = specfun::wronskian(sol.psi, sol.psi_prime, hp.value, k * hp.deriv);
    const Complex wm = specfun::wronskian(sol.psi, sol.psi_prime, hm.value, k * hm.deriv);
    const Complex wj = specfun::wronskian(sol.psi, sol.psi_prime, bj.value, k * bj.deriv);
    const Complex wpm =
        specfun::wronskian(hp.value, k * hp.deriv, hm.value, k * hm.deriv);  // = -2ik
    if (std::abs(wpm) == 0.0)
        throw DomainError("extract_amplitudes: W(hhat+, hhat-) vanished");

    ScatteringAmplitudes out;
    out.a = wm / wpm;
    out.b = -wp / wpm;
    out.s = wm / wp;
    // S - 1 = -2i W(psi, jhat) / W(psi, hhat+); forming F from the Wronskians
    // avoids the S - 1 cancellation that dominates near k = 0.
    // Undefined when |S - 1| < 1e-12, or when W(psi, jhat) has cancelled to
    // the truncation floor of its own terms (psi is a free wave up to
    // discretization error, so S = 1 at solver accuracy).
    const double wj_terms =
        std::abs(sol.psi * (k * bj.deriv)) + std::abs(sol.psi_prime * bj.value);
    if (2.0 * std::abs(wj) < kSUnityTol * std::abs(wp) ||
        std::abs(wj) < kFreeWaveTol * wj_terms) {
        out.f = std::nullopt;  // S = 1: free-like solution, F undefined
    } else {
        out.f = Complex(0.0, 1.0) * pow_int(k, 2 * l + 1) * wp / (2.0 * wj);
    }
    return out;
}

Eigen::Vector2d residual_F(const RadialPotential& p, const RadialGrid& grid, int l,
                           const Eigen::Vector3d& x) {
    return RadialSolver(p, grid, l).residual(x);
}

RadialSolver::RadialSolver(RadialPotential p, RadialGrid grid, int l)
    : pot_(std::move(p)), grid_(grid), l_(l) {
    check_grid(grid_);
    if (l < 0 || l > specfun::kMaxL)
        throw DomainError("RadialSolver: l out of supported range");
    v0_ = tabulate_v0(pot_, grid_);
    a_part_ = tabulate_a_part(l_, grid_.n_points);
}

EndpointSolution RadialSolver::integrate(Complex k, double lambda) const {
    return numerov_core(v0_, a_part_, grid_, k, lambda);
}

ScatteringAmplitudes RadialSolver::amplitudes(Complex k, double lambda) const {
    return extract_amplitudes(integrate(k, lambda), l_, k, grid_.r_end);
}

Eigen::Vector2d RadialSolver::residual(const Eigen::Vector3d& x) const {
    const Complex k(x[0], x[1]);
    if (std::abs(k) < kMinAbsK)
        throw DomainError("residual_F: |k| below 1e-12 (origin excluded)");
    const auto amp = amplitudes(k, x[2]);
    if (!amp.f) throw FUndefinedError("residual_F: S = 1, regularized F undefined");
    return Eigen::Vector2d(amp.f->real(), amp.f->imag());
}

double RadialSolver::scale(const Eigen::Vector3d& x) const {
    return residual_scale(l_, Complex(x[0], x[1]));
}

}  // namespace rtrace

#pragma once

#include <complex>

namespace rtrace::specfun {

using Complex = std::complex<double>;

/// Closed forms are provided for angular momenta 0..kMaxL.
inline constexpr int kMaxL = 8;

enum class HankelKind { plus, minus };

struct ValueDeriv {
    Complex value;
    Complex deriv;
};

/// Riccati-Bessel function jhat_l(z) = z j_l(z).  jhat_0(z) = sin z.
/// Evaluated from the trigonometric closed form; switches to the power
/// series below |z| = 1e-4 where the closed form cancels catastrophically.
/// z = 0 returns the limit value 0 for every l.
Complex riccati_bessel_j(int l, Complex z);

/// Riccati-Hankel functions hhat+-_l(z) ~ exp(+-i(z - l pi/2)) for large |z|,
/// normalized so that jhat_l = (hhat+_l - hhat-_l) / (2i).  In particular
/// hhat+_0(z) = exp(iz) and hhat-_0(z) = exp(-iz).
/// Throws SingularityError at z = 0 and DomainError for unsupported l.
Complex riccati_hankel(HankelKind kind, int l, Complex z);

/// Value and z-derivative in one evaluation; used by the amplitude
/// extraction, which needs Wronskians against the numerical wave function.
ValueDeriv riccati_bessel_j_pair(int l, Complex z);
ValueDeriv riccati_hankel_pair(HankelKind kind, int l, Complex z);

/// W(f, g) = f g' - f' g.
inline Complex wronskian(Complex f, Complex f_prime, Complex g, Complex g_prime) {
    return f * g_prime - f_prime * g;
}

}  // namespace rtrace::specfun

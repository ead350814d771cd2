#include "rtrace/specfun.hpp"

#include <array>
#include <cmath>

#include "rtrace/errors.hpp"

namespace rtrace::specfun {
namespace {

// c[l][m] = (l+m)! / (m! (l-m)!), the coefficients of the terminating
// asymptotic sum hhat+_l(z) = (-i)^l e^{iz} sum_m c[l][m] (i/(2z))^m.
// All values are integers representable exactly in double.
constexpr std::array<std::array<double, kMaxL + 1>, kMaxL + 1> make_coeffs() {
    std::array<std::array<double, kMaxL + 1>, kMaxL + 1> c{};
    for (int l = 0; l <= kMaxL; ++l) {
        double v = 1.0;
        c[l][0] = 1.0;
        for (int m = 1; m <= l; ++m) {
            v *= static_cast<double>((l + m) * (l - m + 1)) / static_cast<double>(m);
            c[l][m] = v;
        }
    }
    return c;
}
constexpr auto kCoeff = make_coeffs();

// (2l+1)!! for l = 0..kMaxL
constexpr std::array<double, kMaxL + 1> kOddDoubleFactorial = {
    1.0, 3.0, 15.0, 105.0, 945.0, 10395.0, 135135.0, 2027025.0, 34459425.0};

constexpr double kSeriesRadius = 1e-4;

void check_l(int l) {
    if (l < 0 || l > kMaxL)
        throw DomainError("riccati function: l must be in [0, " +
                          std::to_string(kMaxL) + "], got " + std::to_string(l));
}

// i^l and (-i)^l as exact axis values
Complex unit_power(int l, bool negative) {
    static const Complex table_pos[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    static const Complex table_neg[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return negative ? table_neg[l % 4] : table_pos[l % 4];
}

// jhat_l and its derivative from the power series around z = 0:
//   jhat_l(z) = z^{l+1}/(2l+1)!! * sum_j a_j t^j,  t = z^2/2,
//   a_0 = 1, a_j = a_{j-1} * (-t-coefficient) / (j (2l+2j+1))
ValueDeriv bessel_series(int l, Complex z) {
    const Complex t = 0.5 * z * z;
    Complex term(1.0, 0.0);
    Complex sum_v = term;                       // sum a_j t^j
    Complex sum_d = static_cast<double>(l + 1) * term;  // sum (l+1+2j) a_j t^j
    for (int j = 1; j <= 4; ++j) {
        term *= -t / static_cast<double>(j * (2 * l + 2 * j + 1));
        sum_v += term;
        sum_d += static_cast<double>(l + 1 + 2 * j) * term;
    }
    // z^l computed by repeated multiplication (exact on the axes)
    Complex zl(1.0, 0.0);
    for (int i = 0; i < l; ++i) zl *= z;
    const double norm = kOddDoubleFactorial[l];
    return {zl * z * sum_v / norm, zl * sum_d / norm};
}

// Even/odd splits of the terminating sum, so that
//   jhat_l(z) = E_l(z) sin(z - l pi/2) + O_l(z) cos(z - l pi/2)
// with E, O real-coefficient polynomials in 1/(2z).
void even_odd_sums(int l, Complex z, Complex& even, Complex& odd) {
    const Complex w = 1.0 / (2.0 * z);
    Complex wm(1.0, 0.0);
    even = Complex(0, 0);
    odd = Complex(0, 0);
    for (int m = 0; m <= l; ++m) {
        const double sgn = (m % 4 < 2) ? 1.0 : -1.0;
        if (m % 2 == 0)
            even += sgn * kCoeff[l][m] * wm;
        else
            odd += sgn * kCoeff[l][m] * wm;
        wm *= w;
    }
}

Complex bessel_closed_form(int l, Complex z, Complex sin_z, Complex cos_z) {
    Complex even, odd;
    even_odd_sums(l, z, even, odd);
    // sin(z - l pi/2), cos(z - l pi/2) via the quarter-period table
    Complex s, c;
    switch (l % 4) {
        case 0: s = sin_z;  c = cos_z;  break;
        case 1: s = -cos_z; c = sin_z;  break;
        case 2: s = -sin_z; c = -cos_z; break;
        default: s = cos_z; c = -sin_z; break;
    }
    return even * s + odd * c;
}

}  // namespace

ValueDeriv riccati_bessel_j_pair(int l, Complex z) {
    check_l(l);
    if (z == Complex(0.0, 0.0)) {
        // limit values: jhat_l ~ z^{l+1}, jhat'_l ~ (l+1) z^l
        return {Complex(0, 0), l == 0 ? Complex(1, 0) : Complex(0, 0)};
    }
    if (std::abs(z) < kSeriesRadius) return bessel_series(l, z);
    const Complex sin_z = std::sin(z);
    const Complex cos_z = std::cos(z);
    const Complex jl = bessel_closed_form(l, z, sin_z, cos_z);
    if (l == 0) return {jl, cos_z};
    const Complex jlm1 = bessel_closed_form(l - 1, z, sin_z, cos_z);
    return {jl, jlm1 - static_cast<double>(l) / z * jl};
}

Complex riccati_bessel_j(int l, Complex z) { return riccati_bessel_j_pair(l, z).value; }

ValueDeriv riccati_hankel_pair(HankelKind kind, int l, Complex z) {
    check_l(l);
    if (z == Complex(0.0, 0.0))
        throw SingularityError("riccati_hankel: z = 0 is a pole of hhat_l");
    const double sign = (kind == HankelKind::plus) ? 1.0 : -1.0;
    const Complex iu(0.0, sign);          // +-i
    const Complex w = iu / (2.0 * z);     // (+-i)/(2z)
    Complex wm(1.0, 0.0);
    Complex a(0, 0);  // sum c_m w^m
    Complex b(0, 0);  // sum m c_m w^m
    for (int m = 0; m <= l; ++m) {
        const Complex term = kCoeff[l][m] * wm;
        a += term;
        b += static_cast<double>(m) * term;
        wm *= w;
    }
    const Complex phase = unit_power(l, kind == HankelKind::plus);
    const Complex e = std::exp(iu * z);
    return {phase * e * a, phase * e * (iu * a - b / z)};
}

Complex riccati_hankel(HankelKind kind, int l, Complex z) {
    return riccati_hankel_pair(kind, l, z).value;
}

}  // namespace rtrace::specfun

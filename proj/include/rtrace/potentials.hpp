#pragma once

#include <string>
#include <vector>

namespace rtrace {

enum class PotentialKind { none, gaussian, square_well, morse, yukawa, lennard_jones };

/// Parameterized family of short-range radial potentials.  The strength
/// parameter lambda is not stored; every kind is of the form
/// V(r, lambda) = lambda * V0(r), so it is passed at evaluation time.
///
/// Shape parameters by kind (all optional, defaults in parentheses):
///   gaussian       {width (1)}          V0 = -exp(-(r/width)^2)
///   square_well    {a (1)}              V0 = -1 for r < a, 0 otherwise
///   morse          {alpha (1), r0 (1.5)} V0 = e^{-2 alpha (r-r0)} - 2 e^{-alpha (r-r0)}
///   yukawa         {mu (1)}             V0 = -exp(-mu r) / r
///   lennard_jones  {sigma (1)}          V0 = 4 ((sigma/r)^12 - (sigma/r)^6)
///   none           {}                   V0 = 0
struct RadialPotential {
    PotentialKind kind = PotentialKind::none;
    std::vector<double> shape_params;
};

RadialPotential make_potential(PotentialKind kind, std::vector<double> shape_params = {});
RadialPotential make_potential(const std::string& kind_name,
                               std::vector<double> shape_params = {});

const char* kind_name(PotentialKind kind);

/// V(r, lambda).  For the singular kinds (yukawa, lennard_jones) the value
/// is only finite for r > 0.
double evaluate(const RadialPotential& p, double r, double lambda);

/// V(r, lambda) + l(l+1)/(2 r^2).  Throws DomainError at r = 0 when l > 0.
double effective_potential(const RadialPotential& p, int l, double r, double lambda);

/// Short-range check: |V(r_end, lambda)| <= threshold.
bool is_negligible_at(const RadialPotential& p, double r_end, double lambda,
                      double threshold = 1e-7);

}  // namespace rtrace

#include "rtrace/potentials.hpp"

#include <cmath>

#include "rtrace/errors.hpp"

namespace rtrace {
namespace {

struct KindInfo {
    const char* name;
    std::size_t n_params;
    std::vector<double> defaults;
};

const KindInfo& info(PotentialKind kind) {
    static const KindInfo table[] = {
        {"none", 0, {}},
        {"gaussian", 1, {1.0}},
        {"square_well", 1, {1.0}},
        {"morse", 2, {1.0, 1.5}},
        {"yukawa", 1, {1.0}},
        {"lennard_jones", 1, {1.0}},
    };
    return table[static_cast<int>(kind)];
}

}  // namespace

const char* kind_name(PotentialKind kind) { return info(kind).name; }

RadialPotential make_potential(PotentialKind kind, std::vector<double> shape_params) {
    const KindInfo& ki = info(kind);
    if (shape_params.empty()) shape_params = ki.defaults;
    if (shape_params.size() != ki.n_params)
        throw ConfigError(std::string("potential '") + ki.name + "' takes " +
                          std::to_string(ki.n_params) + " shape parameter(s), got " +
                          std::to_string(shape_params.size()));
    for (double v : shape_params)
        if (!(v > 0.0))
            throw ConfigError(std::string("potential '") + ki.name +
                              "': shape parameters must be positive");
    return RadialPotential{kind, std::move(shape_params)};
}

RadialPotential make_potential(const std::string& kind_name_,
                               std::vector<double> shape_params) {
    for (int k = 0; k <= static_cast<int>(PotentialKind::lennard_jones); ++k) {
        const auto kind = static_cast<PotentialKind>(k);
        if (kind_name_ == info(kind).name)
            return make_potential(kind, std::move(shape_params));
    }
    throw ConfigError("unknown potential kind '" + kind_name_ + "'");
}

double evaluate(const RadialPotential& p, double r, double lambda) {
    switch (p.kind) {
        case PotentialKind::none:
            return 0.0;
        case PotentialKind::gaussian: {
            const double u = r / p.shape_params[0];
            return -lambda * std::exp(-u * u);
        }
        case PotentialKind::square_well:
            return r < p.shape_params[0] ? -lambda : 0.0;
        case PotentialKind::morse: {
            const double e = std::exp(-p.shape_params[0] * (r - p.shape_params[1]));
            return lambda * (e * e - 2.0 * e);
        }
        case PotentialKind::yukawa:
            return -lambda * std::exp(-p.shape_params[0] * r) / r;
        case PotentialKind::lennard_jones: {
            const double s6 = std::pow(p.shape_params[0] / r, 6);
            return lambda * 4.0 * (s6 * s6 - s6);
        }
    }
    return 0.0;
}

double effective_potential(const RadialPotential& p, int l, double r, double lambda) {
    if (l < 0) throw DomainError("effective_potential: l must be >= 0");
    if (r == 0.0 && l > 0)
        throw DomainError("effective_potential: centrifugal term singular at r = 0");
    const double centrifugal = (l > 0) ? 0.5 * l * (l + 1) / (r * r) : 0.0;
    return evaluate(p, r, lambda) + centrifugal;
}

bool is_negligible_at(const RadialPotential& p, double r_end, double lambda,
                      double threshold) {
    return std::abs(evaluate(p, r_end, lambda)) <= threshold;
}

}  // namespace rtrace

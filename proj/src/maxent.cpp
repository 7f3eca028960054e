#include "tqm/maxent.hpp"

#include <cmath>

#include "tqm/units.hpp"

namespace tqm {

double GaussianDensity::operator()(double E) const {
    const double z = (E - mean) / delta;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * pi) * delta);
}

GaussianDensity maxent_energy_density(double mean_E, double delta_E) {
    if (!(delta_E > 0.0)) throw ConfigError("maxent: invalid constraint, delta_E must be > 0");
    return {mean_E, delta_E};
}

double sampled_entropy(const std::vector<double>& rho, double dE) {
    double s = 0.0;
    for (double r : rho)
        if (r > 0.0) s -= r * std::log(r);
    return s * dE;
}

EnergyEstimate estimate_energy(const std::array<AxisPacket, 3>& space, double m) {
    if (!(m > 0.0)) throw ConfigError("estimate_energy: mass > 0");
    double p2 = 0.0, var = 0.0;
    for (const auto& a : space) {
        if (a.kind != AxisKind::Space) throw ConfigError("estimate_energy: space axes required");
        if (a.mass != m) throw ConfigError("estimate_energy: axes must share the mass");
        p2 += a.carrier * a.carrier;
        var += a.momentum_sigma() * a.momentum_sigma();
    }
    const double sE = std::sqrt(var);
    return {std::sqrt(m * m + p2), sE, 1.0 / sE};
}

AxisPacket estimate_time_axis(const std::array<AxisPacket, 3>& space, double m) {
    const auto e = estimate_energy(space, m);
    return AxisPacket(AxisKind::Time, 0.0, e.mean_energy, e.sigma_t, m);
}

BoundStateEstimate bound_state_estimate(double m, double E_n) {
    if (!(m > 0.0)) throw ConfigError("bound_state_estimate: mass > 0");
    if (!(E_n < 0.0)) throw ConfigError("bound_state_estimate: not bound (E_n must be < 0)");
    const double dE = std::sqrt(-2.0 * m * E_n);
    const double dt = 1.0 / dE;
    return {E_n, dE, dt, convert_units(dt, "1/eV", "s")};
}

double bohr_time_scale() { return bohr_radius_m / UnitSystem::c_m_per_s; }

double bohr_to_planck_ratio() { return bohr_time_scale() / UnitSystem::planck_time_s; }

cplx StationaryFactor::operator()(double t) const { return std::exp(cplx(0.0, -E_n * t)) / std::sqrt(2.0 * pi); }

StationaryFactor stationary_time_factor(double E_n) { return {E_n}; }

ClockScale clock_frequency_scale(double kinetic, double mass) {
    if (!(kinetic > 0.0) || !(mass > 0.0)) throw ConfigError("clock_frequency_scale: positive inputs");
    const double f = kinetic * kinetic / mass;
    return {f, UnitSystem::hbar_eVs / f};
}

}  // namespace tqm

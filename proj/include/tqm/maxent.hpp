#pragma once

#include <array>
#include <vector>

#include "tqm/packets.hpp"

namespace tqm {

// Maximum-entropy density for fixed norm, mean and variance.
struct GaussianDensity {
    double mean;
    double delta;  // standard deviation
    double operator()(double E) const;
};

GaussianDensity maxent_energy_density(double mean_E, double delta_E);

// -sum rho ln rho dE on a uniform grid
double sampled_entropy(const std::vector<double>& rho, double dE);

struct EnergyEstimate {
    double mean_energy;
    double sigma_E;
    double sigma_t;
};

EnergyEstimate estimate_energy(const std::array<AxisPacket, 3>& space_axes, double m);
// Time axis with carrier sqrt(m^2 + |p|^2), sigma_E^2 = sum of momentum variances, centre 0.
AxisPacket estimate_time_axis(const std::array<AxisPacket, 3>& space_axes, double m);

struct BoundStateEstimate {
    double binding_energy;  // eV, negative
    double delta_E;         // eV
    double delta_t_natural;  // 1/eV
    double delta_t_s;       // seconds
};

BoundStateEstimate bound_state_estimate(double m_eV, double E_n_eV);

inline constexpr double bohr_radius_m = 5.3e-11;
double bohr_time_scale();  // seconds
double bohr_to_planck_ratio();

// (2 pi)^{-1/2} exp(-i E_n t)
struct StationaryFactor {
    double E_n;
    cplx operator()(double t) const;
};
StationaryFactor stationary_time_factor(double E_n);

struct ClockScale {
    double f_eV;
    double time_scale_s;
};
ClockScale clock_frequency_scale(double kinetic_eV, double mass_eV);

}  // namespace tqm

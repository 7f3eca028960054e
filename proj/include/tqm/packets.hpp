#pragma once

#include <array>

#include "tqm/common.hpp"

namespace tqm {

enum class AxisKind { Time, Space };

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;  // (t, x, y, z) or (E, px, py, pz)

struct AxisPacket {
    AxisKind kind;
    double center;   // t0 or x0
    double carrier;  // E0 or p0
    double sigma;    // sigma_t or sigma_x
    double mass;

    AxisPacket(AxisKind kind, double center, double carrier, double sigma, double mass);

    double momentum_sigma() const { return 1.0 / sigma; }
    // +1 for time, -1 for space: sign of the clock phase carrier^2 tau / 2m
    double clock_sign() const { return kind == AxisKind::Time ? 1.0 : -1.0; }
};

struct Moments {
    double mean;
    double uncertainty;
};

struct PlaneWave {
    Vec4 four_momentum;  // (E, px, py, pz)
};

cplx dispersion_factor(const AxisPacket& packet, double tau);
cplx evaluate_position(const AxisPacket& packet, double tau, double coord);
cplx evaluate_momentum(const AxisPacket& packet, double tau, double k);
Moments moments(const AxisPacket& packet, double tau);

// f_p = -(E^2 - |p|^2 - m^2) / 2m
double clock_frequency(const PlaneWave& p, double m);

// Minkowski square E^2 - |p|^2
double minkowski_square(const Vec4& p);

// exp(-i m tau / 2): the rest-mass part of exp(-i f_p tau)
cplx rest_mass_phase(double m, double tau);

cplx plane_wave_evaluate(const PlaneWave& p, const Vec4& x);

struct Packet4 {
    std::array<AxisPacket, 4> axes;  // t, x, y, z
    double mass;

    explicit Packet4(const std::array<AxisPacket, 4>& axes);

    Vec4 sigma0_diag() const;                    // (sigma_t^2, sigma_x^2, ...)
    std::array<cplx, 4> sigma_tau_diag(double tau) const;  // sigma^2 -+ i tau/m
    double det_sigma0() const;
    cplx det_sigma_tau(double tau) const;
    Vec4 four_velocity() const;  // p^mu / m
};

// Product of the four axis evaluations times the rest-mass phase.
cplx packet4_evaluate(const Packet4& p4, double tau, const Vec4& x);
// Same amplitude from the determinant/inverse of the diagonal complex Sigma_tau.
cplx packet4_evaluate_covariant(const Packet4& p4, double tau, const Vec4& x);

}  // namespace tqm

#include "tqm/packets.hpp"

#include <cmath>

namespace tqm {

AxisPacket::AxisPacket(AxisKind kind_, double center_, double carrier_, double sigma_, double mass_)
    : kind(kind_), center(center_), carrier(carrier_), sigma(sigma_), mass(mass_) {
    if (!(sigma > 0.0)) throw ConfigError("AxisPacket: sigma must be > 0");
    if (!(mass > 0.0)) throw ConfigError("AxisPacket: mass must be > 0");
}

cplx dispersion_factor(const AxisPacket& p, double tau) {
    // time: 1 - i tau/(m s^2), space: 1 + i tau/(m s^2)
    return {1.0, -p.clock_sign() * tau / (p.mass * p.sigma * p.sigma)};
}

cplx evaluate_position(const AxisPacket& p, double tau, double coord) {
    const double s = p.clock_sign();
    const cplx f = dispersion_factor(p, tau);
    const double d = coord - p.center;
    const double drift = d - p.carrier * tau / p.mass;
    // carrier phase: time e^{-iE0 d}, space e^{+ip0 d}; clock phase +-carrier^2 tau/2m
    const double phase = -s * p.carrier * d + s * p.carrier * p.carrier * tau / (2.0 * p.mass);
    const cplx expo = I * phase - drift * drift / (2.0 * p.sigma * p.sigma * f);
    return std::pow(pi * p.sigma * p.sigma, -0.25) / std::sqrt(f) * std::exp(expo);
}

cplx evaluate_momentum(const AxisPacket& p, double tau, double k) {
    const double s = p.clock_sign();
    const double dk = k - p.carrier;
    const double phase = s * k * p.center + s * k * k * tau / (2.0 * p.mass);
    return std::pow(p.sigma * p.sigma / pi, 0.25) *
           std::exp(cplx(-dk * dk * p.sigma * p.sigma / 2.0, phase));
}

Moments moments(const AxisPacket& p, double tau) {
    const double r = tau / (p.mass * p.sigma * p.sigma);
    return {p.center + p.carrier * tau / p.mass, std::sqrt(0.5 * p.sigma * p.sigma * (1.0 + r * r))};
}

double minkowski_square(const Vec4& p) { return p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - p[3] * p[3]; }

double clock_frequency(const PlaneWave& p, double m) {
    return -(minkowski_square(p.four_momentum) - m * m) / (2.0 * m);
}

cplx rest_mass_phase(double m, double tau) { return std::exp(cplx(0.0, -0.5 * m * tau)); }

cplx plane_wave_evaluate(const PlaneWave& p, const Vec4& x) {
    const auto& k = p.four_momentum;
    const double phase = -k[0] * x[0] + k[1] * x[1] + k[2] * x[2] + k[3] * x[3];
    return std::exp(cplx(0.0, phase)) / (4.0 * pi * pi);
}

Packet4::Packet4(const std::array<AxisPacket, 4>& axes_) : axes(axes_), mass(axes_[0].mass) {
    if (axes[0].kind != AxisKind::Time) throw ConfigError("Packet4: axis 0 must be a time axis");
    for (int i = 1; i < 4; ++i)
        if (axes[i].kind != AxisKind::Space) throw ConfigError("Packet4: axes 1-3 must be space axes");
    for (const auto& a : axes)
        if (a.mass != mass) throw ConfigError("Packet4: all axes must share the mass");
}

Vec4 Packet4::sigma0_diag() const {
    Vec4 d;
    for (int i = 0; i < 4; ++i) d[i] = axes[i].sigma * axes[i].sigma;
    return d;
}

std::array<cplx, 4> Packet4::sigma_tau_diag(double tau) const {
    std::array<cplx, 4> d;
    for (int i = 0; i < 4; ++i)
        d[i] = cplx(axes[i].sigma * axes[i].sigma, -axes[i].clock_sign() * tau / mass);
    return d;
}

double Packet4::det_sigma0() const {
    auto d = sigma0_diag();
    return d[0] * d[1] * d[2] * d[3];
}

cplx Packet4::det_sigma_tau(double tau) const {
    auto d = sigma_tau_diag(tau);
    return d[0] * d[1] * d[2] * d[3];
}

Vec4 Packet4::four_velocity() const {
    Vec4 v;
    for (int i = 0; i < 4; ++i) v[i] = axes[i].carrier / mass;
    return v;
}

cplx packet4_evaluate(const Packet4& p4, double tau, const Vec4& x) {
    cplx r = rest_mass_phase(p4.mass, tau);
    for (int i = 0; i < 4; ++i) r *= evaluate_position(p4.axes[i], tau, x[i]);
    return r;
}

cplx packet4_evaluate_covariant(const Packet4& p4, double tau, const Vec4& x) {
    const auto sig = p4.sigma_tau_diag(tau);
    const auto vel = p4.four_velocity();
    Vec4 p;
    for (int i = 0; i < 4; ++i) p[i] = p4.axes[i].carrier;
    // Delta^T Sigma_tau^{-1} Delta, with Sigma_tau diagonal
    cplx quad = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double d = x[i] - p4.axes[i].center - vel[i] * tau;
        quad += d * d / sig[i];
    }
    double carrier = -p[0] * (x[0] - p4.axes[0].center);
    for (int i = 1; i < 4; ++i) carrier += p[i] * (x[i] - p4.axes[i].center);
    const double clock = (minkowski_square(p) - p4.mass * p4.mass) * tau / (2.0 * p4.mass);
    // sqrt(det Sigma_tau) on the branch continuous from tau = 0
    const cplx det = p4.det_sigma_tau(tau);
    double arg_sum = 0.0;
    for (const auto& s : sig) arg_sum += std::arg(s);
    const cplx sqrt_det = std::sqrt(std::abs(det)) * std::exp(cplx(0.0, 0.5 * arg_sum));
    const double pref = std::pow(p4.det_sigma0() / std::pow(pi, 4), 0.25);
    return pref / sqrt_det * std::exp(I * (carrier + clock) - 0.5 * quad);
}

}  // namespace tqm

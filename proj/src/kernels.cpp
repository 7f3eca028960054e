#include "tqm/kernels.hpp"

#include <array>
#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>
#include <cmath>

namespace tqm {

cplx tqm_kernel_momentum(const Vec4& p, double tau, double m) {
    if (!(m > 0.0)) throw ConfigError("kernel: mass > 0");
    return std::exp(cplx(0.0, -clock_frequency(PlaneWave{p}, m) * tau));
}

cplx tqm_kernel_time(double dt, double tau, double m) {
    if (tau <= 0.0) return 0.0;
    return std::sqrt(I * m / (2.0 * pi * tau)) * std::exp(cplx(0.0, -m * dt * dt / (2.0 * tau)));
}

cplx tqm_kernel_space(double dx, double tau, double m) {
    if (tau <= 0.0) return 0.0;
    return std::sqrt(-I * m / (2.0 * pi * tau)) * std::exp(cplx(0.0, m * dx * dx / (2.0 * tau)));
}

cplx tqm_kernel_coordinate(const Vec4& x1, const Vec4& x0, double tau, double m) {
    if (!(m > 0.0)) throw ConfigError("kernel: mass > 0");
    if (tau <= 0.0) return 0.0;
    Vec4 d;
    for (int i = 0; i < 4; ++i) d[i] = x1[i] - x0[i];
    const double interval = minkowski_square(d);
    const cplx pref = -I * m * m / (4.0 * pi * pi * tau * tau);
    return pref * std::exp(cplx(0.0, -m * interval / (2.0 * tau) - m * tau / 2.0));
}

double sqm_omega(const Vec3& k, const KernelSpec& spec) {
    if (spec.flavor != Flavor::SQM) throw ConfigError("sqm_omega: SQM kernel spec required");
    if (spec.expansion_order < 0 || spec.expansion_order > 2) throw ConfigError("sqm_omega: order 0..2");
    const double m = spec.mass;
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    double w = m;
    if (spec.expansion_order >= 1) w += k2 / (2.0 * m);
    if (spec.expansion_order >= 2) w -= k2 * k2 / (8.0 * m * m * m);
    return w;
}

double sqm_omega_exact(const Vec3& k, double m) {
    return std::sqrt(m * m + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
}

cplx sqm_relativistic_phase(const Vec3& k, double tau, const KernelSpec& spec) {
    return std::exp(cplx(0.0, -sqm_omega(k, spec) * tau));
}

double sampled_norm(const std::vector<cplx>& s, double h) {
    double n = 0.0;
    for (const auto& v : s) n += std::norm(v);
    return n * h;
}

std::vector<cplx> single_step_apply(const std::vector<cplx>& samples, const StepGrid& grid, AxisKind kind,
                                    double mass, double eps) {
    if (!(eps > 0.0)) throw ConfigError("single_step: eps > 0");
    if (samples.size() != grid.count || grid.count < 2) throw ConfigError("single_step: sample/grid mismatch");
    const double h = grid.spacing();
    // Fresnel zone of the step kernel, and the fastest chirp across the grid
    const double zone = std::sqrt(2.0 * pi * eps / mass);
    if (zone / h < 16.0) throw ValidityError("single_step: stationary-phase width spans fewer than 16 points");
    const double span = grid.max - grid.min;
    if (mass * span / eps >= pi / h) throw ValidityError("single_step: kernel chirp exceeds the grid Nyquist limit");
    const double s = kind == AxisKind::Time ? 1.0 : -1.0;
    const cplx norm = std::sqrt(s * I * mass / (2.0 * pi * eps));
    const std::size_t n = grid.count;
    // kernel depends only on the index difference
    std::vector<double> kr(2 * n - 1), ki(2 * n - 1);
    for (std::size_t j = 0; j < 2 * n - 1; ++j) {
        const double d = (double(j) - double(n - 1)) * h;
        const cplx k = norm * std::exp(cplx(0.0, -s * mass * d * d / (2.0 * eps))) * h;
        kr[j] = k.real();
        ki[j] = k.imag();
    }
    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double re = 0.0, im = 0.0;
        const std::size_t off = i + n - 1;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = kr[off - j], b = ki[off - j];
            re += a * samples[j].real() - b * samples[j].imag();
            im += a * samples[j].imag() + b * samples[j].real();
        }
        out[i] = {re, im};
    }
    return out;
}

std::vector<cplx> single_step_propagate(const AxisPacket& packet, double eps, const StepGrid& grid, int steps) {
    if (steps < 1) throw ConfigError("single_step: steps >= 1");
    std::vector<cplx> v(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) v[i] = evaluate_position(packet, 0.0, grid.coord(i));
    for (int s = 0; s < steps; ++s) v = single_step_apply(v, grid, packet.kind, packet.mass, eps);
    return v;
}

Trajectory classical_trajectory(const Vec4& x0, const Vec4& xdot0, const Vec3& E, const Vec3& B, double q,
                                double m, double tau_begin, double tau_end, int steps) {
    if (steps < 1) throw ConfigError("classical_trajectory: steps >= 1");
    if (!(m > 0.0)) throw ConfigError("classical_trajectory: mass > 0");
    if (!(tau_end > tau_begin)) throw ConfigError("classical_trajectory: empty clock-time range");
    using State = std::array<double, 8>;  // t x y z, t' x' y' z'
    auto rhs = [&](const State& s, State& ds, double) {
        const double td = s[4], vx = s[5], vy = s[6], vz = s[7];
        for (int i = 0; i < 4; ++i) ds[i] = s[4 + i];
        ds[4] = q / m * (E[0] * vx + E[1] * vy + E[2] * vz);
        ds[5] = q / m * (td * E[0] + vy * B[2] - vz * B[1]);
        ds[6] = q / m * (td * E[1] + vz * B[0] - vx * B[2]);
        ds[7] = q / m * (td * E[2] + vx * B[1] - vy * B[0]);
    };
    State s;
    for (int i = 0; i < 4; ++i) {
        s[i] = x0[i];
        s[4 + i] = xdot0[i];
    }
    Trajectory tr;
    const double dt = (tau_end - tau_begin) / steps;
    auto observe = [&](const State& st, double tau) {
        TrajectorySample smp{tau, {st[0], st[1], st[2], st[3]}, {st[4], st[5], st[6], st[7]}};
        tr.samples.push_back(smp);
    };
    boost::numeric::odeint::runge_kutta4<State> stepper;
    observe(s, tau_begin);
    for (int k = 0; k < steps; ++k) {
        const double tau = tau_begin + k * dt;
        stepper.do_step(rhs, s, tau, dt);
        observe(s, k + 1 == steps ? tau_end : tau_begin + (k + 1) * dt);
    }
    return tr;
}

}  // namespace tqm

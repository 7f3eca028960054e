#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "tqm/packets.hpp"
#include "tqm/slits.hpp"
#include "tqm/toa.hpp"

namespace tqm {

struct AbcCouplings {
    double lambda = 1.0;  // A-B vertex
    double Lambda = 1.0;  // C-B vertex
    double m = 1.0;       // A
    double mu = 1.0;      // B
    double M_mass = 1.0;  // C

    void validate() const;
};

struct VertexSchedule {
    double tau_X = 0.0;
    double tau_Y = std::numeric_limits<double>::quiet_NaN();
    double tau_2 = std::numeric_limits<double>::quiet_NaN();
    double tau_3 = std::numeric_limits<double>::quiet_NaN();
};

// exp(-i (m/2) l tau)
cplx zero_d_kernel(int l, double tau, double m);

// f_p = -(p^2 - m^2)/2m for a four-momentum p.
double clock_frequency4(const Vec4& p, double m);
// F_0 = f_{p'+k} with mass m; F_X = f_{p'} (mass m) + f_k (mass mu).
double emission_F0(const Vec4& p_prime, const Vec4& k, double m);
double emission_FX(const Vec4& p_prime, const Vec4& k, double m, double mu);

// -i lambda A0(p'+k) exp(-i F_X tau_2X - i F_0 tau_X), rest-mass phases dropped.
cplx emission_amplitude(const Packet4& A0, const AbcCouplings& c, const VertexSchedule& s,
                        const Vec4& p_prime, const Vec4& k);

// Emission amplitude on a (p', k) grid along one axis; the other axes hold p' at the
// carrier of A0 and k at zero.
struct JointAmplitude {
    std::size_t axis = 0;
    std::vector<double> p_prime;
    std::vector<double> k;
    std::vector<cplx> values;  // row-major, p' slowest
    std::vector<double> F0;
    std::vector<double> FX;

    cplx at(std::size_t i, std::size_t j) const { return values[i * k.size() + j]; }
};

JointAmplitude emission_grid(const Packet4& A0, const AbcCouplings& c, const VertexSchedule& s,
                             std::size_t axis, const std::vector<double>& p_prime,
                             const std::vector<double>& k);

// Mean and standard deviation of s = p' + k along row i of the grid (fixed p'), from |values|^2.
Moments conserved_sum_moments(const JointAmplitude& j, std::size_t i);

// Rescaling for the product of A (sigma^2, mass m) and B (s^2, mass mu) at tau_X.
// tau_star is returned in clock-time units (the paper's tau*/m times m).
RescaleResult absorption_rescale(double sigma_sq, double s_sq, double tau_X, double m, double mu,
                                 AxisKind kind);

struct HeadOnCrossing {
    double tau_X;
    double x_X;
};

// A from -l at speed v, B from +d at speed u.
HeadOnCrossing head_on_crossing(double l, double d, double v, double u);

// One axis of the outgoing packet: width sigma*, aged tau* at clock tau_X.
struct StarredAxis {
    AxisPacket packet;
    double tau_X;
    double tau_star;
    double sigma_star_sq;

    double effective_tau(double tau) const { return tau - tau_X + tau_star; }
    Moments moments_at(double tau) const { return moments(packet, effective_tau(tau)); }
};

struct AbsorptionResult {
    std::vector<StarredAxis> axes;  // t, x, y, z
    double sigma_E_star;            // 1 / sigma_t*
    double delta_E;                 // sqrt(sigma_E*^2 / 2)
    std::vector<std::string> warnings;
};

AbsorptionResult absorption_final(const Packet4& A, const Packet4& B, const AbcCouplings& c,
                                  const VertexSchedule& s);

// Product of A and B sampled at tau_X on a (t, x) grid, propagated to tau_2 with mass m.
struct AbsorptionGridResult {
    std::array<double, 2> grid_mean;
    std::array<double, 2> grid_std;
    std::array<double, 2> closed_mean;
    std::array<double, 2> closed_std;
};

AbsorptionGridResult absorption_grid_experiment(const Packet4& A, const Packet4& B,
                                                const AbcCouplings& c, const VertexSchedule& s);

enum class ExchangeSide { Left, Right };

struct ExchangeGeometry {
    double x_a, p_a, m;
    double x_c, q_c, M;
    double mu;
    ExchangeSide side = ExchangeSide::Left;
    VertexSchedule schedule;
};

struct ExchangeResult {
    double x_X;
    double x_Y;
    double k_exchange;
    double p_prime_mean;
    double q_prime_mean;
    double f_k;  // off-shellness of B with w = mu
};

// Emission at the earlier vertex tau_X, absorption at tau_Y.
ExchangeResult exchange_kinematics(const ExchangeGeometry& g);

cplx loop_tau(const Vec4& p, double tau, double m, double mu);
cplx loop_omega(const Vec4& p, double omega, double m, double mu);
double loop_F(const Vec4& p, double m, double mu);  // -(p^2 - M^2)/2M, M = m + mu

// Coordinate-space product of the two kernels applied to phi0 by per-axis quadrature,
// transformed back to momentum and divided by phi0(p).
struct LoopOracle {
    cplx quadrature;
    cplx closed;
};

LoopOracle loop_tau_oracle(const Packet4& phi0, const Vec4& p, double tau, double m, double mu,
                           double range_sigmas = 10.0, double h_over_sigma = 0.02);

// -i/sqrt(2 pi) * m^2 mu^2/M^2 * integral over eps < |tau| < T0 of e^{i delta tau} / tau^2.
cplx loop_omega_regularized(double delta, double m, double mu, double eps, double T0);

// phi_sym(1,2) with particle k at (t_k, x_k).
using Fn1 = std::function<cplx(double)>;
struct TwoParticleFns {
    Fn1 A, B, a, b;  // wide in t, wide in x, narrow in t, narrow in x
};

cplx phi_sym(const TwoParticleFns& f, double t1, double x1, double t2, double x2);
// (phi~_sym phi-_sym + phi~_anti phi-_anti) / sqrt 2
cplx phi_sym_from_factors(const TwoParticleFns& f, double t1, double x1, double t2, double x2);
double symmetrize_two_particle(const TwoParticleFns& f, const std::vector<std::array<double, 4>>& points);

struct BendMap {
    double slope;   // dy/dp
    double offset;
};

struct ArrivalMap {
    double L;
    double mass;
    double tau(double p) const { return mass * L / p; }
};

struct BendTrace {
    std::vector<double> y;
    std::vector<double> tau;
    std::vector<double> rho;  // row-major, y slowest
};

// rho(y, tau) = int dp |phi(p)|^2 N(y; bend(p), y_res) N(tau; tau(p), time_sigma).
// time_sigma = 0 deposits each p on the tau grid by linear interpolation. ny is a minimum:
// the y spacing never exceeds y_resolution.
BendTrace bend_trace_density(const AxisPacket& p_packet, double time_sigma, const BendMap& bend,
                             const ArrivalMap& arrival, double y_resolution, std::size_t ny = 201,
                             std::size_t ntau = 401);

struct ConditionalStats {
    double mean;
    double variance;
};

// Conditional tau moments at fixed y by quadrature over p.
ConditionalStats bend_conditional(const AxisPacket& p_packet, double time_sigma, const BendMap& bend,
                                  const ArrivalMap& arrival, double y_resolution, double y);
ConditionalStats bend_conditional_grid(const BendTrace& tr, std::size_t iy);
DetectionDensity bend_marginal(const BendTrace& tr);

}  // namespace tqm

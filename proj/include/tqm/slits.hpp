#pragma once

#include <string>
#include <vector>

#include "tqm/kernels.hpp"
#include "tqm/packets.hpp"

namespace tqm {

struct GateSpec {
    double position_B;
    double center_A;  // clock time of passage
    double width_W;

    void validate() const;
};

struct RescaleResult {
    double sigma_star_sq;
    double tau_star;
    double determinant;
};

// Solves 1/(s1 -+ i a) + 1/(s2 -+ i b) = 1/(S -+ i theta) for real S, theta; returns
// {S, theta, D}. Time axes take the minus sign, space axes the plus sign; the solution
// is the same for both.
RescaleResult gaussian_product_rescale(double s1_sq, double a, double s2_sq, double b);

// |lhs - rhs| / |lhs| of the identity above, with theta = tau_star / m.
double rescale_residual(double s1_sq, double a, double s2_sq, double b, const RescaleResult& r, double m,
                        AxisKind kind);

struct BeamGeometry {
    double x0 = 0.0;
    double p0;
    double mass;
    GateSpec gate;
    double detector_L;
    double detector_T;

    double velocity() const { return p0 / mass; }
    void validate() const;  // v = B/A = L/T
};

// Default beam used for sweeps: m = 1, v = 0.1, sigma_x = sigma_t = 100.
BeamGeometry default_beam(double W);
constexpr double default_beam_sigma = 100.0;

struct SqmGateResult {
    double sigma_p_prime;
    double sigma_G;        // A sigma_p / p0
    double sigma_G_prime;  // T sigma_p' / p0
    double delta_tau;      // sigma_G' / sqrt 2
    double transmission;   // (sigma_G' / sigma_G)^2
};

SqmGateResult sqm_gate(const BeamGeometry& beam, double sigma_p);

RescaleResult tqm_gate_rescale(double sigma_t, double A, double W, double m);

// Time part after the gate: behaves as a packet of width sigma* that has already aged
// tau_star when the clock reads A.
struct PostGatePacket {
    AxisPacket packet;  // evaluate at effective clock tau - A + tau_star
    double gate_time;   // A
    double tau_star;
    double gate_center;  // coordinate time the mask is centred on
    std::vector<std::string> warnings;

    double effective_tau(double tau) const { return tau - gate_time + tau_star; }
    cplx dispersion_at(double tau) const;  // f'_D
    Moments moments_at(double tau) const;
    double sigma_E() const { return 1.0 / packet.sigma; }
};

// The mask is centred on the packet's mean coordinate time at clock time A.
PostGatePacket tqm_post_gate_packet(const AxisPacket& time_packet, const GateSpec& gate);

double tqm_gate_delta_tau(double W, double v, double sigma_x, double m, double T);

struct SlitSweepRow {
    double W;
    double delta_tau_sqm;
    double delta_tau_tqm;
};

std::vector<SlitSweepRow> slit_sweep(const std::vector<double>& widths);

// Grid check of the post-gate time width: propagate a 1+1D grid to A, apply the mask,
// propagate to T and take the standard deviation of the time marginal.
struct GateGridResult {
    double grid_std;
    double closed_std;
};

GateGridResult tqm_gate_grid_experiment(const AxisPacket& time_packet, const GateSpec& gate, double T);

struct DoubleGateResult {
    std::vector<double> energy;
    std::vector<double> density;
    std::vector<double> peaks;  // refined local maxima above 1e-3 of the maximum
    double fringe_spacing;      // NaN when fewer than 5 peaks
};

// TQM: both masks act on coordinate time at the clock time the beam reaches the gate.
// SQM: both masks act on the clock-time amplitude at x = B.
DoubleGateResult double_gate_density(Flavor flavor, const AxisPacket& time_packet,
                                     const AxisPacket& space_packet, const GateSpec& g1,
                                     const GateSpec& g2, double amplitude2 = 1.0);

// Mean spacing of the five local maxima centred on the largest one.
double fringe_spacing(const std::vector<double>& peaks, const std::vector<double>& heights);

}  // namespace tqm

#pragma once

#include <vector>

#include "tqm/grid.hpp"
#include "tqm/packets.hpp"

namespace tqm {

enum class Flavor { SQM, TQM };

struct KernelSpec {
    Flavor flavor;
    double mass;
    int expansion_order;  // 0, 1 or 2 kinetic terms of omega_k
};

cplx tqm_kernel_momentum(const Vec4& p, double tau, double m);

// Per-axis free kernels; zero for tau <= 0.
cplx tqm_kernel_time(double dt, double tau, double m);
cplx tqm_kernel_space(double dx, double tau, double m);
cplx tqm_kernel_coordinate(const Vec4& x1, const Vec4& x0, double tau, double m);

double sqm_omega(const Vec3& k, const KernelSpec& spec);
double sqm_omega_exact(const Vec3& k, double m);
cplx sqm_relativistic_phase(const Vec3& k, double tau, const KernelSpec& spec);

// Uniform 1D sample grid for the discrete path-integral step.
struct StepGrid {
    double min;
    double max;
    std::size_t count;
    double spacing() const { return (max - min) / double(count - 1); }
    double coord(std::size_t i) const { return min + double(i) * spacing(); }
};

// One normalized discrete step sqrt(+-i m / 2 pi eps) exp(-+i m d^2 / 2 eps), applied by
// trapezoid quadrature to samples. Throws ValidityError if the grid cannot resolve it.
std::vector<cplx> single_step_apply(const std::vector<cplx>& samples, const StepGrid& grid,
                                    AxisKind kind, double mass, double eps);
// Samples the packet at tau = 0 and applies `steps` discrete steps.
std::vector<cplx> single_step_propagate(const AxisPacket& packet, double eps, const StepGrid& grid,
                                        int steps = 1);
double sampled_norm(const std::vector<cplx>& samples, double h);

struct TrajectorySample {
    double tau;
    Vec4 x;     // (t, x, y, z)
    Vec4 xdot;  // derivatives w.r.t. clock time
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
};

// m t'' = q E.x',  m x'' = q t' E + q x' cross B; fixed-step RK4.
Trajectory classical_trajectory(const Vec4& x0, const Vec4& xdot0, const Vec3& E_field,
                                const Vec3& B_field, double q, double m, double tau_begin,
                                double tau_end, int steps);

}  // namespace tqm

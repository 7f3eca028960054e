#pragma once

#include <string>
#include <vector>

#include "tqm/packets.hpp"

namespace tqm {

struct DetectorSpec {
    double position_L;
    double mass;
    double velocity;  // p0 / m

    void validate() const;
    // Mean clock time of arrival for a packet starting at x0.
    double mean_arrival(double x0 = 0.0) const { return (position_L - x0) / velocity; }
};

struct DetectionDensity {
    std::vector<double> tau;
    std::vector<double> rho;

    void normalize();
    void validate() const;  // rho >= 0, integral 1 +- 1e-6
};

// Trapezoid integral of rho on its (possibly non-uniform) grid.
double density_integral(const DetectionDensity& d);

struct DensityStats {
    double mean;
    double std_dev;
};

DensityStats density_stats(const DetectionDensity& d);

struct ToaResult {
    DetectionDensity density;
    double mean_arrival = 0.0;
    double sigma_bar = 0.0;    // space contribution tau/(m v sigma_x)
    double sigma_tilde = 0.0;  // time contribution tau/(m sigma_t), 0 for SQM
    double sigma_total = 0.0;
    double half_width = 0.0;   // sigma_total / sqrt 2
    double std_dev = 0.0;      // from the sampled density
    std::vector<std::string> warnings;
};

// Density exp(-(tau - mean)^2 / sigma^2) / (sqrt(pi) sigma) over mean +- span*sigma.
DetectionDensity gaussian_arrival_density(double mean, double sigma, std::size_t samples = 2001,
                                          double span = 8.0);

ToaResult toa_sqm(const AxisPacket& space, const DetectorSpec& det, std::size_t samples = 2001);
ToaResult toa_tqm(const AxisPacket& time, const AxisPacket& space, const DetectorSpec& det,
                  std::size_t samples = 2001);

// Uniformly spaced samples of a momentum-space wave function.
struct MomentumSamples {
    std::vector<double> p;
    std::vector<cplx> phi;
};

MomentumSamples sample_momentum(const AxisPacket& space, double half_width_sigmas = 12.0,
                                std::size_t count = 4001);

// Two-branch flux density with the sqrt(|p|/m) weight, normalized on tau_grid.
DetectionDensity toa_muga_leavens(const MomentumSamples& phi, const DetectorSpec& det,
                                  const std::vector<double>& tau_grid,
                                  std::vector<std::string>* warnings = nullptr);

double l1_distance(const DetectionDensity& a, const DetectionDensity& b);

// Grid experiment: a free 1+1D packet is propagated spectrally and |psi|^2 at x = L is
// accumulated over clock time into a density over coordinate time.
struct GridToaOptions {
    std::size_t time_points = 4096;
    std::size_t space_points = 2048;
    std::size_t tau_samples = 161;
    double tau_span = 7.0;  // in units of the closed-form arrival width
};

struct GridToaResult {
    std::vector<double> t;
    std::vector<double> density;  // normalized over t
    double mean = 0.0;
    double variance = 0.0;
    double variance_closed = 0.0;  // (sigma_tilde^2 + sigma_bar^2) / 2
    double sigma_bar = 0.0;
    double sigma_tilde = 0.0;
};

GridToaResult toa_grid_experiment(const AxisPacket& time, const AxisPacket& space,
                                  const DetectorSpec& det, const GridToaOptions& opt = {});

}  // namespace tqm

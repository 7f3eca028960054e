#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tqm/packets.hpp"

namespace tqm {

struct AxisGrid {
    double min;
    double max;
    std::size_t count;
    AxisKind kind;

    double spacing() const { return (max - min) / double(count - 1); }
    double coord(std::size_t i) const { return min + double(i) * spacing(); }
    double period() const { return double(count) * spacing(); }
};

struct GridWave {
    std::vector<AxisGrid> axes;
    std::vector<cplx> values;  // row-major, axis 0 slowest

    GridWave() = default;
    explicit GridWave(std::vector<AxisGrid> axes);

    std::vector<std::size_t> dims() const;
    std::size_t size() const;
    double cell_volume() const;
    double norm() const;  // sum |psi|^2 * cell volume

    static GridWave sample(std::vector<AxisGrid> axes,
                           const std::function<cplx(const std::vector<double>&)>& fn);
    // Product of one 1D function per axis, evaluated in O(sum of counts) calls.
    static GridWave sample_separable(std::vector<AxisGrid> axes,
                                     const std::vector<std::function<cplx(double)>>& fns);
};

void validate_grid(const GridWave& w);

// Static potential Phi over the space coordinates of a point.
using Potential = std::function<double(const std::vector<double>& space_coords)>;

struct PropagationOptions {
    double mass = 1.0;
    double charge = 0.0;
    Potential phi;  // empty: free
    double tau_total = 0.0;
    int steps = 1;
    // Per-axis centre of the momentum band the grid represents (E0 for time, p0 for space).
    std::vector<double> band_center;
    // Sign multiplying the time-axis kinetic term; -1 is the broken negative control.
    double time_kinetic_sign = 1.0;
};

GridWave grid_propagate(const GridWave& w, const PropagationOptions& opt);

// Runs the propagation step by step and returns max |norm - norm0| / norm0.
double verify_unitarity(const GridWave& w, const PropagationOptions& opt);

// Free evolution from a cached spectrum: one inverse FFT per call to at().
class SpectralPropagator {
public:
    SpectralPropagator(const GridWave& w0, double mass, std::vector<double> band_center = {});

    GridWave at(double tau) const;
    // 2-axis grids only: psi_tau along axis `keep` at coordinate `coord` on the other
    // axis, by trigonometric interpolation of the band-centred spectrum.
    std::vector<cplx> slice(double tau, std::size_t keep, double coord) const;
    // Physical momentum (energy for time axes) of each bin on an axis.
    const std::vector<double>& momenta(std::size_t axis) const { return momenta_[axis]; }

private:
    GridWave shape_;
    double mass_;
    std::vector<std::vector<double>> momenta_;
    std::vector<cplx> spectrum_;
};

// Binary layout: u64 naxes; per axis f64 min, f64 max, u64 count, u64 kind (0 time, 1 space);
// then interleaved re/im f64 row-major. All little-endian. A JSON sidecar `path + ".json"`
// repeats the header.
void write_gridwave(const GridWave& w, const std::string& path);
GridWave read_gridwave(const std::string& path);

}  // namespace tqm

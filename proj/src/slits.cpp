#include "tqm/slits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "tqm/grid.hpp"
#include "tqm/parallel.hpp"

namespace tqm {

void GateSpec::validate() const {
    if (!(width_W > 0.0)) throw ConfigError("GateSpec: W must be > 0");
}

RescaleResult gaussian_product_rescale(double s1, double a, double s2, double b) {
    if (!(s1 > 0.0) || !(s2 > 0.0)) throw ConfigError("rescale: widths must be > 0");
    // Real/imaginary parts of (s1 - ia)(s2 - ib) / (s1 + s2 - i(a + b)).
    const double D = (s1 + s2) * (s1 + s2) + (a + b) * (a + b);
    const double re = s1 * s2 - a * b, im = a * s2 + b * s1;
    const double S = (re * (s1 + s2) + im * (a + b)) / D;
    const double theta = (im * (s1 + s2) - re * (a + b)) / D;
    return {S, theta, D};
}

double rescale_residual(double s1, double a, double s2, double b, const RescaleResult& r, double m,
                        AxisKind kind) {
    const double sg = kind == AxisKind::Time ? -1.0 : 1.0;
    const cplx lhs = 1.0 / cplx(s1, sg * a) + 1.0 / cplx(s2, sg * b);
    const cplx rhs = 1.0 / cplx(r.sigma_star_sq, sg * r.tau_star / m);
    return std::abs(lhs - rhs) / std::abs(lhs);
}

void BeamGeometry::validate() const {
    gate.validate();
    if (!(p0 > 0.0) || !(mass > 0.0)) throw ConfigError("BeamGeometry: p0 and mass must be > 0");
    if (!(gate.center_A > 0.0) || !(detector_T > gate.center_A))
        throw ConfigError("BeamGeometry: need 0 < A < T");
    const double v = velocity();
    const double vg = (gate.position_B - x0) / gate.center_A, vd = (detector_L - x0) / detector_T;
    if (std::abs(vg - v) > 1e-9 * v || std::abs(vd - v) > 1e-9 * v)
        throw ConfigError("BeamGeometry: inconsistent v = B/A = L/T");
}

BeamGeometry default_beam(double W) {
    BeamGeometry b;
    b.x0 = 0.0;
    b.mass = 1.0;
    b.p0 = 0.1;
    b.gate = {1000.0, 1.0e4, W};
    b.detector_L = 2000.0;
    b.detector_T = 2.0e4;
    return b;
}

SqmGateResult sqm_gate(const BeamGeometry& beam, double sigma_p) {
    beam.validate();
    if (!(sigma_p > 0.0)) throw ConfigError("sqm_gate: sigma_p must be > 0");
    const double A = beam.gate.center_A, W = beam.gate.width_W, p0 = beam.p0, T = beam.detector_T;
    SqmGateResult r;
    const double q = A / (W * p0);
    r.sigma_p_prime = 1.0 / std::sqrt(1.0 / (sigma_p * sigma_p) + q * q);
    r.sigma_G = A * sigma_p / p0;
    r.sigma_G_prime = T * r.sigma_p_prime / p0;
    r.delta_tau = r.sigma_G_prime / std::sqrt(2.0);
    r.transmission = std::pow(r.sigma_G_prime / r.sigma_G, 2);
    return r;
}

RescaleResult tqm_gate_rescale(double sigma_t, double A, double W, double m) {
    if (!(sigma_t > 0.0) || !(A > 0.0) || !(W > 0.0) || !(m > 0.0))
        throw ConfigError("tqm_gate_rescale: all inputs must be > 0");
    auto r = gaussian_product_rescale(sigma_t * sigma_t, A / m, W * W, 0.0);
    r.tau_star *= m;
    return r;
}

cplx PostGatePacket::dispersion_at(double tau) const { return dispersion_factor(packet, effective_tau(tau)); }

Moments PostGatePacket::moments_at(double tau) const { return moments(packet, effective_tau(tau)); }

PostGatePacket tqm_post_gate_packet(const AxisPacket& tp, const GateSpec& gate) {
    gate.validate();
    if (tp.kind != AxisKind::Time) throw ConfigError("tqm_post_gate_packet: time packet expected");
    const double A = gate.center_A, m = tp.mass;
    std::vector<std::string> warn;
    if (std::abs(tp.carrier / m - 1.0) > 0.1) warn.push_back("relativistic input: E0/m differs from 1 by > 10%");
    // Pre-gate complex width at clock A is sigma^2 - iA/m; A may be any real clock reading here.
    const auto r = gaussian_product_rescale(tp.sigma * tp.sigma, A / m, gate.width_W * gate.width_W, 0.0);
    const double tau_star = r.tau_star * m;
    const double gc = moments(tp, A).mean;
    AxisPacket out(AxisKind::Time, gc - tp.carrier / m * tau_star, tp.carrier, std::sqrt(r.sigma_star_sq), m);
    return {out, A, tau_star, gc, warn};
}

double tqm_gate_delta_tau(double W, double v, double sigma_x, double m, double T) {
    if (!(W > 0.0) || !(v > 0.0) || !(sigma_x > 0.0) || !(m > 0.0))
        throw ConfigError("tqm_gate_delta_tau: inputs must be > 0");
    return T / (m * std::sqrt(2.0)) * std::sqrt(1.0 / (W * W) + 1.0 / (v * v * sigma_x * sigma_x));
}

std::vector<SlitSweepRow> slit_sweep(const std::vector<double>& widths) {
    std::vector<SlitSweepRow> rows;
    for (double W : widths) {
        const auto beam = default_beam(W);
        const double sx = default_beam_sigma;
        rows.push_back({W, sqm_gate(beam, 1.0 / sx).delta_tau,
                        tqm_gate_delta_tau(W, beam.velocity(), sx, beam.mass, beam.detector_T)});
    }
    return rows;
}

namespace {

std::size_t grid_count(double range, double h) {
    return std::max<std::size_t>(64, std::bit_ceil(std::size_t(std::ceil(range / h)) + 1));
}

}  // namespace

GateGridResult tqm_gate_grid_experiment(const AxisPacket& tp, const GateSpec& gate, double T) {
    const double A = gate.center_A, m = tp.mass;
    if (!(T > A) || !(A > 0.0)) throw ConfigError("gate grid experiment: need 0 < A < T");
    const auto post = tqm_post_gate_packet(tp, gate);
    const auto pre_m = moments(tp, A);
    const auto post_m = post.moments_at(T);
    // amplitude widths are sqrt 2 times the moment widths
    const double r2 = std::sqrt(2.0);
    double lo = std::min({tp.center - 8.0 * tp.sigma, pre_m.mean - 8.0 * r2 * pre_m.uncertainty,
                          post_m.mean - 8.0 * r2 * post_m.uncertainty});
    double hi = std::max({tp.center + 8.0 * tp.sigma, pre_m.mean + 8.0 * r2 * pre_m.uncertainty,
                          post_m.mean + 8.0 * r2 * post_m.uncertainty});
    const double h = 0.4 * std::min(tp.sigma, post.packet.sigma);
    AxisGrid ta{lo, hi, grid_count(hi - lo, h), AxisKind::Time};

    AxisPacket spect(AxisKind::Space, 0.0, 0.0, 1.0, m);
    const double xr = 8.0 * r2 * moments(spect, T).uncertainty;
    AxisGrid xa{-xr, xr, grid_count(2.0 * xr, 0.4), AxisKind::Space};

    GridWave w = GridWave::sample_separable(
        {ta, xa}, {[&](double t) { return evaluate_position(tp, 0.0, t); },
                   [&](double x) { return evaluate_position(spect, 0.0, x); }});
    PropagationOptions opt;
    opt.mass = m;
    opt.tau_total = A;
    opt.band_center = {tp.carrier, 0.0};
    w = grid_propagate(w, opt);
    const double W = gate.width_W;
    for (std::size_t i = 0; i < ta.count; ++i) {
        const double d = ta.coord(i) - post.gate_center;
        const double g = std::exp(-d * d / (2.0 * W * W));
        for (std::size_t j = 0; j < xa.count; ++j) w.values[i * xa.count + j] *= g;
    }
    opt.tau_total = T - A;
    w = grid_propagate(w, opt);

    double s0 = 0, s1 = 0, s2 = 0;
    for (std::size_t i = 0; i < ta.count; ++i) {
        double p = 0.0;
        for (std::size_t j = 0; j < xa.count; ++j) p += std::norm(w.values[i * xa.count + j]);
        const double t = ta.coord(i);
        s0 += p;
        s1 += p * t;
        s2 += p * t * t;
    }
    const double mean = s1 / s0;
    return {std::sqrt(s2 / s0 - mean * mean), post_m.uncertainty};
}

double fringe_spacing(const std::vector<double>& peaks, const std::vector<double>& heights) {
    if (peaks.size() < 5) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t k = std::size_t(std::max_element(heights.begin(), heights.end()) - heights.begin());
    const std::size_t j = std::min(k >= 2 ? k - 2 : 0, peaks.size() - 5);
    return (peaks[j + 4] - peaks[j]) / 4.0;
}

DoubleGateResult double_gate_density(Flavor flavor, const AxisPacket& tp, const AxisPacket& sp,
                                     const GateSpec& g1, const GateSpec& g2, double amplitude2) {
    g1.validate();
    g2.validate();
    const double dT = std::abs(g2.center_A - g1.center_A);
    if (!(dT > 3.0 * (g1.width_W + g2.width_W))) throw ConfigError("double_gate_density: gates overlap");
    if (g1.position_B != g2.position_B) throw ConfigError("double_gate_density: gates must share B");
    if (sp.kind != AxisKind::Space || tp.kind != AxisKind::Time)
        throw ConfigError("double_gate_density: need a time and a space packet");
    if (!(sp.carrier > 0.0)) throw ConfigError("double_gate_density: beam must move towards the gate");

    // Amplitude along the gated variable u (coordinate time for TQM, clock time for SQM).
    std::function<cplx(double)> amp;
    double Ec;
    if (flavor == Flavor::TQM) {
        const double tau_g = sp.mass * (g1.position_B - sp.center) / sp.carrier;
        amp = [=](double t) { return evaluate_position(tp, tau_g, t); };
        Ec = tp.carrier;
    } else {
        const double B = g1.position_B;
        amp = [=](double tau) { return evaluate_position(sp, tau, B); };
        Ec = sp.carrier * sp.carrier / (2.0 * sp.mass);
    }
    const double wmax = std::max(g1.width_W, g2.width_W), wmin = std::min(g1.width_W, g2.width_W);
    const double ulo = std::min(g1.center_A, g2.center_A) - 10.0 * wmax;
    const double uhi = std::max(g1.center_A, g2.center_A) + 10.0 * wmax;
    const double hu = wmin / 16.0;
    const std::size_t nu = std::size_t(std::ceil((uhi - ulo) / hu)) + 1;
    std::vector<double> u(nu);
    std::vector<cplx> f(nu);
    for (std::size_t i = 0; i < nu; ++i) {
        u[i] = ulo + double(i) * hu;
        const double d1 = (u[i] - g1.center_A) / g1.width_W, d2 = (u[i] - g2.center_A) / g2.width_W;
        f[i] = amp(u[i]) * (std::exp(-0.5 * d1 * d1) + amplitude2 * std::exp(-0.5 * d2 * d2)) * hu;
    }

    DoubleGateResult r;
    const double half = 8.0 / wmin;
    const double dE = 2.0 * pi / dT / 64.0;
    const std::size_t ne = std::size_t(std::ceil(2.0 * half / dE)) + 1;
    r.energy.resize(ne);
    r.density.resize(ne);
    for (std::size_t k = 0; k < ne; ++k) r.energy[k] = Ec - half + double(k) * dE;
    parallel_for(ne, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            cplx s = 0.0;
            const cplx step = std::exp(cplx(0.0, r.energy[k] * hu));
            cplx ph = std::exp(cplx(0.0, r.energy[k] * ulo));
            for (std::size_t i = 0; i < nu; ++i) {
                if (i % 256 == 0) ph = std::exp(cplx(0.0, r.energy[k] * u[i]));  // limit drift
                s += f[i] * ph;
                ph *= step;
            }
            r.density[k] = std::norm(s) / (2.0 * pi);
        }
    });

    const double top = *std::max_element(r.density.begin(), r.density.end());
    std::vector<double> heights;
    for (std::size_t k = 1; k + 1 < ne; ++k) {
        const double y0 = r.density[k - 1], y1 = r.density[k], y2 = r.density[k + 1];
        if (y1 > y0 && y1 >= y2 && y1 > 1e-3 * top) {
            const double den = y0 - 2.0 * y1 + y2;
            const double off = den != 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
            r.peaks.push_back(r.energy[k] + off * dE);
            heights.push_back(y1);
        }
    }
    r.fringe_spacing = fringe_spacing(r.peaks, heights);
    return r;
}

}  // namespace tqm

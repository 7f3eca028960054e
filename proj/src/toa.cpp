#include "tqm/toa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tqm/grid.hpp"
#include "tqm/parallel.hpp"

namespace tqm {

void DetectorSpec::validate() const {
    if (!(velocity > 0.0)) throw ConfigError("DetectorSpec: velocity must be > 0");
    if (!(mass > 0.0)) throw ConfigError("DetectorSpec: mass must be > 0");
    if (!std::isfinite(position_L)) throw ConfigError("DetectorSpec: L must be finite");
}

double density_integral(const DetectionDensity& d) {
    double s = 0.0;
    for (std::size_t i = 1; i < d.tau.size(); ++i)
        s += 0.5 * (d.rho[i] + d.rho[i - 1]) * (d.tau[i] - d.tau[i - 1]);
    return s;
}

void DetectionDensity::normalize() {
    const double n = density_integral(*this);
    if (!(n > 0.0)) throw ValidityError("DetectionDensity: zero integral");
    for (auto& r : rho) r /= n;
}

void DetectionDensity::validate() const {
    if (tau.size() != rho.size() || tau.size() < 2) throw ValidityError("DetectionDensity: bad sampling");
    for (double r : rho)
        if (r < 0.0) throw ValidityError("DetectionDensity: negative density");
    if (std::abs(density_integral(*this) - 1.0) > 1e-6) throw ValidityError("DetectionDensity: not normalized");
}

DensityStats density_stats(const DetectionDensity& d) {
    const double n = density_integral(d);
    DetectionDensity w = d;
    for (std::size_t i = 0; i < w.rho.size(); ++i) w.rho[i] = d.rho[i] * d.tau[i];
    const double mean = density_integral(w) / n;
    for (std::size_t i = 0; i < w.rho.size(); ++i) w.rho[i] = d.rho[i] * (d.tau[i] - mean) * (d.tau[i] - mean);
    return {mean, std::sqrt(density_integral(w) / n)};
}

DetectionDensity gaussian_arrival_density(double mean, double sigma, std::size_t samples, double span) {
    if (samples < 3) throw ConfigError("gaussian_arrival_density: need >= 3 samples");
    DetectionDensity d;
    d.tau.resize(samples);
    d.rho.resize(samples);
    const double lo = mean - span * sigma, h = 2.0 * span * sigma / double(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = lo + double(i) * h;
        const double z = (t - mean) / sigma;
        d.tau[i] = t;
        d.rho[i] = std::exp(-z * z) / (std::sqrt(pi) * sigma);
    }
    return d;
}

namespace {

void check_beam(const AxisPacket& space, const DetectorSpec& det, std::vector<std::string>& warnings) {
    det.validate();
    if (space.kind != AxisKind::Space) throw ConfigError("toa: space packet expected");
    if (std::abs(space.mass - det.mass) > 1e-12 * det.mass) throw ConfigError("toa: packet and detector masses differ");
    const double v = space.carrier / space.mass;
    if (std::abs(v - det.velocity) > 1e-9 * det.velocity)
        throw ConfigError("toa: detector velocity must equal p0/m");
    if (det.position_L <= space.center) throw ConfigError("toa: detector must lie downstream of the packet");
    const double ratio = space.carrier * space.sigma;  // p0 / sigma_p
    if (ratio < 10.0) {
        std::ostringstream os;
        os << "paraxial: p0/sigma_p = " << ratio << " < 10";
        warnings.push_back(os.str());
    }
}

void fill_stats(ToaResult& r) {
    r.half_width = r.sigma_total / std::sqrt(2.0);
    r.std_dev = density_stats(r.density).std_dev;
}

}  // namespace

ToaResult toa_sqm(const AxisPacket& space, const DetectorSpec& det, std::size_t samples) {
    ToaResult r;
    check_beam(space, det, r.warnings);
    r.mean_arrival = det.mean_arrival(space.center);
    r.sigma_bar = r.mean_arrival / (det.mass * det.velocity * space.sigma);
    r.sigma_total = r.sigma_bar;
    r.density = gaussian_arrival_density(r.mean_arrival, r.sigma_total, samples);
    fill_stats(r);
    return r;
}

ToaResult toa_tqm(const AxisPacket& time, const AxisPacket& space, const DetectorSpec& det,
                  std::size_t samples) {
    if (time.kind != AxisKind::Time) throw ConfigError("toa_tqm: time packet expected");
    ToaResult r;
    check_beam(space, det, r.warnings);
    r.mean_arrival = det.mean_arrival(space.center);
    r.sigma_bar = r.mean_arrival / (det.mass * det.velocity * space.sigma);
    r.sigma_tilde = r.mean_arrival / (det.mass * time.sigma);
    r.sigma_total = std::hypot(r.sigma_tilde, r.sigma_bar);
    r.density = gaussian_arrival_density(r.mean_arrival, r.sigma_total, samples);
    fill_stats(r);
    return r;
}

MomentumSamples sample_momentum(const AxisPacket& space, double half_width_sigmas, std::size_t count) {
    if (count < 3) throw ConfigError("sample_momentum: need >= 3 samples");
    MomentumSamples s;
    const double sp = space.momentum_sigma();
    const double lo = space.carrier - half_width_sigmas * sp;
    const double h = 2.0 * half_width_sigmas * sp / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double p = lo + double(i) * h;
        s.p.push_back(p);
        s.phi.push_back(evaluate_momentum(space, 0.0, p));
    }
    return s;
}

DetectionDensity toa_muga_leavens(const MomentumSamples& phi, const DetectorSpec& det,
                                  const std::vector<double>& tau_grid, std::vector<std::string>* warnings) {
    det.validate();
    const std::size_t n = phi.p.size();
    if (n < 2 || phi.phi.size() != n) throw ConfigError("toa_muga_leavens: bad momentum samples");
    const double dp = (phi.p.back() - phi.p.front()) / double(n - 1);
    const double m = det.mass, L = det.position_L;

    double neg = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = std::norm(phi.phi[j]) * dp;
        total += a;
        if (phi.p[j] < 0.0) neg += a;
    }
    if (warnings && neg > 1e-6 * total) warnings->push_back("negative-momentum mass above 1e-6");

    // Per-sample weights sqrt(|p|/m) phi(p) e^{ipL}, split by branch.
    std::vector<cplx> w(n);
    for (std::size_t j = 0; j < n; ++j)
        w[j] = std::sqrt(std::abs(phi.p[j]) / m) * phi.phi[j] * std::exp(cplx(0.0, phi.p[j] * L));

    DetectionDensity d;
    d.tau = tau_grid;
    d.rho.assign(tau_grid.size(), 0.0);
    const double norm = dp / std::sqrt(2.0 * pi);
    parallel_for(tau_grid.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const double tau = tau_grid[i];
            cplx pos = 0.0, negb = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p = phi.p[j];
                const cplx term = w[j] * std::exp(cplx(0.0, -p * p * tau / (2.0 * m)));
                if (p > 0.0) pos += term;
                else if (p < 0.0) negb += term;
            }
            d.rho[i] = std::norm(pos * norm) + std::norm(negb * norm);
        }
    });
    d.normalize();
    return d;
}

double l1_distance(const DetectionDensity& a, const DetectionDensity& b) {
    if (a.tau.size() < 2) throw ConfigError("l1_distance: empty density");
    // b is interpolated linearly onto a's grid; zero outside b's support.
    DetectionDensity diff = a;
    for (std::size_t i = 0; i < a.tau.size(); ++i) {
        const double t = a.tau[i];
        double rb = 0.0;
        if (t >= b.tau.front() && t <= b.tau.back()) {
            auto it = std::upper_bound(b.tau.begin(), b.tau.end(), t);
            std::size_t k = std::min<std::size_t>(std::size_t(it - b.tau.begin()), b.tau.size() - 1);
            if (k == 0) k = 1;
            const double f = (t - b.tau[k - 1]) / (b.tau[k] - b.tau[k - 1]);
            rb = b.rho[k - 1] + f * (b.rho[k] - b.rho[k - 1]);
        }
        diff.rho[i] = std::abs(a.rho[i] - rb);
    }
    return density_integral(diff);
}

GridToaResult toa_grid_experiment(const AxisPacket& time, const AxisPacket& space, const DetectorSpec& det,
                                  const GridToaOptions& opt) {
    if (time.kind != AxisKind::Time) throw ConfigError("toa_grid_experiment: time packet expected");
    std::vector<std::string> warnings;
    check_beam(space, det, warnings);
    if (std::abs(time.mass - space.mass) > 1e-12 * space.mass) throw ConfigError("toa_grid_experiment: masses differ");
    const double m = det.mass, v = det.velocity;

    GridToaResult r;
    const double tbar = det.mean_arrival(space.center);
    r.sigma_bar = tbar / (m * v * space.sigma);
    r.sigma_tilde = tbar / (m * time.sigma);
    r.variance_closed = 0.5 * (r.sigma_bar * r.sigma_bar + r.sigma_tilde * r.sigma_tilde);
    const double w = std::sqrt(r.variance_closed);
    const double tau_lo = std::max(0.0, tbar - opt.tau_span * w), tau_hi = tbar + opt.tau_span * w;

    auto width = [](const AxisPacket& p, double tau) { return p.sigma * std::abs(dispersion_factor(p, tau)); };
    const double ut = time.carrier / m;
    const double t_lo = std::min(time.center, time.center + ut * tau_lo) - 7.0 * time.sigma;
    const double t_hi = time.center + ut * tau_hi + 7.0 * width(time, tau_hi);
    const double x_lo = space.center - 7.0 * space.sigma;
    const double x_hi = space.center + v * tau_hi + 7.0 * width(space, tau_hi);

    AxisGrid ta{t_lo, t_hi, opt.time_points, AxisKind::Time};
    AxisGrid xa{x_lo, x_hi, opt.space_points, AxisKind::Space};
    // Each band must hold the spectrum out to 9 momentum sigmas.
    if (pi / ta.spacing() < 9.0 / time.sigma || pi / xa.spacing() < 9.0 / space.sigma)
        throw ValidityError("toa_grid_experiment: grid too coarse for the packet spectrum");

    GridWave w0 = GridWave::sample_separable(
        {ta, xa}, {[&](double t) { return evaluate_position(time, 0.0, t); },
                   [&](double x) { return evaluate_position(space, 0.0, x); }});
    SpectralPropagator prop(w0, m, {time.carrier, space.carrier});

    r.t.resize(ta.count);
    for (std::size_t i = 0; i < ta.count; ++i) r.t[i] = ta.coord(i);
    r.density.assign(ta.count, 0.0);
    const std::size_t nt = std::max<std::size_t>(opt.tau_samples, 3);
    const double dtau = (tau_hi - tau_lo) / double(nt - 1);
    for (std::size_t k = 0; k < nt; ++k) {
        const double tau = tau_lo + double(k) * dtau;
        const double wt = (k == 0 || k + 1 == nt) ? 0.5 : 1.0;
        const auto col = prop.slice(tau, 0, det.position_L);
        for (std::size_t i = 0; i < col.size(); ++i) r.density[i] += wt * v * std::norm(col[i]) * dtau;
    }
    DetectionDensity d{r.t, r.density};
    d.normalize();
    r.density = d.rho;
    const auto st = density_stats(d);
    r.mean = st.mean;
    r.variance = st.std_dev * st.std_dev;
    return r;
}

}  // namespace tqm

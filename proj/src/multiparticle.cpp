#include "tqm/multiparticle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tqm/grid.hpp"
#include "tqm/kernels.hpp"
#include "tqm/parallel.hpp"

namespace tqm {

void AbcCouplings::validate() const {
    if (!(m > 0.0) || !(mu > 0.0) || !(M_mass > 0.0)) throw ConfigError("AbcCouplings: masses must be > 0");
}

cplx zero_d_kernel(int l, double tau, double m) {
    if (l < 0) throw ConfigError("zero_d_kernel: occupation must be >= 0");
    return std::exp(cplx(0.0, -0.5 * m * double(l) * tau));
}

double clock_frequency4(const Vec4& p, double m) { return -(minkowski_square(p) - m * m) / (2.0 * m); }

double emission_F0(const Vec4& pp, const Vec4& k, double m) {
    Vec4 s;
    for (int i = 0; i < 4; ++i) s[i] = pp[i] + k[i];
    return clock_frequency4(s, m);
}

double emission_FX(const Vec4& pp, const Vec4& k, double m, double mu) {
    return clock_frequency4(pp, m) + clock_frequency4(k, mu);
}

namespace {

void check_emission(const Packet4& A0, const AbcCouplings& c, const VertexSchedule& s) {
    c.validate();
    if (std::abs(A0.mass - c.m) > 1e-12 * c.m) throw ConfigError("emission: packet mass differs from m");
    if (!(s.tau_X >= 0.0) || !(s.tau_2 >= s.tau_X)) throw ConfigError("emission: need 0 <= tau_X <= tau_2");
}

cplx emission_value(const Packet4& A0, const AbcCouplings& c, const VertexSchedule& s, const Vec4& pp,
                    const Vec4& k, double& F0, double& FX) {
    cplx a = 1.0;
    for (int i = 0; i < 4; ++i) a *= evaluate_momentum(A0.axes[i], 0.0, pp[i] + k[i]);
    F0 = emission_F0(pp, k, c.m);
    FX = emission_FX(pp, k, c.m, c.mu);
    return cplx(0.0, -c.lambda) * a * std::exp(cplx(0.0, -FX * (s.tau_2 - s.tau_X) - F0 * s.tau_X));
}

}  // namespace

cplx emission_amplitude(const Packet4& A0, const AbcCouplings& c, const VertexSchedule& s, const Vec4& pp,
                        const Vec4& k) {
    check_emission(A0, c, s);
    double f0, fx;
    return emission_value(A0, c, s, pp, k, f0, fx);
}

JointAmplitude emission_grid(const Packet4& A0, const AbcCouplings& c, const VertexSchedule& s,
                             std::size_t axis, const std::vector<double>& pg, const std::vector<double>& kg) {
    check_emission(A0, c, s);
    if (axis > 3) throw ConfigError("emission_grid: axis must be 0..3");
    JointAmplitude j;
    j.axis = axis;
    j.p_prime = pg;
    j.k = kg;
    j.values.resize(pg.size() * kg.size());
    j.F0.resize(j.values.size());
    j.FX.resize(j.values.size());
    Vec4 pp, k{};
    for (int i = 0; i < 4; ++i) pp[i] = A0.axes[i].carrier;
    for (std::size_t a = 0; a < pg.size(); ++a)
        for (std::size_t b = 0; b < kg.size(); ++b) {
            pp[axis] = pg[a];
            k[axis] = kg[b];
            const std::size_t n = a * kg.size() + b;
            j.values[n] = emission_value(A0, c, s, pp, k, j.F0[n], j.FX[n]);
        }
    return j;
}

Moments conserved_sum_moments(const JointAmplitude& j, std::size_t i) {
    if (i >= j.p_prime.size() || j.k.size() < 3) throw ConfigError("conserved_sum_moments: bad row");
    double s0 = 0, s1 = 0, s2 = 0;
    for (std::size_t b = 0; b < j.k.size(); ++b) {
        const double w = std::norm(j.at(i, b)), s = j.p_prime[i] + j.k[b];
        s0 += w;
        s1 += w * s;
    }
    const double mean = s1 / s0;
    for (std::size_t b = 0; b < j.k.size(); ++b) s2 += std::norm(j.at(i, b)) * std::pow(j.p_prime[i] + j.k[b] - mean, 2);
    return {mean, std::sqrt(s2 / s0)};
}

RescaleResult absorption_rescale(double sigma_sq, double s_sq, double tau_X, double m, double mu, AxisKind) {
    if (!(sigma_sq > 0.0) || !(s_sq > 0.0) || !(m > 0.0) || !(mu > 0.0) || tau_X < 0.0)
        throw ConfigError("absorption_rescale: positive inputs required");
    // The same real solution serves both signs of the imaginary parts.
    auto r = gaussian_product_rescale(sigma_sq, tau_X / m, s_sq, tau_X / mu);
    r.tau_star *= m;
    return r;
}

HeadOnCrossing head_on_crossing(double l, double d, double v, double u) {
    if (!(v + u > 0.0)) throw ConfigError("head_on_crossing: v + u must be > 0");
    return {(d + l) / (v + u), (v * d - u * l) / (v + u)};
}

AbsorptionResult absorption_final(const Packet4& A, const Packet4& B, const AbcCouplings& c,
                                  const VertexSchedule& s) {
    c.validate();
    if (std::abs(A.mass - c.m) > 1e-12 * c.m || std::abs(B.mass - c.mu) > 1e-12 * c.mu)
        throw ConfigError("absorption_final: packet masses must match m and mu");
    if (!(s.tau_X >= 0.0)) throw ConfigError("absorption_final: tau_X must be >= 0");
    AbsorptionResult out;
    for (int i = 0; i < 4; ++i) {
        const auto& a = A.axes[i];
        const auto& b = B.axes[i];
        const auto ma = moments(a, s.tau_X), mb = moments(b, s.tau_X);
        const double envelope = 3.0 * std::max(ma.uncertainty, mb.uncertainty);
        if (std::abs(ma.mean - mb.mean) > envelope)
            out.warnings.push_back("axis " + std::to_string(i) + ": crossing point outside both 3-sigma envelopes");
        const double sa = a.sigma * a.sigma, sb = b.sigma * b.sigma;
        const double qa = s.tau_X / c.m, qb = s.tau_X / c.mu;
        const double wa = sa / (sa * sa + qa * qa), wb = sb / (sb * sb + qb * qb);
        const double center = (wa * ma.mean + wb * mb.mean) / (wa + wb);
        const auto r = absorption_rescale(sa, sb, s.tau_X, c.m, c.mu, a.kind);
        const double P = a.carrier + b.carrier;
        AxisPacket pk(a.kind, center - P / c.m * r.tau_star, P, std::sqrt(r.sigma_star_sq), c.m);
        out.axes.push_back({pk, s.tau_X, r.tau_star, r.sigma_star_sq});
    }
    out.sigma_E_star = 1.0 / std::sqrt(out.axes[0].sigma_star_sq);
    out.delta_E = std::sqrt(out.sigma_E_star * out.sigma_E_star / 2.0);
    return out;
}

AbsorptionGridResult absorption_grid_experiment(const Packet4& A, const Packet4& B, const AbcCouplings& c,
                                                const VertexSchedule& s) {
    const auto fin = absorption_final(A, B, c, s);
    if (!(s.tau_2 > s.tau_X)) throw ConfigError("absorption grid experiment: need tau_2 > tau_X");
    const double r2 = std::sqrt(2.0);
    std::vector<AxisGrid> axes;
    AbsorptionGridResult res{};
    for (int i = 0; i < 2; ++i) {
        const auto& st = fin.axes[i];
        const auto m0 = st.moments_at(s.tau_X), m1 = st.moments_at(s.tau_2);
        const double lo = std::min(m0.mean - 8.0 * r2 * m0.uncertainty, m1.mean - 8.0 * r2 * m1.uncertainty);
        const double hi = std::max(m0.mean + 8.0 * r2 * m0.uncertainty, m1.mean + 8.0 * r2 * m1.uncertainty);
        const double h = 0.4 * st.packet.sigma;
        const std::size_t n = std::max<std::size_t>(64, std::bit_ceil(std::size_t((hi - lo) / h) + 2));
        axes.push_back({lo, hi, n, st.packet.kind});
        res.closed_mean[i] = m1.mean;
        res.closed_std[i] = m1.uncertainty;
    }
    GridWave w = GridWave::sample_separable(
        axes, {[&](double t) {
                   return evaluate_position(A.axes[0], s.tau_X, t) * evaluate_position(B.axes[0], s.tau_X, t);
               },
               [&](double x) {
                   return evaluate_position(A.axes[1], s.tau_X, x) * evaluate_position(B.axes[1], s.tau_X, x);
               }});
    PropagationOptions opt;
    opt.mass = c.m;
    opt.tau_total = s.tau_2 - s.tau_X;
    opt.band_center = {fin.axes[0].packet.carrier, fin.axes[1].packet.carrier};
    w = grid_propagate(w, opt);
    const std::size_t nt = axes[0].count, nx = axes[1].count;
    std::vector<double> mt(nt, 0.0), mx(nx, 0.0);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nx; ++j) {
            const double p = std::norm(w.values[i * nx + j]);
            mt[i] += p;
            mx[j] += p;
        }
    auto stats = [](const AxisGrid& g, const std::vector<double>& p, double& mean, double& sd) {
        double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double x = g.coord(i);
            s0 += p[i];
            s1 += p[i] * x;
            s2 += p[i] * x * x;
        }
        mean = s1 / s0;
        sd = std::sqrt(s2 / s0 - mean * mean);
    };
    stats(axes[0], mt, res.grid_mean[0], res.grid_std[0]);
    stats(axes[1], mx, res.grid_mean[1], res.grid_std[1]);
    return res;
}

ExchangeResult exchange_kinematics(const ExchangeGeometry& g) {
    if (!(g.m > 0.0) || !(g.M > 0.0) || !(g.mu > 0.0)) throw ConfigError("exchange: masses must be > 0");
    const double tX = g.schedule.tau_X, tY = g.schedule.tau_Y;
    if (std::isnan(tY) || tY == tX) throw ConfigError("exchange: degenerate vertex times (delta tau = 0)");
    if (!(tY > tX) || tX < 0.0) throw ConfigError("exchange: need 0 <= tau_X < tau_Y");
    ExchangeResult r;
    const double dtau = tY - tX;
    if (g.side == ExchangeSide::Left) {
        r.x_X = g.x_a + g.p_a / g.m * tX;
        r.x_Y = g.x_c + g.q_c / g.M * tY;
    } else {
        r.x_X = g.x_c + g.q_c / g.M * tX;
        r.x_Y = g.x_a + g.p_a / g.m * tY;
    }
    r.k_exchange = g.mu * (r.x_Y - r.x_X) / dtau;
    const double sgn = g.side == ExchangeSide::Left ? 1.0 : -1.0;
    r.p_prime_mean = g.p_a - sgn * r.k_exchange;
    r.q_prime_mean = g.q_c + sgn * r.k_exchange;
    // B's coordinate time advances with the vertices (t ~ tau), so w = mu.
    r.f_k = clock_frequency4(Vec4{g.mu, r.k_exchange, 0.0, 0.0}, g.mu);
    return r;
}

double loop_F(const Vec4& p, double m, double mu) {
    const double M = m + mu;
    return -(minkowski_square(p) - M * M) / (2.0 * M);
}

cplx loop_tau(const Vec4& p, double tau, double m, double mu) {
    if (!(m > 0.0) || !(mu > 0.0)) throw ConfigError("loop_tau: masses must be > 0");
    if (tau == 0.0) throw ValidityError("loop_tau: singular at tau = 0");
    const double M = m + mu;
    const double pref = m * m * mu * mu / (M * M * tau * tau);
    return cplx(0.0, -pref) * std::exp(cplx(0.0, -loop_F(p, m, mu) * tau));
}

cplx loop_omega(const Vec4& p, double omega, double m, double mu) {
    if (!(m > 0.0) || !(mu > 0.0)) throw ConfigError("loop_omega: masses must be > 0");
    const double M = m + mu;
    return cplx(0.0, m * m * mu * mu / (M * M) * std::sqrt(pi / 2.0) * std::abs(omega - loop_F(p, m, mu)));
}

LoopOracle loop_tau_oracle(const Packet4& phi0, const Vec4& p, double tau, double m, double mu,
                           double range_sigmas, double h_over_sigma) {
    if (!(tau > 0.0)) throw ConfigError("loop_tau_oracle: tau must be > 0");
    const double M = m + mu;
    cplx quad = 4.0 * pi * pi * rest_mass_phase(m, tau) * rest_mass_phase(mu, tau);
    for (int a = 0; a < 4; ++a) {
        const auto& ax = phi0.axes[a];
        const bool time = ax.kind == AxisKind::Time;
        auto kern = [&](double d, double mass) {
            return time ? tqm_kernel_time(d, tau, mass) : tqm_kernel_space(d, tau, mass);
        };
        const double h = h_over_sigma * ax.sigma;
        const std::size_t n0 = std::size_t(2.0 * range_sigmas / h_over_sigma) + 1;
        const double x0lo = ax.center - range_sigmas * ax.sigma;
        std::vector<cplx> phi(n0);
        for (std::size_t i = 0; i < n0; ++i) phi[i] = evaluate_position(ax, 0.0, x0lo + double(i) * h);
        // evolved width with the combined mass sets the x1 range
        AxisPacket heavy(ax.kind, ax.center, ax.carrier, ax.sigma, M);
        const auto mo = moments(heavy, tau);
        const double w1 = std::sqrt(2.0) * mo.uncertainty;
        const std::size_t n1 = std::size_t(2.0 * range_sigmas * w1 / h) + 1;
        const double x1lo = mo.mean - range_sigmas * w1;
        std::vector<cplx> part(n1);
        parallel_for(n1, [&](std::size_t b, std::size_t e) {
            for (std::size_t j = b; j < e; ++j) {
                const double x1 = x1lo + double(j) * h;
                cplx s = 0.0;
                for (std::size_t i = 0; i < n0; ++i) {
                    const double d = x1 - (x0lo + double(i) * h);
                    s += kern(d, m) * kern(d, mu) * phi[i];
                }
                const double ph = (time ? 1.0 : -1.0) * p[a] * x1;
                part[j] = s * h * std::exp(cplx(0.0, ph));
            }
        });
        cplx ft = 0.0;
        for (const auto& v : part) ft += v;
        ft *= h / std::sqrt(2.0 * pi);
        quad *= ft / evaluate_momentum(ax, 0.0, p[a]);
    }
    return {quad, loop_tau(p, tau, m, mu)};
}

cplx loop_omega_regularized(double delta, double m, double mu, double eps, double T0) {
    if (!(eps > 0.0) || !(T0 > eps)) throw ConfigError("loop_omega_regularized: need 0 < eps < T0");
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double t) { return std::cos(delta * t) / (t * t); };
    double sum = 0.0;
    // geometric panels up to 1, then panels of a fraction of the oscillation period
    double a = eps;
    const double top = std::min(1.0, T0);
    while (a < top) {
        const double b = std::min(top, a * 1.5);
        sum += gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0);
        a = b;
    }
    const double panel = std::min(1.0, (std::abs(delta) > 0.0 ? pi / std::abs(delta) : 1.0));
    while (a < T0) {
        const double b = std::min(T0, a + panel);
        sum += gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0);
        a = b;
    }
    const double M = m + mu;
    const double pref = m * m * mu * mu / (M * M);
    return cplx(0.0, -pref * 2.0 * sum / std::sqrt(2.0 * pi));
}

cplx phi_sym(const TwoParticleFns& f, double t1, double x1, double t2, double x2) {
    return (f.A(t1) * f.B(x1) * f.a(t2) * f.b(x2) + f.A(t2) * f.B(x2) * f.a(t1) * f.b(x1)) / std::sqrt(2.0);
}

cplx phi_sym_from_factors(const TwoParticleFns& f, double t1, double x1, double t2, double x2) {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx ts = r * (f.A(t1) * f.a(t2) + f.A(t2) * f.a(t1));
    const cplx ta = r * (f.A(t1) * f.a(t2) - f.A(t2) * f.a(t1));
    const cplx xs = r * (f.B(x1) * f.b(x2) + f.B(x2) * f.b(x1));
    const cplx xa = r * (f.B(x1) * f.b(x2) - f.B(x2) * f.b(x1));
    return r * (ts * xs + ta * xa);
}

double symmetrize_two_particle(const TwoParticleFns& f, const std::vector<std::array<double, 4>>& points) {
    double worst = 0.0;
    for (const auto& q : points)
        worst = std::max(worst, std::abs(phi_sym(f, q[0], q[1], q[2], q[3]) -
                                         phi_sym_from_factors(f, q[0], q[1], q[2], q[3])));
    return worst;
}

namespace {

struct PSamples {
    std::vector<double> p, w;
};

PSamples bend_samples(const AxisPacket& pk, const BendMap& bend, double y_res) {
    if (bend.slope == 0.0) throw ConfigError("bend map must be invertible (slope != 0)");
    if (!(y_res > 0.0)) throw ConfigError("bend: y resolution must be > 0");
    if (pk.kind != AxisKind::Space) throw ConfigError("bend: space packet expected");
    const double sp = pk.momentum_sigma();
    const double lo = pk.carrier - 8.0 * sp, hi = pk.carrier + 8.0 * sp;
    if (!(lo > 0.0)) throw ConfigError("bend: packet support must stay at positive momentum");
    const double like = y_res / std::abs(bend.slope);
    const std::size_t n = std::max<std::size_t>(4001, std::size_t(10.0 * (hi - lo) / like) + 1);
    PSamples s;
    const double h = (hi - lo) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = lo + double(i) * h;
        s.p.push_back(p);
        s.w.push_back(std::norm(evaluate_momentum(pk, 0.0, p)) * h);
    }
    return s;
}

double normal(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * pi) * sd);
}

}  // namespace

BendTrace bend_trace_density(const AxisPacket& pk, double ts, const BendMap& bend, const ArrivalMap& arr,
                             double y_res, std::size_t ny, std::size_t ntau) {
    if (ts < 0.0) throw ConfigError("bend: time_sigma must be >= 0");
    if (ny < 3 || ntau < 3) throw ConfigError("bend: grid too small");
    const auto s = bend_samples(pk, bend, y_res);
    const double sd_p = pk.momentum_sigma() / std::sqrt(2.0);
    const double pa = pk.carrier - 6.0 * sd_p, pb = pk.carrier + 6.0 * sd_p;
    const double y1 = bend.slope * pa + bend.offset, y2 = bend.slope * pb + bend.offset;
    BendTrace tr;
    const double ylo = std::min(y1, y2) - 6.0 * y_res, yhi = std::max(y1, y2) + 6.0 * y_res;
    const double tlo = std::min(arr.tau(pa), arr.tau(pb)) - 6.0 * ts;
    const double thi = std::max(arr.tau(pa), arr.tau(pb)) + 6.0 * ts;
    // rows no coarser than y_res, so the y-sum of each Gaussian is flat in p
    ny = std::max(ny, std::size_t((yhi - ylo) / y_res) + 2);
    const double hy = (yhi - ylo) / double(ny - 1), ht = (thi - tlo) / double(ntau - 1);
    for (std::size_t i = 0; i < ny; ++i) tr.y.push_back(ylo + double(i) * hy);
    for (std::size_t j = 0; j < ntau; ++j) tr.tau.push_back(tlo + double(j) * ht);
    tr.rho.assign(ny * ntau, 0.0);

    const std::size_t np = s.p.size();
    // per-p tau profile: dense Gaussian or a two-bin linear deposit
    std::vector<std::size_t> j0(np);
    std::vector<double> frac(np);
    std::vector<double> gt;
    if (ts > 0.0) {
        gt.resize(np * ntau);
        for (std::size_t k = 0; k < np; ++k)
            for (std::size_t j = 0; j < ntau; ++j) gt[k * ntau + j] = normal(tr.tau[j], arr.tau(s.p[k]), ts);
    } else {
        for (std::size_t k = 0; k < np; ++k) {
            const double u = (arr.tau(s.p[k]) - tlo) / ht;
            const double fl = std::clamp(std::floor(u), 0.0, double(ntau - 2));
            j0[k] = std::size_t(fl);
            frac[k] = std::clamp(u - fl, 0.0, 1.0);
        }
    }
    parallel_for(ny, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            double* row = &tr.rho[i * ntau];
            for (std::size_t k = 0; k < np; ++k) {
                const double wy = s.w[k] * normal(tr.y[i], bend.slope * s.p[k] + bend.offset, y_res);
                if (wy < 1e-300) continue;
                if (ts > 0.0) {
                    const double* g = &gt[k * ntau];
                    for (std::size_t j = 0; j < ntau; ++j) row[j] += wy * g[j];
                } else {
                    row[j0[k]] += wy * (1.0 - frac[k]) / ht;
                    row[j0[k] + 1] += wy * frac[k] / ht;
                }
            }
        }
    });
    return tr;
}

ConditionalStats bend_conditional(const AxisPacket& pk, double ts, const BendMap& bend, const ArrivalMap& arr,
                                  double y_res, double y) {
    const auto s = bend_samples(pk, bend, y_res);
    double s0 = 0, s1 = 0;
    std::vector<double> w(s.p.size());
    for (std::size_t k = 0; k < s.p.size(); ++k) {
        w[k] = s.w[k] * normal(y, bend.slope * s.p[k] + bend.offset, y_res);
        s0 += w[k];
        s1 += w[k] * arr.tau(s.p[k]);
    }
    const double mean = s1 / s0;
    double s2 = 0;
    for (std::size_t k = 0; k < s.p.size(); ++k) s2 += w[k] * std::pow(arr.tau(s.p[k]) - mean, 2);
    return {mean, s2 / s0 + ts * ts};
}

ConditionalStats bend_conditional_grid(const BendTrace& tr, std::size_t iy) {
    const std::size_t nt = tr.tau.size();
    double s0 = 0, s1 = 0, s2 = 0;
    for (std::size_t j = 0; j < nt; ++j) {
        const double r = tr.rho[iy * nt + j];
        s0 += r;
        s1 += r * tr.tau[j];
    }
    const double mean = s1 / s0;
    for (std::size_t j = 0; j < nt; ++j) s2 += tr.rho[iy * nt + j] * std::pow(tr.tau[j] - mean, 2);
    return {mean, s2 / s0};
}

DetectionDensity bend_marginal(const BendTrace& tr) {
    const std::size_t nt = tr.tau.size();
    DetectionDensity d;
    d.tau = tr.tau;
    d.rho.assign(nt, 0.0);
    for (std::size_t i = 0; i < tr.y.size(); ++i)
        for (std::size_t j = 0; j < nt; ++j) d.rho[j] += tr.rho[i * nt + j];
    d.normalize();
    return d;
}

}  // namespace tqm

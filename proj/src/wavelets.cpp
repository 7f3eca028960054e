#include "tqm/wavelets.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "tqm/parallel.hpp"

namespace tqm {

namespace {
const double kDc = std::exp(-0.5);
}

cplx morlet_mother(double t) { return (std::exp(cplx(0.0, -t)) - kDc) * std::exp(-0.5 * t * t); }

cplx morlet_mother_ft(double w) {
    return std::sqrt(2.0 * pi) * (std::exp(-0.5 * (w + 1.0) * (w + 1.0)) - kDc * std::exp(-0.5 * w * w));
}

cplx morlet_atom(const WaveletAtom& a, double t) {
    if (a.scale == 0.0) throw ConfigError("wavelet atom: scale must be non-zero");
    return morlet_mother((t - a.location) / a.scale) / std::sqrt(std::abs(a.scale));
}

double admissibility_constant(int panels_per_unit, double cutoff) {
    if (panels_per_unit < 1 || !(cutoff > 0.0)) throw ConfigError("admissibility_constant: bad quadrature spec");
    auto f = [](double w) { return std::norm(morlet_mother_ft(w)) / std::abs(w); };
    using Q = boost::math::quadrature::gauss<double, 20>;
    const int panels = int(std::ceil(cutoff * panels_per_unit));
    const double h = cutoff / panels;
    double sum = 0.0;
    // the two half-lines separately; the integrand vanishes linearly at 0
    for (int k = 0; k < panels; ++k) {
        sum += Q::integrate(f, k * h, (k + 1) * h);
        sum += Q::integrate(f, -(k + 1) * h, -k * h);
    }
    // tail beyond the cutoff is dominated by exp(-(cutoff - 1)^2)
    if (!std::isfinite(sum) || !(sum > 0.0)) throw ValidityError("admissibility_constant: quadrature did not converge");
    return sum;
}

namespace {

std::vector<double> scale_list(const WaveletGridSpec& spec) {
    if (spec.voices < 1 || spec.max_octave < spec.min_octave) throw ConfigError("wavelet grid: bad scale range");
    std::vector<double> pos;
    for (int j = spec.min_octave * spec.voices; j <= spec.max_octave * spec.voices; ++j)
        pos.push_back(std::pow(2.0, double(j) / spec.voices));
    std::vector<double> s;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) s.push_back(-*it);
    for (double p : pos) s.push_back(p);
    return s;
}

double taper(const WaveletGridSpec& spec, double w) {
    return 0.5 * std::erfc((std::abs(w) - spec.lowpass_cut) / spec.lowpass_edge);
}

// Inverse Fourier transform of the taper: sin(a t) e^{-e^2 t^2 / 4} / (pi t)
double lowpass_forward_kernel(const WaveletGridSpec& spec, double t) {
    const double a = spec.lowpass_cut, e = spec.lowpass_edge;
    const double g = std::exp(-0.25 * e * e * t * t);
    if (std::abs(t) < 1e-12) return a / pi;
    return std::sin(a * t) / (pi * t) * g;
}

// Inverse Fourier transform of (C - S(w)) * taper(w), by trapezoid in w; the
// integrand is smooth, even, and negligible past cut + 6 edge widths.
std::vector<double> lowpass_inverse_kernel(const WaveletGridSpec& spec, double C, double dt, std::size_t half) {
    const double wmax = spec.lowpass_cut + 7.0 * spec.lowpass_edge;
    const double dw = std::min(0.005, pi / (2.0 * (double(half) * dt + 1.0)));
    const std::size_t nw = std::size_t(std::ceil(wmax / dw)) + 1;
    std::vector<double> amp(nw);
    for (std::size_t k = 0; k < nw; ++k) {
        const double w = double(k) * dw;
        amp[k] = std::max(0.0, C - scale_coverage(spec, w)) * taper(spec, w) * (k == 0 ? 0.5 : 1.0);
    }
    std::vector<double> h(half + 1);
    parallel_for(half + 1, [&](std::size_t b, std::size_t e) {
        for (std::size_t m = b; m < e; ++m) {
            const double t = double(m) * dt;
            // cos(k dw t) by the Chebyshev recurrence
            const double c1 = std::cos(dw * t);
            double cprev = 1.0, ccur = c1, acc = amp[0];
            for (std::size_t k = 1; k < nw; ++k) {
                acc += amp[k] * ccur;
                const double next = 2.0 * c1 * ccur - cprev;
                cprev = ccur;
                ccur = next;
            }
            h[m] = acc * dw / pi;
        }
    });
    return h;
}

std::size_t l_step_samples(const WaveletGridSpec& spec, double a, double dt) {
    return std::max<std::size_t>(1, std::size_t(std::floor(spec.l_step_per_scale * a / dt)));
}

}  // namespace

double scale_coverage(const WaveletGridSpec& spec, double w) {
    const double du = std::log(2.0) / spec.voices;
    double s = 0.0;
    for (double sc : scale_list(spec)) s += std::norm(morlet_mother_ft(sc * w));
    return s * du;
}

WaveletCoefficients forward_transform(const SampledFunction& f, const WaveletGridSpec& spec) {
    const std::size_t n = f.values.size();
    if (n < 2 || !(f.dt > 0.0)) throw ConfigError("forward_transform: need >= 2 samples and dt > 0");
    const double smin = std::pow(2.0, spec.min_octave), smax = std::pow(2.0, spec.max_octave);
    if (smin / f.dt < 8.0 - 1e-9) throw ValidityError("forward_transform: fewer than 8 samples per smallest scale");
    WaveletCoefficients out;
    out.spec = spec;
    out.s_grid = scale_list(spec);
    out.shape = {f.t0, f.dt, {}};
    out.sample_count = n;
    const double dt = f.dt;
    const double t_first = f.t0;
    const double* fr = reinterpret_cast<const double*>(f.values.data());
    out.rows.resize(out.s_grid.size());
    for (std::size_t si = 0; si < out.s_grid.size(); ++si) {
        const double s = out.s_grid[si], a = std::abs(s);
        const std::size_t step = l_step_samples(spec, a, dt);
        const long half = long(std::ceil(spec.truncation * a / dt));
        // conj atom template at offsets (t - l) = m dt
        std::vector<double> tr(2 * half + 1), ti(2 * half + 1);
        for (long m = -half; m <= half; ++m) {
            const cplx v = std::conj(morlet_mother(double(m) * dt / s)) / std::sqrt(a) * dt;
            tr[m + half] = v.real();
            ti[m + half] = v.imag();
        }
        // l on the sample lattice; beyond support + atom width the coefficients vanish
        const double margin = std::min(spec.margin_scales * smax, double(half) * dt);
        const long first = -long(std::floor(margin / (double(step) * dt)));
        const long last = long((n - 1) / step) + long(std::floor(margin / (double(step) * dt)));
        WaveletRow& row = out.rows[si];
        row.scale = s;
        row.dl = double(step) * dt;
        row.l0 = t_first + double(first) * row.dl;
        row.values.assign(std::size_t(last - first + 1), cplx(0.0));
        parallel_for(row.values.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t q = b; q < e; ++q) {
                const long li = (first + long(q)) * long(step);  // l index on the sample lattice
                const long j0 = std::max(0L, li - half), j1 = std::min(long(n) - 1, li + half);
                double re = 0.0, im = 0.0;
                for (long j = j0; j <= j1; ++j) {
                    const double ar = tr[j - li + half], ai = ti[j - li + half];
                    const double xr = fr[2 * j], xi = fr[2 * j + 1];
                    re += ar * xr - ai * xi;
                    im += ar * xi + ai * xr;
                }
                row.values[q] = {re, im};
            }
        });
    }
    // low-pass complement
    const std::size_t lstep = std::max<std::size_t>(1, std::size_t(std::llround(spec.lowpass_dl / dt)));
    const long khalf = long(std::ceil(spec.lowpass_radius / dt));
    std::vector<double> kern(2 * khalf + 1);
    for (long m = -khalf; m <= khalf; ++m) kern[m + khalf] = lowpass_forward_kernel(spec, double(m) * dt) * dt;
    const long lfirst = -long(khalf / long(lstep));
    const long llast = long((n - 1) / lstep) + long(khalf / long(lstep));
    out.lowpass.scale = 0.0;
    out.lowpass.dl = double(lstep) * dt;
    out.lowpass.l0 = t_first + double(lfirst) * out.lowpass.dl;
    out.lowpass.values.assign(std::size_t(llast - lfirst + 1), cplx(0.0));
    parallel_for(out.lowpass.values.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            const long li = (lfirst + long(q)) * long(lstep);
            const long j0 = std::max(0L, li - khalf), j1 = std::min(long(n) - 1, li + khalf);
            double re = 0.0, im = 0.0;
            for (long j = j0; j <= j1; ++j) {
                const double k = kern[j - li + khalf];
                re += k * fr[2 * j];
                im += k * fr[2 * j + 1];
            }
            out.lowpass.values[q] = {re, im};
        }
    });
    return out;
}

SampledFunction inverse_transform(const WaveletCoefficients& c, double C) {
    if (!(C > 0.0)) throw ConfigError("inverse_transform: C must be > 0");
    if (c.rows.empty()) throw ConfigError("inverse_transform: no coefficients");
    const auto& spec = c.spec;
    const double dt = c.shape.dt;
    const double du = std::log(2.0) / spec.voices;
    // output lives on the analysed sample grid
    const std::size_t n = c.sample_count;
    SampledFunction out{c.shape.t0, dt, std::vector<cplx>(n, cplx(0.0))};
    std::vector<double> acc(2 * n, 0.0);
    for (const auto& row : c.rows) {
        const double s = row.scale, a = std::abs(s);
        const long step = long(std::llround(row.dl / dt));
        const long half = long(std::ceil(spec.truncation * a / dt));
        const double w = du / a * row.dl;
        std::vector<double> tr(2 * half + 1), ti(2 * half + 1);
        for (long m = -half; m <= half; ++m) {
            const cplx v = morlet_mother(double(m) * dt / s) / std::sqrt(a) * w;
            tr[m + half] = v.real();
            ti[m + half] = v.imag();
        }
        const long first = long(std::llround((row.l0 - c.shape.t0) / row.dl));
        const double* cv = reinterpret_cast<const double*>(row.values.data());
        const long nl = long(row.values.size());
        // gather form: each output sample sums the atoms that reach it
        parallel_for(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t j = b; j < e; ++j) {
                const long jj = long(j);
                // l index q with |jj - (first + q) * step| <= half
                const long qlo = std::max(0L, long(std::ceil(double(jj - half) / double(step))) - first);
                const long qhi = std::min(nl - 1, long(std::floor(double(jj + half) / double(step))) - first);
                double re = 0.0, im = 0.0;
                for (long q = qlo; q <= qhi; ++q) {
                    const long m = jj - (first + q) * step + half;
                    const double ar = tr[m], ai = ti[m];
                    const double xr = cv[2 * q], xi = cv[2 * q + 1];
                    re += ar * xr - ai * xi;
                    im += ar * xi + ai * xr;
                }
                acc[2 * j] += re;
                acc[2 * j + 1] += im;
            }
        });
    }
    {
        const auto& row = c.lowpass;
        const long khalf = long(std::ceil(spec.lowpass_radius / dt));
        const auto h = lowpass_inverse_kernel(spec, C, dt, std::size_t(khalf));
        const long step = long(std::llround(row.dl / dt));
        const long first = long(std::llround((row.l0 - c.shape.t0) / row.dl));
        const long nl = long(row.values.size());
        parallel_for(n, [&](std::size_t b, std::size_t e) {
            for (std::size_t j = b; j < e; ++j) {
                const long jj = long(j);
                const long qlo = std::max(0L, long(std::ceil(double(jj - khalf) / double(step))) - first);
                const long qhi = std::min(nl - 1, long(std::floor(double(jj + khalf) / double(step))) - first);
                double re = 0.0, im = 0.0;
                for (long q = qlo; q <= qhi; ++q) {
                    const double k = h[std::size_t(std::abs(jj - (first + q) * step))] * row.dl;
                    re += k * row.values[q].real();
                    im += k * row.values[q].imag();
                }
                acc[2 * j] += re;
                acc[2 * j + 1] += im;
            }
        });
    }
    for (std::size_t j = 0; j < n; ++j) out.values[j] = cplx(acc[2 * j], acc[2 * j + 1]) / C;
    return out;
}

double relative_l2_error(const SampledFunction& a, const SampledFunction& b) {
    if (a.values.size() != b.values.size()) throw ConfigError("relative_l2_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += std::norm(a.values[i] - b.values[i]);
        den += std::norm(b.values[i]);
    }
    return std::sqrt(num / den);
}

std::string coefficients_csv(const WaveletCoefficients& c) {
    std::ostringstream os;
    os.precision(17);
    os << "s,l,re,im\n";
    auto emit = [&](const WaveletRow& r) {
        for (std::size_t q = 0; q < r.values.size(); ++q)
            os << r.scale << ',' << r.l0 + double(q) * r.dl << ',' << r.values[q].real() << ',' << r.values[q].imag()
               << '\n';
    };
    for (const auto& r : c.rows) emit(r);
    emit(c.lowpass);
    return os.str();
}

std::vector<CorpusEntry> wavelet_reference_corpus() {
    auto g = [](double t, double c, double var) { return std::exp(-(t - c) * (t - c) / (2.0 * var)); };
    auto e = [](double w, double t) { return std::exp(cplx(0.0, w * t)); };
    const std::vector<std::pair<std::string, std::function<cplx(double)>>> fns = {
        {"gauss", [&](double t) { return cplx(g(t, 0, 1)); }},
        {"carrier_-1_centre_3", [&](double t) { return e(-1, t) * g(t, 3, 4); }},
        {"gauss_wide_left", [&](double t) { return cplx(g(t, -2, 2.25)); }},
        {"carrier_0.5_wide", [&](double t) { return e(0.5, t) * g(t, 0, 4); }},
        {"chirp_up", [&](double t) { return e(0.1 * t, t) * g(t, 0, 4); }},
        {"chirp_down", [&](double t) { return e(-0.15 * t, t) * g(t, 1, 2.25); }},
        {"two_bump", [&](double t) { return cplx(g(t, -3, 1) + 0.5 * g(t, 3, 1)); }},
        {"two_bump_carriers", [&](double t) { return e(-0.5, t) * g(t, -4, 1) + e(0.8, t) * g(t, 2, 1.5); }},
        {"complex_amplitude", [&](double t) { return cplx(1.0, 0.3) * e(-1.2, t) * g(t, 1, 1); }},
        {"narrow_plus_wide", [&](double t) { return e(-0.7, t) * g(t, 0, 1) + 0.4 * g(t, -5, 4); }},
    };
    std::vector<CorpusEntry> out;
    const double dt = 1.0 / 512, lo = -20.0;
    const std::size_t n = 40 * 512 + 1;
    for (const auto& [name, fn] : fns) {
        CorpusEntry c{name, {lo, dt, {}}};
        c.samples.values.reserve(n);
        for (std::size_t i = 0; i < n; ++i) c.samples.values.push_back(fn(c.samples.t(i)));
        out.push_back(std::move(c));
    }
    return out;
}

std::array<GaussianTerm, 2> gaussian_components(const WaveletAtom& atom, double mass) {
    if (atom.scale == 0.0) throw ConfigError("gaussian_components: scale must be non-zero");
    const double a = std::abs(atom.scale);
    const double amp = std::pow(pi, 0.25);
    return {GaussianTerm{AxisPacket(AxisKind::Time, atom.location, 1.0 / atom.scale, a, mass), amp},
            GaussianTerm{AxisPacket(AxisKind::Time, atom.location, 0.0, a, mass), -kDc * amp}};
}

}  // namespace tqm

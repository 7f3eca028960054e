#include "tqm/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include "json.hpp"

#include "tqm/fft.hpp"
#include "tqm/parallel.hpp"

namespace tqm {

GridWave::GridWave(std::vector<AxisGrid> axes_) : axes(std::move(axes_)) {
    if (axes.empty() || axes.size() > 4) throw ConfigError("GridWave: 1 to 4 axes");
    for (const auto& a : axes) {
        if (a.count < 2) throw ConfigError("GridWave: count >= 2 per axis");
        if (!(a.max > a.min)) throw ConfigError("GridWave: max > min per axis");
    }
    values.assign(size(), cplx(0.0));
}

std::vector<std::size_t> GridWave::dims() const {
    std::vector<std::size_t> d;
    for (const auto& a : axes) d.push_back(a.count);
    return d;
}

std::size_t GridWave::size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.count;
    return n;
}

double GridWave::cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.spacing();
    return v;
}

double GridWave::norm() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * cell_volume();
}

GridWave GridWave::sample(std::vector<AxisGrid> axes, const std::function<cplx(const std::vector<double>&)>& fn) {
    GridWave w(std::move(axes));
    const auto d = w.dims();
    std::vector<double> x(d.size());
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        std::size_t r = i;
        for (std::size_t a = d.size(); a-- > 0;) {
            x[a] = w.axes[a].coord(r % d[a]);
            r /= d[a];
        }
        w.values[i] = fn(x);
    }
    return w;
}

GridWave GridWave::sample_separable(std::vector<AxisGrid> axes, const std::vector<std::function<cplx(double)>>& fns) {
    if (fns.size() != axes.size()) throw ConfigError("sample_separable: one function per axis");
    GridWave w(std::move(axes));
    const auto d = w.dims();
    std::vector<std::vector<cplx>> f(d.size());
    for (std::size_t a = 0; a < d.size(); ++a)
        for (std::size_t i = 0; i < d[a]; ++i) f[a].push_back(fns[a](w.axes[a].coord(i)));
    for (std::size_t i = 0; i < w.values.size(); ++i) {
        std::size_t r = i;
        cplx v = 1.0;
        for (std::size_t a = d.size(); a-- > 0;) {
            v *= f[a][r % d[a]];
            r /= d[a];
        }
        w.values[i] = v;
    }
    return w;
}

void validate_grid(const GridWave& w) {
    if (w.axes.empty() || w.axes.size() > 4) throw ConfigError("GridWave: 1 to 4 axes");
    for (const auto& a : w.axes)
        if (a.count < 2 || !(a.max > a.min)) throw ConfigError("GridWave: invalid axis grid");
    if (w.values.size() != w.size()) throw ConfigError("GridWave: value count does not match grid");
}

namespace {

// Physical momentum of every bin, folded into the band [c - pi/h, c + pi/h).
std::vector<double> axis_momenta(const AxisGrid& g, double center) {
    const double h = g.spacing();
    const double span = 2.0 * pi / h;
    std::vector<double> p(g.count);
    for (std::size_t k = 0; k < g.count; ++k) {
        double w = fft_frequency(k, g.count, h);
        double phys = g.kind == AxisKind::Time ? -w : w;
        double d = phys - center;
        d -= span * std::floor(d / span + 0.5);
        p[k] = center + d;
    }
    return p;
}

std::vector<double> band_centers(const GridWave& w, const std::vector<double>& given) {
    if (given.empty()) return std::vector<double>(w.axes.size(), 0.0);
    if (given.size() != w.axes.size()) throw ConfigError("band_center: one entry per axis");
    return given;
}

// Spectral-tail and edge guards. The spectral test stands in for "points per sigma"
// and works for band-centred grids.
void check_resolution(const GridWave& w, const std::vector<double>& centers, const char* when) {
    const auto d = w.dims();
    double peak = 0.0;
    for (const auto& v : w.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return;
    std::vector<std::size_t> stride(d.size(), 1);
    for (std::size_t a = d.size() - 1; a-- > 0;) stride[a] = stride[a + 1] * d[a + 1];
    for (std::size_t a = 0; a < d.size(); ++a) {
        double edge = 0.0;
        for (std::size_t i = 0; i < w.values.size(); ++i) {
            std::size_t j = (i / stride[a]) % d[a];
            if (j == 0 || j == d[a] - 1) edge = std::max(edge, std::abs(w.values[i]));
        }
        if (edge > 3.7e-6 * peak)
            throw ValidityError(std::string("grid_propagate: wave reaches the grid edge ") + when +
                                " (packet must stay >= 5 sigma inside)");
    }
    std::vector<cplx> spec = w.values;
    std::vector<std::size_t> all(d.size());
    for (std::size_t a = 0; a < d.size(); ++a) all[a] = a;
    FftPlan(d, all, -1).execute(spec.data());
    double speak = 0.0;
    for (const auto& v : spec) speak = std::max(speak, std::abs(v));
    for (std::size_t a = 0; a < d.size(); ++a) {
        const auto p = axis_momenta(w.axes[a], centers[a]);
        const double half = pi / w.axes[a].spacing();
        double tail = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            std::size_t k = (i / stride[a]) % d[a];
            if (std::abs(p[k] - centers[a]) > 0.9 * half) tail = std::max(tail, std::abs(spec[i]));
        }
        if (tail > 1e-6 * speak)
            throw ValidityError(std::string("grid_propagate: spectrum not resolved ") + when +
                                " (refine the grid or centre the band)");
    }
}

class SplitStepper {
public:
    SplitStepper(const GridWave& w, const PropagationOptions& opt) : w_(w), opt_(opt) {
        validate_grid(w);
        if (opt.steps < 1) throw ConfigError("grid_propagate: steps >= 1");
        if (!(opt.mass > 0.0)) throw ConfigError("grid_propagate: mass > 0");
        centers_ = band_centers(w, opt.band_center);
        dims_ = w.dims();
        const std::size_t na = dims_.size();
        for (std::size_t a = 0; a < na; ++a) {
            momenta_.push_back(axis_momenta(w.axes[a], centers_[a]));
            if (w.axes[a].kind == AxisKind::Time) time_axes_.push_back(a);
            else space_axes_.push_back(a);
        }
        potential_ = bool(opt.phi) && opt.charge != 0.0;
        if (potential_ && time_axes_.size() != 1)
            throw ConfigError("grid_propagate: a potential needs exactly one time axis");
        dtau_ = opt.tau_total / opt.steps;
        build_kinetic();
        if (potential_) build_potential();
        std::vector<std::size_t> all(na);
        for (std::size_t a = 0; a < na; ++a) all[a] = a;
        // With a potential the time axis stays in energy space between steps.
        outer_axes_ = potential_ ? time_axes_ : all;
        inner_axes_ = potential_ ? space_axes_ : std::vector<std::size_t>{};
        outer_fwd_ = std::make_unique<FftPlan>(dims_, outer_axes_, kForward);
        outer_inv_ = std::make_unique<FftPlan>(dims_, outer_axes_, kBackward);
        if (!inner_axes_.empty()) {
            inner_fwd_ = std::make_unique<FftPlan>(dims_, inner_axes_, kForward);
            inner_inv_ = std::make_unique<FftPlan>(dims_, inner_axes_, kBackward);
        }
        outer_fwd_->execute(w_.values.data());
    }

    void step() {
        if (potential_) {
            multiply(w_.values, half_potential_);
            inner_fwd_->execute(w_.values.data());
            multiply(w_.values, kinetic_);
            inner_inv_->execute(w_.values.data());
            scale(1.0 / double(inner_fwd_->transform_size()));
            multiply(w_.values, half_potential_);
        } else {
            multiply(w_.values, kinetic_);
        }
    }

    // Parseval: the outer transform is unnormalized.
    double norm() const {
        double s = 0.0;
        for (const auto& v : w_.values) s += std::norm(v);
        return s * w_.cell_volume() / double(outer_fwd_->transform_size());
    }

    GridWave finish() {
        outer_inv_->execute(w_.values.data());
        scale(1.0 / double(outer_fwd_->transform_size()));
        return std::move(w_);
    }

private:
    static void multiply(std::vector<cplx>& v, const std::vector<cplx>& f) {
        parallel_for(v.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) v[i] *= f[i];
        });
    }
    void scale(double s) {
        parallel_for(w_.values.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) w_.values[i] *= s;
        });
    }

    // exp(i [s_t E^2 - |p|^2 - m^2] dtau / 2m), a product of per-axis factors
    void build_kinetic() {
        const double m = opt_.mass;
        std::vector<std::vector<cplx>> f(dims_.size());
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            const bool is_time = w_.axes[a].kind == AxisKind::Time;
            const double sign = is_time ? opt_.time_kinetic_sign : -1.0;
            for (double p : momenta_[a]) f[a].push_back(std::exp(cplx(0.0, sign * p * p * dtau_ / (2.0 * m))));
        }
        const cplx rest = std::exp(cplx(0.0, -m * dtau_ / 2.0));
        kinetic_.resize(w_.values.size());
        for_each_index([&](std::size_t i, const std::vector<std::size_t>& idx) {
            cplx v = rest;
            for (std::size_t a = 0; a < idx.size(); ++a) v *= f[a][idx[a]];
            kinetic_[i] = v;
        });
    }

    // exp(i s_t [(E - q Phi)^2 - E^2] dtau / 4m), diagonal in (E, x)
    void build_potential() {
        const double m = opt_.mass, q = opt_.charge;
        const std::size_t ta = time_axes_[0];
        half_potential_.resize(w_.values.size());
        std::vector<double> xs(space_axes_.size());
        for_each_index([&](std::size_t i, const std::vector<std::size_t>& idx) {
            for (std::size_t j = 0; j < space_axes_.size(); ++j)
                xs[j] = w_.axes[space_axes_[j]].coord(idx[space_axes_[j]]);
            const double phi = opt_.phi(xs);
            const double E = momenta_[ta][idx[ta]];
            const double a = opt_.time_kinetic_sign * (q * q * phi * phi - 2.0 * q * phi * E);
            half_potential_[i] = std::exp(cplx(0.0, a * dtau_ / (4.0 * m)));
        });
    }

    template <class F>
    void for_each_index(F&& fn) const {
        std::vector<std::size_t> idx(dims_.size(), 0);
        for (std::size_t i = 0; i < w_.values.size(); ++i) {
            fn(i, idx);
            for (std::size_t a = dims_.size(); a-- > 0;) {
                if (++idx[a] < dims_[a]) break;
                idx[a] = 0;
            }
        }
    }

    static constexpr int kForward = -1;
    static constexpr int kBackward = 1;

    GridWave w_;
    PropagationOptions opt_;
    std::vector<double> centers_;
    std::vector<std::size_t> dims_, time_axes_, space_axes_, outer_axes_, inner_axes_;
    std::vector<std::vector<double>> momenta_;
    bool potential_ = false;
    double dtau_ = 0.0;
    std::vector<cplx> kinetic_, half_potential_;
    std::unique_ptr<FftPlan> outer_fwd_, outer_inv_, inner_fwd_, inner_inv_;
};

}  // namespace

void validate_options(const GridWave& w, const PropagationOptions& opt) {
    validate_grid(w);
    if (opt.steps < 1) throw ConfigError("grid_propagate: steps >= 1");
    if (!(opt.mass > 0.0)) throw ConfigError("grid_propagate: mass > 0");
}

GridWave grid_propagate(const GridWave& w, const PropagationOptions& opt) {
    validate_options(w, opt);
    const auto centers = band_centers(w, opt.band_center);
    check_resolution(w, centers, "at input");
    SplitStepper st(w, opt);
    for (int s = 0; s < opt.steps; ++s) st.step();
    GridWave out = st.finish();
    check_resolution(out, centers, "at output");
    return out;
}

double verify_unitarity(const GridWave& w, const PropagationOptions& opt) {
    validate_options(w, opt);
    const auto centers = band_centers(w, opt.band_center);
    check_resolution(w, centers, "at input");
    SplitStepper st(w, opt);
    const double n0 = st.norm();
    double drift = 0.0;
    for (int s = 0; s < opt.steps; ++s) {
        st.step();
        drift = std::max(drift, std::abs(st.norm() - n0) / n0);
    }
    return drift;
}

SpectralPropagator::SpectralPropagator(const GridWave& w0, double mass, std::vector<double> band_center)
    : shape_(w0.axes), mass_(mass) {
    validate_grid(w0);
    if (!(mass > 0.0)) throw ConfigError("SpectralPropagator: mass > 0");
    const auto c = band_centers(w0, band_center);
    const auto d = w0.dims();
    std::vector<std::size_t> all(d.size());
    for (std::size_t a = 0; a < d.size(); ++a) {
        all[a] = a;
        momenta_.push_back(axis_momenta(w0.axes[a], c[a]));
    }
    spectrum_ = w0.values;
    FftPlan(d, all, -1).execute(spectrum_.data());
    const double inv = 1.0 / double(spectrum_.size());
    for (auto& v : spectrum_) v *= inv;
    shape_.values.clear();
    shape_.values.shrink_to_fit();
}

GridWave SpectralPropagator::at(double tau) const {
    GridWave out = shape_;
    const auto d = out.dims();
    std::vector<std::vector<cplx>> f(d.size());
    for (std::size_t a = 0; a < d.size(); ++a) {
        const double sign = out.axes[a].kind == AxisKind::Time ? 1.0 : -1.0;
        for (double p : momenta_[a]) f[a].push_back(std::exp(cplx(0.0, sign * p * p * tau / (2.0 * mass_))));
    }
    const cplx rest = std::exp(cplx(0.0, -mass_ * tau / 2.0));
    out.values.resize(spectrum_.size());
    std::vector<std::size_t> stride(d.size(), 1);
    for (std::size_t a = d.size() - 1; a-- > 0;) stride[a] = stride[a + 1] * d[a + 1];
    parallel_for(spectrum_.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            cplx v = rest * spectrum_[i];
            for (std::size_t a = 0; a < d.size(); ++a) v *= f[a][(i / stride[a]) % d[a]];
            out.values[i] = v;
        }
    });
    std::vector<std::size_t> all(d.size());
    for (std::size_t a = 0; a < d.size(); ++a) all[a] = a;
    FftPlan(d, all, 1).execute(out.values.data());
    return out;
}

std::vector<cplx> SpectralPropagator::slice(double tau, std::size_t keep, double coord) const {
    if (shape_.axes.size() != 2 || keep > 1) throw ConfigError("SpectralPropagator::slice: 2-axis grids only");
    const std::size_t other = 1 - keep;
    const auto d = shape_.dims();
    const auto& ax_k = shape_.axes[keep];
    const auto& ax_o = shape_.axes[other];
    const double sk = ax_k.kind == AxisKind::Time ? 1.0 : -1.0;
    const double so = ax_o.kind == AxisKind::Time ? 1.0 : -1.0;
    // e^{i omega (coord - min)} with omega = -E on a time axis, p on a space axis
    std::vector<double> wo_re(d[other]), wo_im(d[other]);
    for (std::size_t j = 0; j < d[other]; ++j) {
        const double p = momenta_[other][j];
        const double omega = ax_o.kind == AxisKind::Time ? -p : p;
        const double ph = so * p * p * tau / (2.0 * mass_) + omega * (coord - ax_o.min);
        wo_re[j] = std::cos(ph);
        wo_im[j] = std::sin(ph);
    }
    std::vector<cplx> row(d[keep]);
    const std::size_t s_keep = keep == 0 ? d[1] : 1, s_other = other == 0 ? d[1] : 1;
    parallel_for(d[keep], [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            double re = 0.0, im = 0.0;
            const cplx* base = spectrum_.data() + k * s_keep;
            for (std::size_t j = 0; j < d[other]; ++j) {
                const cplx& v = base[j * s_other];
                re += v.real() * wo_re[j] - v.imag() * wo_im[j];
                im += v.real() * wo_im[j] + v.imag() * wo_re[j];
            }
            const double p = momenta_[keep][k];
            row[k] = cplx(re, im) * std::exp(cplx(0.0, sk * p * p * tau / (2.0 * mass_)));
        }
    });
    const cplx rest = std::exp(cplx(0.0, -mass_ * tau / 2.0));
    for (auto& v : row) v *= rest;
    FftPlan({d[keep]}, {0}, 1).execute(row.data());
    return row;
}

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
    static_assert(sizeof(T) == 8);
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    os.write(reinterpret_cast<const char*>(&u), 8);
}

template <class T>
T get_le(std::istream& is) {
    std::uint64_t u;
    if (!is.read(reinterpret_cast<char*>(&u), 8)) throw ConfigError("read_gridwave: truncated file");
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    T v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void write_gridwave(const GridWave& w, const std::string& path) {
    validate_grid(w);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("write_gridwave: cannot open " + path);
    put_le<std::uint64_t>(os, w.axes.size());
    nlohmann::json side;
    side["axis_count"] = w.axes.size();
    side["axes"] = nlohmann::json::array();
    for (const auto& a : w.axes) {
        const std::uint64_t kind = a.kind == AxisKind::Time ? 0 : 1;
        put_le<double>(os, a.min);
        put_le<double>(os, a.max);
        put_le<std::uint64_t>(os, a.count);
        put_le<std::uint64_t>(os, kind);
        side["axes"].push_back({{"min", a.min}, {"max", a.max}, {"count", a.count}, {"kind", kind == 0 ? "time" : "space"}});
    }
    for (const auto& v : w.values) {
        put_le<double>(os, v.real());
        put_le<double>(os, v.imag());
    }
    side["payload"] = "interleaved re/im float64, little-endian, row-major";
    std::ofstream js(path + ".json");
    js << side.dump(2) << "\n";
}

GridWave read_gridwave(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("read_gridwave: cannot open " + path);
    const auto n = get_le<std::uint64_t>(is);
    if (n < 1 || n > 4) throw ConfigError("read_gridwave: bad axis count");
    std::vector<AxisGrid> axes;
    for (std::uint64_t i = 0; i < n; ++i) {
        AxisGrid a{};
        a.min = get_le<double>(is);
        a.max = get_le<double>(is);
        a.count = get_le<std::uint64_t>(is);
        const auto kind = get_le<std::uint64_t>(is);
        if (kind > 1) throw ConfigError("read_gridwave: bad axis kind");
        a.kind = kind == 0 ? AxisKind::Time : AxisKind::Space;
        axes.push_back(a);
    }
    GridWave w(std::move(axes));
    for (auto& v : w.values) {
        const double re = get_le<double>(is);
        v = cplx(re, get_le<double>(is));
    }
    return w;
}

}  // namespace tqm

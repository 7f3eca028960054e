#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "tqm/maxent.hpp"
#include "tqm/multiparticle.hpp"
#include "tqm/slits.hpp"
#include "tqm/toa.hpp"
#include "tqm/units.hpp"
#include "tqm/wavelets.hpp"

namespace py = pybind11;
using namespace tqm;

namespace {

py::dict toa_dict(const ToaResult& r) {
    py::dict d;
    d["tau"] = r.density.tau;
    d["rho"] = r.density.rho;
    d["mean_arrival"] = r.mean_arrival;
    d["sigma_bar"] = r.sigma_bar;
    d["sigma_tilde"] = r.sigma_tilde;
    d["sigma_total"] = r.sigma_total;
    d["half_width"] = r.half_width;
    d["std_dev"] = r.std_dev;
    d["warnings"] = r.warnings;
    return d;
}

py::tuple rescale_tuple(const RescaleResult& r) { return py::make_tuple(r.sigma_star_sq, r.tau_star, r.determinant); }

}  // namespace

PYBIND11_MODULE(_tqm, m) {
    m.doc() = "Gaussian wave packets with coordinate time as an observable";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ValidityError>(m, "ValidityError", PyExc_ArithmeticError);

    py::enum_<AxisKind>(m, "AxisKind").value("TIME", AxisKind::Time).value("SPACE", AxisKind::Space);

    py::class_<AxisPacket>(m, "AxisPacket")
        .def(py::init<AxisKind, double, double, double, double>(), py::arg("kind"), py::arg("center"),
             py::arg("carrier"), py::arg("sigma"), py::arg("mass"))
        .def_readonly("kind", &AxisPacket::kind)
        .def_readonly("center", &AxisPacket::center)
        .def_readonly("carrier", &AxisPacket::carrier)
        .def_readonly("sigma", &AxisPacket::sigma)
        .def_readonly("mass", &AxisPacket::mass)
        .def("__call__", [](const AxisPacket& p, double tau, double c) { return evaluate_position(p, tau, c); },
             py::arg("tau"), py::arg("coord"))
        .def("momentum", [](const AxisPacket& p, double tau, double k) { return evaluate_momentum(p, tau, k); },
             py::arg("tau"), py::arg("k"))
        .def("dispersion", [](const AxisPacket& p, double tau) { return dispersion_factor(p, tau); }, py::arg("tau"))
        .def("moments", [](const AxisPacket& p, double tau) {
            const auto mo = moments(p, tau);
            return py::make_tuple(mo.mean, mo.uncertainty);
        }, py::arg("tau"));

    m.def("convert_units", &convert_units, py::arg("value"), py::arg("from_unit"), py::arg("to_unit"));
    m.def("bound_state_estimate", [](double m_eV, double E_n) {
        const auto b = bound_state_estimate(m_eV, E_n);
        py::dict d;
        d["binding_energy_eV"] = b.binding_energy;
        d["delta_E_eV"] = b.delta_E;
        d["delta_t_s"] = b.delta_t_s;
        d["delta_t_as"] = convert_units(b.delta_t_s, "s", "as");
        return d;
    }, py::arg("m_eV"), py::arg("E_n_eV"));
    m.def("bohr_time_scale", &bohr_time_scale);
    m.def("clock_frequency_scale", [](double kin, double mass) {
        const auto c = clock_frequency_scale(kin, mass);
        return py::make_tuple(c.f_eV, c.time_scale_s);
    }, py::arg("kinetic_eV"), py::arg("mass_eV"));

    m.def("toa_sqm", [](const AxisPacket& sp, double L, std::size_t n) {
        return toa_dict(toa_sqm(sp, DetectorSpec{L, sp.mass, sp.carrier / sp.mass}, n));
    }, py::arg("space"), py::arg("L"), py::arg("samples") = 2001);
    m.def("toa_tqm", [](const AxisPacket& tp, const AxisPacket& sp, double L, std::size_t n) {
        return toa_dict(toa_tqm(tp, sp, DetectorSpec{L, sp.mass, sp.carrier / sp.mass}, n));
    }, py::arg("time"), py::arg("space"), py::arg("L"), py::arg("samples") = 2001);

    m.def("gaussian_product_rescale", [](double s1, double a, double s2, double b) {
        return rescale_tuple(gaussian_product_rescale(s1, a, s2, b));
    }, py::arg("s1_sq"), py::arg("a"), py::arg("s2_sq"), py::arg("b"));
    m.def("tqm_gate_rescale", [](double st, double A, double W, double mass) {
        return rescale_tuple(tqm_gate_rescale(st, A, W, mass));
    }, py::arg("sigma_t"), py::arg("A"), py::arg("W"), py::arg("m"));
    m.def("slit_sweep", [](const std::vector<double>& w) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& r : slit_sweep(w)) out.emplace_back(r.W, r.delta_tau_sqm, r.delta_tau_tqm);
        return out;
    }, py::arg("widths"));

    m.def("zero_d_kernel", &zero_d_kernel, py::arg("l"), py::arg("tau"), py::arg("m"));
    m.def("absorption_rescale", [](double s, double b, double tx, double mass, double mu) {
        return rescale_tuple(absorption_rescale(s, b, tx, mass, mu, AxisKind::Space));
    }, py::arg("sigma_sq"), py::arg("s_sq"), py::arg("tau_X"), py::arg("m"), py::arg("mu"));
    m.def("head_on_crossing", [](double l, double d, double v, double u) {
        const auto x = head_on_crossing(l, d, v, u);
        return py::make_tuple(x.tau_X, x.x_X);
    }, py::arg("l"), py::arg("d"), py::arg("v"), py::arg("u"));
    m.def("loop_tau", &loop_tau, py::arg("p"), py::arg("tau"), py::arg("m"), py::arg("mu"));
    m.def("loop_omega", &loop_omega, py::arg("p"), py::arg("omega"), py::arg("m"), py::arg("mu"));

    m.def("wavelet_roundtrip", [](const std::vector<cplx>& values, double t0, double dt) {
        SampledFunction f{t0, dt, values};
        return inverse_transform(forward_transform(f), admissibility_constant()).values;
    }, py::arg("values"), py::arg("t0"), py::arg("dt"));

    m.def("experiment_names", &cli::experiment_names);
    m.def("run_experiment_json", [](const std::string& name, const std::string& params, std::uint64_t seed) {
        const auto o = cli::run_experiment(name, cli::json::parse(params), seed);
        return cli::render_json(name, seed, o, "");
    }, py::arg("name"), py::arg("params_json") = "{}", py::arg("seed") = 0);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "tqm/multiparticle.hpp"

using namespace tqm;

namespace {

Packet4 make4(double m, Vec4 c, Vec4 k, Vec4 s) {
    return Packet4({AxisPacket(AxisKind::Time, c[0], k[0], s[0], m), AxisPacket(AxisKind::Space, c[1], k[1], s[1], m),
                    AxisPacket(AxisKind::Space, c[2], k[2], s[2], m), AxisPacket(AxisKind::Space, c[3], k[3], s[3], m)});
}

}  // namespace

TEST_CASE("zero-dimensional kernel") {
    CHECK(std::abs(zero_d_kernel(0, 3.0, 2.0) - cplx(1.0)) < 1e-15);
    CHECK(std::abs(zero_d_kernel(2, 0.7, 1.3) - std::exp(cplx(0.0, -1.3 * 0.7))) < 1e-15);
    CHECK_THROWS_AS(zero_d_kernel(-1, 1.0, 1.0), ConfigError);
}

TEST_CASE("emission amplitude depends on the split only through the phase") {
    AbcCouplings c{0.3, 1.0, 1.0, 0.5, 1.5};
    const auto A0 = make4(1.0, {0, 0, 0, 0}, {1.2, 0.3, 0, 0}, {2, 2, 2, 2});
    VertexSchedule s;
    s.tau_X = 1.5;
    s.tau_2 = 4.0;
    const Vec4 p1{1.0, 0.1, 0, 0}, k1{0.2, 0.2, 0, 0};
    const Vec4 p2{0.7, 0.45, 0, 0}, k2{0.5, -0.15, 0, 0};
    const cplx a1 = emission_amplitude(A0, c, s, p1, k1), a2 = emission_amplitude(A0, c, s, p2, k2);
    CHECK(std::abs(a1) == doctest::Approx(std::abs(a2)).epsilon(1e-13));
    CHECK(std::abs(a1) > 1e-3);
    CHECK(std::abs(std::arg(a1 / a2)) > 1e-3);

    // emission at the final vertex: only F_0 enters
    s.tau_X = s.tau_2;
    CHECK(std::abs(emission_amplitude(A0, c, s, p1, k1) - emission_amplitude(A0, c, s, p2, k2)) < 1e-14);
    CHECK(emission_F0(p1, k1, 1.0) == doctest::Approx(emission_F0(p2, k2, 1.0)));

    const auto g = emission_grid(A0, c, s, 1, {0.0, 0.1, 0.2}, {-0.1, 0.0, 0.1});
    CHECK(std::abs(g.at(1, 2)) == doctest::Approx(std::abs(g.at(2, 1))).epsilon(1e-13));

    // conserved-sum marginal along the time axis: dispersion of A0 in energy
    std::vector<double> kk;
    for (int i = 0; i <= 4000; ++i) kk.push_back(-8.0 + 0.004 * i);
    s.tau_X = 1.5;
    const auto gt = emission_grid(A0, c, s, 0, {0.3, 0.9}, kk);
    for (std::size_t i = 0; i < 2; ++i) {
        const auto mo = conserved_sum_moments(gt, i);
        CHECK(std::abs(mo.mean - 1.2) < 1e-9);
        CHECK(std::abs(mo.uncertainty - 0.5 / std::sqrt(2.0)) < 1e-9);
    }

    // first order in lambda
    AbcCouplings c2 = c, c3 = c;
    c2.lambda = 2.0 * c.lambda;
    c3.lambda = 1e-9;
    CHECK(std::abs(emission_amplitude(A0, c2, s, p1, k1) - 2.0 * emission_amplitude(A0, c, s, p1, k1)) < 1e-15);
    CHECK(std::abs(emission_amplitude(A0, c3, s, p1, k1)) < 1e-8);

    VertexSchedule bad;
    bad.tau_X = 2.0;
    bad.tau_2 = 1.0;
    CHECK_THROWS_AS(emission_amplitude(A0, c, bad, p1, k1), ConfigError);
}

TEST_CASE("absorption rescale closed values and limits") {
    const auto r = absorption_rescale(1.0, 1.0, 1.0, 1.0, 1.0, AxisKind::Time);
    CHECK(r.determinant == doctest::Approx(8.0));
    CHECK(r.sigma_star_sq == doctest::Approx(0.5));
    CHECK(r.tau_star == doctest::Approx(0.5));

    const auto st = absorption_rescale(2.0, 0.5, 0.0, 1.0, 3.0, AxisKind::Space);
    CHECK(st.sigma_star_sq == doctest::Approx(1.0 / (1.0 / 2.0 + 1.0 / 0.5)));
    CHECK(st.tau_star == doctest::Approx(0.0));

    // narrow heavy B dominates the product
    const auto h = absorption_rescale(1.0, 1e-4, 0.01, 1.0, 1000.0, AxisKind::Space);
    CHECK(std::abs(h.sigma_star_sq / 1e-4 - 1.0) < 0.05);
    CHECK(std::abs(h.tau_star) < 1e-4);

    // residual against the defining identity
    for (double tx : {0.1, 1.0, 7.0})
        for (double mu : {0.2, 1.0, 5.0}) {
            const auto q = absorption_rescale(2.0, 0.5, tx, 1.0, mu, AxisKind::Time);
            CHECK(rescale_residual(2.0, tx, 0.5, tx / mu, q, 1.0, AxisKind::Time) < 1e-12);
            CHECK(rescale_residual(2.0, tx, 0.5, tx / mu, q, 1.0, AxisKind::Space) < 1e-12);
        }
}

TEST_CASE("head-on absorption and grid oracle") {
    const auto x = head_on_crossing(10.0, 10.0, 1.0, 1.0);
    CHECK(x.tau_X == doctest::Approx(10.0));
    CHECK(x.x_X == doctest::Approx(0.0));
    CHECK_THROWS_AS(head_on_crossing(1, 1, -1, 0.5), ConfigError);

    AbcCouplings c{1.0, 1.0, 1.0, 5.0, 6.0};
    const auto A = make4(1.0, {0, -10, 0, 0}, {1.0, 1.0, 0, 0}, {2, 2, 2, 2});
    const auto B = make4(5.0, {0, 10, 0, 0}, {5.0, -5.0, 0, 0}, {1, 1, 1, 1});
    VertexSchedule s;
    s.tau_X = x.tau_X;
    s.tau_2 = 15.0;
    const auto fin = absorption_final(A, B, c, s);
    CHECK(fin.warnings.empty());
    CHECK(fin.sigma_E_star == doctest::Approx(1.0 / std::sqrt(fin.axes[0].sigma_star_sq)));
    CHECK(fin.delta_E == doctest::Approx(fin.sigma_E_star / std::sqrt(2.0)));
    CHECK(fin.axes[1].packet.carrier == doctest::Approx(-4.0));

    const auto g = absorption_grid_experiment(A, B, c, s);
    for (int i = 0; i < 2; ++i) {
        MESSAGE("axis " << i << " grid " << g.grid_mean[i] << " " << g.grid_std[i] << " closed "
                        << g.closed_mean[i] << " " << g.closed_std[i]);
        CHECK(std::abs(g.grid_std[i] / g.closed_std[i] - 1.0) < 0.01);
        CHECK(std::abs(g.grid_mean[i] - g.closed_mean[i]) < 0.01 * g.closed_std[i]);
    }

    // identical packets at tau_X = 0
    VertexSchedule s0;
    AbcCouplings ce{1.0, 1.0, 1.0, 1.0, 2.0};
    const auto same = absorption_final(A, A, ce, s0);
    for (const auto& ax : same.axes) CHECK(ax.sigma_star_sq == doctest::Approx(2.0));

    // narrow heavy B in time acts as a gate of width s_t
    const auto Bg = make4(1000.0, {0, -10, 0, 0}, {1000.0, 1000.0, 0, 0}, {0.02, 0.02, 0.02, 0.02});
    AbcCouplings cg{1.0, 1.0, 1.0, 1000.0, 1001.0};
    VertexSchedule sg;
    sg.tau_X = 0.01;
    const auto gate = absorption_final(A, Bg, cg, sg);
    CHECK(std::abs(gate.sigma_E_star * 0.02 - 1.0) < 0.01);

    // B crossing far from A's path
    const auto Bfar = make4(5.0, {0, 40, 0, 0}, {5.0, -5.0, 0, 0}, {1, 1, 1, 1});
    CHECK_FALSE(absorption_final(A, Bfar, c, s).warnings.empty());
    CHECK_THROWS_AS(absorption_final(B, A, c, s), ConfigError);
}

TEST_CASE("exchange kinematics") {
    ExchangeGeometry g{-5.0, 1.0, 1.0, 5.0, -0.5, 2.0, 0.3};
    g.schedule.tau_X = 2.0;
    g.schedule.tau_Y = 6.0;
    auto r = exchange_kinematics(g);
    CHECK(r.x_X == doctest::Approx(-3.0));
    CHECK(r.x_Y == doctest::Approx(3.5));
    CHECK(r.k_exchange == doctest::Approx(0.3 * 6.5 / 4.0));
    CHECK(r.p_prime_mean + r.q_prime_mean == doctest::Approx(0.5));
    CHECK(r.f_k == doctest::Approx(r.k_exchange * r.k_exchange / 0.6));

    g.side = ExchangeSide::Right;
    r = exchange_kinematics(g);
    CHECK(r.x_X == doctest::Approx(4.5));
    CHECK(r.x_Y == doctest::Approx(1.0));
    CHECK(r.p_prime_mean == doctest::Approx(1.0 + r.k_exchange));
    CHECK(r.p_prime_mean + r.q_prime_mean == doctest::Approx(0.5));

    // coincident vertices give no momentum transfer
    ExchangeGeometry z{0.0, 1.0, 1.0, 2.0, 0.0, 1.0, 0.3};
    z.schedule.tau_X = 2.0;
    z.schedule.tau_Y = 5.0;
    CHECK(exchange_kinematics(z).k_exchange == doctest::Approx(0.0));
    z.schedule.tau_Y = 2.0;
    CHECK_THROWS_AS(exchange_kinematics(z), ConfigError);
}

TEST_CASE("loop in clock time against coordinate quadrature") {
    const double m = 1.0, mu = 0.5, tau = 1.0;
    const auto phi0 = make4(1.0, {0.2, -0.3, 0.1, 0.0}, {1.5, 0.4, -0.2, 0.1}, {1, 1, 1, 1});
    const Vec4 p{1.8, 0.1, 0.2, -0.3};
    const auto o = loop_tau_oracle(phi0, p, tau, m, mu);
    MESSAGE("quadrature " << o.quadrature << " closed " << o.closed);
    CHECK(std::abs(o.quadrature - o.closed) / std::abs(o.closed) < 1e-6);
    const auto wide = loop_tau_oracle(phi0, p, tau, m, mu, 20.0);
    CHECK(std::abs(wide.quadrature - o.quadrature) < 1e-8);
    Vec4 on{1.5, 0.0, 0.0, 0.0};
    CHECK(std::abs(loop_tau(on, tau, m, mu) - cplx(0.0, -m * m * mu * mu / 2.25)) < 1e-15);
    CHECK(std::abs(loop_tau(p, 2.0, m, mu)) == doctest::Approx(std::abs(loop_tau(on, 2.0, m, mu))));
    CHECK_THROWS_AS(loop_tau(p, 0.0, m, mu), ValidityError);
}

TEST_CASE("loop in frequency: regularized slope") {
    const double m = 1.0, mu = 0.5;
    const Vec4 p{1.6, 0.2, 0.0, 0.0};
    const double F = loop_F(p, m, mu);
    const double w1 = F + 0.5, w2 = F - 1.0;
    const cplx num = loop_omega_regularized(w2 - F, m, mu, 1e-3, 2000.0) -
                     loop_omega_regularized(w1 - F, m, mu, 1e-3, 2000.0);
    const cplx ref = loop_omega(p, w2, m, mu) - loop_omega(p, w1, m, mu);
    MESSAGE("numeric " << num << " closed " << ref);
    CHECK(std::abs(num - ref) / std::abs(ref) < 0.05);
    CHECK(std::abs(loop_omega(p, F, m, mu)) == doctest::Approx(0.0));
    CHECK(std::abs(loop_omega(p, F + 0.7, m, mu)) == doctest::Approx(std::abs(loop_omega(p, F - 0.7, m, mu))));
}

TEST_CASE("two-particle symmetrization factorizes") {
    auto g = [](double c, double k, double s) {
        return [=](double x) { return std::exp(cplx(-(x - c) * (x - c) / (2 * s * s), k * x)); };
    };
    TwoParticleFns f{g(0.0, 1.0, 3.0), g(1.0, -0.5, 4.0), g(0.5, 2.0, 0.3), g(-1.0, 0.2, 0.4)};
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<std::array<double, 4>> pts(200);
    for (auto& q : pts) q = {u(rng), u(rng), u(rng), u(rng)};
    CHECK(symmetrize_two_particle(f, pts) < 1e-12);
    for (const auto& q : pts) CHECK(std::abs(phi_sym(f, q[0], q[1], q[2], q[3]) - phi_sym(f, q[2], q[3], q[0], q[1])) < 1e-12);
    TwoParticleFns ident{f.A, f.B, f.A, f.B};
    CHECK(std::abs(phi_sym_from_factors(ident, 0.3, -0.2, 1.1, 0.4) - phi_sym(ident, 0.3, -0.2, 1.1, 0.4)) < 1e-12);
}

TEST_CASE("bend trace: marginal matches the arrival density") {
    const double m = 1.0, p0 = 0.1, sx = 200.0 / p0;
    AxisPacket pk(AxisKind::Space, 0.0, p0, sx, m);
    const double tbar = 100.0 * m * sx * sx, L = p0 / m * tbar;
    const auto tr = bend_trace_density(pk, 0.0, {1.0, 0.0}, {L, m}, 1e-5);
    const auto marg = bend_marginal(tr);
    const auto sqm = toa_sqm(pk, DetectorSpec{L, m, p0 / m});
    // change of variables p = mL/tau on the same grid
    DetectionDensity exact;
    exact.tau = marg.tau;
    for (double t : exact.tau) exact.rho.push_back(std::norm(evaluate_momentum(pk, 0.0, m * L / t)) * m * L / (t * t));
    exact.normalize();
    const double e = l1_distance(marg, exact), eg = l1_distance(marg, sqm.density);
    MESSAGE("L1 marginal vs change of variables " << e << ", vs gaussian " << eg);
    CHECK(e < 0.01);
    CHECK_THROWS_AS(bend_trace_density(pk, 0.0, {0.0, 1.0}, {L, m}, 1e-5), ConfigError);
}

TEST_CASE("bend trace: conditional moments") {
    const double m = 1.0, p0 = 0.1, sx = 200.0 / p0;
    AxisPacket pk(AxisKind::Space, 0.0, p0, sx, m);
    const double L = 1e4;
    const double ts = 100.0;
    const BendMap bend{2.0, 1.0};
    const double yres = 2e-4;
    const auto tr = bend_trace_density(pk, ts, bend, {L, m}, yres, 41, 801);
    for (std::size_t iy : {std::size_t(15), std::size_t(20), std::size_t(26)}) {
        const auto a = bend_conditional_grid(tr, iy);
        const auto b = bend_conditional(pk, ts, bend, {L, m}, yres, tr.y[iy]);
        CHECK(std::abs(a.mean - b.mean) < 0.01 * std::sqrt(b.variance));
        CHECK(std::abs(a.variance / b.variance - 1.0) < 0.01);
        CHECK(b.variance > ts * ts);
    }
}

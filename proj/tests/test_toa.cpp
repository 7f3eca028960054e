#include <doctest.h>

#include <cmath>

#include "tqm/toa.hpp"

using namespace tqm;

namespace {

DetectionDensity normal_pdf(double mu, double sigma, std::size_t n, double span) {
    DetectionDensity d;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = mu - span * sigma + 2.0 * span * sigma * double(i) / double(n - 1);
        d.tau.push_back(t);
        d.rho.push_back(std::exp(-0.5 * (t - mu) * (t - mu) / (sigma * sigma)) / (std::sqrt(2.0 * pi) * sigma));
    }
    return d;
}

double ml_l1(double ratio, double k) {
    const double m = 1.0, v = 0.1, p0 = m * v, sp = p0 / ratio, sx = 1.0 / sp;
    const double tbar = k * m * sx * sx;
    AxisPacket sp_pk(AxisKind::Space, 0.0, p0, sx, m);
    DetectorSpec det{v * tbar, m, v};
    const auto sqm = toa_sqm(sp_pk, det, 1201);
    const auto ml = toa_muga_leavens(sample_momentum(sp_pk, 12.0, 1601), det, sqm.density.tau);
    return l1_distance(ml, sqm.density);
}

}  // namespace

TEST_CASE("density_stats on a sampled normal density") {
    const auto d = normal_pdf(3.5, 0.7, 4001, 12.0);
    const auto s = density_stats(d);
    CHECK(std::abs(s.mean - 3.5) < 1e-8);
    CHECK(std::abs(s.std_dev - 0.7) < 1e-8);
}

TEST_CASE("density_stats symmetric and bimodal against direct sums") {
    DetectionDensity d;
    double s0 = 0, s1 = 0, s2 = 0;
    for (int i = 0; i <= 6000; ++i) {
        const double t = -30.0 + 0.01 * i;
        const double r = 0.3 * std::exp(-(t + 4) * (t + 4) / 2.0) + 0.7 * std::exp(-(t - 5) * (t - 5) / 4.5);
        d.tau.push_back(t);
        d.rho.push_back(r);
        s0 += r;
        s1 += r * t;
    }
    const double mean = s1 / s0;
    for (std::size_t i = 0; i < d.tau.size(); ++i) s2 += d.rho[i] * (d.tau[i] - mean) * (d.tau[i] - mean);
    const auto st = density_stats(d);
    CHECK(std::abs(st.mean - mean) < 1e-10);
    CHECK(std::abs(st.std_dev - std::sqrt(s2 / s0)) < 1e-10);

    const auto sym = normal_pdf(-2.0, 1.3, 801, 9.0);
    CHECK(std::abs(density_stats(sym).mean + 2.0) < 1e-12);
}

TEST_CASE("toa_sqm closed form") {
    AxisPacket sp(AxisKind::Space, 0.0, 0.1, 10.0, 1.0);
    DetectorSpec det{1.0, 1.0, 0.1};
    const auto r = toa_sqm(sp, det);
    CHECK(r.mean_arrival == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(r.sigma_bar == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(r.half_width / r.sigma_bar == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(r.std_dev == doctest::Approx(r.half_width).epsilon(1e-8));
    REQUIRE(r.warnings.size() == 1);  // p0 sigma_x = 1
    CHECK_NOTHROW(r.density.validate());

    AxisPacket wide(AxisKind::Space, 0.0, 0.1, 1e12, 1.0);
    CHECK(toa_sqm(wide, det).sigma_bar < 1e-7);
    CHECK(toa_sqm(wide, det).warnings.empty());

    CHECK_THROWS_AS(toa_sqm(sp, DetectorSpec{1.0, 1.0, 0.2}), ConfigError);
    CHECK_THROWS_AS(toa_sqm(sp, DetectorSpec{1.0, 1.0, -0.1}), ConfigError);
}

TEST_CASE("toa_tqm limits and variance sum") {
    const double m = 1.0, v = 0.1;
    AxisPacket sp(AxisKind::Space, 0.0, m * v, 200.0, m);
    DetectorSpec det{2000.0, m, v};
    const auto sqm = toa_sqm(sp, det);

    AxisPacket huge(AxisKind::Time, 0.0, m, 1e15, m);
    const auto lim = toa_tqm(huge, sp, det);
    CHECK(lim.sigma_total == doctest::Approx(sqm.sigma_total).epsilon(1e-12));

    AxisPacket tp(AxisKind::Time, 0.0, m, 37.0, m);
    const auto r = toa_tqm(tp, sp, det);
    CHECK(r.sigma_total * r.sigma_total ==
          doctest::Approx(r.sigma_tilde * r.sigma_tilde + r.sigma_bar * r.sigma_bar).epsilon(1e-15));

    // sigma_t = v sigma_x makes the two contributions equal
    AxisPacket sym(AxisKind::Time, 0.0, m, v * 200.0, m);
    const auto rs = toa_tqm(sym, sp, det);
    CHECK(rs.sigma_tilde == doctest::Approx(rs.sigma_bar).epsilon(1e-14));
    CHECK(rs.half_width == doctest::Approx(rs.sigma_bar).epsilon(1e-14));

    const double vs = 0.01;
    AxisPacket slow(AxisKind::Space, 0.0, m * vs, 300.0, m);
    AxisPacket same(AxisKind::Time, 0.0, m, 300.0, m);
    const auto rv = toa_tqm(same, slow, DetectorSpec{50.0, m, vs});
    CHECK(rv.sigma_bar / rv.sigma_tilde == doctest::Approx(1.0 / vs).epsilon(1e-12));
}

TEST_CASE("two-branch oracle: mean, normalization, warnings") {
    const double m = 1.0, v = 0.1, p0 = 0.1, sp = p0 / 20.0, sx = 1.0 / sp;
    AxisPacket pk(AxisKind::Space, 0.0, p0, sx, m);
    const double tbar = 10.0 * m * sx * sx;
    DetectorSpec det{v * tbar, m, v};
    const auto sqm = toa_sqm(pk, det, 1201);
    std::vector<std::string> warn;
    const auto ml = toa_muga_leavens(sample_momentum(pk, 12.0, 1601), det, sqm.density.tau, &warn);
    CHECK(warn.empty());
    CHECK_NOTHROW(ml.validate());
    CHECK(std::abs(density_stats(ml).mean / (m * det.position_L / p0) - 1.0) < 5e-3);

    AxisPacket slow(AxisKind::Space, 0.0, p0, 3.0 / p0, m);  // p0/sigma_p = 3
    const auto ms = sample_momentum(slow, 12.0, 801);
    toa_muga_leavens(ms, DetectorSpec{det.position_L, m, v}, sqm.density.tau, &warn);
    CHECK(warn.size() == 1);
}

TEST_CASE("two-branch oracle approaches the closed form as focus improves") {
    const double e10 = ml_l1(10.0, 10.0), e20 = ml_l1(20.0, 10.0), e40 = ml_l1(40.0, 10.0);
    MESSAGE("L1 at p0/sigma_p 10, 20, 40: " << e10 << " " << e20 << " " << e40);
    CHECK(e10 > e20);
    CHECK(e20 > e40);
}

TEST_CASE("grid experiment reproduces the summed arrival variance") {
    const double m = 1.0, v = 1.0;
    AxisPacket tp(AxisKind::Time, 0.0, m, 20.0, m);
    AxisPacket sp(AxisKind::Space, 0.0, m * v, 40.0, m);
    const double tbar = 10.0 * m * 40.0 * 40.0;
    DetectorSpec det{v * tbar, m, v};
    const auto r = toa_grid_experiment(tp, sp, det);
    MESSAGE("grid variance " << r.variance << " closed " << r.variance_closed);
    CHECK(r.sigma_bar == doctest::Approx(400.0));
    CHECK(r.sigma_tilde == doctest::Approx(800.0));
    CHECK(std::abs(r.variance / r.variance_closed - 1.0) < 0.01);
    // the 1/|f| amplitude decay biases the mean slightly early
    CHECK(std::abs(r.mean - tbar) < 0.05 * std::sqrt(r.variance_closed));
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "tqm/kernels.hpp"

using namespace tqm;

TEST_CASE("momentum kernel: identity, on-shell, semigroup") {
    const double m = 1.4;
    Vec4 off{2.0, 0.3, -0.1, 0.5};
    CHECK(std::abs(tqm_kernel_momentum(off, 0.0, m) - 1.0) < 1e-15);
    Vec4 on{std::sqrt(m * m + 0.09 + 0.01 + 0.25), 0.3, -0.1, 0.5};
    for (double tau : {1.0, 17.0, 1e4}) CHECK(std::abs(tqm_kernel_momentum(on, tau, m) - 1.0) < 1e-10);
    for (double t1 : {0.3, 2.0})
        for (double t2 : {0.1, 5.0})
            CHECK(std::abs(tqm_kernel_momentum(off, t1, m) * tqm_kernel_momentum(off, t2, m) -
                           tqm_kernel_momentum(off, t1 + t2, m)) < 1e-12);
}

TEST_CASE("coordinate kernel is retarded") {
    Vec4 a{1, 2, 3, 4}, b{0, 0, 0, 0};
    CHECK(tqm_kernel_coordinate(a, b, 0.0, 1.0) == cplx(0.0));
    CHECK(tqm_kernel_coordinate(a, b, -1.0, 1.0) == cplx(0.0));
    CHECK(tqm_kernel_time(1.0, -2.0, 1.0) == cplx(0.0));
    CHECK(tqm_kernel_space(1.0, 0.0, 1.0) == cplx(0.0));
}

TEST_CASE("full kernel is the product of axis kernels and the rest-mass phase") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double m = 0.8;
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        Vec4 x1{u(rng), u(rng), u(rng), u(rng)}, x0{u(rng), u(rng), u(rng), u(rng)};
        const double tau = 0.2 + std::abs(u(rng));
        cplx prod = rest_mass_phase(m, tau) * tqm_kernel_time(x1[0] - x0[0], tau, m);
        for (int i = 1; i < 4; ++i) prod *= tqm_kernel_space(x1[i] - x0[i], tau, m);
        const cplx full = tqm_kernel_coordinate(x1, x0, tau, m);
        worst = std::max(worst, std::abs(full - prod) / std::abs(full));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("axis kernels applied by quadrature reproduce the closed-form packet") {
    const double m = 1.0, tau = 1.0;
    for (auto kind : {AxisKind::Time, AxisKind::Space}) {
        AxisPacket p(kind, 0.2, 0.7, 1.0, m);
        const double h = 0.004;
        double worst = 0.0;
        for (double x = -4.0; x <= 4.0; x += 0.5) {
            cplx acc = 0.0;
            for (double y = -12.0; y <= 12.0 + 1e-12; y += h) {
                const cplx k = kind == AxisKind::Time ? tqm_kernel_time(x - y, tau, m) : tqm_kernel_space(x - y, tau, m);
                acc += k * evaluate_position(p, 0.0, y);
            }
            acc *= h;
            worst = std::max(worst, std::abs(acc - evaluate_position(p, tau, x)));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("coordinate kernels compose") {
    // int dy K_{t2}(x - y) K_{t1}(y - x0) along the steepest-descent line through the
    // stationary point; the integrand is entire, so the rotated contour is exact
    const double m = 1.0;
    for (auto kind : {AxisKind::Time, AxisKind::Space}) {
        const double s = kind == AxisKind::Time ? -1.0 : 1.0;
        for (auto [t1, t2, x, x0] : {std::array<double, 4>{0.5, 0.7, 1.0, -0.3}, {1.0, 2.0, 3.0, 0.5}, {0.2, 0.2, 0.0, 0.4}}) {
            const double ys = (x * t1 + x0 * t2) / (t1 + t2);
            const cplx dir = std::exp(cplx(0.0, s * pi / 4.0));
            const double h = 0.002;
            cplx acc = 0.0;
            for (double u = -12.0; u <= 12.0 + 1e-12; u += h) {
                const cplx y = ys + dir * u;
                auto ker = [&](cplx d, double tau) {
                    return kind == AxisKind::Time
                               ? std::sqrt(I * m / (2 * pi * tau)) * std::exp(-I * m * d * d / (2 * tau))
                               : std::sqrt(-I * m / (2 * pi * tau)) * std::exp(I * m * d * d / (2 * tau));
                };
                acc += ker(x - y, t2) * ker(y - x0, t1);
            }
            acc *= dir * h;
            const cplx direct = kind == AxisKind::Time ? tqm_kernel_time(x - x0, t1 + t2, m) : tqm_kernel_space(x - x0, t1 + t2, m);
            CHECK(std::abs(acc - direct) < 1e-6);
        }
    }
}

TEST_CASE("SQM relativistic phase expansion") {
    const double m = 2.0;
    KernelSpec o0{Flavor::SQM, m, 0}, o1{Flavor::SQM, m, 1}, o2{Flavor::SQM, m, 2};
    Vec3 k{0.3, -0.2, 0.1};
    for (double tau : {0.5, 3.0})
        CHECK(std::abs(sqm_relativistic_phase(k, tau, o0) - std::exp(cplx(0, -m * tau))) < 1e-15);
    const double k2 = 0.14;
    CHECK(std::abs((sqm_omega(k, o1) - sqm_omega(k, o2)) - k2 * k2 / (8 * m * m * m)) < 1e-15);
    // |k|/m = 0.2: order-2 error is about m x^6/16
    Vec3 kk{0.4, 0.0, 0.0};
    const double x = 0.2;
    for (double tau : {1.0, 10.0}) {
        const double err = std::abs(sqm_omega(kk, o2) - sqm_omega_exact(kk, m)) * tau;
        CHECK(err < std::pow(x, 6) * tau * m);
        CHECK(err > 0.0);
    }
    KernelSpec bad{Flavor::TQM, m, 1};
    CHECK_THROWS_AS(sqm_omega(k, bad), ConfigError);
}

TEST_CASE("TQM kernel equals SQM kernel times exp(i w^2 tau/2m) up to the rest-mass phase") {
    const double m = 1.3;
    KernelSpec o1{Flavor::SQM, m, 1};
    double worst = 0.0;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double w = u(rng), tau = std::abs(u(rng)) * 3;
        Vec3 k{u(rng), u(rng), u(rng)};
        const cplx tqm = tqm_kernel_momentum({w, k[0], k[1], k[2]}, tau, m);
        const cplx sqm = sqm_relativistic_phase(k, tau, o1) * std::exp(cplx(0, w * w * tau / (2 * m))) *
                         std::exp(cplx(0, m * tau / 2));
        worst = std::max(worst, std::abs(tqm - sqm));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("single discrete step is normalized and matches the closed form") {
    const double m = 1.0, eps = 0.5;
    StepGrid g{-20.0, 20.0, 4001};
    for (auto kind : {AxisKind::Time, AxisKind::Space}) {
        AxisPacket p(kind, 0.0, 0.5, 1.0, m);
        auto one = single_step_propagate(p, eps, g, 1);
        CHECK(sampled_norm(one, g.spacing()) == doctest::Approx(1.0).epsilon(1e-8));
        double worst = 0.0;
        for (std::size_t i = 0; i < g.count; ++i)
            worst = std::max(worst, std::abs(one[i] - evaluate_position(p, eps, g.coord(i))));
        CHECK(worst < 1e-6);
        auto four = single_step_propagate(p, eps, g, 4);
        worst = 0.0;
        for (std::size_t i = 0; i < g.count; ++i)
            worst = std::max(worst, std::abs(four[i] - evaluate_position(p, 4 * eps, g.coord(i))));
        CHECK(worst < 1e-5);
        CHECK(sampled_norm(four, g.spacing()) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("single step refuses unresolved grids") {
    AxisPacket p(AxisKind::Space, 0.0, 0.0, 1.0, 1.0);
    CHECK_THROWS_AS(single_step_propagate(p, 0.5, StepGrid{-20, 20, 41}, 1), ValidityError);
    CHECK_THROWS_AS(single_step_propagate(p, 0.001, StepGrid{-20, 20, 4001}, 1), ValidityError);
    CHECK_THROWS_AS(single_step_propagate(p, -1.0, StepGrid{-20, 20, 4001}, 1), ConfigError);
}

TEST_CASE("classical trajectory: free motion is a straight line") {
    Vec4 x0{0, 1, 2, 3}, v0{1.2, 0.3, -0.4, 0.5};
    auto tr = classical_trajectory(x0, v0, {0, 0, 0}, {0, 0, 0}, 1.0, 1.0, 0.0, 10.0, 100);
    REQUIRE(tr.samples.size() == 101);
    double worst = 0.0;
    for (const auto& s : tr.samples)
        for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(s.x[i] - (x0[i] + v0[i] * s.tau)));
    CHECK(worst < 1e-12);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].tau > tr.samples[i - 1].tau);
}

TEST_CASE("classical trajectory: constant E gives hyperbolic motion") {
    const double q = 1.0, m = 2.0, E = 0.5;
    const double tau = 2.0 * m / (q * E);
    auto tr = classical_trajectory({0, 0, 0, 0}, {1, 0, 0, 0}, {E, 0, 0}, {0, 0, 0}, q, m, 0.0, tau, 2000);
    const auto& end = tr.samples.back();
    const double a = q * E / m;
    CHECK(end.tau == doctest::Approx(tau));
    CHECK(std::abs(end.xdot[0] / std::cosh(a * tau) - 1.0) < 1e-6);
    CHECK(std::abs(end.xdot[1] / std::sinh(a * tau) - 1.0) < 1e-6);
    CHECK(std::abs(end.x[0] / (std::sinh(a * tau) / a) - 1.0) < 1e-6);
}

TEST_CASE("classical trajectory: magnetic field conserves the four-velocity square") {
    Vec4 v0{1.5, 0.4, 0.2, -0.3};
    auto tr = classical_trajectory({0, 0, 0, 0}, v0, {0, 0, 0}, {0.3, -0.5, 1.0}, 1.0, 1.0, 0.0, 50.0, 5000);
    const double inv0 = v0[0] * v0[0] - v0[1] * v0[1] - v0[2] * v0[2] - v0[3] * v0[3];
    double worst = 0.0;
    for (const auto& s : tr.samples)
        worst = std::max(worst, std::abs(minkowski_square(s.xdot) - inv0));
    CHECK(worst < 1e-8);
}

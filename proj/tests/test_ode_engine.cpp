#include <doctest.h>

#include <cmath>
#include <random>

#include "p1/borel_engine.hpp"
#include "p1/errors.hpp"
#include "p1/ode_engine.hpp"
#include "p1/series_core.hpp"

using namespace p1;

namespace {

cplx rnd(std::mt19937& g, double s)
{
    std::uniform_real_distribution<double> u(-s, s);
    return {u(g), u(g)};
}

HState borel_h0(const ContinuedGerm& H0, cplx x)
{
    const double phi = -std::arg(x);
    return {laplace_ray(H0, phi, x).value, laplace_ray(H0, phi, x, {}, 1).value};
}

} // namespace

TEST_CASE("rhs_h basics")
{
    CHECK(std::abs(rhs_h(1.0, 0.0, 0.0) - 392.0 / 625.0) < 1e-15);
    CHECK(std::abs(rhs_h(1e4, 0.0, 0.0)) < 1e-16);
    CHECK_THROWS_AS(rhs_h(0.0, 1.0, 1.0), Error);
}

TEST_CASE("truncated h0 leaves a residual of the first omitted order")
{
    const auto s = h0_series(20);
    const cplx x = 10.0;
    // Second derivative of the truncated series by hand.
    cplx h2 = 0.0;
    for (std::size_t j = 0; j < s.coeffs.size(); ++j) {
        const double m = -0.5 * s.exponent_half(j);
        h2 += to_double(s.coeffs[j]) * m * (m + 1) * std::pow(x, -m - 2);
    }
    const cplx res = h2 - rhs_h(x, s.eval(x), s.eval_derivative(x));
    // The missing x^{-22} balance is (20^2 c20) x^{-22}, up to quadratic cross terms.
    const double lead = 400.0 * std::abs(to_double(s.coeffs.back())) * std::pow(10.0, -22);
    CHECK(std::abs(res) > 0.5 * lead);
    CHECK(std::abs(res) < 2.0 * lead);
}

TEST_CASE("normal form conjugation and closed-form g")
{
    std::mt19937 gen(7);
    for (int i = 0; i < 20; ++i) {
        const cplx x = 3.0 + rnd(gen, 2.0);
        const HState s{rnd(gen, 0.5), rnd(gen, 0.5)};
        const Vec2 y = h_to_y(x, s);
        const HState back = y_to_h(x, y);
        CHECK(std::abs(back.h - s.h) < 1e-14);
        CHECK(std::abs(back.hp - s.hp) < 1e-14);
        // d/dx (M y) = M' y + M y' must reproduce (h', h'').
        const Vec2 yp = rhs_y(x, y);
        const HState My = y_to_h(x, yp);
        const cplx qp = -0.25 / (x * x);
        const cplx dh = My.h + 0.5 * qp * (-y[0] + y[1]);
        const cplx dhp = My.hp + 0.5 * qp * (-y[0] - y[1]);
        CHECK(std::abs(dh - s.hp) < 1e-12);
        CHECK(std::abs(dhp - rhs_h(x, s.h, s.hp)) < 1e-12);
    }
    const double x = 10.0;
    const cplx g1 = g_nonlinear(x, {0.0, 0.0})[0];
    CHECK(g1.real() == doctest::Approx(-(1568.0 / 625.0) * (4 * x + 1) / ((16 * x * x + 1) * x * x * x)));
    CHECK_THROWS_AS(h_to_y(cplx(0.0, 0.25), {1.0, 1.0}), Error);
}

TEST_CASE("g is small near the origin of (1/x, y)")
{
    std::mt19937 gen(3);
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const cplx x = 1.0 / eps;
        const Vec2 y{rnd(gen, eps), rnd(gen, eps)};
        const Vec2 g = g_nonlinear(x, y);
        const double bound = std::pow(eps, 4) + eps * eps * eps + eps * eps;
        CHECK(std::abs(g[0]) < 10 * bound);
        CHECK(std::abs(g[1]) < 10 * bound);
    }
}

TEST_CASE("e-chart equation is the h equation in disguise")
{
    std::mt19937 gen(11);
    for (int i = 0; i < 20; ++i) {
        const cplx x = 4.0 + rnd(gen, 2.0);
        const cplx h = rnd(gen, 20.0), hp = rnd(gen, 20.0);
        const auto e = h_to_e(h, hp);
        const cplx d = 3.0 + h;
        const cplx epp = -9.0 * rhs_h(x, h, hp) / (d * d) + 18.0 * hp * hp / (d * d * d);
        CHECK(std::abs(rhs_e(x, e[0], e[1]) - epp) < 1e-11 * (1.0 + std::abs(epp)));
        const HState b = e_to_h(e[0], e[1]);
        CHECK(std::abs(b.h - h) < 1e-12 * std::abs(h));
        CHECK(std::abs(b.hp - hp) < 1e-12 * std::abs(hp) + 1e-12);
    }
}

TEST_CASE("Boutroux map")
{
    // h = 0 on the positive axis: y = i sqrt(z/6)(1 - 4/(25 x^2)) with arg z = -pi/5.
    const cplx x = 40.0;
    const auto z = map_x_to_z(x, {0.0, 0.0});
    CHECK(std::arg(z.z) == doctest::Approx(-kPi / 5));
    CHECK(std::abs(z.y - cplx(0, 1) * std::sqrt(z.z / 6.0) * (1.0 - 4.0 / (25.0 * 1600.0))) < 1e-14);
    // Sector map.
    CHECK(std::arg(map_x_to_z(std::polar(5.0, kPi / 2), {0, 0}).z) == doctest::Approx(kPi / 5));
    CHECK(std::arg(map_x_to_z(std::polar(5.0, -kPi / 2), {0, 0}).z) == doctest::Approx(-3 * kPi / 5));
    std::mt19937 gen(5);
    for (int i = 0; i < 10; ++i) {
        const cplx xx = std::polar(8.0 + 2.0 * i, -2.0 + 0.4 * i);
        const HState s{rnd(gen, 1.0), rnd(gen, 1.0)};
        const auto [xb, sb] = map_z_to_x(map_x_to_z(xx, s));
        CHECK(std::abs(xb - xx) < 1e-12 * std::abs(xx));
        CHECK(std::abs(sb.h - s.h) < 1e-11);
        CHECK(std::abs(sb.hp - s.hp) < 1e-11);
    }
    // Painleve I itself: finite differences of y(z) along the map.
    const HState s{0.1, -0.05};
    const auto a = map_x_to_z(7.0, s);
    CHECK_THROWS_AS(map_z_to_x({a.z * std::polar(1.0, 2.8), a.y, a.yp}), Error);
}

TEST_CASE("tritronquee along arg pi/4 matches the Borel sum")
{
    ContinuedGerm H0(solve_H0_convolution(200));
    const cplx xa = std::polar(30.0, kPi / 4), xb = std::polar(10.0, kPi / 4);
    const HState sa = borel_h0(H0, xa), sb = borel_h0(H0, xb);
    IntegrateOptions opt;
    opt.rtol = 1e-13;
    const auto t = integrate_path(xa, sa, Path(xa).line_to(xb), opt);
    // Inward along this ray the e^{-x} mode grows by e^{14}, which caps the relative accuracy.
    CHECK(std::abs(t.back().s.h - sb.h) < 1e-8);
    CHECK(std::abs(t.back().s.h - sb.h) < 1e-7 * std::abs(sb.h));
    CHECK(std::abs(t.back().s.hp - sb.hp) < 1e-7 * std::abs(sb.hp));
    CHECK(t.chart_switches == 0);

    // Halving the tolerance does not make things worse.
    IntegrateOptions loose;
    loose.rtol = 1e-7;
    loose.atol = 1e-9;
    IntegrateOptions tight = loose;
    tight.rtol /= 16;
    tight.atol /= 16;
    const double el = std::abs(integrate_path(xa, sa, Path(xa).line_to(xb), loose).back().s.h - sb.h);
    const double et = std::abs(integrate_path(xa, sa, Path(xa).line_to(xb), tight).back().s.h - sb.h);
    CHECK(et < 0.5 * el);
}

TEST_CASE("reflection symmetry of the tritronquee")
{
    // Seed just right of the imaginary axis and cross it; the e^{-x} mode only grows by e^{8}.
    ContinuedGerm H0(solve_H0_convolution(200));
    const double th = kPi / 2 - 0.2;
    const cplx xa = std::polar(20.0, th);
    const HState sa = borel_h0(H0, xa);
    const auto b = integrate_path(xa, sa, Path(xa).arc_to(kPi - th));
    // h(x) = conj(h(-conj x))
    CHECK(std::abs(b.back().s.h - std::conj(sa.h)) < 1e-9 * std::abs(sa.h));
    CHECK(std::abs(b.back().s.hp + std::conj(sa.hp)) < 1e-8 * std::abs(sa.hp));
}

TEST_CASE("zero-length path and energy drift")
{
    const cplx x0(12.0, 3.0);
    const HState s{1e-3, 2e-3};
    const auto t = integrate_path(x0, s, Path(x0));
    CHECK(t.samples.size() == 1);
    CHECK(detect_poles(t).empty());

    // s = h'^2 - h^2 - h^3/3 changes slowly on a pole-free stretch.
    const cplx x1(12.0, 13.0);
    const HState s0{0.3, 0.1};
    const auto u = integrate_path(x0, s0, Path(x0).line_to(x1));
    auto energy = [](const HState& q) { return q.hp * q.hp - q.h * q.h - q.h * q.h * q.h / 3.0; };
    double worst = 0.0;
    const double len = std::abs(x1 - x0);
    for (const auto& sm : u.samples)
        worst = std::max(worst, std::abs(energy(sm.s) - energy(s0)));
    // d s / dx = -2 h'^2 / x + O(x^{-4}); the bound uses |h'| <= 1 on this stretch.
    CHECK(worst < 2.0 * len / std::abs(x0));
}

TEST_CASE("poles of a C = 1 tronquee")
{
    TransseriesGerms G(6, 200, 120);
    const cplx x0 = std::polar(12.0, 1.0);
    const auto s = sum_transseries(G, 1.0, -1.0, x0, 6);
    const cplx x1(-4.2, x0.imag()), x2(-4.2, 40.0);
    const auto t = integrate_path(x0, {s.value, s.derivative}, Path(x0).line_to(x1).line_to(x2));
    CHECK(t.chart_switches >= 2);
    const auto poles = detect_poles(t);
    REQUIRE(!poles.empty());
    for (const auto& p : poles) {
        CHECK(p.witness < 1e-10);
        CHECK(std::abs(p.laurent_a - 12.0) < 1e-4);
        const cplx xi = std::exp(-p.x) / std::sqrt(p.x);
        MESSAGE("pole " << p.x << " xi " << xi);
        CHECK(std::abs(xi) > 6.0);
        CHECK(std::abs(xi) < 24.0);
    }
}

TEST_CASE("far field seed")
{
    const auto a = far_field_init(0.0, std::polar(30.0, 0.5), 80, 2);
    ContinuedGerm H0(solve_H0_convolution(200));
    const HState b = borel_h0(H0, std::polar(30.0, 0.5));
    CHECK(std::abs(a.s.h - b.h) < 10 * a.err);
    CHECK(!a.warn);
    const auto c = far_field_init(1.0, 5.0 * std::polar(1.0, 0.3), 80, 2);
    CHECK(c.warn);
    CHECK_THROWS_AS(far_field_init(1.0, 30.0), Error);
}

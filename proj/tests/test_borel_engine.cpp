#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "p1/borel_engine.hpp"
#include "p1/errors.hpp"

using namespace p1;

namespace {

const double kMuAbs = std::sqrt(6.0 / (5.0 * kPi));

// Classical RK4 on a straight segment, used as an independent oracle.
template <class F>
cplx rk4_segment(F&& f, cplx x0, cplx y, cplx x1, int steps)
{
    const cplx h = (x1 - x0) / double(steps);
    cplx x = x0;
    for (int i = 0; i < steps; ++i) {
        const cplx k1 = f(x, y);
        const cplx k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
        const cplx k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
        const cplx k4 = f(x + h, y + h * k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += h;
    }
    return y;
}

} // namespace

TEST_CASE("H0 from the Borel-plane equation matches the transform of h0")
{
    const int N = 200;
    const auto a = solve_H0_convolution(N);
    const auto b = borel_transform(h0_series(N), 8);
    REQUIRE(a.lead_half == 6);
    REQUIRE(a.exact.size() == b.exact.size());
    for (std::size_t i = 0; i < a.exact.size(); ++i)
        REQUIRE(a.exact[i] == b.exact[i]);
    CHECK(a.exact[0] == Q(-196, 1875));
    for (std::size_t i = 1; i < a.exact.size(); i += 2)
        REQUIRE(a.exact[i] == 0);
}

TEST_CASE("level germs")
{
    const auto ts = build_transseries(2, 20);
    const auto g1 = germ_Hk(ts, 1);
    CHECK(g1.lead_half == -1);
    CHECK(g1.inv_sqrt_pi);
    CHECK(g1.exact.at(0) == 1);
    CHECK(g1.coeffs.at(0).real() == doctest::Approx(1.0 / std::sqrt(kPi)));
    const auto g2 = germ_Hk(ts, 2);
    CHECK(g2.lead_half == 0);
    CHECK_THROWS_AS(germ_Hk(ts, 0), Error);
}

TEST_CASE("monomial convolution and nonlinear toy")
{
    CHECK(monomial_convolution(1, 1) == Q(1, 6));
    CHECK(monomial_convolution(2, 3) == Q(1, 60));
    const auto t = toy_fixtures(40);
    // Y = p/(1-p) + O(p^7); the first correction at p^7 is 1/5040 (p*p*p*p).
    for (int n = 1; n <= 6; ++n)
        CHECK(t.nonlinear.exact[n] == 1);
    CHECK(t.nonlinear.exact[7] == Q(1) + Q(1, 5040));
    // Singularity at p = 1: coefficients tend to a constant Y_inf.
    const double r = to_double(t.nonlinear.exact[40] / t.nonlinear.exact[39]);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("conformal continuation reproduces closed forms")
{
    const auto t = toy_fixtures(120);
    ContinuedGerm g(t.linear);
    for (cplx p : {cplx(0.3, 0.2), cplx(2.0, -1.0), cplx(-3.0, 0.5), cplx(1.5, 0.1)}) {
        double err = 0;
        const cplx v = g.eval(p, &err);
        CHECK(std::abs(v - p / (1.0 - p)) < 1e-9 * std::abs(p / (1.0 - p)) + err);
    }
}

TEST_CASE("laplace_ray on the linear toy against an ODE oracle")
{
    // y' + y = 1/x^2. The Borel sum below the positive axis is seeded on the
    // antistokes line x = 60i by the optimally truncated series, then transported.
    const auto t = toy_fixtures(200);
    ContinuedGerm g(t.linear);
    const cplx x = std::polar(10.0, kPi / 4);
    const auto r = laplace_ray(g, -kPi / 4, x);

    const cplx xs(0.0, 60.0);
    cplx y = 0.0, term = 1.0 / (xs * xs);
    for (int n = 2; n < 60; ++n) {
        y += term;
        term *= double(n) / xs;
    }
    auto f = [](cplx x, cplx y) { return -y + 1.0 / (x * x); };
    const cplx oracle = rk4_segment(f, xs, y, x, 4000);
    CHECK(std::abs(r.value - oracle) < 1e-10 * std::abs(oracle));

    // Same quadrant, other angle.
    const auto r2 = laplace_ray(g, -kPi / 3, x);
    CHECK(std::abs(r.value - r2.value) < 1e-11 * std::abs(oracle));
}

TEST_CASE("linear toy jump is a residue")
{
    const auto t = toy_fixtures(200);
    ContinuedGerm g(t.linear);
    const double x = 6.0;
    // Rays below and above the positive axis give y+ and y-.
    const cplx yp = laplace_ray(g, -kPi / 4, x).value;
    const cplx ym = laplace_ray(g, kPi / 4, x).value;
    const cplx expect = -std::exp(-x);  // residue of e^{-px} p/(1-p) at p = 1
    CHECK(std::abs((yp - ym) / cplx(0.0, 2.0 * kPi) - expect) < 1e-12);
    const auto h = jump_via_hankel(g, x);
    CHECK(std::abs(h.value / cplx(0.0, 2.0 * kPi) - expect) < 1e-12);
}

TEST_CASE("zero germ and refused directions")
{
    BorelGerm z;
    z.lead_half = 2;
    z.exact.assign(10, Q(0));
    z.refresh_numeric();
    ContinuedGerm g(z);
    CHECK(laplace_ray(g, -0.5, cplx(10.0, 3.0)).value == cplx(0.0));
    CHECK(jump_via_hankel(g, 10.0).value == cplx(0.0));
    CHECK_THROWS_AS(laplace_ray(g, 0.0, cplx(10.0, 0.0)), Error);
    try {
        laplace_ray(g, 0.0, cplx(10.0, 0.0));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StokesDirection);
    }
}

TEST_CASE("estimate_S calibration")
{
    const int N = 200;
    std::vector<cplx> c(N);
    const cplx S0(2.0, 1.0);
    double b = 1.0;
    for (int n = 0; n < N; ++n) {
        c[n] = S0 * b;  // S0 C(2n,n)/4^n
        b *= (2.0 * n + 1.0) / (2.0 * n + 2.0);
    }
    const auto s = estimate_S(germ_from_numeric(0, c));
    CHECK(std::abs(s.S - S0) < 1e-8);
    CHECK(std::abs(s.S - S0) < 10 * s.err + 1e-12);

    std::vector<cplx> d(N);
    for (int n = 0; n < N; ++n)
        d[n] = std::pow(0.5, n) / std::sqrt(n + 1.0);
    CHECK_THROWS_AS(estimate_S(germ_from_numeric(0, d)), Error);
}

TEST_CASE("S for H0 and the jump")
{
    const auto H0 = solve_H0_convolution(200);
    const auto s = estimate_S(H0);
    // |S| sqrt(pi) 2 = |mu|
    CHECK(std::abs(std::abs(s.S) * 2.0 * std::sqrt(kPi) - kMuAbs) < 1e-3 * kMuAbs);
    CHECK(s.err < 1e-6);
    MESSAGE("S = " << s.S << " +- " << s.err);
    CHECK(s.radius == doctest::Approx(1.0).epsilon(1e-2));

    ContinuedGerm g(H0);
    const double x = 12.0;
    const cplx jp = laplace_ray(g, -kPi / 4, x).value - laplace_ray(g, kPi / 4, x).value;
    const auto jh = jump_via_hankel(g, x);
    CHECK(std::abs(jp - jh.value) < 1e-10 * std::abs(jp));
    // Leading behaviour -2i sqrt(pi) S e^{-x} x^{-1/2} (1 - 1/(8x) + ...).
    const cplx lead = cplx(0.0, -2.0 * std::sqrt(kPi)) * s.S * std::exp(-x) / std::sqrt(x);
    CHECK(std::abs(jp / lead - 1.0) < 0.02);
}

TEST_CASE("laplace_ray of H0 is direction independent within a quadrant")
{
    ContinuedGerm g(solve_H0_convolution(200));
    const cplx x = std::polar(20.0, 0.5);
    const cplx a = laplace_ray(g, -0.3, x).value;
    const cplx b = laplace_ray(g, -0.9, x).value;
    CHECK(std::abs(a - b) < 1e-9 * std::abs(a));
    // The Borel sum sits within the optimal truncation error (about e^{-|x|}) of the series.
    const auto h = h0_series(40);
    CHECK(std::abs(a - h.eval(x, 17)) < 1e-8);
}

TEST_CASE("remainder mode")
{
    ContinuedGerm g(solve_H0_convolution(200));
    const cplx x = std::polar(30.0, 0.4);
    const int K = 6;
    const cplx full = laplace_ray(g, -0.4, x).value;
    const cplx rem = laplace_ray_remainder(g, -0.4, x, K).value;
    const auto h = h0_series(K);
    CHECK(std::abs(full - h.eval(x) - rem) < 1e-9 * std::abs(full));
    // Leading remainder term c8 x^{-8}.
    const cplx c8 = to_double(h0_series(8).coeffs.back()) * std::pow(x, -8.0);
    CHECK(std::abs(rem / c8 - 1.0) < 0.2);
}

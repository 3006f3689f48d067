#include <doctest.h>

#include <cmath>

#include "p1/cycle_dynamics.hpp"
#include "p1/errors.hpp"

using namespace p1;

namespace {

const cplx I(0.0, 1.0);

// k-th derivative from M samples on a circle of radius r (exact for polynomials of degree < M).
template <class F>
cplx circle_derivative(F f, cplx s, int k, double r = 0.02, int M = 32)
{
    cplx acc = 0.0;
    for (int j = 0; j < M; ++j) {
        const cplx e = std::exp(I * (2 * kPi * j / M));
        acc += f(s + r * e) / std::pow(e, k);
    }
    return acc * std::tgamma(k + 1.0) / (M * std::pow(r, k));
}

cplx J(cplx s) { return cycle_J(s).value; }
cplx L(cplx s) { return cycle_L(s).value; }

std::vector<cplx> test_grid()
{
    std::vector<cplx> g;
    for (int k = 0; k < 20; ++k)
        g.push_back(-2.0 / 3.0 + 0.5 * std::exp(I * (2 * kPi * (k + 0.5) / 20)));
    return g;
}

// Integral of R around the two roots that meet at s = 0, by a plain circle.
cplx vanishing_cycle(cplx s)
{
    const auto c = cubic_data(s);
    const cplx m = 0.5 * (c.enclosed[1] + c.excluded);
    const double r = 0.5 * (std::abs(c.excluded - m) + std::abs(c.enclosed[0] - m));
    const int n = 4096;
    const cplx u0 = m + r;
    cplx sum = 0.0, R = std::sqrt(u0 * u0 * (u0 / 3.0 + 1.0) + s);
    for (int k = 0; k < n; ++k) {
        const cplx e = std::exp(I * (2 * kPi * k / n));
        const cplx u = m + r * e;
        cplx Rk = std::sqrt(u * u * (u / 3.0 + 1.0) + s);
        if (std::abs(Rk - R) > std::abs(Rk + R))
            Rk = -Rk;
        R = Rk;
        sum += R * I * r * e;
    }
    return sum * (2 * kPi / n);
}

} // namespace

TEST_CASE("cubic roots and guards")
{
    const auto c = cubic_data(-2.0 / 3.0 + 0.1 * I);
    for (cplx r : {c.enclosed[0], c.enclosed[1], c.excluded})
        CHECK(std::abs(r * r * (r / 3.0 + 1.0) + c.s) < 1e-13);
    CHECK(std::abs(c.enclosed[0] + 3.0) < 1.0);

    for (cplx s : {cplx(0.0), cplx(0.005), cplx(-4.0 / 3.0)}) {
        try {
            cycle_J(s);
            FAIL("expected DegenerateCycle");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateCycle);
        }
    }
    // The labelling is cut along s > 0.
    CHECK_THROWS_AS(cycle_J(0.3), Error);

    // Root continuity: small steps in s move the roots by a bounded multiple of the step.
    auto prev = cubic_data(-0.3 + 0.2 * I);
    for (int k = 1; k <= 20; ++k) {
        const cplx s = -0.3 + 0.2 * I + 0.01 * k * std::exp(I * 0.7);
        const auto next = track_roots(s, prev);
        const double jump = std::max({std::abs(next.enclosed[0] - prev.enclosed[0]),
                                      std::abs(next.enclosed[1] - prev.enclosed[1]),
                                      std::abs(next.excluded - prev.excluded)});
        CHECK(jump < 5 * 0.01);
        prev = next;
    }
}

TEST_CASE("L = 2 J'")
{
    for (cplx s : {cplx(-0.5), cplx(-0.67, 0.5), cplx(-1.1, -0.3), cplx(0.2, 0.3)})
        CHECK(std::abs(L(s) - 2.0 * circle_derivative(J, s, 1)) < 1e-8);
}

TEST_CASE("Picard-Fuchs equations on a grid")
{
    for (cplx s : test_grid()) {
        const cplx j2 = circle_derivative(J, s, 2);
        CHECK(std::abs(j2 + 0.25 * rho(s) * J(s)) < 1e-6);
        const cplx drho = -rho(s) * (1.0 / s + 3.0 / (3.0 * s + 4.0));
        const cplx l1 = circle_derivative(L, s, 1), l2 = circle_derivative(L, s, 2);
        CHECK(std::abs(l2 - drho / rho(s) * l1 + 0.25 * rho(s) * L(s)) < 1e-6);
    }
}

TEST_CASE("contour independence")
{
    const auto c = cubic_data(-0.4 + 0.2 * I);
    const Cycle a = make_cycle(c);
    Cycle b = a;
    b.b = a.b * 1.3;
    b.apex = a.apex + 0.05 * (c.excluded - a.apex);
    CHECK(std::abs(cycle_J(c, a).value - cycle_J(c, b).value) < 1e-12);
    CHECK(std::abs(cycle_L(c, a).value - cycle_L(c, b).value) < 1e-12);
}

TEST_CASE("J_hat and the Wronskian")
{
    const auto z = J_hat(0.0);
    CHECK(std::abs(z[0]) == 0.0);
    CHECK(std::abs(z[1] - 1.0) < 1e-15);

    // J_hat is proportional to the cycle that vanishes at s = 0.
    const cplx r0 = vanishing_cycle(-0.1) / J_hat(-0.1)[0];
    for (cplx s : {cplx(-0.3, 0.2), cplx(0.2, 0.1), cplx(0.5, -0.9), cplx(-0.9, 0.6)}) {
        const cplx r = vanishing_cycle(s) / J_hat(s)[0];
        CHECK(std::min(std::abs(r - r0), std::abs(r + r0)) < 1e-9 * std::abs(r0));
    }

    // Wronskian: J(0) = 2 int_{-3}^0 u sqrt(1 + u/3) du = -24/5 on this cycle.
    std::vector<cplx> path;
    for (int k = 0; k <= 30; ++k)
        path.push_back(-0.1 + (-1.1 + 0.5 * I + 0.1) * (k / 30.0));
    const auto t = solve_J_ode(path);
    CHECK(t.wronskian_variation < 1e-9);
    CHECK(std::abs(t.kappa0 + 24.0 / 5.0) < 1e-12);
    for (const auto& r : t.rows)
        CHECK(r.match < 1e-8);
    CHECK_THROWS_AS(solve_J_ode(path, 1e-30), Error);
}

TEST_CASE("Poincare step")
{
    const cplx x0 = 50.0 * std::exp(-I * (kPi / 2 * 1.05));
    const cplx s0 = -0.1;
    StepOptions aut;
    aut.autonomous = true;
    const auto a = poincare_step(x0, s0, aut);
    CHECK(a.s == s0);
    CHECK(std::abs(a.x - x0 - L(s0)) < 1e-9);

    double prev_ds = 1e9, prev_dx = 1e9;
    for (double X : {50.0, 100.0, 200.0}) {
        const cplx x = X * std::exp(-I * (kPi / 2 * 1.05));
        const auto p = poincare_step(x, s0);
        const cplx s_lead = s0 - 2.0 * J(s0) / x, x_lead = x + L(s0);
        const double ds = std::abs(p.s - s_lead) / std::abs(s_lead - s0);
        const double dx = std::abs(p.x - x_lead) / std::abs(L(s0));
        CHECK(ds < 0.2);
        CHECK(dx < 0.2);
        CHECK(ds < prev_ds);
        CHECK(dx < prev_dx);
        prev_ds = ds;
        prev_dx = dx;
    }
}

TEST_CASE("adiabatic invariants")
{
    const auto r50 = run_cycles(50.0 * std::exp(-I * (kPi / 2 * 1.05)), -0.1, 25);
    const auto r100 = run_cycles(100.0 * std::exp(-I * (kPi / 2 * 1.05)), -0.1, 50);
    CHECK(r50.states.size() == 26);
    CHECK(r50.Q_drift < 0.1);
    CHECK(r50.K_drift < 0.1);
    CHECK(r100.Q_drift < r50.Q_drift);
    CHECK(r100.K_drift < r50.K_drift);
    CHECK(std::abs(r50.kappa0 + 24.0 / 5.0) < 1e-12);

    // Continuum limit: x J(s) stationary, d ln J / dx = -1/x.
    for (std::size_t n = 0; n + 1 < r100.states.size(); n += 10) {
        const auto& a = r100.states[n];
        const auto& b = r100.states[n + 1];
        const cplx slope = std::log(b.J / a.J) / (b.x - a.x);
        CHECK(std::abs(slope * 0.5 * (a.x + b.x) + 1.0) < 0.05);
    }
}

TEST_CASE("Stokes multiplier from the matching condition")
{
    const auto r = solve_stok2(1);
    CHECK(std::abs(std::abs(r.mu) - std::sqrt(6.0 / (5.0 * kPi))) < 1e-12);
    CHECK(std::abs(std::arg(r.mu) - kPi / 2) < 1e-12);
    CHECK(r.residual < 1e-12);
    for (int N : {0, 2, -1}) {
        try {
            solve_stok2(N);
            FAIL("expected NoIntegerConsistency");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NoIntegerConsistency);
        }
    }
    // With the principal logarithm other N leave a residual of 24 pi (N - 1) i.
    CHECK(std::abs(stok2_residual(r.mu, 2) + 24.0 * kPi * I) < 1e-12);
}

#include <doctest.h>

#include <cmath>

#include "p1/borel_engine.hpp"
#include "p1/errors.hpp"
#include "p1/pole_sector.hpp"
#include "p1/series_core.hpp"

using namespace p1;

namespace {

// Exact derivative at xi = 0.
Q derivative_at_zero(const RationalXi& r)
{
    // P(xi) / (xi - s)^m: P'(0)/(-s)^m - m P(0)/(-s)^{m+1}
    Q d = 1;
    for (int k = 0; k < r.m; ++k)
        d *= -r.sigma;
    const Q p0 = r.num.empty() ? Q(0) : r.num[0];
    const Q p1 = r.num.size() > 1 ? r.num[1] : Q(0);
    return p1 / d - Q(r.m) * p0 / (d * -r.sigma);
}

// d/dx sum_{j<=m} G_j(xi(x)) x^{-j}, xi = C e^{-x}/sqrt(x).
cplx g_prime(cplx x, cplx C, int m)
{
    const cplx xi = two_scale_xi(x, C);
    const cplx dxi = -xi * (1.0 + 0.5 / x);
    cplx acc = 0.0;
    for (int j = 0; j <= m; ++j) {
        const auto G = compute_G(j);
        acc += G.eval_derivative(xi) * dxi * std::pow(x, -j) - double(j) * G.eval(xi) * std::pow(x, -j - 1);
    }
    return acc;
}

} // namespace

TEST_CASE("low orders in closed form")
{
    const auto F0 = compute_F(0);
    CHECK(F0.sigma == 12);
    CHECK(F0.m == 2);
    CHECK(F0.num == std::vector<Q>{Q(0), Q(144)});

    // -xi (xi^3 - 180 xi^2 - 12600 xi - 12960) / (60 (xi-12)^3)
    const auto F1 = compute_F(1);
    CHECK(F1.m == 3);
    CHECK(F1.num == std::vector<Q>{Q(0), Q(216), Q(210), Q(3), Q(-1, 60)});

    const auto F2 = compute_F(2);
    CHECK(F2.m == 4);
    const std::vector<Q> p2{0, 31492800, 113140800, -267300, -151920, 975, 1};
    REQUIRE(F2.num.size() == p2.size());
    for (std::size_t i = 0; i < p2.size(); ++i)
        CHECK(F2.num[i] == p2[i] / Q(21600));

    const auto G0 = compute_G(0);
    CHECK(G0.sigma == -12);
    CHECK(G0.m == 2);
    CHECK(G0.num == std::vector<Q>{Q(0), Q(144)});

    // G1 = F1 (xi-12)^4 / (xi+12)^4
    const auto G1 = compute_G(1);
    for (Q xi : {Q(1), Q(-5, 3), Q(7, 2), Q(40)})
        CHECK(G1.eval(xi) * (xi + 12) * (xi + 12) * (xi + 12) * (xi + 12) ==
              F1.eval(xi) * (xi - 12) * (xi - 12) * (xi - 12) * (xi - 12));
}

TEST_CASE("F_n at the origin matches h0 and t1")
{
    const auto h0 = h0_series(12);
    const auto t1 = transseries_level(1, 12);
    for (int n = 0; n <= 8; ++n) {
        const auto F = compute_F(n);
        CHECK(F.eval(Q(0)) == h0.coeff_at(-2 * n));
        CHECK(derivative_at_zero(F) == t1.coeff_at(-2 * n));
    }
}

TEST_CASE("structure of F_n")
{
    for (int n = 0; n <= 8; ++n) {
        const auto F = compute_F(n);
        CHECK(F.sigma == 12);
        CHECK(F.m == n + 2);
        CHECK(F.degree() <= 2 * n + 2);
        const auto G = compute_G(n);
        CHECK(G.sigma == -12);
    }
}

TEST_CASE("roots of 3 + F0")
{
    // Numerator of 3 + F0 is 3 (xi-12)^2 + P0(xi); its roots multiply to 144.
    const auto F0 = compute_F(0);
    std::vector<Q> p{Q(3 * 144), Q(-3 * 24), Q(3)};
    for (std::size_t i = 0; i < F0.num.size(); ++i)
        p[i] += F0.num[i];
    CHECK(p[0] / p[2] == 144);
    // Double root at xi = -12
    CHECK(p[1] * p[1] == 4 * p[0] * p[2]);
    CHECK(-p[1] / (2 * p[2]) == -12);
}

TEST_CASE("integrability witness")
{
    CHECK(integrability_witness(c4_default()) == 0);
    CHECK(integrability_witness(c4_default() + Q(1, 10)) == Q(384, 25));
    CHECK(integrability_witness(Q(-342, 625)) == Q(1536, 125));
    // Linear in c
    const Q w1 = integrability_witness(c4_default() + Q(1));
    const Q w2 = integrability_witness(c4_default() + Q(2));
    CHECK(w2 == 2 * w1);
    CHECK(w1 == Q(768, 5));

    try {
        compute_F(6, c4_default() + Q(1, 10));
        FAIL("expected ObstructionNonzero");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ObstructionNonzero);
    }
    CHECK_NOTHROW(compute_F(5, c4_default() + Q(1, 10)));
}

TEST_CASE("two-scale sum against the Borel sum of the C = 1 transseries")
{
    static const TransseriesGerms G(10, 200, 60);
    for (double y : {30.0, 40.0, 60.0}) {
        const cplx x(-1.0, y);
        const cplx ref = sum_transseries(G, 1.0, -std::arg(x), x, 10).value;
        double prev = 1.0;
        for (int m : {0, 2, 4, 6}) {
            const double d = std::abs(eval_two_scale(x, 1.0, m).h - ref);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 1e-8);
    }
}

TEST_CASE("region selection")
{
    const cplx x(-1.0, 40.0);
    const cplx C = 1.0;
    const cplx xi = two_scale_xi(x, C);
    // Scale C so that xi lands next to +12 or -12.
    const cplx near_plus = C * (12.01 / xi), near_minus = C * (-12.01 / xi);
    CHECK(eval_two_scale(x, near_plus, 2).chart == TwoScaleChart::G);
    CHECK(eval_two_scale(x, near_minus, 2).chart == TwoScaleChart::F);
    CHECK_FALSE(in_region_F(x, 12.01, {}));
    CHECK(in_region_G(x, 12.01, {}));
    try {
        eval_two_scale(cplx(5.0, 5.0), C, 2);
        FAIL("expected OutsideRegion");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutsideRegion);
    }
    CHECK_THROWS_AS(eval_two_scale(x, C * 1e3, 2), Error);
}

TEST_CASE("pole formula against a zero of g'")
{
    for (cplx C : {cplx(1.0), cplx(0.3, -2.0)}) {
        const int n = 1000;
        const auto p = predict_pole(n, C);
        // Secant iteration on g' from the prediction.
        cplx a = p.x, b = p.x + 1e-3;
        cplx fa = g_prime(a, C, 4), fb = g_prime(b, C, 4);
        for (int it = 0; it < 40 && std::abs(b - a) > 1e-15 * std::abs(b); ++it) {
            const cplx c = b - fb * (b - a) / (fb - fa);
            a = b;
            fa = fb;
            b = c;
            fb = g_prime(b, C, 4);
        }
        CHECK(std::abs(p.x - b) < 1e-10);
        CHECK(std::abs(p.leading - b) > 1e-5);
        const auto printed = predict_pole(n, C, PoleFormula::Printed);
        CHECK(std::abs(printed.x - b) > 100 * std::abs(p.x - b));
    }
    CHECK_THROWS_AS(predict_pole(3, 0.0), Error);
    CHECK_THROWS_AS(predict_pole(0, 1.0), Error);
}

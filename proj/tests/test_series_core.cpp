#include <doctest.h>

#include "p1/errors.hpp"
#include "p1/series_core.hpp"

using namespace p1;

namespace {

// Coefficients of x^{-m} of a FormalSeries with integer steps.
Q at(const FormalSeries& s, int m) { return s.coeff_at(-2 * m); }

// Product of two h-type series truncated at x^{-N}.
std::vector<Q> dense(const FormalSeries& s, int N)
{
    std::vector<Q> v(N + 1, Q(0));
    for (int m = 0; m <= N; ++m)
        v[m] = at(s, m);
    return v;
}

} // namespace

TEST_CASE("h0 leading coefficients")
{
    const auto h = h0_series(12);
    CHECK(h.lead_half == -8);
    CHECK(at(h, 4) == Q(-392, 625));
    CHECK(at(h, 6) == Q(-6272, 625));
    CHECK(at(h, 5) == 0);
    // c8 = 16 c6 - c4^2/2
    CHECK(at(h, 8) == Q(36) * Q(-6272, 625) - Q(392 * 392, 625 * 625) / 2);
}

TEST_CASE("h0 parity and residual through order 200")
{
    const int N = 200;
    const auto h = h0_series(N);
    const auto c = dense(h, N);
    for (int m = 1; m <= N; m += 2)
        REQUIRE(c[m] == 0);
    // Plug into h'' + h'/x - h - h^2/2 + c4/x^4 order by order: the x^{-m} coefficient of
    // h'' + h'/x is (m-2)^2 c_{m-2}.
    for (int m = 4; m <= N; ++m) {
        Q r = (m >= 6 ? Q((m - 2) * (m - 2)) * c[m - 2] : Q(0)) - c[m];
        for (int i = 4; i <= m - 4; ++i)
            r -= c[i] * c[m - i] / 2;
        if (m == 4)
            r += Q(-392, 625);
        REQUIRE(r == 0);
    }
}

TEST_CASE("h0 divergence signature")
{
    const auto h = h0_series(200);
    // c_m ~ K Gamma(m - 1/2) for a singularity at distance 1.
    for (int m = 150; m <= 200; m += 10) {
        const double r = to_double(at(h, m) / at(h, m - 2)) / double((m - 1.5) * (m - 2.5));
        CHECK(r == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("level one normalization")
{
    const auto t1 = transseries_level(1, 6);
    CHECK(t1.coeffs.at(0) == 1);
    CHECK(t1.coeffs.at(1) == Q(-1, 8));
}

TEST_CASE("transseries levels solve the level equations exactly")
{
    // Independent residual: for h = h0 + sum_k e^{-kx} x^{-k/2} t_k, collect e^{-kx} and
    // compute the residual of h'' + h'/x - h - h^2/2 + c4 x^{-4} on the half-lattice.
    const int K = 3, N = 30;
    const auto ts = build_transseries(K, N);
    // Represent E_k(x) = sum_j e_j x^{-j/2} with e indexed by half-units, for each level.
    const int L = 2 * N + 20;
    auto level_poly = [&](int k) {
        std::vector<Q> v(L + 1, Q(0));
        if (k == 0) {
            for (int m = 4; m <= N; ++m)
                v[2 * m] = at(ts.h0, m);
        } else {
            const auto& t = ts.t[k - 1];
            for (int j = 0; j <= N; ++j)
                if (k + 2 * j <= L)
                    v[k + 2 * j] = t.coeffs[j];
        }
        return v;
    };
    std::vector<std::vector<Q>> E(K + 1);
    for (int k = 0; k <= K; ++k)
        E[k] = level_poly(k);
    // Operator on e^{-kx} x^{-s}: d/dx -> (-k - s/x); apply twice and add (1/x) d/dx.
    for (int k = 1; k <= K; ++k) {
        std::vector<Q> r(L + 5, Q(0));
        for (int s2 = 0; s2 <= L; ++s2) {
            const Q a = E[k][s2];
            if (a == 0)
                continue;
            const Q s(s2, 2), kk(k);
            // (d/dx)^2 [e^{-kx} x^{-s}] = e^{-kx}(k^2 x^{-s} + 2ks x^{-s-1} + s(s+1) x^{-s-2})
            // (1/x) d/dx -> -k x^{-s-1} - s x^{-s-2}
            r[s2] += a * (kk * kk - 1);
            r[s2 + 2] += a * (2 * kk * s - kk);
            r[s2 + 4] += a * (s * (s + 1) - s);
        }
        // -(1/2) sum_{i+j=k} E_i E_j with i, j in 0..k
        for (int i = 0; i <= k; ++i) {
            const int j = k - i;
            for (int a = 0; a <= L; ++a) {
                if (E[i][a] == 0)
                    continue;
                for (int b = 0; a + b <= L; ++b)
                    if (E[j][b] != 0)
                        r[a + b] -= E[i][a] * E[j][b] / 2;
            }
        }
        // Valid up to the truncation order of the inputs.
        for (int s2 = 0; s2 <= k + 2 * N - 4 && s2 <= L; ++s2)
            REQUIRE_MESSAGE(r[s2] == 0, "level " << k << " half-order " << s2);
    }
}

TEST_CASE("borel transform of the toy series and of h0")
{
    FormalSeries s;
    s.lead_half = -4;  // x^{-2}
    for (int n = 2; n <= 12; ++n) {
        mpz_class f = 1;
        for (int i = 2; i <= n - 1; ++i)
            f *= i;
        s.coeffs.push_back(Q(f));
    }
    const auto g = borel_transform(s, 2);
    CHECK(g.lead_half == 2);
    for (const auto& q : g.exact)
        CHECK(q == 1);

    const auto b = borel_transform(h0_series(13), 8);
    CHECK(b.lead_half == 6);
    CHECK(b.exact.at(0) == Q(-196, 1875));
}

TEST_CASE("borel transform is linear")
{
    FormalSeries a, b, c;
    a.lead_half = b.lead_half = c.lead_half = -3;
    for (int j = 0; j < 8; ++j) {
        a.coeffs.push_back(Q(j * j - 3, j + 2));
        b.coeffs.push_back(Q(7 - 2 * j, 3 * j + 1));
        c.coeffs.push_back(Q(2) * a.coeffs.back() - Q(5, 3) * b.coeffs.back());
    }
    const auto A = borel_transform(a, 1), B = borel_transform(b, 1), C = borel_transform(c, 1);
    CHECK(C.inv_sqrt_pi);
    for (std::size_t j = 0; j < 8; ++j)
        CHECK(C.exact[j] == Q(2) * A.exact[j] - Q(5, 3) * B.exact[j]);
}

TEST_CASE("series json round trip")
{
    const auto h = h0_series(20);
    const auto back = series_from_json(to_json(h));
    CHECK(back.lead_half == h.lead_half);
    CHECK(back.coeffs == h.coeffs);
}

TEST_CASE("bad arguments")
{
    CHECK_THROWS_AS(h0_series(2), Error);
    CHECK_THROWS_AS(transseries_level(0, 5), Error);
}

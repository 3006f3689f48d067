#include "p1/series_core.hpp"

#include <cmath>

#include "p1/errors.hpp"

namespace p1 {

Q FormalSeries::coeff_at(int exp_half) const
{
    const int d = lead_half - exp_half;
    if (d < 0 || step_half <= 0 || d % step_half != 0)
        return Q(0);
    const std::size_t j = static_cast<std::size_t>(d / step_half);
    return j < coeffs.size() ? coeffs[j] : Q(0);
}

cplx FormalSeries::eval(cplx x, std::size_t terms) const
{
    const std::size_t n = (terms == 0 || terms > coeffs.size()) ? coeffs.size() : terms;
    if (n == 0)
        return 0.0;
    // Horner in x^{-step/2}, then the leading power.
    const cplx w = std::pow(x, -0.5 * step_half);
    cplx acc = 0.0;
    for (std::size_t j = n; j-- > 0;)
        acc = acc * w + to_double(coeffs[j]);
    return acc * std::pow(x, 0.5 * lead_half);
}

cplx FormalSeries::eval_derivative(cplx x, std::size_t terms) const
{
    const std::size_t n = (terms == 0 || terms > coeffs.size()) ? coeffs.size() : terms;
    if (n == 0)
        return 0.0;
    const cplx w = std::pow(x, -0.5 * step_half);
    cplx acc = 0.0;
    for (std::size_t j = n; j-- > 0;)
        acc = acc * w + to_double(coeffs[j]) * (0.5 * exponent_half(j));
    return acc * std::pow(x, 0.5 * lead_half - 1.0);
}

FormalSeries Transseries::level_h(int k) const
{
    if (k < 1 || static_cast<std::size_t>(k) > t.size())
        fail(ErrorKind::InvalidArgument, "level_h: level out of range");
    FormalSeries s = t[k - 1];
    s.lead_half -= k;
    return s;
}

FormalSeries h0_series(int N, const Q& c4)
{
    if (N < 4)
        fail(ErrorKind::InvalidArgument, "h0_series: N must be >= 4");
    // c[m] multiplies x^{-m}; from (m-2)^2 c_{m-2} - c_m - (1/2) sum c_i c_j + c4 [m=4] = 0.
    std::vector<Q> c(N + 1, Q(0));
    for (int m = 4; m <= N; ++m) {
        Q v = Q((m - 2) * (m - 2)) * c[m - 2];
        Q conv = 0;
        for (int i = 4; i <= m - 4; ++i)
            conv += c[i] * c[m - i];
        v -= conv / 2;
        if (m == 4)
            v += c4;
        v.canonicalize();
        c[m] = v;
    }
    FormalSeries s;
    s.lead_half = -8;
    s.step_half = 2;
    s.coeffs.assign(c.begin() + 4, c.end());
    return s;
}

std::vector<FormalSeries> transseries_levels(int K, int N, const FormalSeries& h0)
{
    if (K < 1)
        fail(ErrorKind::InvalidArgument, "transseries_levels: K must be >= 1");
    if (N < 0)
        fail(ErrorKind::InvalidArgument, "transseries_levels: N must be >= 0");
    std::vector<Q> c(N + 1, Q(0));
    for (int r = 4; r <= N; ++r)
        c[r] = h0.coeff_at(-2 * r);

    std::vector<std::vector<Q>> a(K + 1);
    for (int k = 1; k <= K; ++k) {
        auto& ak = a[k];
        ak.assign(N + 1, Q(0));
        // Quadratic source (1/2) sum_{i+j=k} t_i t_j, coefficientwise.
        std::vector<Q> src(N + 1, Q(0));
        for (int i = 1; i < k; ++i) {
            const int j = k - i;
            for (int m = 0; m <= N; ++m) {
                Q s = 0;
                for (int l = 0; l <= m; ++l)
                    s += a[i][l] * a[j][m - l];
                src[m] += s / 2;
            }
        }
        const Q kk(k);
        const Q half_k(k, 2);
        auto hconv = [&](int m) {
            Q s = 0;
            for (int r = 4; r <= std::min(m, N); ++r)
                s += c[r] * ak[m - r];
            return s;
        };
        if (k == 1) {
            ak[0] = 1;
            for (int m = 2; m <= N + 1; ++m) {
                // (2m-2) a_{m-1} = -(m-3/2)^2 a_{m-2} + sum_r c_r a_{m-r}
                const Q beta = Q(m - 2) + half_k;
                Q rhs = -beta * beta * ak[m - 2] + hconv(m);
                const Q div = Q(2 * m - 2);
                if (div == 0)
                    fail(ErrorKind::SingularRecurrence, "level 1 recurrence hit a zero divisor");
                Q v = rhs / div;
                v.canonicalize();
                ak[m - 1] = v;
                if (m - 1 == N)
                    break;
            }
        } else {
            const Q div = kk * kk - 1;
            if (div == 0)
                fail(ErrorKind::SingularRecurrence, "level recurrence singular");
            for (int m = 0; m <= N; ++m) {
                Q v = src[m];
                if (m >= 1)
                    v -= kk * Q(2 * m + k - 3) * ak[m - 1];
                if (m >= 2) {
                    const Q beta = Q(m - 2) + half_k;
                    v -= beta * beta * ak[m - 2];
                }
                v += hconv(m);
                v /= div;
                v.canonicalize();
                ak[m] = v;
            }
        }
    }

    std::vector<FormalSeries> out;
    out.reserve(K);
    for (int k = 1; k <= K; ++k) {
        FormalSeries s;
        s.lead_half = 0;
        s.step_half = 2;
        s.coeffs = std::move(a[k]);
        out.push_back(std::move(s));
    }
    return out;
}

FormalSeries transseries_level(int k, int N)
{
    if (k < 1)
        fail(ErrorKind::InvalidArgument, "transseries_level: k must be >= 1");
    const auto h0 = h0_series(std::max(N, 4));
    auto lv = transseries_levels(k, N, h0);
    return lv.back();
}

Transseries build_transseries(int K, int N, const Q& c4)
{
    Transseries ts;
    ts.h0 = h0_series(std::max(N, 4), c4);
    ts.t = transseries_levels(K, N, ts.h0);
    return ts;
}

nlohmann::json to_json(const FormalSeries& s)
{
    nlohmann::json j;
    j["leading_exponent"] = s.lead_half;
    auto arr = nlohmann::json::array();
    for (const auto& q : s.coeffs)
        arr.push_back({q.get_num().get_str(), q.get_den().get_str()});
    j["coeffs"] = arr;
    return j;
}

FormalSeries series_from_json(const nlohmann::json& j)
{
    FormalSeries s;
    s.lead_half = j.at("leading_exponent").get<int>();
    for (const auto& e : j.at("coeffs")) {
        Q q(e.at(0).get<std::string>() + "/" + e.at(1).get<std::string>());
        q.canonicalize();
        s.coeffs.push_back(q);
    }
    return s;
}

} // namespace p1

namespace p1 {

namespace {

// 1/Gamma(beta) for beta = b_half/2 > 0, as rational times (1/sqrt(pi))^{odd}.
Q inv_gamma_rational(int b_half, bool& has_sqrt_pi)
{
    if (b_half % 2 == 0) {
        has_sqrt_pi = false;
        mpz_class f = 1;
        for (int i = 2; i < b_half / 2; ++i)
            f *= i;
        return Q(1) / Q(f);
    }
    // Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
    has_sqrt_pi = true;
    const int m = (b_half - 1) / 2;
    mpz_class num = 1, den = 1;
    for (int i = 2; i <= m; ++i)
        num *= i;
    num *= mpz_class(1) << (2 * m);
    for (int i = 2; i <= 2 * m; ++i)
        den *= i;
    Q r(num, den);
    r.canonicalize();
    return r;
}

} // namespace

BorelGerm borel_transform(const FormalSeries& s, int alpha_half)
{
    if (alpha_half <= 0)
        fail(ErrorKind::InvalidArgument, "borel_transform: alpha must be positive");
    if (s.step_half != 2)
        fail(ErrorKind::InvalidArgument, "borel_transform: series must step by integer powers");
    const int beta0 = -s.lead_half;  // first term is x^{-beta0/2}
    if (beta0 < alpha_half || (beta0 - alpha_half) % 2 != 0)
        fail(ErrorKind::InvalidArgument, "borel_transform: series exponents do not sit on the alpha lattice");
    BorelGerm g;
    g.lead_half = beta0 - 2;
    g.exact.reserve(s.coeffs.size());
    bool any_sqrt = false;
    bool first = true;
    for (std::size_t j = 0; j < s.coeffs.size(); ++j) {
        const int b_half = beta0 + 2 * static_cast<int>(j);
        bool sp = false;
        Q v = s.coeffs[j] * inv_gamma_rational(b_half, sp);
        v.canonicalize();
        if (first) {
            any_sqrt = sp;
            first = false;
        }
        g.exact.push_back(v);
    }
    g.inv_sqrt_pi = any_sqrt;
    g.refresh_numeric();
    return g;
}

} // namespace p1

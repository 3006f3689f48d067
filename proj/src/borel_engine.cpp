#include "p1/borel_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "p1/errors.hpp"

namespace p1 {

namespace {

const double kInvSqrtPi = 1.0 / std::sqrt(kPi);

mpz_class binom(unsigned long n, unsigned long k)
{
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

Q factorial(int n)
{
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return Q(f);
}

} // namespace

cplx BorelGerm::coeff_at(int exp_half) const
{
    const int d = exp_half - lead_half;
    if (d < 0 || d % 2 != 0)
        return 0.0;
    const std::size_t j = static_cast<std::size_t>(d / 2);
    return j < coeffs.size() ? coeffs[j] : cplx(0.0);
}

Q BorelGerm::exact_at(int exp_half) const
{
    const int d = exp_half - lead_half;
    if (d < 0 || d % 2 != 0)
        return Q(0);
    const std::size_t j = static_cast<std::size_t>(d / 2);
    return j < exact.size() ? exact[j] : Q(0);
}

void BorelGerm::refresh_numeric()
{
    coeffs.resize(exact.size());
    const double f = inv_sqrt_pi ? kInvSqrtPi : 1.0;
    for (std::size_t i = 0; i < exact.size(); ++i)
        coeffs[i] = to_double(exact[i]) * f;
}

BorelGerm germ_from_numeric(int lead_half, std::vector<cplx> coeffs)
{
    BorelGerm g;
    g.lead_half = lead_half;
    g.coeffs = std::move(coeffs);
    return g;
}

nlohmann::json to_json(const BorelGerm& g)
{
    nlohmann::json j;
    j["leading_exponent"] = g.lead_half;
    auto arr = nlohmann::json::array();
    if (g.has_exact()) {
        j["inv_sqrt_pi"] = g.inv_sqrt_pi;
        for (const auto& q : g.exact)
            arr.push_back({q.get_num().get_str(), q.get_den().get_str()});
    } else {
        for (const auto& c : g.coeffs)
            arr.push_back({c.real(), c.imag()});
    }
    j["coeffs"] = arr;
    j["nearest_singularity"] = {g.nearest_singularity.real(), g.nearest_singularity.imag()};
    return j;
}

Q monomial_convolution(int a, int b)
{
    Q r = factorial(a) * factorial(b) / factorial(a + b + 1);
    r.canonicalize();
    return r;
}

BorelGerm solve_H0_convolution(int N, const Q& c4)
{
    if (N < 4)
        fail(ErrorKind::InvalidArgument, "solve_H0_convolution: N must be >= 4");
    // H = sum b_m p^m. Order p^m of the Borel-plane equation:
    // b_m = (1 - 1/m) b_{m-2} + (c4/3!) [m=3] - (1/2) sum_{a+b=m-1} b_a b_b a! b! / m!
    const int M = N - 1;
    std::vector<Q> b(M + 1, Q(0));
    std::vector<Q> fact(M + 1);
    for (int i = 0; i <= M; ++i)
        fact[i] = factorial(i);
    const Q lead = c4 / 6;
    for (int m = 1; m <= M; ++m) {
        Q v = 0;
        if (m >= 2)
            v += Q(m - 1, m) * b[m - 2];
        if (m == 3)
            v += lead;
        Q conv = 0;
        for (int a = 0; a <= m - 1; ++a)
            if (b[a] != 0 && b[m - 1 - a] != 0)
                conv += b[a] * b[m - 1 - a] * fact[a] * fact[m - 1 - a];
        v -= conv / (2 * fact[m]);
        v.canonicalize();
        b[m] = v;
    }
    if (b[0] != 0)
        fail(ErrorKind::SingularRecurrence, "solve_H0_convolution: nonzero constant term");
    BorelGerm g;
    g.lead_half = 6;
    g.exact.assign(b.begin() + 3, b.end());
    g.refresh_numeric();
    g.nearest_singularity = 1.0;
    return g;
}

BorelGerm germ_Hk(const Transseries& ts, int k)
{
    if (k < 1)
        fail(ErrorKind::InvalidArgument, "germ_Hk: level must be >= 1");
    BorelGerm g = borel_transform(ts.level_h(k), k);
    g.nearest_singularity = 1.0;
    return g;
}

BorelGerm germ_Hk(int k, int N)
{
    if (k < 1)
        fail(ErrorKind::InvalidArgument, "germ_Hk: level must be >= 1");
    return germ_Hk(build_transseries(k, N), k);
}

// ---------------------------------------------------------------------------

ContinuedGerm::ContinuedGerm(const BorelGerm& g) : germ_(g), alpha_(g.alpha()), lead_half_(g.lead_half)
{
    const std::size_t n = g.size();
    a_ = g.coeffs;
    d_.assign(n, 0.0);
    // p^n = 2^n w^n (1 + w^2)^{-n} = sum_j 2^n (-1)^j C(n+j-1, j) w^{n+2j}
    if (g.has_exact()) {
        std::vector<Q> d(n, Q(0));
        for (std::size_t k = 0; k < n; ++k) {
            if (g.exact[k] == 0)
                continue;
            if (k == 0) {
                d[0] += g.exact[0];
                continue;
            }
            const mpz_class p2 = mpz_class(1) << k;
            for (std::size_t j = 0; k + 2 * j < n; ++j) {
                mpz_class c = binom(k + j - 1, j) * p2;
                if (j % 2)
                    c = -c;
                d[k + 2 * j] += g.exact[k] * c;
            }
        }
        const double f = g.inv_sqrt_pi ? kInvSqrtPi : 1.0;
        for (std::size_t m = 0; m < n; ++m)
            d_[m] = to_double(d[m]) * f;
    } else {
        // Floating re-expansion cancels badly; keep orders whose amplification stays tame.
        std::vector<double> amp(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == 0) {
                d_[0] += a_[0];
                amp[0] += std::abs(a_[0]);
                continue;
            }
            for (std::size_t j = 0; k + 2 * j < n; ++j) {
                const double c = std::ldexp(std::exp(std::lgamma(double(k + j)) - std::lgamma(double(j + 1)) -
                                                     std::lgamma(double(k))),
                                            static_cast<int>(k));
                d_[k + 2 * j] += a_[k] * ((j % 2) ? -c : c);
                amp[k + 2 * j] += std::abs(a_[k]) * c;
            }
        }
        std::size_t keep = n;
        for (std::size_t m = 0; m < n; ++m)
            if (amp[m] * 1e-16 > 1e-12) {
                keep = m;
                break;
            }
        d_.resize(keep);
    }
}

cplx ContinuedGerm::eval_A(cplx p, double* err) const
{
    const cplx w = p / (1.0 + std::sqrt(1.0 - p * p));
    cplx acc = 0.0;
    for (std::size_t m = d_.size(); m-- > 0;)
        acc = acc * w + d_[m];
    if (err) {
        const double aw = std::abs(w);
        const std::size_t M = d_.size();
        double tail = 0.0;
        for (std::size_t m = M > 8 ? M - 8 : 0; m < M; ++m)
            tail = std::max(tail, std::abs(d_[m]) * std::pow(aw, double(m)));
        *err = aw < 1.0 ? tail * aw / (1.0 - aw) : INFINITY;
    }
    return acc;
}

cplx ContinuedGerm::eval(cplx p, double* err) const
{
    const cplx A = eval_A(p, err);
    const cplx pa = (lead_half_ % 2 == 0) ? std::pow(p, lead_half_ / 2) : std::pow(p, alpha_);
    if (err)
        *err *= std::abs(pa);
    return pa * A;
}

cplx ContinuedGerm::taylor_tail(cplx p, std::size_t n0) const
{
    cplx acc = 0.0;
    for (std::size_t n = a_.size(); n-- > n0;)
        acc = acc * p + a_[n];
    return acc * std::pow(p, static_cast<int>(n0));
}

cplx ContinuedGerm::taylor_head(cplx p, std::size_t n0) const
{
    cplx acc = 0.0;
    for (std::size_t n = std::min(n0, a_.size()); n-- > 0;)
        acc = acc * p + a_[n];
    return acc;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

struct RayIntegral {
    cplx value;
    double quad_err = 0.0;
    double cont_err = 0.0;
};

// Integral over p = base + t e^{i phi}, t in [0, T], of e^{-px} f(p).
// For half-integer alpha and base = 0 the substitution t = r^2 removes p^{-1/2}.
template <class F>
RayIntegral integrate_ray(const ContinuedGerm& g, cplx base, double phi, cplx x, double T, F&& weight,
                          const LaplaceOptions& opt)
{
    const cplx dir = std::polar(1.0, phi);
    RayIntegral out;
    double cont = 0.0;
    const bool sub = base == cplx(0.0) && g.lead_half() % 2 != 0;
    if (sub) {
        const cplx phase = std::pow(dir, g.alpha());
        auto f = [&](double r) -> cplx {
            const double t = r * r;
            const cplx p = t * dir;
            double e = 0.0;
            const cplx A = g.eval_A(p, &e);
            const cplx ex = std::exp(-p * x);
            const double rp = 2.0 * std::pow(r, 2.0 * g.alpha() + 1.0);
            const cplx wgt = weight(p);
            cont = std::max(cont, e * std::abs(ex) * rp * std::abs(wgt));
            return ex * wgt * rp * phase * A * dir;
        };
        out.value = GK::integrate(f, 0.0, std::sqrt(T), opt.max_depth, opt.tol, &out.quad_err);
        out.cont_err = cont * std::sqrt(T);
    } else {
        auto f = [&](double t) -> cplx {
            const cplx p = base + t * dir;
            double e = 0.0;
            const cplx v = g.eval(p, &e);
            const cplx ex = std::exp(-p * x);
            const cplx wgt = weight(p);
            cont = std::max(cont, e * std::abs(ex) * std::abs(wgt));
            return ex * wgt * v * dir;
        };
        out.value = GK::integrate(f, 0.0, T, opt.max_depth, opt.tol, &out.quad_err);
        out.cont_err = cont * T;
    }
    return out;
}

// Adaptive bisection with an absolute target; used where the integral is much
// smaller than the integrand.
template <class F>
cplx integrate_absolute(F& f, double a, double b, double abs_tol, unsigned depth, double* err)
{
    double e = 0.0;
    const cplx v = GK::integrate(f, a, b, 0, 0.0, &e);
    if (e <= abs_tol || depth == 0) {
        *err += e;
        return v;
    }
    const double m = 0.5 * (a + b);
    return integrate_absolute(f, a, m, abs_tol / 2, depth - 1, err) +
           integrate_absolute(f, m, b, abs_tol / 2, depth - 1, err);
}

void check_direction(double phi, cplx x, const LaplaceOptions& opt)
{
    if (std::abs(std::sin(phi)) < 1e-9)
        fail(ErrorKind::StokesDirection, "laplace_ray: direction lies on a singular ray");
    if (std::abs(x) < opt.min_abs_x)
        fail(ErrorKind::InvalidArgument, "laplace_ray: |x| below threshold");
    if ((x * std::polar(1.0, phi)).real() <= 0.0)
        fail(ErrorKind::InvalidArgument, "laplace_ray: integral diverges for this (phi, x)");
}

LaplaceResult finish(const RayIntegral& r, const LaplaceOptions& opt)
{
    const double scale = std::abs(r.value);
    if (r.cont_err > opt.continuation_tol * scale && r.cont_err > 1e-300)
        fail(ErrorKind::RadiusExceeded, "laplace_ray: continuation error above tolerance", r.cont_err / scale);
    return {r.value, r.quad_err + r.cont_err};
}

} // namespace

LaplaceResult laplace_ray(const ContinuedGerm& g, double phi, cplx x, const LaplaceOptions& opt, int power,
                          double shift)
{
    check_direction(phi, x, opt);
    const double T = -std::log(opt.tail_eps) / (x * std::polar(1.0, phi)).real();
    auto w = [&](cplx p) -> cplx { return power == 0 ? cplx(1.0) : -(p + shift); };
    return finish(integrate_ray(g, 0.0, phi, x, T, w, opt), opt);
}

LaplaceResult laplace_ray(const BorelGerm& g, double phi, cplx x, const LaplaceOptions& opt)
{
    return laplace_ray(ContinuedGerm(g), phi, x, opt);
}

LaplaceResult laplace_ray_remainder(const ContinuedGerm& g, double phi, cplx x, int K, const LaplaceOptions& opt)
{
    check_direction(phi, x, opt);
    // p^{alpha+n} <-> x^{-(alpha+n+1)}; drop the terms with alpha+n+1 <= K.
    const double first = g.alpha() + 1.0;
    const std::size_t n0 = K < first ? 0 : static_cast<std::size_t>(std::floor(K - first + 1e-9)) + 1;
    const double rho = 0.6;
    const double T = -std::log(opt.tail_eps) / (x * std::polar(1.0, phi)).real();
    const cplx dir = std::polar(1.0, phi);
    double cont = 0.0;
    auto f = [&](double t) -> cplx {
        const cplx p = t * dir;
        cplx A;
        double e = 0.0;
        if (t < rho)
            A = g.taylor_tail(p, n0);
        else
            A = g.eval_A(p, &e) - g.taylor_head(p, n0);
        const cplx pa = std::pow(p, g.alpha());
        const cplx ex = std::exp(-p * x);
        cont = std::max(cont, e * std::abs(ex * pa));
        return ex * pa * A * dir;
    };
    // The remainder is far below the integrand near p = 1: measure the tolerance against the L1 norm.
    // Beyond rho the subtraction A - head leaves rounding noise of order eps (|A| + |head|);
    // the target is the larger of tol * L1 and that floor.
    auto mag = [&](double t) { return std::abs(f(t)); };
    auto noise = [&](double t) {
        const cplx p = t * dir;
        double e = 0.0;
        return std::abs(std::exp(-p * x) * std::pow(p, g.alpha())) *
               (std::abs(g.eval_A(p, &e)) + std::abs(g.taylor_head(p, n0)));
    };
    const double cut = std::min(rho, T);
    double L1 = GK::integrate(mag, 0.0, cut, 6, 1e-3);
    double floor = 0.0;
    if (T > cut) {
        L1 += GK::integrate(mag, cut, T, 6, 1e-3);
        floor = 64 * std::numeric_limits<double>::epsilon() * GK::integrate(noise, cut, T, 4, 1e-2);
    }
    const double target = std::max(opt.tol * L1, floor);
    RayIntegral r;
    r.value = integrate_absolute(f, 0.0, cut, target, opt.max_depth, &r.quad_err);
    if (T > cut)
        r.value += integrate_absolute(f, cut, T, target, opt.max_depth, &r.quad_err);
    r.cont_err = cont * T;
    return {r.value, r.quad_err + r.cont_err};
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
T neville_at_zero(const std::vector<T>& t, const std::vector<T>& y)
{
    std::vector<T> P = y;
    const std::size_t n = t.size();
    for (std::size_t k = 1; k < n; ++k)
        for (std::size_t i = 0; i + k < n; ++i)
            P[i] = (t[i] * P[i + 1] - t[i + k] * P[i]) / (t[i] - t[i + k]);
    return P[0];
}

// `count` indices of one parity spread over the upper half of [0, n); wide node spacing
// keeps the extrapolation to 1/n = 0 well conditioned.
std::vector<std::size_t> tail_indices(std::size_t n, int parity, int count)
{
    std::vector<std::size_t> out;
    const double lo = 0.5 * double(n), hi = double(n - 1);
    for (int k = 0; k < count; ++k) {
        std::size_t i = static_cast<std::size_t>(lo + (hi - lo) * k / std::max(count - 1, 1));
        if (static_cast<int>(i % 2) != parity)
            i = i + 1 < n ? i + 1 : i - 1;
        if (out.empty() || i > out.back())
            out.push_back(i);
    }
    return out;
}

} // namespace

SEstimate estimate_S(const BorelGerm& g, int levels)
{
    const std::size_t n = g.size();
    if (n < 20 || levels < 2)
        fail(ErrorKind::InvalidArgument, "estimate_S: too few coefficients");
    if (2 * static_cast<std::size_t>(levels) + 4 > n)
        fail(ErrorKind::InvalidArgument, "estimate_S: too many extrapolation levels for the germ size");

    // Radius from the last nonzero pair two apart.
    double radius = NAN;
    for (std::size_t i = n - 1; i >= 2; --i) {
        const double a = std::abs(g.coeffs[i]);
        const double b = std::abs(g.coeffs[i - 2]);
        if (a > 0 && b > 0) {
            radius = std::sqrt(b / a);
            break;
        }
    }
    if (!(std::abs(radius - 1.0) < 0.05))
        fail(ErrorKind::NoConvergence, "estimate_S: nearest singularity is not at distance 1", radius);

    cplx E[2];
    double err[2];
    for (int parity = 0; parity < 2; ++parity) {
        const auto idx = tail_indices(n, parity, levels + 1);
        if (g.has_exact()) {
            std::vector<Q> t, y;
            std::vector<Q> t2, y2;
            for (std::size_t i : idx) {
                // a_i 4^i / C(2i, i)
                Q r = g.exact[i] * Q(mpz_class(1) << (2 * i)) / Q(binom(2 * i, i));
                r.canonicalize();
                t.push_back(Q(1, static_cast<unsigned long>(i)));
                y.push_back(r);
            }
            t2.assign(t.begin() + 1, t.end());
            y2.assign(y.begin() + 1, y.end());
            const double f = g.inv_sqrt_pi ? kInvSqrtPi : 1.0;
            const double e_hi = to_double(neville_at_zero(t, y)) * f;
            const double e_lo = to_double(neville_at_zero(t2, y2)) * f;
            E[parity] = e_hi;
            err[parity] = std::abs(e_hi - e_lo);
        } else {
            using LD = long double;
            std::vector<LD> t, yr, yi;
            for (std::size_t i : idx) {
                const LD lc = std::lgamma(LD(2 * i + 1)) - 2 * std::lgamma(LD(i + 1)) - LD(2 * i) * std::log(LD(2));
                const LD inv = std::exp(-lc);
                t.push_back(LD(1) / LD(i));
                yr.push_back(LD(g.coeffs[i].real()) * inv);
                yi.push_back(LD(g.coeffs[i].imag()) * inv);
            }
            auto drop = [](const std::vector<LD>& v) { return std::vector<LD>(v.begin() + 1, v.end()); };
            const cplx hi(double(neville_at_zero(t, yr)), double(neville_at_zero(t, yi)));
            const cplx lo(double(neville_at_zero(drop(t), drop(yr))), double(neville_at_zero(drop(t), drop(yi))));
            E[parity] = hi;
            err[parity] = std::abs(hi - lo);
        }
    }
    SEstimate s;
    s.S = 0.5 * (E[0] + E[1]);
    s.err = 0.5 * (err[0] + err[1]);
    s.radius = radius;
    if (!(s.err < 0.1 * std::max(std::abs(s.S), 1e-300)))
        fail(ErrorKind::NoConvergence, "estimate_S: extrapolation does not settle", s.err);
    return s;
}

LaplaceResult jump_via_hankel(const ContinuedGerm& g, double x, const LaplaceOptions& opt, double apex,
                              double angle)
{
    if (!(x > 0.0))
        fail(ErrorKind::InvalidArgument, "jump_via_hankel: x must be positive");
    if (!(apex > 0.0 && apex < 1.0) || !(angle > 0.0 && angle < kPi / 2))
        fail(ErrorKind::InvalidArgument, "jump_via_hankel: bad contour");
    const double T = std::max(0.0, (-std::log(opt.tail_eps) / x - apex) / std::cos(angle)) + 1.0;
    auto one = [](cplx) { return cplx(1.0); };
    const auto below = integrate_ray(g, apex, -angle, x, T, one, opt);
    const auto above = integrate_ray(g, apex, angle, x, T, one, opt);
    RayIntegral r;
    r.value = below.value - above.value;
    r.quad_err = below.quad_err + above.quad_err;
    r.cont_err = below.cont_err + above.cont_err;
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
        fail(ErrorKind::QuadratureFailure, "jump_via_hankel: non-finite loop integral");
    return finish(r, opt);
}

LaplaceResult jump_via_hankel(const ContinuedGerm& g, cplx x, const LaplaceOptions& opt, double apex)
{
    const double a = std::arg(x);
    if (!(std::abs(x) > 0.0) || !(std::abs(a) < kPi / 2))
        fail(ErrorKind::InvalidArgument, "jump_via_hankel: need Re x > 0");
    if (!(apex > 0.0 && apex < 1.0))
        fail(ErrorKind::InvalidArgument, "jump_via_hankel: bad contour");
    // Legs bisect the admissible sectors on either side of the cut.
    const double lo = -kPi / 4 - a / 2, hi = kPi / 4 - a / 2;
    const double c = std::cos(kPi / 4 + std::abs(a) / 2);
    const double T = std::max(0.0, (-std::log(opt.tail_eps) / std::abs(x) - apex * std::cos(a)) / c) + 1.0;
    auto one = [](cplx) { return cplx(1.0); };
    const auto below = integrate_ray(g, apex, lo, x, T, one, opt);
    const auto above = integrate_ray(g, apex, hi, x, T, one, opt);
    RayIntegral r;
    r.value = below.value - above.value;
    r.quad_err = below.quad_err + above.quad_err;
    r.cont_err = below.cont_err + above.cont_err;
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
        fail(ErrorKind::QuadratureFailure, "jump_via_hankel: non-finite loop integral");
    return finish(r, opt);
}

// ---------------------------------------------------------------------------

TransseriesGerms::TransseriesGerms(int K, int N_h0, int N_levels)
{
    if (K < 0)
        fail(ErrorKind::InvalidArgument, "TransseriesGerms: K must be >= 0");
    ts_.h0 = h0_series(std::max({N_h0, N_levels, 4}));
    if (K > 0)
        ts_.t = transseries_levels(K, N_levels, ts_.h0);
    H0_ = ContinuedGerm(borel_transform(h0_series(N_h0), 8));
    for (int k = 1; k <= K; ++k)
        Hk_.emplace_back(germ_Hk(ts_, k));
}

SumResult sum_transseries(const TransseriesGerms& G, cplx C, double phi, cplx x, int K, double tol,
                          const LaplaceOptions& opt)
{
    if (K > G.levels())
        fail(ErrorKind::InvalidArgument, "sum_transseries: not enough levels prepared");
    SumResult out;
    const auto v0 = laplace_ray(G.H(0), phi, x, opt, 0);
    const auto d0 = laplace_ray(G.H(0), phi, x, opt, 1, 0.0);
    out.value = v0.value;
    out.derivative = d0.value;
    out.err = v0.err;
    if (C == cplx(0.0))
        return out;
    double prev = INFINITY;
    int growth = 0;
    double last = 0.0;
    for (int k = 1; k <= K; ++k) {
        const cplx f = std::pow(C, k) * std::exp(-double(k) * x);
        const auto vk = laplace_ray(G.H(k), phi, x, opt, 0);
        const auto dk = laplace_ray(G.H(k), phi, x, opt, 1, double(k));
        const cplx term = f * vk.value;
        out.value += term;
        out.derivative += f * dk.value;
        out.err += std::abs(f) * vk.err;
        out.levels_used = k;
        last = std::abs(term);
        if (last < tol * std::max(std::abs(out.value), 1e-300))
            return out;
        growth = last > prev ? growth + 1 : 0;
        if (growth >= 2)
            fail(ErrorKind::NonConvergent, "sum_transseries: levels do not decay", last);
        prev = last;
    }
    out.err += last;
    return out;
}

ToyFixtures toy_fixtures(int N)
{
    if (N < 8)
        fail(ErrorKind::InvalidArgument, "toy_fixtures: N must be >= 8");
    ToyFixtures t;
    // Coefficient vectors indexed by power of p, starting at p^0.
    t.linear.lead_half = 0;
    t.linear.exact.assign(N + 1, Q(1));
    t.linear.exact[0] = 0;
    t.linear.refresh_numeric();

    // With y_n = n! Y_n the convolution p^a * p^b becomes a shifted Cauchy product,
    // and every quantity stays integral. Y^{*4} = O(p^7), so order n only needs lower ones.
    std::vector<mpz_class> y(N + 1, 0), y2(N + 1, 0), y3(N + 1, 0), y4(N + 1, 0);
    auto shifted = [](const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int n) {
        mpz_class s = 0;
        for (int i = 0; i <= n - 1; ++i)
            s += a[i] * b[n - 1 - i];
        return s;
    };
    mpz_class fact = 1;
    std::vector<Q> Y(N + 1, Q(0));
    for (int n = 1; n <= N; ++n) {
        y2[n] = shifted(y, y, n);
        y3[n] = shifted(y2, y, n);
        y4[n] = shifted(y3, y, n);
        // (1-p) Y = p + Y^{*4}  =>  Y_n = Y_{n-1} + [n=1] + Y4_n
        y[n] = mpz_class(n) * y[n - 1] + (n == 1 ? 1 : 0) + y4[n];
        fact *= n;
        Y[n] = Q(y[n], fact);
        Y[n].canonicalize();
    }
    t.nonlinear.lead_half = 0;
    t.nonlinear.exact = Y;
    t.nonlinear.refresh_numeric();
    return t;
}

} // namespace p1

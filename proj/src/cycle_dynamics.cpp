#include "p1/cycle_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "p1/errors.hpp"

namespace p1 {

namespace odeint = boost::numeric::odeint;

namespace {

const cplx I(0.0, 1.0);

cplx cubic(cplx u, cplx s) { return u * u * (u / 3.0 + 1.0) + s; }
cplx cubic_u(cplx u) { return u * (u + 2.0); }

cplx newton(cplx u, cplx s)
{
    for (int it = 0; it < 50; ++it) {
        const cplx d = cubic(u, s) / cubic_u(u);
        u -= d;
        if (std::abs(d) < 1e-16 * std::max(1.0, std::abs(u)))
            break;
    }
    return u;
}

double segment_distance(cplx a, cplx b, cplx p)
{
    const cplx d = b - a;
    if (std::abs(d) == 0.0)
        return std::abs(p - a);
    const double t = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
    return std::abs(a + t * d - p);
}

void check_guard(cplx s, double guard)
{
    if (std::abs(s) < guard || std::abs(s + 4.0 / 3.0) < guard)
        fail(ErrorKind::DegenerateCycle, "cycle: s within the guard radius of a repeated root");
}

// Continue labelled roots from prev.s to s.
CubicData continue_roots(const CubicData& prev, cplx s, double guard)
{
    if (segment_distance(prev.s, s, 0.0) < guard || segment_distance(prev.s, s, -4.0 / 3.0) < guard)
        fail(ErrorKind::DegenerateCycle, "cycle: root continuation path passes a repeated root");
    const int steps = 16 + static_cast<int>(200 * std::abs(s - prev.s));
    CubicData c = prev;
    for (int k = 1; k <= steps; ++k) {
        const cplx sk = prev.s + (s - prev.s) * (double(k) / steps);
        std::array<cplx, 3> r{newton(c.enclosed[0], sk), newton(c.enclosed[1], sk), newton(c.excluded, sk)};
        // Labels must stay distinct along the path.
        if (std::abs(r[0] - r[1]) < 1e-8 || std::abs(r[0] - r[2]) < 1e-8 || std::abs(r[1] - r[2]) < 1e-8)
            fail(ErrorKind::DegenerateCycle, "cycle: root labels merged during continuation");
        c.enclosed = {r[0], r[1]};
        c.excluded = r[2];
        c.s = sk;
    }
    c.s = s;
    return c;
}

CubicData reference_roots()
{
    // s = -2/3: (u + 1)(u^2 + 2u - 2) = 0
    CubicData c;
    c.s = -2.0 / 3.0;
    c.enclosed = {cplx(-1.0 - std::sqrt(3.0)), cplx(-1.0)};
    c.excluded = cplx(-1.0 + std::sqrt(3.0));
    return c;
}

// R at the base point, continuous in s off the ray s > 16/3.
cplx R_base(cplx s) { return I * std::sqrt(16.0 / 3.0 - s); }

double contour_distance(const Cycle& c, cplx p)
{
    double d = 1e300;
    const int n = 720;
    for (int k = 0; k < n; ++k)
        d = std::min(d, std::abs(c.point(2 * kPi * k / n) - p));
    return d;
}

bool inside(const Cycle& c, cplx p)
{
    const cplx dir = (c.apex - c.u0) / std::abs(c.apex - c.u0);
    const double a = std::abs(c.apex - c.u0) / 2;
    const cplx w = (p - 0.5 * (c.apex + c.u0)) / dir;
    return std::norm(w.real() / a) + std::norm(w.imag() / c.b) < 1.0;
}

Cycle try_cycle(const CubicData& r, double t, double b)
{
    Cycle c;
    c.apex = r.enclosed[1] + t * (r.excluded - r.enclosed[1]);
    c.b = b;
    if (!inside(c, r.enclosed[0]) || !inside(c, r.enclosed[1]) || inside(c, r.excluded)) {
        c.margin = -1.0;
        return c;
    }
    c.margin = std::min({contour_distance(c, r.enclosed[0]), contour_distance(c, r.enclosed[1]),
                         contour_distance(c, r.excluded)});
    return c;
}

template <class F>
CycleValue cycle_integral(const CubicData& r, const Cycle& c, F f)
{
    cplx prev_sum = 0.0;
    double prev_err = 1e300;
    for (int n = 256; n <= (1 << 16); n *= 2) {
        cplx sum = 0.0, R = R_base(r.s);
        double scale = 0.0;
        for (int k = 0; k < n; ++k) {
            const double t = 2 * kPi * k / n;
            const cplx u = c.point(t);
            cplx Rk = std::sqrt(cubic(u, r.s));
            if (std::abs(Rk - R) > std::abs(Rk + R))
                Rk = -Rk;
            R = Rk;
            const cplx term = f(R) * c.tangent(t);
            sum += term;
            scale += std::abs(term);
        }
        // R must return to its starting value around the cycle.
        cplx Rend = std::sqrt(cubic(c.point(0.0), r.s));
        if (std::abs(Rend - R) > std::abs(Rend + R))
            Rend = -Rend;
        if (std::abs(Rend - R_base(r.s)) > 1e-6 * std::abs(R_base(r.s)))
            fail(ErrorKind::CycleBreakdown, "cycle: R is not single-valued on the contour");
        sum *= 2 * kPi / n;
        scale *= 2 * kPi / n;
        const double err = std::abs(sum - prev_sum);
        if (n > 256 && (err < 1e-14 * scale || err >= prev_err)) {
            if (err > 1e-9 * scale)
                fail(ErrorKind::QuadratureFailure, "cycle: trapezoid rule did not converge", err);
            return {sum, err};
        }
        prev_sum = sum;
        prev_err = err;
    }
    return {prev_sum, prev_err};
}

using State4 = std::array<cplx, 4>;
using State3 = std::array<cplx, 3>;

// Integrate (J, J', Jh, Jh') along the segment a -> b.
State4 continue_pair(State4 y, cplx a, cplx b)
{
    const cplx d = b - a;
    auto sys = [&](const State4& v, State4& dv, double tau) {
        const cplx s = a + tau * d;
        const cplx q = 0.25 * rho(s);
        dv = {v[1] * d, -q * v[0] * d, v[3] * d, -q * v[2] * d};
    };
    odeint::integrate_adaptive(odeint::make_controlled(1e-14, 1e-13, odeint::runge_kutta_dopri5<State4>()), sys,
                               y, 0.0, 1.0, 0.01);
    return y;
}

} // namespace

cplx rho(cplx s) { return 5.0 / (3.0 * s * (3.0 * s + 4.0)); }

CubicData cubic_data(cplx s, double guard)
{
    check_guard(s, guard);
    return continue_roots(reference_roots(), s, guard);
}

CubicData track_roots(cplx s, const CubicData& prev) { return continue_roots(prev, s, 0.0); }

cplx Cycle::point(double t) const
{
    const cplx dir = (apex - u0) / std::abs(apex - u0);
    const double a = std::abs(apex - u0) / 2;
    return 0.5 * (apex + u0) + dir * cplx(-a * std::cos(t), -b * std::sin(t));
}

cplx Cycle::tangent(double t) const
{
    const cplx dir = (apex - u0) / std::abs(apex - u0);
    const double a = std::abs(apex - u0) / 2;
    return dir * cplx(a * std::sin(t), -b * std::cos(t));
}

Cycle make_cycle(const CubicData& r)
{
    Cycle best;
    best.margin = -1.0;
    for (double t : {0.5, 0.4, 0.6, 0.3, 0.7})
        for (double b : {1.2, 0.8, 1.6, 2.0, 0.5}) {
            const Cycle c = try_cycle(r, t, b);
            if (c.margin > best.margin)
                best = c;
        }
    if (best.margin <= 0.0)
        fail(ErrorKind::CycleBreakdown, "cycle: no contour through u0 = -4 separates the roots");
    return best;
}

CycleValue cycle_J(const CubicData& c, const Cycle& contour)
{
    return cycle_integral(c, contour, [](cplx R) { return R; });
}

CycleValue cycle_L(const CubicData& c, const Cycle& contour)
{
    return cycle_integral(c, contour, [](cplx R) { return 1.0 / R; });
}

CycleValue cycle_J(const CubicData& c) { return cycle_J(c, make_cycle(c)); }
CycleValue cycle_L(const CubicData& c) { return cycle_L(c, make_cycle(c)); }

CycleValue cycle_J(cplx s, double guard) { return cycle_J(cubic_data(s, guard)); }
CycleValue cycle_L(cplx s, double guard) { return cycle_L(cubic_data(s, guard)); }

std::array<cplx, 2> J_hat(cplx s)
{
    // 12 s (3 s + 4) J'' + 5 J = 0; a_{k+1} = -(36 k (k-1) + 5) a_k / (48 k (k+1)), radius 4/3.
    auto series = [](cplx z) {
        cplx v = 0.0, dv = 0.0, zk = 1.0;   // zk = z^{k-1}
        double a = 1.0;
        for (int k = 1; k < 4000; ++k) {
            dv += double(k) * a * zk;
            zk *= z;
            v += a * zk;
            if (std::abs(a * zk) < 1e-18 * std::abs(v) && k > 8)
                break;
            a *= -(36.0 * k * (k - 1) + 5.0) / (48.0 * k * (k + 1));
        }
        return std::array<cplx, 2>{v, dv};
    };
    if (std::abs(s) <= 1.0)
        return series(s);
    const cplx s1 = s / std::abs(s);
    const auto y1 = series(s1);
    State4 y{0.0, 0.0, y1[0], y1[1]};
    y = continue_pair(y, s1, s);
    return {y[2], y[3]};
}

JOdeTable solve_J_ode(const std::vector<cplx>& path, double match_tol)
{
    if (path.empty())
        fail(ErrorKind::InvalidArgument, "solve_J_ode: empty path");
    if (std::abs(path[0]) > 1.0)
        fail(ErrorKind::InvalidArgument, "solve_J_ode: path must start inside |s| <= 1");
    JOdeTable t;
    CubicData roots = cubic_data(path[0]);
    const auto jh = J_hat(path[0]);
    State4 y{cycle_J(roots).value, 0.5 * cycle_L(roots).value, jh[0], jh[1]};
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) {
            check_guard(path[i], 0.01);
            roots = track_roots(path[i], roots);
            y = continue_pair(y, path[i - 1], path[i]);
        }
        JOdeRow r;
        r.s = path[i];
        r.J = y[0];
        r.dJ = y[1];
        r.J_hat = y[2];
        r.dJ_hat = y[3];
        r.wronskian = y[0] * y[3] - y[1] * y[2];
        r.K = y[2] / y[0];
        const cplx Jq = cycle_J(roots).value;
        r.match = std::abs(y[0] - Jq) / std::abs(Jq);
        if (r.match > match_tol)
            fail(ErrorKind::MatchFailure, "solve_J_ode: continued J disagrees with quadrature", r.match);
        t.rows.push_back(r);
    }
    t.kappa0 = t.rows[0].wronskian;
    for (const auto& r : t.rows)
        t.wronskian_variation = std::max(t.wronskian_variation, std::abs(r.wronskian - t.kappa0));
    return t;
}

PoincareResult poincare_step(cplx x, cplx s, const CubicData& roots, const StepOptions& opt)
{
    Cycle c = make_cycle(roots);
    auto attempt = [&](const Cycle& cyc) {
        // State (x, s, R); R is carried so the branch stays continuous along the cycle.
        State3 y{x, s, R_base(s)};
        auto sys = [&](const State3& v, State3& dv, double t) {
            const cplx u = cyc.point(t), du = cyc.tangent(t);
            cplx R = std::sqrt(cubic(u, v[1]));
            if (std::abs(R - v[2]) > std::abs(R + v[2]))
                R = -R;
            if (std::abs(R) < 1e-8)
                fail(ErrorKind::CycleBreakdown, "poincare_step: R vanished on the contour");
            const cplx ds = opt.autonomous ? cplx(0.0)
                                           : (-2.0 * R / v[0] + 784.0 / 625.0 / std::pow(v[0], 4)) * du;
            dv = {du / R, ds, (cubic_u(u) * du + ds) / (2.0 * R)};
        };
        odeint::integrate_adaptive(
            odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State3>()), sys, y, 0.0,
            2 * kPi, 0.01);
        return y;
    };
    State3 y;
    try {
        y = attempt(c);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::CycleBreakdown)
            throw;
        // Re-route once with a slimmer ellipse.
        c.b *= 0.6;
        y = attempt(c);
    }
    PoincareResult r;
    r.x = y[0];
    r.s = y[1];
    r.roots = track_roots(r.s, roots);
    return r;
}

PoincareResult poincare_step(cplx x, cplx s, const StepOptions& opt)
{
    return poincare_step(x, s, cubic_data(s), opt);
}

nlohmann::json to_json(const CycleState& c)
{
    auto z = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
    return {{"n", c.n}, {"x", z(c.x)}, {"s", z(c.s)}, {"J", z(c.J)}, {"L", z(c.L)},
            {"Q", z(c.Q)}, {"K", z(c.K)}, {"K_shifted", z(c.K_shifted)}};
}

CycleRun run_cycles(cplx x0, cplx s0, int N, const StepOptions& opt)
{
    if (N < 1)
        fail(ErrorKind::InvalidArgument, "run_cycles: N must be positive");
    CycleRun run;
    CubicData roots = cubic_data(s0);
    cplx x = x0, s = s0;
    cplx Q0, K0;
    double K_range = 0.0, K_dev = 0.0;
    for (int n = 0; n <= N; ++n) {
        CycleState st;
        st.n = n;
        st.x = x;
        st.s = s;
        st.J = cycle_J(roots).value;
        st.L = cycle_L(roots).value;
        st.Q = x * st.J;
        const auto jh = J_hat(s);
        st.K = jh[0] / st.J;
        if (n == 0) {
            run.kappa0 = st.J * jh[1] - 0.5 * st.L * jh[0];
            Q0 = st.Q;
            K0 = st.K;
        }
        st.K_shifted = st.K + 2.0 * double(n) * run.kappa0 / Q0;
        run.Q_drift = std::max(run.Q_drift, std::abs(st.Q / Q0 - 1.0));
        K_range = std::max(K_range, std::abs(st.K - K0));
        if (n > 0)
            K_dev = std::max(K_dev, std::abs(st.K_shifted - run.states[0].K_shifted));
        run.states.push_back(st);
        if (x.real() < 0 && (x.imag() > 0 || std::arg(x) < -kPi + 0.1)) {
            run.terminated = true;
            break;
        }
        if (n == N)
            break;
        const auto p = poincare_step(x, s, roots, opt);
        x = p.x;
        s = p.s;
        roots = p.roots;
    }
    run.K_drift = K_range > 0 ? K_dev / K_range : 0.0;
    return run;
}

cplx stok2_residual(cplx mu, int N)
{
    const double s3 = std::sqrt(3.0);
    const cplx A = cplx(6.0, 6.0) * cplx(s3, 1.0);
    const cplx lhs = -kPi * cplx(4 * s3, -24.0);
    const cplx rhs = 24.0 * I * double(N) * kPi + 12.0 * std::log(A / mu) + I * kPi - 4 * s3 * kPi -
                     6.0 * std::log(240 * kPi);
    return lhs - rhs;
}

Stok2Result solve_stok2(int N)
{
    // 12 ln(A/mu) = 23 i pi - 24 i pi N + 6 ln(240 pi)
    const double s3 = std::sqrt(3.0);
    const cplx A = cplx(6.0, 6.0) * cplx(s3, 1.0);
    const double phase = 23 * kPi / 12 - 2 * kPi * N;
    if (!(phase > -kPi && phase <= kPi))
        fail(ErrorKind::NoIntegerConsistency,
             "solve_stok2: no principal logarithm balances the imaginary part for N = " + std::to_string(N));
    Stok2Result r;
    r.mu = A * std::exp(-I * phase) / std::sqrt(240 * kPi);
    r.residual = std::abs(stok2_residual(r.mu, N));
    if (r.residual > 1e-10)
        fail(ErrorKind::NoIntegerConsistency, "solve_stok2: residual too large", r.residual);
    return r;
}

} // namespace p1

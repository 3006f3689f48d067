#include "p1/ode_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "p1/borel_engine.hpp"
#include "p1/errors.hpp"
#include "p1/series_core.hpp"

namespace p1 {

cplx rhs_h(cplx x, cplx h, cplx hp)
{
    if (x == cplx(0.0))
        fail(ErrorKind::InvalidArgument, "rhs_h: x = 0");
    const cplx x2 = x * x;
    return h + 0.5 * h * h + kForcing / (x2 * x2) - hp / x;
}

cplx rhs_e(cplx x, cplx e, cplx ep)
{
    if (x == cplx(0.0))
        fail(ErrorKind::InvalidArgument, "rhs_e: x = 0");
    const cplx x2 = x * x;
    const cplx t = 3.0 - e;
    return 2.0 * ep * ep / e - e * t / 3.0 - 0.5 * t * t - kForcing * e * e / (9.0 * x2 * x2) - ep / x;
}

HState e_to_h(cplx e, cplx ep) { return {9.0 / e - 3.0, -9.0 * ep / (e * e)}; }

std::array<cplx, 2> h_to_e(cplx h, cplx hp)
{
    const cplx d = 3.0 + h;
    return {9.0 / d, -9.0 * hp / (d * d)};
}

Vec2 g_nonlinear(cplx x, const Vec2& y)
{
    const cplx y1 = y[0], y2 = y[1];
    const cplx q = (16.0 * x * x + 1.0) * x;
    const cplx p = 4.0 * x + 1.0, m = 4.0 * x - 1.0;
    const double c = 1568.0 / 625.0;
    const cplx g1 = -c * p / (q * x * x) - m * p * p * y1 * y2 / (16.0 * q) - p * m * m * y1 * y1 / (32.0 * q) -
                    p * p * p * y2 * y2 / (32.0 * q) - (2.0 * x - 1.0) * y1 / q + 0.5 * (8.0 * x - 1.0) * y2 / q;
    const cplx g2 = c * m / (q * x * x) + p * m * m * y1 * y2 / (16.0 * q) + m * m * m * y1 * y1 / (32.0 * q) +
                    m * p * p * y2 * y2 / (32.0 * q) - 0.5 * (8.0 * x + 1.0) * y1 / q + (2.0 * x + 1.0) * y2 / q;
    return {g1, g2};
}

Vec2 rhs_y(cplx x, const Vec2& y)
{
    if (std::abs(16.0 * x * x + 1.0) < 1e-300 || x == cplx(0.0))
        fail(ErrorKind::SingularTransform, "rhs_y: x = 0 or x = +-i/4");
    const Vec2 g = g_nonlinear(x, y);
    return {-(1.0 + 0.5 / x) * y[0] + g[0], -(-1.0 + 0.5 / x) * y[1] + g[1]};
}

HState y_to_h(cplx x, const Vec2& y)
{
    const cplx q = 0.25 / x;
    return {0.5 * (1.0 - q) * y[0] + 0.5 * (1.0 + q) * y[1], 0.5 * (-1.0 - q) * y[0] + 0.5 * (1.0 - q) * y[1]};
}

Vec2 h_to_y(cplx x, const HState& s)
{
    const cplx q = 0.25 / x;
    // Inverse of (1/2)[[1-q, 1+q], [-1-q, 1-q]]; determinant (1 + q^2)/2.
    const cplx det = 0.5 * (1.0 + q * q);
    if (std::abs(det) < 1e-14)
        fail(ErrorKind::SingularTransform, "h_to_y: x = +-i/4");
    return {(0.5 * (1.0 - q) * s.h - 0.5 * (1.0 + q) * s.hp) / det,
            (0.5 * (1.0 + q) * s.h + 0.5 * (1.0 - q) * s.hp) / det};
}

cplx z_scale() { return std::pow(30.0, 0.8) / 24.0 * std::polar(1.0, -kPi / 5); }

ZState map_x_to_z(cplx x, const HState& s)
{
    const cplx k = z_scale();
    const cplx a = cplx(0.0, 1.0) * std::sqrt(k / 6.0);
    const cplx x25 = std::pow(x, 0.4);
    const cplx F = 1.0 - 0.16 / (x * x) + s.h;
    const cplx Fp = 0.32 / (x * x * x) + s.hp;
    const cplx z = k * std::pow(x, 0.8);
    const cplx y = a * x25 * F;
    const cplx dydx = a * (0.4 * x25 / x * F + x25 * Fp);
    const cplx dzdx = 0.8 * z / x;
    return {z, y, dydx / dzdx};
}

std::pair<cplx, HState> map_z_to_x(const ZState& s)
{
    const cplx k = z_scale();
    const cplx w = s.z / k;
    if (std::abs(std::arg(w)) > 0.8 * kPi * (1.0 + 1e-12))
        fail(ErrorKind::BranchCut, "map_z_to_x: z lies outside the principal image");
    const cplx x = std::pow(w, 1.25);
    const cplx a = cplx(0.0, 1.0) * std::sqrt(k / 6.0);
    const cplx x25 = std::pow(x, 0.4);
    const cplx F = s.y / (a * x25);
    const cplx dzdx = 0.8 * s.z / x;
    const cplx dydx = s.yp * dzdx;
    const cplx Fp = (dydx / a - 0.4 * x25 / x * F) / x25;
    return {x, {F - 1.0 + 0.16 / (x * x), Fp - 0.32 / (x * x * x)}};
}

const char* chart_name(Chart c) { return c == Chart::H ? "h" : "g"; }

// ---------------------------------------------------------------------------

Path::Path(cplx start) : nodes_{start}, theta_(std::arg(start))
{
    if (start == cplx(0.0))
        fail(ErrorKind::InvalidArgument, "Path: start at x = 0");
}

Path& Path::line_to(cplx x)
{
    const cplx a = nodes_.back();
    // Reject segments through the origin.
    const cplx d = x - a;
    const double t = std::clamp(-(std::conj(d) * a).real() / std::norm(d), 0.0, 1.0);
    if (std::abs(a + t * d) < 1e-6)
        fail(ErrorKind::InvalidArgument, "Path: segment passes through x = 0");
    nodes_.push_back(x);
    theta_ += std::arg(x / a);
    return *this;
}

Path& Path::arc_to(double theta, double max_chord)
{
    const double R = std::abs(nodes_.back());
    const double t0 = theta_;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(theta - t0) / max_chord)));
    for (int i = 1; i <= n; ++i)
        nodes_.push_back(std::polar(R, t0 + (theta - t0) * i / n));
    theta_ = theta;
    return *this;
}

std::array<cplx, 2> StepRecord::dense(double s) const
{
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const cplx v0 = dx * up0, w0 = dx * dx * upp0, v1 = dx * up1, w1 = dx * dx * upp1;
    const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5, H1 = s - 6 * s3 + 8 * s4 - 3 * s5,
                 H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5, H3 = 0.5 * s3 - s4 + 0.5 * s5,
                 H4 = -4 * s3 + 7 * s4 - 3 * s5, H5 = 10 * s3 - 15 * s4 + 6 * s5;
    const double D0 = -30 * s2 + 60 * s3 - 30 * s4, D1 = 1 - 18 * s2 + 32 * s3 - 15 * s4,
                 D2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4, D3 = 1.5 * s2 - 4 * s3 + 2.5 * s4,
                 D4 = -12 * s2 + 28 * s3 - 15 * s4, D5 = 30 * s2 - 60 * s3 + 30 * s4;
    const cplx u = u0 * H0 + v0 * H1 + w0 * H2 + u1 * H5 + v1 * H4 + w1 * H3;
    const cplx du = u0 * D0 + v0 * D1 + w0 * D2 + u1 * D5 + v1 * D4 + w1 * D3;
    return {u, du / dx};
}

namespace {

using Y2 = std::array<cplx, 2>;

cplx second(Chart c, cplx x, const Y2& y) { return c == Chart::H ? rhs_h(x, y[0], y[1]) : rhs_e(x, y[0], y[1]); }

HState to_h(Chart c, const Y2& y)
{
    if (c == Chart::H)
        return {y[0], y[1]};
    return e_to_h(y[0], y[1]);
}

Y2 from_h(Chart c, const HState& s)
{
    if (c == Chart::H)
        return {s.h, s.hp};
    return h_to_e(s.h, s.hp);
}

bool finite(const Y2& y)
{
    for (const auto& v : y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

// Dormand-Prince 5(4).
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9;

struct Stepper {
    const IntegrateOptions& opt;
    Chart chart;

    Y2 f(cplx x, const Y2& y) const { return {y[1], second(chart, x, y)}; }

    // One trial step of complex size dx; returns the new state and the scaled error.
    double trial(cplx x, const Y2& y, const Y2& k1, cplx dx, Y2& ynew, Y2& k7) const
    {
        auto comb = [&](std::initializer_list<std::pair<double, const Y2*>> terms) {
            Y2 r = y;
            for (const auto& [c, k] : terms)
                for (int i = 0; i < 2; ++i)
                    r[i] += dx * c * (*k)[i];
            return r;
        };
        const Y2 k2 = f(x + C2 * dx, comb({{A21, &k1}}));
        const Y2 k3 = f(x + C3 * dx, comb({{A31, &k1}, {A32, &k2}}));
        const Y2 k4 = f(x + C4 * dx, comb({{A41, &k1}, {A42, &k2}, {A43, &k3}}));
        const Y2 k5 = f(x + C5 * dx, comb({{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}}));
        const Y2 k6 = f(x + dx, comb({{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}}));
        ynew = comb({{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
        if (!finite(ynew))
            return INFINITY;
        k7 = f(x + dx, ynew);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const cplx e = dx * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        return std::isfinite(err) ? err : INFINITY;
    }
};

struct Integrator {
    const IntegrateOptions& opt;
    bool switching;
    SolutionTrace* trace;
    Chart chart = Chart::H;
    double hstep;
    double err_prev = 1e-4;
    long steps = 0;
    bool guard_on = true;

    Integrator(const IntegrateOptions& o, bool sw, SolutionTrace* t) : opt(o), switching(sw), trace(t), hstep(o.h_init) {}

    void maybe_switch(cplx x, Y2& y)
    {
        if (!switching)
            return;
        if (chart == Chart::H && std::abs(y[0]) > opt.enter_g) {
            const auto e = h_to_e(y[0], y[1]);
            y = {e[0], e[1]};
            chart = Chart::G;
            ++trace->chart_switches;
        } else if (chart == Chart::G) {
            const HState s = e_to_h(y[0], y[1]);
            if (std::abs(s.h) < opt.exit_g) {
                y = {s.h, s.hp};
                chart = Chart::H;
                ++trace->chart_switches;
            }
        }
        (void)x;
    }

    // The e-equation has a removable singularity at the poles of h; close passes lose
    // accuracy. h is meromorphic without residues, so walk round the pole instead.
    bool detour(cplx xa, cplx xb, cplx dir, double L, cplx x, double& tau, Y2& y)
    {
        const double rg = opt.pole_guard;
        if (!switching || !guard_on || rg <= 0.0 || chart != Chart::G || y[1] == cplx(0.0))
            return false;
        if (std::abs(y[0]) > 1.5 * rg * rg)
            return false;
        const cplx xp = x - 2.0 * y[0] / y[1];
        const double R = std::abs(x - xp);
        if (!(R < rg) || R == 0.0)
            return false;
        // Where the segment leaves the disc |x - xp| = R.
        const cplx c = xa - xp;
        const double b = (std::conj(dir) * c).real();
        const double disc = b * b - std::norm(c) + R * R;
        const double t_exit = -b + std::sqrt(std::max(0.0, disc));
        if (!(t_exit > tau + 1e-9))
            return false;
        const bool inside_end = t_exit >= L;
        const cplx target = inside_end ? xb : xa + t_exit * dir;
        const cplx on_circle = xp + R * (target - xp) / std::abs(target - xp);
        const double dth = std::arg((on_circle - xp) / (x - xp));
        const int n = std::max(2, static_cast<int>(std::ceil(std::abs(dth) / 0.2)));
        const double th0 = std::arg(x - xp);
        guard_on = false;
        cplx prev = x;
        for (int i = 1; i <= n; ++i) {
            const cplx node = i == n ? on_circle : xp + std::polar(R, th0 + dth * i / n);
            segment(prev, node, y);
            prev = node;
        }
        if (inside_end)
            segment(prev, xb, y);
        guard_on = true;
        tau = inside_end ? L : t_exit;
        return true;
    }

    // Straight piece from xa to xb.
    void segment(cplx xa, cplx xb, Y2& y)
    {
        const double L = std::abs(xb - xa);
        if (L == 0.0)
            return;
        const cplx dir = (xb - xa) / L;
        double tau = 0.0;
        bool retried_chart = false;
        while (tau < L) {
            if (++steps > opt.max_steps)
                fail(ErrorKind::StepFailure, "integrate_path: step budget exhausted");
            const cplx x = xa + tau * dir;
            if (detour(xa, xb, dir, L, x, tau, y))
                continue;
            double h = std::min(hstep, L - tau);
            const bool last = h >= L - tau;
            Stepper st{opt, chart};
            const Y2 k1 = st.f(x, y);
            Y2 ynew, k7;
            const cplx dx = h * dir;
            const double err = finite(k1) ? st.trial(x, y, k1, dx, ynew, k7) : INFINITY;
            if (err <= 1.0) {
                if (trace) {
                    StepRecord r{x, dx, chart, y[0], y[1], k1[1], ynew[0], ynew[1], k7[1]};
                    trace->steps.push_back(r);
                }
                tau = last ? L : tau + h;
                y = ynew;
                const cplx xn = last ? xb : x + dx;
                const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
                err_prev = std::max(err, 1e-4);
                hstep = h * std::clamp(fac, 0.2, 5.0);
                if (last)
                    hstep = std::max(hstep, h);  // a clamped last step says nothing about the scale
                retried_chart = false;
                if (trace) {
                    maybe_switch(xn, y);
                    trace->samples.push_back({xn, to_h(chart, y), chart});
                } else {
                    maybe_switch(xn, y);
                }
            } else {
                if (trace)
                    ++trace->rejected;
                const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
                hstep = h * fac;
                if (hstep < opt.h_min) {
                    if (!switching || retried_chart) {
                        std::ostringstream m;
                        m << "integrate_path: step size underflow at x = " << x << " in chart " << chart_name(chart);
                        fail(switching ? ErrorKind::ChartDeadlock : ErrorKind::StepFailure, m.str());
                    }
                    // Try the other chart once before giving up.
                    const HState s = to_h(chart, y);
                    chart = chart == Chart::H ? Chart::G : Chart::H;
                    y = from_h(chart, s);
                    hstep = opt.h_init;
                    retried_chart = true;
                }
            }
        }
    }
};

} // namespace

SolutionTrace integrate_path(cplx x0, const HState& s0, const Path& path, const IntegrateOptions& opt)
{
    const auto& nodes = path.nodes();
    if (nodes.empty() || std::abs(nodes.front() - x0) > 1e-12 * std::max(1.0, std::abs(x0)))
        fail(ErrorKind::InvalidArgument, "integrate_path: path does not start at x0");
    SolutionTrace t;
    Integrator it(opt, true, &t);
    it.chart = std::abs(s0.h) > opt.enter_g ? Chart::G : Chart::H;
    Y2 y = from_h(it.chart, s0);
    t.samples.push_back({x0, s0, it.chart});
    for (std::size_t i = 1; i < nodes.size(); ++i)
        it.segment(nodes[i - 1], nodes[i], y);
    return t;
}

std::array<cplx, 2> integrate_chart(Chart c, cplx x0, std::array<cplx, 2> u0, cplx x1, const IntegrateOptions& opt)
{
    Integrator it(opt, false, nullptr);
    it.chart = c;
    Y2 y = u0;
    it.segment(x0, x1, y);
    return y;
}

nlohmann::json to_json(const SolutionTrace& t)
{
    nlohmann::json j;
    auto s = nlohmann::json::array();
    for (const auto& v : t.samples)
        s.push_back({{"x", {v.x.real(), v.x.imag()}},
                     {"chart", chart_name(v.chart)},
                     {"state", {v.s.h.real(), v.s.h.imag(), v.s.hp.real(), v.s.hp.imag()}}});
    j["samples"] = s;
    auto p = nlohmann::json::array();
    for (const auto& v : t.poles)
        p.push_back({{"x", {v.x.real(), v.x.imag()}}, {"n", v.index}, {"witness", v.witness}});
    j["poles"] = p;
    return j;
}

// ---------------------------------------------------------------------------

namespace {

// e-chart state at xb from the trace point (xs, ys). A straight line can run into the
// pole itself when an iterate overshoots; then go round through a dog-leg.
bool reach(cplx xs, const Y2& ys, cplx xb, const IntegrateOptions& o, Y2& out)
{
    const cplx d = xb - xs;
    for (const cplx turn : {cplx(0.0), cplx(0.0, 0.5), cplx(0.0, -0.5)}) {
        try {
            if (turn == cplx(0.0)) {
                out = integrate_chart(Chart::G, xs, ys, xb, o);
            } else {
                const cplx mid = xs + 0.5 * d + turn * d;
                out = integrate_chart(Chart::G, mid, integrate_chart(Chart::G, xs, ys, mid, o), xb, o);
            }
            return true;
        } catch (const Error&) {
        }
    }
    return false;
}

// Secant iteration on e' (simple zero at a pole) starting from a point of the trace.
bool refine_pole(cplx xs, const Y2& ys, const IntegrateOptions& opt, double tol, PoleRecord& out)
{
    IntegrateOptions o = opt;
    o.h_init = 1e-3;
    cplx xa = xs, dpa = ys[1];
    if (std::abs(dpa) == 0.0)
        return false;
    cplx xb = xs - 2.0 * ys[0] / ys[1];
    if (std::abs(xb - xs) > 2.0)
        return false;
    Y2 yb;
    if (!reach(xs, ys, xb, o, yb))
        return false;
    cplx e2 = 0.0;  // e'' from a secant pair that is short but not roundoff dominated
    for (int it = 0; it < 60; ++it) {
        const cplx denom = yb[1] - dpa;
        if (denom == cplx(0.0))
            break;
        const cplx slope = denom / (xb - xa);
        if (std::abs(xb - xa) > 1e-6 || e2 == cplx(0.0))
            e2 = slope;
        const cplx xc = xb - yb[1] / slope;
        if (std::abs(xc - xs) > 2.0)
            return false;
        const bool done = std::abs(xc - xb) < 1e-13 * std::max(1.0, std::abs(xc));
        xa = xb;
        dpa = yb[1];
        xb = xc;
        if (!reach(xs, ys, xb, o, yb))
            return false;
        if (done || std::abs(xb - xa) < 1e-12 * std::max(1.0, std::abs(xb))) {
            out.x = xb;
            out.witness = std::abs(yb[0]);
            // e = (9/a)(x - x0)^2 + ..., so a = 18 / e''(x0). One-sided difference of e'
            // on the approach side, which keeps the integrations off the pole.
            const cplx rho = 1e-3 * (xb - xs) / std::abs(xb - xs);
            Y2 y1, y2;
            if (reach(xs, ys, xb - rho, o, y1) && reach(xs, ys, xb - 2.0 * rho, o, y2))
                e2 = (3.0 * yb[1] - 4.0 * y1[1] + y2[1]) / (2.0 * rho);
            out.laurent_a = 18.0 / e2;
            return out.witness < tol;
        }
    }
    return false;
}

} // namespace

std::vector<PoleRecord> detect_poles(const SolutionTrace& t, const IntegrateOptions& opt, double tol)
{
    // Local minima of |e| over the g-chart stretches of the dense output.
    struct Pt {
        cplx x;
        Y2 y;
        double a;
    };
    std::vector<PoleRecord> out;
    std::vector<Pt> run;
    auto flush = [&]() {
        for (std::size_t i = 0; i < run.size(); ++i) {
            const bool left = i == 0 || run[i].a < run[i - 1].a;
            const bool right = i + 1 == run.size() || run[i].a <= run[i + 1].a;
            if (!(left && right))
                continue;
            PoleRecord p;
            if (!refine_pole(run[i].x, run[i].y, opt, tol, p))
                continue;
            bool dup = false;
            for (const auto& q : out)
                if (std::abs(q.x - p.x) < 1e-6 * std::max(1.0, std::abs(p.x)))
                    dup = true;
            if (!dup)
                out.push_back(p);
        }
        run.clear();
    };
    constexpr int kSub = 8;
    for (const auto& s : t.steps) {
        if (s.chart != Chart::G) {
            flush();
            continue;
        }
        for (int j = 0; j < kSub; ++j) {
            const double u = double(j) / kSub;
            const auto d = s.dense(u);
            run.push_back({s.x0 + u * s.dx, {d[0], d[1]}, std::abs(d[0])});
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Partial sum of a series in powers x^{-j} cut before its smallest term.
struct CutSum {
    cplx value;
    cplx derivative;
    double smallest;
};

CutSum cut_sum(const FormalSeries& s, cplx x)
{
    std::size_t best = s.coeffs.size();
    double smallest = INFINITY;
    const double ax = std::abs(x);
    for (std::size_t j = 0; j < s.coeffs.size(); ++j) {
        if (s.coeffs[j] == 0)
            continue;
        const double m = std::abs(to_double(s.coeffs[j])) * std::pow(ax, 0.5 * s.exponent_half(j));
        if (m < smallest) {
            smallest = m;
            best = j;
        } else if (j > best + 4) {
            break;
        }
    }
    return {s.eval(x, best), s.eval_derivative(x, best), smallest};
}

} // namespace

SeedResult far_field_init(cplx C, cplx x0, int N, int K, double tol)
{
    const double ar = std::abs(std::arg(x0));
    if (!(ar > 0.0 && ar <= kPi / 2 + 1e-12))
        fail(ErrorKind::InvalidArgument, "far_field_init: need 0 < |arg x0| <= pi/2");
    const Transseries ts = build_transseries(std::max(K, 1), N);
    SeedResult r;
    const auto h0 = cut_sum(ts.h0, x0);
    r.s = {h0.value, h0.derivative};
    r.err = h0.smallest;
    if (C != cplx(0.0)) {
        for (int k = 1; k <= K + 1; ++k) {
            const cplx f = std::pow(C, k) * std::exp(-double(k) * x0);
            const auto lk = cut_sum(ts.level_h(std::min(k, static_cast<int>(ts.t.size()))), x0);
            if (k == K + 1) {
                r.err += std::abs(f * lk.value);
                break;
            }
            r.s.h += f * lk.value;
            r.s.hp += f * (lk.derivative - double(k) * lk.value);
            r.err += std::abs(f) * lk.smallest;
        }
    }
    r.warn = r.err > tol;
    return r;
}

ContinuationPair continue_around(double R, const IntegrateOptions& opt)
{
    if (!(R > 5.0))
        fail(ErrorKind::InvalidArgument, "continue_around: radius too small");
    const cplx x0 = std::polar(R, kPi / 4);
    ContinuedGerm H0(solve_H0_convolution(200));
    const HState s0{laplace_ray(H0, -kPi / 4, x0).value, laplace_ray(H0, -kPi / 4, x0, {}, 1).value};
    ContinuationPair out;
    out.R = R;
    out.ccw = integrate_path(x0, s0, Path(x0).arc_to(1.5 * kPi, opt.max_chord), opt);
    out.cw = integrate_path(x0, s0, Path(x0).arc_to(-kPi, opt.max_chord), opt);
    out.cw.poles = detect_poles(out.cw, opt);
    return out;
}

} // namespace p1

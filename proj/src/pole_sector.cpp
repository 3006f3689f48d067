#include "p1/pole_sector.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>

#include "p1/errors.hpp"

namespace p1 {

namespace {

using Poly = std::vector<Q>;

void trim(Poly& p)
{
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

Poly padd(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.size(), b.size()), Q(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        r[i] += b[i];
    trim(r);
    return r;
}

Poly pscale(Poly a, const Q& s)
{
    for (auto& v : a)
        v *= s;
    trim(a);
    return a;
}

Poly pmul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty())
        return {};
    Poly r(a.size() + b.size() - 1, Q(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0)
            for (std::size_t j = 0; j < b.size(); ++j)
                r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

Poly ppow(const Poly& p, int e)
{
    Poly r{Q(1)};
    for (int i = 0; i < e; ++i)
        r = pmul(r, p);
    return r;
}

Poly pderiv(const Poly& p)
{
    Poly r;
    for (std::size_t i = 1; i < p.size(); ++i)
        r.push_back(p[i] * static_cast<long>(i));
    trim(r);
    return r;
}

Q peval(const Poly& p, const Q& x)
{
    Q acc = 0;
    for (std::size_t i = p.size(); i-- > 0;)
        acc = acc * x + p[i];
    return acc;
}

// Quotient of p by (xi - s); the caller knows the remainder vanishes.
Poly pdiv_lin(const Poly& p, const Q& s)
{
    if (p.size() < 2)
        return {};
    Poly q(p.size() - 1);
    Q carry = 0;
    for (std::size_t i = p.size(); i-- > 1;) {
        carry = p[i] + carry * s;
        q[i - 1] = carry;
    }
    trim(q);
    return q;
}

// Coefficients of p(s + t) in t.
Poly pshift(Poly p, const Q& s)
{
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = n - 1; j > i; --j)
            p[j - 1] += s * p[j];
    return p;
}

std::pair<Poly, Poly> pdivmod(Poly a, const Poly& b)
{
    trim(a);
    if (a.size() < b.size())
        return {{}, a};
    Poly q(a.size() - b.size() + 1, Q(0));
    for (std::size_t i = a.size(); i-- >= b.size();) {
        const Q f = a[i] / b.back();
        q[i - (b.size() - 1)] = f;
        for (std::size_t j = 0; j < b.size(); ++j)
            a[i - (b.size() - 1) + j] -= f * b[j];
        if (i == b.size() - 1)
            break;
    }
    trim(q);
    trim(a);
    return {q, a};
}

Poly lin(const Q& s) { return {Q(-s), Q(1)}; }

// Rational function num / (xi^e0 (xi-12)^e1 (xi+12)^e2).
const std::array<Q, 3> kPoint{Q(0), Q(12), Q(-12)};

struct RF {
    Poly num;
    std::array<int, 3> e{0, 0, 0};

    static RF constant(const Q& v)
    {
        RF r;
        if (v != 0)
            r.num = {v};
        return r;
    }

    void normalize()
    {
        trim(num);
        if (num.empty()) {
            e = {0, 0, 0};
            return;
        }
        for (int i = 0; i < 3; ++i)
            while (e[i] > 0 && peval(num, kPoint[i]) == 0) {
                num = pdiv_lin(num, kPoint[i]);
                --e[i];
            }
    }

    Poly den() const
    {
        Poly d{Q(1)};
        for (int i = 0; i < 3; ++i)
            d = pmul(d, ppow(lin(kPoint[i]), e[i]));
        return d;
    }

    bool zero() const { return num.empty(); }
};

RF operator+(const RF& a, const RF& b)
{
    RF r;
    for (int i = 0; i < 3; ++i)
        r.e[i] = std::max(a.e[i], b.e[i]);
    Poly na = a.num, nb = b.num;
    for (int i = 0; i < 3; ++i) {
        na = pmul(na, ppow(lin(kPoint[i]), r.e[i] - a.e[i]));
        nb = pmul(nb, ppow(lin(kPoint[i]), r.e[i] - b.e[i]));
    }
    r.num = padd(na, nb);
    r.normalize();
    return r;
}

RF operator*(const Q& s, RF a)
{
    a.num = pscale(a.num, s);
    a.normalize();
    return a;
}

RF operator-(const RF& a, const RF& b) { return a + Q(-1) * b; }

RF operator*(const RF& a, const RF& b)
{
    RF r;
    r.num = pmul(a.num, b.num);
    for (int i = 0; i < 3; ++i)
        r.e[i] = a.e[i] + b.e[i];
    r.normalize();
    return r;
}

// Multiply by xi^k0 (xi-12)^k1 (xi+12)^k2 (negative powers go to the denominator).
RF times_factors(RF a, std::array<int, 3> k)
{
    for (int i = 0; i < 3; ++i) {
        if (k[i] >= 0)
            a.num = pmul(a.num, ppow(lin(kPoint[i]), k[i]));
        else
            a.e[i] -= k[i];
    }
    a.normalize();
    return a;
}

// xi d/dxi
RF Dxi(const RF& f)
{
    if (f.zero())
        return f;
    Poly all{Q(1)};
    for (int i = 0; i < 3; ++i)
        all = pmul(all, lin(kPoint[i]));
    Poly t = pmul(pmul(lin(Q(0)), pderiv(f.num)), all);
    for (int i = 0; i < 3; ++i) {
        if (f.e[i] == 0)
            continue;
        Poly others = lin(Q(0));
        for (int j = 0; j < 3; ++j)
            if (j != i)
                others = pmul(others, lin(kPoint[j]));
        t = padd(t, pscale(pmul(f.num, others), Q(-f.e[i])));
    }
    RF r;
    r.num = t;
    for (int i = 0; i < 3; ++i)
        r.e[i] = f.e[i] + 1;
    r.normalize();
    return r;
}

Q value_at_zero(const RF& f)
{
    if (f.e[0] > 0)
        fail(ErrorKind::SingularRecurrence, "two-scale recursion: pole at xi = 0");
    Q d = 1;
    for (int i = 1; i < 3; ++i)
        for (int k = 0; k < f.e[i]; ++k)
            d *= -kPoint[i];
    return f.num.empty() ? Q(0) : f.num[0] / d;
}

struct Antiderivative {
    RF rat;
    std::array<Q, 3> log{Q(0), Q(0), Q(0)};   // coefficients of ln(xi - point)
};

Antiderivative integrate(const RF& f)
{
    Antiderivative out;
    if (f.zero())
        return out;
    const auto [q, r] = pdivmod(f.num, f.den());
    Poly P;
    P.push_back(Q(0));
    for (std::size_t i = 0; i < q.size(); ++i)
        P.push_back(q[i] / Q(static_cast<long>(i + 1)));
    trim(P);
    RF acc;
    acc.num = P;
    for (int i = 0; i < 3; ++i) {
        const int m = f.e[i];
        if (m == 0)
            continue;
        // Laurent coefficients at kPoint[i] from num(p+t) / prod_{j != i} (t + p - p_j)^{e_j}.
        const Poly N = pshift(f.num, kPoint[i]);
        Poly Dd{Q(1)};
        for (int j = 0; j < 3; ++j)
            if (j != i)
                Dd = pmul(Dd, ppow(Poly{kPoint[i] - kPoint[j], Q(1)}, f.e[j]));
        std::vector<Q> s(m, Q(0));
        for (int k = 0; k < m; ++k) {
            Q v = k < static_cast<int>(N.size()) ? N[k] : Q(0);
            for (int j = 1; j <= k && j < static_cast<int>(Dd.size()); ++j)
                v -= Dd[j] * s[k - j];
            s[k] = v / Dd[0];
        }
        for (int k = 2; k <= m; ++k) {
            const Q A = s[m - k];
            if (A == 0)
                continue;
            RF term;
            term.num = {Q(-A / Q(k - 1))};
            term.e[i] = k - 1;
            acc = acc + term;
        }
        out.log[i] = s[m - 1];
    }
    acc.normalize();
    out.rat = acc;
    return out;
}

RationalXi to_public(const RF& f)
{
    RationalXi r;
    if (f.e[0] != 0 || (f.e[1] != 0 && f.e[2] != 0))
        fail(ErrorKind::SingularRecurrence, "two-scale coefficient has an unexpected denominator");
    r.num = f.num;
    if (f.e[2] > 0) {
        r.sigma = -12;
        r.m = f.e[2];
    } else {
        r.sigma = 12;
        r.m = f.e[1];
    }
    return r;
}

RF F0()
{
    RF f;
    f.num = {Q(0), Q(144)};
    f.e[1] = 2;
    return f;
}

// u1 = xi F0'(xi), the homogeneous solution from the scaling symmetry.
RF U1() { return Dxi(F0()); }

struct Table {
    Q c;
    std::vector<RF> F;                 // F[last] still carries a free multiple of u1
    std::vector<Q> log12;              // coefficient of ln(xi - 12) at each order
    std::vector<bool> clean;           // no logarithm at all at this order
};

RF rhs(const std::vector<RF>& F, int n, const Q& c)
{
    const RF& a = F[n - 1];
    RF R = Q(-1) * Dxi(Dxi(a)) - Q(2 * n - 3) * Dxi(a);
    if (n >= 2) {
        const RF& b = F[n - 2];
        R = R - (Q(1, 4) * Dxi(Dxi(b)) + Q(n - 2) * Dxi(b) + Q((n - 2) * (n - 2)) * b);
    }
    for (int i = 1; i < n; ++i)
        R = R + Q(1, 2) * (F[i] * F[n - i]);
    if (n == 4)
        R = R - RF::constant(c);
    return R;
}

struct StepOut {
    RF Fn;
    Antiderivative W, V;
};

// Reduction of order: F = u1 V, W = int u1 R / xi with W(0) = 0, V = int W / (xi u1^2).
StepOut reduce(const RF& R)
{
    const RF u1 = U1();
    StepOut s;
    s.W = integrate(times_factors(u1 * R, {-1, 0, 0}));
    RF W = s.W.rat - RF::constant(value_at_zero(s.W.rat));
    RF inv;
    // 1/(xi u1^2): u1 = -144 xi (xi+12)/(xi-12)^3
    inv.num = {Q(1, 144 * 144)};
    inv.num = pmul(inv.num, ppow(lin(Q(12)), 6));
    inv.e = {3, 0, 2};
    inv.normalize();
    s.V = integrate(W * inv);
    s.Fn = u1 * s.V.rat;
    return s;
}

void step(Table& t)
{
    const int n = static_cast<int>(t.F.size());
    const RF u1 = U1();
    if (n >= 2) {
        // Fix the free multiple K of u1 in F_{n-1}: no ln(xi) at the origin at this order.
        auto lv0 = [&](const Q& K) {
            auto F = t.F;
            F[n - 1] = F[n - 1] + K * u1;
            return reduce(rhs(F, n, t.c)).V.log[0];
        };
        const Q r0 = lv0(Q(0)), r1 = lv0(Q(1)), rm = lv0(Q(-1));
        if (r1 + rm != 2 * r0 || r1 == r0)
            fail(ErrorKind::SingularRecurrence, "two-scale recursion: origin condition does not fix the constant");
        const Q K = -r0 / (r1 - r0);
        t.F[n - 1] = t.F[n - 1] + K * u1;
    }
    const StepOut s = reduce(rhs(t.F, n, t.c));
    t.F.push_back(s.Fn);
    t.log12.push_back(s.W.log[1]);
    bool clean = true;
    for (int i = 0; i < 3; ++i)
        clean = clean && s.W.log[i] == 0 && s.V.log[i] == 0;
    t.clean.push_back(clean);
}

std::mutex g_mutex;
std::map<std::string, Table> g_tables;

// Table with F_0..F_upto final (one extra step is taken to fix F_upto).
const Table& table(const Q& c, int upto)
{
    std::lock_guard<std::mutex> lock(g_mutex);
    auto& t = g_tables[c.get_str()];
    if (t.F.empty()) {
        t.c = c;
        t.F.push_back(F0());
        t.log12.push_back(Q(0));
        t.clean.push_back(true);
    }
    while (static_cast<int>(t.F.size()) < upto + 2)
        step(t);
    return t;
}

void check_order(int n)
{
    if (n < 0 || n > 30)
        fail(ErrorKind::InvalidArgument, "two-scale order must lie in [0, 30]");
}

std::vector<RationalXi> cached_public(bool g, int m)
{
    static std::mutex mu;
    static std::vector<RationalXi> Fs, Gs;
    std::lock_guard<std::mutex> lock(mu);
    auto& v = g ? Gs : Fs;
    while (static_cast<int>(v.size()) <= m)
        v.push_back(g ? compute_G(static_cast<int>(v.size())) : compute_F(static_cast<int>(v.size())));
    return std::vector<RationalXi>(v.begin(), v.begin() + m + 1);
}

} // namespace

cplx RationalXi::eval(cplx xi) const
{
    cplx acc = 0.0;
    for (std::size_t i = num.size(); i-- > 0;)
        acc = acc * xi + num[i].get_d();
    return acc / std::pow(xi - double(sigma), m);
}

cplx RationalXi::eval_derivative(cplx xi) const
{
    cplx p = 0.0, dp = 0.0;
    for (std::size_t i = num.size(); i-- > 0;) {
        dp = dp * xi + p;
        p = p * xi + num[i].get_d();
    }
    const cplx d = xi - double(sigma);
    return (dp * d - double(m) * p) / std::pow(d, m + 1);
}

Q RationalXi::eval(const Q& xi) const
{
    Q d = 1;
    for (int k = 0; k < m; ++k)
        d *= xi - sigma;
    return peval(num, xi) / d;
}

nlohmann::json to_json(const RationalXi& r)
{
    nlohmann::json j;
    j["sigma"] = r.sigma;
    j["m"] = r.m;
    auto& a = j["num"] = nlohmann::json::array();
    for (const auto& q : r.num)
        a.push_back(q.get_str());
    return j;
}

RationalXi compute_F(int n, const Q& c)
{
    check_order(n);
    if (n == 0)
        return to_public(F0());
    const auto& t = table(c, n);
    for (int k = 1; k <= n; ++k)
        if (!t.clean[k])
            fail(ErrorKind::ObstructionNonzero,
                 "compute_F: logarithmic term at order " + std::to_string(k) +
                     " (ln(xi-12) coefficient " + t.log12[k].get_str() + ")",
                 t.log12[k].get_d());
    return to_public(t.F[n]);
}

RationalXi compute_G(int n, const Q& c)
{
    check_order(n);
    std::vector<RF> F;
    if (n == 0) {
        F.push_back(F0());
    } else {
        compute_F(n, c);   // obstruction check
        const auto& t = table(c, n);
        F.assign(t.F.begin(), t.F.begin() + n + 1);
    }
    // g = 3 - 9 / (3 + h); reciprocal of P = 3 + sum F_j x^{-j} order by order.
    std::vector<RF> P = F;
    P[0] = P[0] + RF::constant(Q(3));
    // 1/P_0 = (xi-12)^2 / (3 (xi+12)^2)
    RF inv0;
    inv0.num = pscale(ppow(lin(Q(12)), 2), Q(1, 3));
    inv0.e[2] = 2;
    inv0.normalize();
    std::vector<RF> Rr{inv0};
    for (int k = 1; k <= n; ++k) {
        RF acc;
        for (int j = 1; j <= k; ++j)
            acc = acc + P[j] * Rr[k - j];
        Rr.push_back(Q(-1) * (acc * inv0));
    }
    RF G = Q(-9) * Rr[n];
    if (n == 0)
        G = G + RF::constant(Q(3));
    return to_public(G);
}

Q integrability_witness(const Q& c)
{
    return table(c, 6).log12[6];
}

cplx two_scale_xi(cplx x, cplx C) { return C / std::sqrt(x) * std::exp(-x); }

namespace {

bool base_region(cplx x, cplx xi, const RegionParams& p)
{
    const double a = std::arg(x);
    return std::abs(x) > p.R && a > -kPi / 2 + p.delta && a < kPi / 2 + p.delta && std::abs(xi) < 1.0 / p.eps;
}

} // namespace

bool in_region_F(cplx x, cplx xi, const RegionParams& p)
{
    return base_region(x, xi, p) && std::abs(xi - 12.0) > p.eps;
}

bool in_region_G(cplx x, cplx xi, const RegionParams& p)
{
    return base_region(x, xi, p) && std::abs(xi + 12.0) > p.eps;
}

TwoScaleValue eval_two_scale(cplx x, cplx C, int m, const RegionParams& p)
{
    check_order(m);
    TwoScaleValue out;
    out.xi = two_scale_xi(x, C);
    const bool f = in_region_F(x, out.xi, p), g = in_region_G(x, out.xi, p);
    if (!f && !g)
        fail(ErrorKind::OutsideRegion, "eval_two_scale: (x, xi) outside both regions");
    const bool useF = f && (!g || std::abs(out.xi - 12.0) >= std::abs(out.xi + 12.0));
    out.chart = useF ? TwoScaleChart::F : TwoScaleChart::G;
    const auto coeffs = cached_public(!useF, m);
    cplx acc = 0.0;
    for (int j = m; j >= 0; --j)
        acc = acc / x + coeffs[j].eval(out.xi);
    out.value = acc;
    out.h = useF ? acc : 3.0 * acc / (3.0 - acc);
    return out;
}

PolePrediction predict_pole(int n, cplx C, PoleFormula f)
{
    if (n < 1)
        fail(ErrorKind::InvalidArgument, "predict_pole: n must be >= 1");
    if (C == cplx(0.0))
        fail(ErrorKind::InvalidArgument, "predict_pole: C+ = 0 has no first pole array");
    PolePrediction r;
    r.n = n;
    const cplx N(0.0, 2.0 * kPi * n);
    const cplx L = std::log(C / (12.0 * std::sqrt(N)));
    r.L = L;
    r.leading = N + L;
    const cplx L2 = L * L, L3 = L2 * L;
    cplx t1 = -(109.0 / 120.0 + 0.5 * L) / N;
    cplx t2, t3;
    if (f == PoleFormula::Corrected) {
        t2 = (4699.0 / 2400.0 + 139.0 / 120.0 * L + 0.25 * L2) / (N * N);
        t3 = -(41402111.0 / 6480000.0 + 899.0 / 200.0 * L + 77.0 / 60.0 * L2 + L3 / 6.0) / (N * N * N);
    } else {
        t2 = (4699.0 / 2400.0 + 139.0 / 120.0 * L + 0.25 * L2 * L2) / (N * N);
        t3 = -(41402111.0 / 6480000.0 - 899.0 / 200.0 * L - 77.0 / 60.0 * L2 - L3 / 6.0) / (N * N * N);
    }
    r.x = N + L + t1 + t2 + t3;
    return r;
}

} // namespace p1

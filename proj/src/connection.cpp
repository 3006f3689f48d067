#include "p1/connection.hpp"

#include <cmath>
#include <sstream>

#include "p1/errors.hpp"
#include "p1/series_core.hpp"

namespace p1 {

namespace {

using cld = std::complex<long double>;

constexpr int kSeriesOrder = 120;   // c_k overflows a double near k = 170
constexpr int kT1Terms = 12;

struct Tables {
    std::vector<long double> c;   // c[k] multiplies x^{-k}
    FormalSeries t1;
};

const Tables& tables()
{
    static const Tables t = [] {
        Tables out;
        const auto h0 = h0_series(kSeriesOrder);
        out.c.assign(kSeriesOrder + 1, 0.0L);
        for (int k = 0; k <= kSeriesOrder; ++k)
            out.c[k] = static_cast<long double>(h0.coeff_at(-2 * k).get_d());
        out.t1 = transseries_level(1, kT1Terms);
        return out;
    }();
    return t;
}

cplx truncated_difference(cplx hx, cplx x, int N)
{
    const auto& c = tables().c;
    if (N > kSeriesOrder)
        fail(ErrorKind::InvalidArgument, "extract_constant: |x| beyond tabulated series order");
    const cld xi = cld(1.0L) / cld(x.real(), x.imag());
    cld sum = 0.0L;
    for (int k = N; k >= 1; --k)
        sum = (sum + c[k]) * xi;
    const cld d = cld(hx.real(), hx.imag()) - sum;
    return cplx(static_cast<double>(d.real()), static_cast<double>(d.imag()));
}

// Least squares y_i = A + B / x_i in the complex field.
JumpFit fit_two_term(const std::vector<double>& xs, const std::vector<cplx>& ys)
{
    const std::size_t n = xs.size();
    double s00 = 0, s01 = 0, s11 = 0;
    cplx r0 = 0, r1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = 1.0 / xs[i];
        s00 += 1;
        s01 += u;
        s11 += u * u;
        r0 += ys[i];
        r1 += ys[i] * u;
    }
    const double det = s00 * s11 - s01 * s01;
    if (!(std::abs(det) > 1e-300))
        fail(ErrorKind::FitDegenerate, "jump fit: singular normal equations");
    JumpFit f;
    const cplx A = (s11 * r0 - s01 * r1) / det;
    const cplx B = (s00 * r1 - s01 * r0) / det;
    f.constant = A;
    f.a1 = B / A;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i)
        ss += std::norm(ys[i] - A - B / xs[i]);
    f.residual = std::sqrt(ss / static_cast<double>(n)) / std::abs(A);
    return f;
}

void check_grid(const std::vector<double>& grid, const char* who)
{
    if (grid.size() < 3)
        fail(ErrorKind::FitDegenerate, std::string(who) + ": need at least 3 grid points");
    double lo = grid.front(), hi = grid.front();
    for (double g : grid) {
        if (!(g > 0) || !std::isfinite(g))
            fail(ErrorKind::FitDegenerate, std::string(who) + ": grid points must be positive");
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    if (hi - lo < std::log(10.0))
        fail(ErrorKind::FitDegenerate, std::string(who) + ": grid spans less than a decade of e^{-x}");
}

JumpFit fit_jump(const std::function<cplx(double)>& diff, const std::vector<double>& grid, double sign,
                 const char* who)
{
    check_grid(grid, who);
    std::vector<cplx> ys;
    double peak = 0;
    for (double x : grid) {
        const cplx d = diff(x);
        if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
            fail(ErrorKind::FitDegenerate, std::string(who) + ": non-finite evaluator output");
        const double f = std::exp(-x) / std::sqrt(x);
        ys.push_back(sign * d / f);
        peak = std::max(peak, std::abs(ys.back()));
    }
    if (!(peak > 1e-8))
        fail(ErrorKind::FitDegenerate, std::string(who) + ": no exponentially small signal");
    auto f = fit_two_term(grid, ys);
    if (f.residual > 0.1)
        fail(ErrorKind::FitDegenerate, std::string(who) + ": difference is not of the form e^{-x} x^{-1/2}",
             f.residual);
    return f;
}

} // namespace

cplx mu_closed_form() { return {0.0, std::sqrt(6.0 / (5.0 * kPi))}; }

ExtractResult extract_constant(const Evaluator& h, double arg_x, const std::vector<double>& radii,
                               const ExtractOptions& opt)
{
    return extract_constant(RemainderEvaluator([&](cplx x, int N) { return truncated_difference(h(x), x, N); }),
                            arg_x, radii, opt);
}

ExtractResult extract_constant(const RemainderEvaluator& rem, double arg_x, const std::vector<double>& radii,
                               const ExtractOptions& opt)
{
    if (radii.size() < 2)
        fail(ErrorKind::InvalidArgument, "extract_constant: schedule needs at least two radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            fail(ErrorKind::InvalidArgument, "extract_constant: schedule must be increasing");
    if (radii.front() < 4)
        fail(ErrorKind::InvalidArgument, "extract_constant: radii must be >= 4");
    if (std::cos(arg_x) < -1e-12)
        fail(ErrorKind::InvalidArgument, "extract_constant: arg x outside the right half plane");
    if (opt.levels < 0 || opt.offset < 0)
        fail(ErrorKind::InvalidArgument, "extract_constant: bad options");

    const auto& t1 = tables().t1;
    ExtractResult out;
    std::vector<double> t;
    for (double r : radii) {
        const cplx x = std::polar(r, arg_x);
        const int N = static_cast<int>(std::floor(r)) - opt.offset;
        const cplx d = rem(x, std::max(N, 0));
        out.raw.push_back(std::exp(x) * std::sqrt(x) * d / t1.eval(x));
        t.push_back(1.0 / std::sqrt(r));
    }

    // Neville table towards t = 0.
    const std::size_t n = radii.size();
    const int L = std::min<int>(opt.levels, static_cast<int>(n) - 2);
    std::vector<std::vector<cplx>> T(n);
    for (std::size_t i = 0; i < n; ++i) {
        T[i].push_back(out.raw[i]);
        for (int j = 1; j <= std::min<int>(L, static_cast<int>(i)); ++j) {
            const double ta = t[i - j], tb = t[i];
            T[i].push_back((ta * T[i][j - 1] - tb * T[i - 1][j - 1]) / (ta - tb));
        }
    }
    double best = INFINITY;
    for (int j = 0; j <= L; ++j) {
        const double e = std::abs(T[n - 1][j] - T[n - 2][j]);
        if (e < best) {
            best = e;
            out.value = T[n - 1][j];
            out.column = j;
        }
    }
    out.err = best;
    if (!(best <= opt.tol)) {
        std::ostringstream os;
        os << "extract_constant: sequence does not settle (err " << best << "); tail";
        for (std::size_t i = n >= 3 ? n - 3 : 0; i < n; ++i)
            os << " " << out.raw[i];
        fail(ErrorKind::NoConvergence, os.str(), best);
    }
    return out;
}

JumpFit measure_mu(const Evaluator& h_plus, const Evaluator& h_minus, const std::vector<double>& grid)
{
    return fit_jump([&](double x) { return h_plus(x) - h_minus(x); }, grid, -1.0, "measure_mu");
}

JumpFit fit_second_stokes_line(const Evaluator& h_sigma, const Evaluator& h_plus,
                               const std::vector<double>& grid)
{
    return fit_jump([&](double r) { return h_plus(-r) - h_sigma(-r); }, grid, 1.0,
                    "verify_second_stokes_line");
}

cplx verify_second_stokes_line(const Evaluator& h_sigma, const Evaluator& h_plus,
                               const std::vector<double>& grid, cplx mu)
{
    return fit_second_stokes_line(h_sigma, h_plus, grid).constant - mu;
}

} // namespace p1

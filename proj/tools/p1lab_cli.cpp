#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "p1/borel_engine.hpp"
#include "p1/config.hpp"
#include "p1/connection.hpp"
#include "p1/cycle_dynamics.hpp"
#include "p1/errors.hpp"
#include "p1/ode_engine.hpp"
#include "p1/pole_sector.hpp"
#include "p1/series_core.hpp"

using namespace p1;
using nlohmann::json;

namespace {

struct Flags {
    std::string config, out, C = "1", grid, n = "5..15";
    double tol = 0, phi = -kPi / 4, x0 = 50, s0 = -0.1;
    int order = -1;
};

struct Grid {
    double a, b;
    int n;
    double at(int k) const { return n == 1 ? a : a + (b - a) * k / (n - 1); }
};

Grid parse_grid(const std::string& s, Grid def)
{
    if (s.empty())
        return def;
    Grid g{};
    char tail;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &g.a, &g.b, &g.n, &tail) != 3 || g.n < 1)
        fail(ErrorKind::InvalidArgument, "grid must be a:b:n, got '" + s + "'");
    return g;
}

cplx parse_complex(const std::string& s)
{
    double re = 0, im = 0;
    char tail;
    const int k = std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &tail);
    if (k != 1 && k != 2)
        fail(ErrorKind::InvalidArgument, "expected re,im, got '" + s + "'");
    return {re, im};
}

std::pair<int, int> parse_span(const std::string& s)
{
    int a = 0, b = 0;
    char tail;
    if (std::sscanf(s.c_str(), "%d..%d%c", &a, &b, &tail) != 2 || a < 1 || b < a)
        fail(ErrorKind::InvalidArgument, "expected a..b with 1 <= a <= b, got '" + s + "'");
    return {a, b};
}

class Output {
public:
    Output(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {}

    json header() const
    {
        return {{"command", command_},
                {"config_hash", cfg_.hash()},
                {"version", kVersion},
                {"modules", module_versions()},
                {"config", to_json(cfg_)}};
    }

    void write_json(const std::string& name, json body) const
    {
        nlohmann::ordered_json j;
        j["header"] = header();
        for (auto& [k, v] : body.items())
            j[k] = v;
        emit(name, j.dump(2) + "\n");
    }

    void write_csv(const std::string& name, const std::string& columns, const std::string& rows,
                   const std::string& extra = "") const
    {
        std::ostringstream os;
        os << "# command: " << command_ << "\n# config_hash: " << cfg_.hash() << "\n# version: " << kVersion
           << "\n# modules: " << module_versions().dump() << "\n"
           << extra << columns << "\n"
           << rows;
        emit(name, os.str());
    }

private:
    void emit(const std::string& name, const std::string& text) const
    {
        if (cfg_.out_dir.empty()) {
            std::cout << text;
            return;
        }
        std::filesystem::create_directories(cfg_.out_dir);
        const auto path = std::filesystem::path(cfg_.out_dir) / name;
        std::ofstream f(path);
        if (!f)
            fail(ErrorKind::ConfigError, "cannot write " + path.string());
        f << text;
        std::cout << path.string() << "\n";
    }

    const RunConfig& cfg_;
    std::string command_;
};

std::string row(std::initializer_list<double> v)
{
    std::string s;
    char buf[40];
    for (double d : v) {
        std::snprintf(buf, sizeof buf, "%.17g", d);
        s += (s.empty() ? "" : ",") + std::string(buf);
    }
    return s + "\n";
}

const ContinuedGerm& H0(const RunConfig& cfg)
{
    static std::map<int, ContinuedGerm> cache;
    auto it = cache.find(cfg.N_borel);
    if (it == cache.end())
        it = cache.emplace(cfg.N_borel, ContinuedGerm(solve_H0_convolution(cfg.N_borel))).first;
    return it->second;
}

bool stokes_direction(double phi)
{
    const double r = std::remainder(phi, kPi);
    return std::abs(r) < 1e-12;
}

void cmd_coeffs(const RunConfig& cfg, const Flags& f, const Output& out)
{
    const int N = f.order >= 0 ? f.order : cfg.N_series;
    const auto ts = build_transseries(1, N);
    out.write_json("coeffs.json", {{"h0", to_json(ts.h0)}, {"t1", to_json(ts.t[0])}});
}

void cmd_borel(const RunConfig& cfg, const Flags& f, const Output& out)
{
    const int N = f.order >= 0 ? f.order : cfg.N_borel;
    const auto g = solve_H0_convolution(N);
    const auto S = estimate_S(g);
    out.write_json("borel.json", {{"germ", to_json(g)},
                                  {"S", {{"value", {S.S.real(), S.S.imag()}}, {"err", S.err}, {"radius", S.radius}}}});
}

void cmd_sum(const RunConfig& cfg, const Flags& f, const Output& out)
{
    const cplx C = parse_complex(f.C);
    const auto g = parse_grid(f.grid, {8, 20, 13});
    const TransseriesGerms G(cfg.K_levels, cfg.N_borel, cfg.N_series);
    const double tol = f.tol > 0 ? f.tol : cfg.quad_tol;
    LaplaceOptions lo;
    lo.tol = tol;
    const bool two_sided = stokes_direction(f.phi);
    std::string rows;
    for (int k = 0; k < g.n; ++k) {
        const cplx x = std::polar(g.at(k), -f.phi);
        SumResult r;
        if (two_sided) {
            // Average of the lateral sums on either side of the Stokes direction.
            const auto a = sum_transseries(G, C, f.phi - kPi / 4, x, cfg.K_levels, tol, lo);
            const auto b = sum_transseries(G, C, f.phi + kPi / 4, x, cfg.K_levels, tol, lo);
            r.value = 0.5 * (a.value + b.value);
            r.err = std::max(a.err, b.err);
        } else {
            r = sum_transseries(G, C, f.phi, x, cfg.K_levels, tol, lo);
        }
        rows += row({x.real(), x.imag(), r.value.real(), r.value.imag(), r.err});
    }
    out.write_csv("sum.csv", "x_re,x_im,value_re,value_im,err_est", rows,
                  two_sided ? "# two-sided average at a Stokes direction\n" : "");
}

void cmd_integrate(const RunConfig& cfg, const Flags& f, const Output& out)
{
    const cplx C = parse_complex(f.C);
    const auto g = parse_grid(f.grid, {30, 15, 2});
    const double arg = -f.phi;
    IntegrateOptions io;
    io.rtol = f.tol > 0 ? f.tol : cfg.ode_tol;
    const cplx x0 = std::polar(g.at(0), arg);
    const auto seed = far_field_init(C, x0, cfg.N_series, cfg.K_levels);
    Path path(x0);
    for (int k = 1; k < g.n; ++k)
        path.line_to(std::polar(g.at(k), arg));
    const auto t = integrate_path(x0, seed.s, path, io);
    const auto poles = detect_poles(t, io);
    json j = to_json(t);
    j["poles"] = json::array();
    for (const auto& p : poles)
        j["poles"].push_back({{"x", {p.x.real(), p.x.imag()}}});
    j["seed"] = {{"err", seed.err}, {"warn", seed.warn}};
    out.write_json("trace.json", j);
}

void cmd_poles(const RunConfig& cfg, const Flags& f, const Output& out)
{
    const cplx C = parse_complex(f.C);
    const auto [n0, n1] = parse_span(f.n);
    IntegrateOptions io;
    io.rtol = f.tol > 0 ? f.tol : cfg.ode_tol;
    const TransseriesGerms G(cfg.K_levels, cfg.N_borel, cfg.N_series);
    const cplx x0 = std::polar(12.0, 1.0);
    const auto seed = sum_transseries(G, C, -1.0, x0, cfg.K_levels);
    std::vector<PolePrediction> pred;
    Path path(x0);
    for (int n = std::max(1, n0 - 1); n <= n1 + 1; ++n) {
        pred.push_back(predict_pole(n, C));
        path.line_to(pred.back().x + 0.5);
    }
    const auto trace = integrate_path(x0, {seed.value, seed.derivative}, path, io);
    const auto found = detect_poles(trace, io);
    std::string rows;
    std::vector<double> ln, lg;
    for (const auto& p : pred) {
        if (p.n < n0 || p.n > n1)
            continue;
        const PoleRecord* best = nullptr;
        for (const auto& q : found)
            if (!best || std::abs(q.x - p.x) < std::abs(best->x - p.x))
                best = &q;
        if (!best || std::abs(best->x - p.x) > 1.0) {
            const double nan = std::nan("");
            rows += std::to_string(p.n) + "," + row({p.x.real(), p.x.imag(), nan, nan, nan});
            continue;
        }
        const double gap = std::abs(best->x - p.x);
        rows += std::to_string(p.n) + "," + row({p.x.real(), p.x.imag(), best->x.real(), best->x.imag(), gap});
        ln.push_back(std::log(p.n));
        lg.push_back(std::log(gap));
    }
    std::string fit;
    if (ln.size() > 2) {
        double mx = 0, my = 0, sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < ln.size(); ++i) {
            mx += ln[i] / ln.size();
            my += lg[i] / ln.size();
        }
        for (std::size_t i = 0; i < ln.size(); ++i) {
            sxy += (ln[i] - mx) * (lg[i] - my);
            sxx += (ln[i] - mx) * (ln[i] - mx);
        }
        char buf[80];
        std::snprintf(buf, sizeof buf, "# fit: log|gap| vs log n slope %.4f\n", sxy / sxx);
        fit = buf;
    }
    out.write_csv("poles.csv", "n,predicted_re,predicted_im,detected_re,detected_im,gap", rows, fit);
}

void cmd_stokes(const RunConfig& cfg, const Flags&, const Output& out)
{
    const auto& H = H0(cfg);
    std::vector<double> far, grid;
    for (double r = 32; r <= 48; r += 2)
        far.push_back(r);
    for (double r = 8; r <= 20; r += 1)
        grid.push_back(r);
    auto rem_up = [&](cplx x, int N) { return laplace_ray_remainder(H, -std::arg(x), x, N).value; };
    auto rem_low = [&](cplx x, int N) {
        return laplace_ray_remainder(H, -std::arg(x), x, N).value + jump_via_hankel(H, x).value;
    };
    ExtractOptions eo;
    eo.tol = cfg.fit_tol;
    const auto Cp = extract_constant(rem_up, kPi / 4, far, eo);
    const auto Cm = extract_constant(rem_low, -kPi / 4, far, eo);
    auto hp = [&](cplx x) { return laplace_ray(H, -kPi / 4, x).value; };
    auto hm = [&](cplx x) { return laplace_ray(H, kPi / 4, x).value; };
    const auto fit = measure_mu(hp, hm, grid);
    const cplx mu = mu_closed_form();
    auto c = [](cplx z) { return json{z.real(), z.imag()}; };
    out.write_json("stokes.json",
                   {{"C_plus", c(Cp.value)},
                    {"C_minus", c(Cm.value)},
                    {"mu_fit", c(fit.constant)},
                    {"mu_closed", c(mu)},
                    {"residuals",
                     {{"C_plus_err", Cp.err},
                      {"C_minus_err", Cm.err},
                      {"jump_plus_mu_closed", std::abs(Cp.value - Cm.value + mu)},
                      {"abs_mu_fit_minus_abs_mu_closed", std::abs(fit.constant) - std::abs(mu)},
                      {"fit_rms", fit.residual}}}});
}

void cmd_invariants(const RunConfig&, const Flags& f, const Output& out)
{
    const int N = f.order >= 0 ? f.order : int(f.x0 / 2);
    StepOptions so;
    if (f.tol > 0)
        so.rtol = f.tol;
    const auto r = run_cycles(std::polar(f.x0, -kPi / 2 * 1.05), f.s0, N, so);
    std::string rows;
    for (const auto& s : r.states)
        rows += std::to_string(s.n) + "," +
                row({s.x.real(), s.x.imag(), s.s.real(), s.s.imag(), s.Q.real(), s.Q.imag(), s.K_shifted.real(),
                     s.K_shifted.imag()});
    char buf[200];
    std::snprintf(buf, sizeof buf, "# kappa0: %.17g,%.17g\n# Q_drift: %.6g\n# K_drift: %.6g\n# terminated: %d\n",
                  r.kappa0.real(), r.kappa0.imag(), r.Q_drift, r.K_drift, int(r.terminated));
    out.write_csv("invariants.csv", "n,x_re,x_im,s_re,s_im,Q_re,Q_im,K_re,K_im", rows, buf);
}

int cmd_verify(const RunConfig& cfg, const Output& out)
{
    const auto r = run_acceptance([](const CheckLine& c) { std::cerr << format_line(c) << std::endl; });
    out.write_json("verify.json", to_json(r));
    (void)cfg;
    return r.all_pass() ? 0 : 1;
}

int error_json(const std::string& kind, const std::string& msg, double estimate = std::nan(""))
{
    json j{{"error", {{"kind", kind}, {"message", msg}}}};
    if (std::isfinite(estimate))
        j["error"]["estimate"] = estimate;
    std::cout << j.dump() << "\n";
    return 2;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"p1lab: transseries, Borel sums, poles and cycles for a Painleve I normal form"};
    app.require_subcommand(1);
    Flags f;
    auto common = [&](CLI::App* s) {
        s->add_option("--config", f.config, "flat key = value config file");
        s->add_option("--out", f.out, "output directory (default: stdout)");
        s->add_option("--tol", f.tol, "tolerance of the main numerical step");
        return s;
    };
    auto* coeffs = common(app.add_subcommand("coeffs", "exact series coefficients"));
    coeffs->add_option("--order", f.order, "truncation order");
    auto* borel = common(app.add_subcommand("borel", "Borel germ and singularity constant"));
    borel->add_option("--order", f.order, "number of germ coefficients");
    auto* sum = common(app.add_subcommand("sum", "Borel-summed transseries on a radial grid"));
    sum->add_option("--C", f.C, "transseries parameter re,im");
    sum->add_option("--phi", f.phi, "Laplace direction; arg x = -phi");
    sum->add_option("--grid", f.grid, "radii a:b:n");
    auto* integ = common(app.add_subcommand("integrate", "integrate the ODE along a ray"));
    integ->add_option("--C", f.C, "transseries parameter re,im");
    integ->add_option("--phi", f.phi, "arg x = -phi");
    integ->add_option("--grid", f.grid, "radii a:b:n, seeded at a");
    auto* poles = common(app.add_subcommand("poles", "predicted vs detected poles"));
    poles->add_option("--C", f.C, "transseries parameter re,im");
    poles->add_option("--n", f.n, "pole indices a..b");
    auto* stokes = common(app.add_subcommand("stokes", "constants beyond all orders and the Stokes multiplier"));
    auto* inv = common(app.add_subcommand("invariants", "Poincare map and adiabatic invariants"));
    inv->add_option("--x0", f.x0, "starting |x|");
    inv->add_option("--s0", f.s0, "starting energy (real)");
    inv->add_option("--order", f.order, "number of cycles (default |x0|/2)");
    auto* verify = common(app.add_subcommand("verify", "run the acceptance checks"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return error_json("InvalidArgument", e.what());
    }

    try {
        RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
        if (!f.out.empty())
            cfg.out_dir = f.out;
        if (f.order == 0 || f.order < -1)
            fail(ErrorKind::InvalidArgument, "--order must be positive");
        if (f.tol < 0)
            fail(ErrorKind::InvalidArgument, "--tol must be positive");
        cfg.validate();
        const std::string name = app.get_subcommands().front()->get_name();
        const Output out(cfg, name);
        if (*coeffs) cmd_coeffs(cfg, f, out);
        else if (*borel) cmd_borel(cfg, f, out);
        else if (*sum) cmd_sum(cfg, f, out);
        else if (*integ) cmd_integrate(cfg, f, out);
        else if (*poles) cmd_poles(cfg, f, out);
        else if (*stokes) cmd_stokes(cfg, f, out);
        else if (*inv) cmd_invariants(cfg, f, out);
        else if (*verify) return cmd_verify(cfg, out);
        return 0;
    } catch (const Error& e) {
        return error_json(kind_name(e.kind()), e.what(), e.estimate());
    } catch (const std::exception& e) {
        return error_json("InvalidArgument", e.what());
    }
}

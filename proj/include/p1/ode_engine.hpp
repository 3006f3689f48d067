#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "p1/types.hpp"

namespace p1 {

inline constexpr double kForcing = 392.0 / 625.0;

struct HState {
    cplx h;
    cplx hp;
};

// h'' for h'' + h'/x - h - h^2/2 - 392/(625 x^4) = 0.
cplx rhs_h(cplx x, cplx h, cplx hp);

// Chart e = 3 - g = 9/(3 + h), with g = h/(1 + h/3). Regular at the double poles of h.
cplx rhs_e(cplx x, cplx e, cplx ep);
HState e_to_h(cplx e, cplx ep);
std::array<cplx, 2> h_to_e(cplx h, cplx hp);

// First-order normal form y' = -(Lambda + B/x) y + g(x, y), Lambda = diag(1,-1), B = I/2.
using Vec2 = std::array<cplx, 2>;
Vec2 g_nonlinear(cplx x, const Vec2& y);
Vec2 rhs_y(cplx x, const Vec2& y);
HState y_to_h(cplx x, const Vec2& y);
Vec2 h_to_y(cplx x, const HState& s);

// Painleve I in the form y'' = 6 y^2 + z.
struct ZState {
    cplx z;
    cplx y;
    cplx yp;
};
cplx z_scale();  // z = z_scale() x^{4/5}
ZState map_x_to_z(cplx x, const HState& s);
// Inverse on the principal sheet; BranchCut when z/z_scale() is outside the image of arg x in (-pi, pi].
std::pair<cplx, HState> map_z_to_x(const ZState& s);

enum class Chart { H, G };
const char* chart_name(Chart c);

struct IntegrateOptions {
    double rtol = 1e-12;
    double atol = 1e-20;
    double enter_g = 10.0;   // switch to the e-chart when |h| exceeds this
    double exit_g = 5.0;     // and back when |h| drops below this
    double h_init = 1e-2;
    double h_min = 1e-12;
    double max_chord = 0.02;  // arc discretization, in radians
    double pole_guard = 0.25; // detour radius around poles met in the e-chart (0 disables)
    long max_steps = 2000000;
};

// Path made of straight segments; arcs are split into chords.
class Path {
public:
    explicit Path(cplx start);
    Path& line_to(cplx x);
    // Arc around the origin at the current radius, to the (continuous) angle theta.
    Path& arc_to(double theta, double max_chord = 0.02);
    const std::vector<cplx>& nodes() const { return nodes_; }
    double angle() const { return theta_; }

private:
    std::vector<cplx> nodes_;
    double theta_;
};

struct Sample {
    cplx x;
    HState s;
    Chart chart;
};

// One accepted step on a straight piece, with the data for quintic Hermite dense output.
struct StepRecord {
    cplx x0;
    cplx dx;  // x(s) = x0 + s dx, s in [0, 1]
    Chart chart;
    cplx u0, up0, upp0;
    cplx u1, up1, upp1;

    // Chart variable and its x-derivative at parameter s.
    std::array<cplx, 2> dense(double s) const;
};

struct PoleRecord {
    cplx x;
    int index = -1;
    double witness = 0.0;  // |g - 3| at the refined location
    cplx laurent_a;        // h ~ a / (x - x0)^2
};

struct SolutionTrace {
    std::vector<Sample> samples;
    std::vector<StepRecord> steps;
    std::vector<PoleRecord> poles;
    int chart_switches = 0;
    long rejected = 0;

    const Sample& back() const { return samples.back(); }
};

nlohmann::json to_json(const SolutionTrace& t);

SolutionTrace integrate_path(cplx x0, const HState& s0, const Path& path, const IntegrateOptions& opt = {});

// Integrate a single straight piece in the given chart (used for pole refinement).
std::array<cplx, 2> integrate_chart(Chart c, cplx x0, std::array<cplx, 2> u0, cplx x1,
                                    const IntegrateOptions& opt = {});

std::vector<PoleRecord> detect_poles(const SolutionTrace& t, const IntegrateOptions& opt = {}, double tol = 1e-10);

struct SeedResult {
    HState s;
    double err = 0.0;
    bool warn = false;
};

// Truncated transseries seed; the h0 part is cut at its smallest term.
SeedResult far_field_init(cplx C, cplx x0, int N = 200, int K = 4, double tol = 1e-12);

struct ContinuationPair {
    SolutionTrace ccw;  // to arg x = 3 pi / 2
    SolutionTrace cw;   // to arg x = -pi
    double R = 0.0;
};

// Tritronquee seeded at R e^{i pi/4} from the Borel sum, continued both ways around.
ContinuationPair continue_around(double R, const IntegrateOptions& opt = {});

} // namespace p1

#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "p1/types.hpp"

namespace p1 {

// Roots of u^3/3 + u^2 + s. enclosed[0] is the root near -3, enclosed[1] the one
// that meets it at s = -4/3; excluded is the third root.
struct CubicData {
    cplx s;
    std::array<cplx, 2> enclosed;
    cplx excluded;
};

// Roots at s, labelled by continuity from s = -2/3 along a straight path.
CubicData cubic_data(cplx s, double guard = 0.01);
// Roots at s, labelled by proximity to a previous labelling.
CubicData track_roots(cplx s, const CubicData& prev);

// Ellipse with vertices u0 = -4 and apex, minor semi-axis b.
struct Cycle {
    cplx u0 = -4.0;
    cplx apex;
    double b = 1.2;
    double margin = 0.0;   // smallest distance from a root to the contour

    cplx point(double t) const;       // t in [0, 2 pi), t = 0 at u0, counterclockwise
    cplx tangent(double t) const;
};

Cycle make_cycle(const CubicData& c);

struct CycleValue {
    cplx value;
    double err = 0.0;
};

// J = closed integral of R du, L = closed integral of du / R, R(u0) with Re R > 0.
CycleValue cycle_J(cplx s, double guard = 0.01);
CycleValue cycle_L(cplx s, double guard = 0.01);
CycleValue cycle_J(const CubicData& c);
CycleValue cycle_L(const CubicData& c);
// On a caller-chosen contour through u0 (must separate the roots as make_cycle does).
CycleValue cycle_J(const CubicData& c, const Cycle& contour);
CycleValue cycle_L(const CubicData& c, const Cycle& contour);

cplx rho(cplx s);   // 5 / (3 s (3 s + 4))

// Solution of J'' + rho J / 4 = 0 vanishing at 0 with unit slope (Frobenius exponent 1).
std::array<cplx, 2> J_hat(cplx s);   // value, derivative

struct JOdeRow {
    cplx s;
    cplx J, dJ;           // continued by the ODE
    cplx J_hat, dJ_hat;
    cplx wronskian;       // J dJ_hat - dJ J_hat
    cplx K;               // J_hat / J
    double match = 0.0;   // |J_ode - cycle_J| / |cycle_J|
};

struct JOdeTable {
    std::vector<JOdeRow> rows;
    cplx kappa0;
    double wronskian_variation = 0.0;
};

// Continue J (from quadrature at path[0]) and J_hat (Frobenius) along the polygon path.
JOdeTable solve_J_ode(const std::vector<cplx>& path, double match_tol = 1e-8);

struct StepOptions {
    double rtol = 1e-11;
    double atol = 1e-13;
    bool autonomous = false;   // drop the 1/x terms: s frozen, x advances by L(s)
};

struct PoincareResult {
    cplx x, s;
    CubicData roots;   // labelling at the new s
};

PoincareResult poincare_step(cplx x, cplx s, const CubicData& roots, const StepOptions& opt = {});
PoincareResult poincare_step(cplx x, cplx s, const StepOptions& opt = {});

struct CycleState {
    int n = 0;
    cplx x, s;
    cplx J, L;
    cplx Q;
    cplx K;
    cplx K_shifted;   // K(s_n) + 2 n kappa0 / Q_0
};

nlohmann::json to_json(const CycleState& c);

struct CycleRun {
    std::vector<CycleState> states;
    cplx kappa0;
    bool terminated = false;    // arg x reached -pi + 0.1
    double Q_drift = 0.0;       // max |Q_n / Q_0 - 1|
    double K_drift = 0.0;       // max |K_shifted_n - K_shifted_0| / max |K_n - K_0|
};

CycleRun run_cycles(cplx x0, cplx s0, int N, const StepOptions& opt = {});

struct Stok2Result {
    cplx mu;
    double residual = 0.0;
};

// Stokes multiplier from the pole-sector matching condition with integer N.
Stok2Result solve_stok2(int N);
// lhs - rhs of the matching condition at (mu, N), scaled by 5 pi^2.
cplx stok2_residual(cplx mu, int N);

} // namespace p1

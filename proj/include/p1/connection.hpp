#pragma once

#include <functional>
#include <vector>

#include "p1/types.hpp"

namespace p1 {

using Evaluator = std::function<cplx(cplx)>;
// (x, N) -> h(x) - sum_{k<=N} c_k x^{-k}, for evaluators that can avoid the cancellation.
using RemainderEvaluator = std::function<cplx(cplx, int)>;

// i sqrt(6/(5 pi))
cplx mu_closed_form();

struct ExtractOptions {
    int levels = 3;        // Richardson eliminations in |x|^{-1/2}
    int offset = 0;        // truncate at k <= floor|x| - offset
    double tol = 1e-3;     // NoConvergence above this error estimate
};

struct ExtractResult {
    cplx value;
    double err = 0.0;
    int column = 0;               // Richardson column that was selected
    std::vector<cplx> raw;        // e^x x^{1/2} (h - truncated series) / t_1 per radius
};

// Constant beyond all orders of h along arg x = arg_x, from the radii schedule.
ExtractResult extract_constant(const Evaluator& h, double arg_x, const std::vector<double>& radii,
                               const ExtractOptions& opt = {});
ExtractResult extract_constant(const RemainderEvaluator& rem, double arg_x, const std::vector<double>& radii,
                               const ExtractOptions& opt = {});

struct JumpFit {
    cplx constant;     // mu for measure_mu, the fitted constant for the second line
    cplx a1;
    double residual = 0.0;  // rms relative misfit of the two-term model
};

// Fit h_plus - h_minus = -mu e^{-x} x^{-1/2} (1 + a1/x) on x > 0.
JumpFit measure_mu(const Evaluator& h_plus, const Evaluator& h_minus, const std::vector<double>& grid);

// Fit h_plus - h_sigma = c e^{-|x|} |x|^{-1/2} (1 + a1/|x|) at x = -|x|; the grid holds |x|.
JumpFit fit_second_stokes_line(const Evaluator& h_sigma, const Evaluator& h_plus,
                               const std::vector<double>& grid);

// Fitted constant minus mu.
cplx verify_second_stokes_line(const Evaluator& h_sigma, const Evaluator& h_plus,
                               const std::vector<double>& grid, cplx mu);

struct ConnectionData {
    cplx C_plus;
    cplx C_minus;
    cplx mu_measured;
    cplx mu_closed_form = p1::mu_closed_form();
};

} // namespace p1

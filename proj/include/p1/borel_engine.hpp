#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "p1/borel_germ.hpp"
#include "p1/series_core.hpp"

namespace p1 {

BorelGerm solve_H0_convolution(int N, const Q& c4 = c4_default());

BorelGerm germ_Hk(const Transseries& ts, int k);
BorelGerm germ_Hk(int k, int N);

// Analytic continuation of g(p) = p^alpha A(p) off the real axis.
// A is re-expanded in w = p / (1 + sqrt(1 - p^2)), which maps the plane cut
// along (-inf,-1] and [1,inf) onto the unit disk.
class ContinuedGerm {
public:
    ContinuedGerm() = default;
    explicit ContinuedGerm(const BorelGerm& g);

    double alpha() const { return alpha_; }
    int lead_half() const { return lead_half_; }
    const BorelGerm& germ() const { return germ_; }

    // A(p) with an error estimate from the w-series tail.
    cplx eval_A(cplx p, double* err = nullptr) const;
    cplx eval(cplx p, double* err = nullptr) const;

    // Taylor tail sum_{n >= n0} a_n p^n of A around p = 0, valid for |p| < 1.
    cplx taylor_tail(cplx p, std::size_t n0) const;
    // Taylor head sum_{n < n0} a_n p^n.
    cplx taylor_head(cplx p, std::size_t n0) const;

    const std::vector<cplx>& w_coeffs() const { return d_; }

private:
    BorelGerm germ_;
    double alpha_ = 0.0;
    int lead_half_ = 0;
    std::vector<cplx> a_;
    std::vector<cplx> d_;
};

struct LaplaceOptions {
    double tol = 1e-14;          // relative quadrature target
    double tail_eps = 1e-16;     // cut the ray where |e^{-px}| drops below this
    double min_abs_x = 2.0;
    double continuation_tol = 1e-10;
    int max_depth = 18;
};

struct LaplaceResult {
    cplx value;
    double err = 0.0;
};

// Integral of e^{-px} w(p) g(p) along arg p = phi, with w(p) = (-(p + shift))^power
// (power 0 or 1; power 1 gives the x-derivative of e^{-shift x} L g).
LaplaceResult laplace_ray(const ContinuedGerm& g, double phi, cplx x, const LaplaceOptions& opt = {},
                          int power = 0, double shift = 0.0);
LaplaceResult laplace_ray(const BorelGerm& g, double phi, cplx x, const LaplaceOptions& opt = {});

// L_phi of (g minus its Taylor terms producing x^{-beta}, beta <= K), i.e. the
// Borel sum minus the series truncated after x^{-K}.
LaplaceResult laplace_ray_remainder(const ContinuedGerm& g, double phi, cplx x, int K,
                                    const LaplaceOptions& opt = {});

struct SEstimate {
    cplx S;
    double err = 0.0;
    double radius = 1.0;
};

// Darboux analysis for a (1-p)^{-1/2} singularity (plus its mirror at -1).
SEstimate estimate_S(const BorelGerm& g, int levels = 8);

// h^+ - h^- as the loop integral around [1, inf), x > 0.
LaplaceResult jump_via_hankel(const ContinuedGerm& g, double x, const LaplaceOptions& opt = {},
                              double apex = 0.5, double angle = kPi / 4);
// Same for complex x with |arg x| < pi/2; the legs adapt to arg x.
LaplaceResult jump_via_hankel(const ContinuedGerm& g, cplx x, const LaplaceOptions& opt = {}, double apex = 0.5);

// Germs H_0..H_K prepared for repeated evaluation.
class TransseriesGerms {
public:
    TransseriesGerms(int K, int N_h0, int N_levels);
    int levels() const { return static_cast<int>(Hk_.size()); }
    const ContinuedGerm& H(int k) const { return k == 0 ? H0_ : Hk_.at(k - 1); }
    const Transseries& series() const { return ts_; }

private:
    Transseries ts_;
    ContinuedGerm H0_;
    std::vector<ContinuedGerm> Hk_;
};

struct SumResult {
    cplx value;
    cplx derivative;
    double err = 0.0;
    int levels_used = 0;
};

// L_phi H_0 + sum_k C^k e^{-kx} L_phi H_k, levels added until they fall below tol.
SumResult sum_transseries(const TransseriesGerms& G, cplx C, double phi, cplx x, int K,
                          double tol = 1e-15, const LaplaceOptions& opt = {});

struct ToyFixtures {
    BorelGerm linear;     // Y = p / (1 - p)
    BorelGerm nonlinear;  // (1 - p) Y = p + Y^{*4}
};
ToyFixtures toy_fixtures(int N = 60);

// Exact convolution of p^a and p^b: a! b! / (a+b+1)! p^{a+b+1}.
Q monomial_convolution(int a, int b);

} // namespace p1

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "p1/types.hpp"

namespace p1 {

// Truncated series sum_j coeffs[j] x^{(lead_half - step_half*j)/2}.
// Exponents live on the half-integer lattice, stored as integers in units of 1/2.
struct FormalSeries {
    int lead_half = 0;
    int step_half = 2;
    std::vector<Q> coeffs;

    std::size_t length() const { return coeffs.size(); }
    int exponent_half(std::size_t j) const { return lead_half - step_half * static_cast<int>(j); }
    Q coeff_at(int exp_half) const;

    // Partial sum over the first `terms` coefficients (all if terms == 0).
    cplx eval(cplx x, std::size_t terms = 0) const;
    cplx eval_derivative(cplx x, std::size_t terms = 0) const;
};

struct Transseries {
    FormalSeries h0;
    std::vector<FormalSeries> t;   // t[k-1] is the level-k series t_k
    int rate = 1;                  // +1: levels carry e^{-kx}
    std::string sector = "(-pi/2,pi/2)";

    // h_k = x^{-k/2} t_k as a FormalSeries on the half lattice.
    FormalSeries level_h(int k) const;
};

// y-system level one is (1 + 1/(8x)) e_1; through h = (1/2)(1 - 1/(4x)) y_1 + ... the
// h-normalized t_1 starts with this factor times the y-normalized one.
struct RatPair {
    long num;
    long den;
};
inline constexpr RatPair kHtoYLead{1, 2};
inline constexpr RatPair kLevel1YToH = kHtoYLead;

FormalSeries h0_series(int N, const Q& c4 = c4_default());

// Levels t_1..t_K to order N, normalized so t_1 starts with 1.
std::vector<FormalSeries> transseries_levels(int K, int N, const FormalSeries& h0);
FormalSeries transseries_level(int k, int N);
Transseries build_transseries(int K, int N, const Q& c4 = c4_default());

nlohmann::json to_json(const FormalSeries& s);
FormalSeries series_from_json(const nlohmann::json& j);

} // namespace p1

#include "p1/borel_germ.hpp"

namespace p1 {

// Termwise x^{-beta} -> p^{beta-1}/Gamma(beta). alpha_half fixes the exponent
// lattice beta = n + alpha; it must be positive and match the series.
BorelGerm borel_transform(const FormalSeries& s, int alpha_half);

} // namespace p1

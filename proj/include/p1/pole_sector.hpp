#pragma once

#include <vector>

#include <json.hpp>

#include "p1/types.hpp"

namespace p1 {

// P(xi) / (xi - sigma)^m with exact coefficients, sigma = +-12.
struct RationalXi {
    std::vector<Q> num;   // ascending powers of xi
    int sigma = 12;
    int m = 0;

    int degree() const { return static_cast<int>(num.size()) - 1; }
    cplx eval(cplx xi) const;
    cplx eval_derivative(cplx xi) const;
    Q eval(const Q& xi) const;
};

nlohmann::json to_json(const RationalXi& r);

// F_n for the equation with forcing coefficient c in place of -392/625.
RationalXi compute_F(int n, const Q& c = c4_default());
// G_n of g = h / (1 + h/3), by exact composition with the F_n.
RationalXi compute_G(int n, const Q& c = c4_default());

// Coefficient of ln(xi - 12) produced by the order-6 step; zero only at c = -392/625.
Q integrability_witness(const Q& c);

struct RegionParams {
    double R = 20.0;
    double delta = 0.05;
    double eps = 0.05;
};

cplx two_scale_xi(cplx x, cplx C);

enum class TwoScaleChart { F, G };

struct TwoScaleValue {
    cplx xi;
    TwoScaleChart chart = TwoScaleChart::F;
    cplx value;   // h in the F chart, g in the G chart
    cplx h;       // h in either chart (3g/(3-g) in the G chart)
};

bool in_region_F(cplx x, cplx xi, const RegionParams& p = {});
bool in_region_G(cplx x, cplx xi, const RegionParams& p = {});

// sum_{j<=m} F_j(xi)/x^j or the G analogue; the chart farther from its excluded point wins.
TwoScaleValue eval_two_scale(cplx x, cplx C, int m, const RegionParams& p = {});

enum class PoleFormula { Corrected, Printed };

struct PolePrediction {
    int n = 0;
    cplx L;
    cplx x;
    cplx leading;   // 2 n pi i + L
};

PolePrediction predict_pole(int n, cplx C, PoleFormula f = PoleFormula::Corrected);

} // namespace p1

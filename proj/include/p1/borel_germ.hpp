#pragma once

#include <vector>

#include <json.hpp>

#include "p1/types.hpp"

namespace p1 {

enum class BranchRule { Principal, ContinueCounterclockwise, ContinueClockwise };

// Taylor-type germ sum_n coeff_n p^{lead_half/2 + n}.
// When exact coefficients are present the numeric ones are their rounding,
// multiplied by 1/sqrt(pi) if inv_sqrt_pi is set.
struct BorelGerm {
    int lead_half = 0;
    std::vector<Q> exact;
    bool inv_sqrt_pi = false;
    std::vector<cplx> coeffs;
    cplx nearest_singularity{1.0, 0.0};
    BranchRule branch = BranchRule::Principal;

    bool has_exact() const { return !exact.empty(); }
    std::size_t size() const { return coeffs.size(); }
    double alpha() const { return 0.5 * lead_half; }

    // Coefficient of p^{exp_half/2}; zero when outside the stored range.
    cplx coeff_at(int exp_half) const;
    Q exact_at(int exp_half) const;

    void refresh_numeric();
};

BorelGerm germ_from_numeric(int lead_half, std::vector<cplx> coeffs);

nlohmann::json to_json(const BorelGerm& g);

} // namespace p1

#pragma once

#include <complex>
#include <gmpxx.h>

namespace p1 {

using Q = mpq_class;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Coefficient of x^{-4} in the normalized equation.
inline Q c4_default() { return Q(-392, 625); }

inline double to_double(const Q& q) { return q.get_d(); }

} // namespace p1

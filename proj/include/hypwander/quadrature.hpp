#pragma once

#include <cmath>
#include <string>

#include "hypwander/error.hpp"

namespace hypwander {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth, int min_depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    if (!(a < lm && lm < m && m < rm && rm < b))
        throw QuadratureFailure("interval shrank below floating-point resolution near t=" +
                                std::to_string(m));
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (min_depth <= 0 && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0)
        throw QuadratureFailure("adaptive Simpson exceeded depth limit near t=" + std::to_string(m));
    return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, min_depth - 1) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, min_depth - 1);
}

}  // namespace detail

/// Adaptive Simpson with interval bisection and Richardson correction. The absolute
/// error target `tol` is split in half at each bisection; refining past `max_depth`
/// levels throws QuadratureFailure.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 60) {
    if (!(tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
    if (a == b) return 0.0;
    if (a > b) return -adaptive_simpson(f, b, a, tol, max_depth);
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    constexpr int kMinDepth = 4;
    return detail::simpson_step(f, a, fa, m, fm, b, fb, whole, tol, max_depth, kMinDepth);
}

}  // namespace hypwander

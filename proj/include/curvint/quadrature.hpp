#pragma once

#include <functional>

#include "curvint/common.hpp"

namespace curvint {

// 15-point Gauss-Kronrod pair on [-1, 1].
namespace gk {
inline constexpr double nodes[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
inline constexpr double wk[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
inline constexpr double wg[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};
}  // namespace gk

// Adaptive Gauss-Kronrod on [0, 1] for a complex-valued integrand. The
// integrand must be analytic on the path (tracking keeps clearance from
// branch points), so convergence is fast; the error budget is split across
// bisections.
inline cplx integrate_gk(const std::function<cplx(double)>& f, double t0, double t1,
                         double abs_tol, int depth = 0, int max_depth = 28) {
    cplx k{}, g{};
    double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
    cplx vals[15];
    for (int i = 0; i < 15; ++i) vals[i] = f(mid + half * gk::nodes[i]);
    CompensatedCSum ks;
    for (int i = 0; i < 15; ++i) ks.add(gk::wk[i] * vals[i]);
    k = half * ks.value();
    CompensatedCSum gs;
    for (int i = 0; i < 7; ++i) gs.add(gk::wg[i] * vals[2 * i + 1]);
    g = half * gs.value();
    double err = std::abs(k - g);
    // the classical (200 |K-G|)^{1.5} sharpening
    double scaled = 200.0 * err;
    double est = (scaled < 1.0) ? err * std::sqrt(scaled) : err;
    if (est < abs_tol || depth >= max_depth) {
        if (depth >= max_depth && est > 100 * abs_tol)
            throw numeric_error("integrate_gk: quadrature did not converge");
        return k;
    }
    return integrate_gk(f, t0, mid, abs_tol * 0.5, depth + 1, max_depth) +
           integrate_gk(f, mid, t1, abs_tol * 0.5, depth + 1, max_depth);
}

// Trapezoidal rule on a circle with doubling; exponentially convergent for
// integrands analytic in an annulus. Used for residues.
inline cplx integrate_circle(const std::function<cplx(double)>& f_of_angle, double abs_tol,
                             int n0 = 32, int nmax = 1 << 16) {
    auto eval_n = [&](int n) {
        CompensatedCSum s;
        for (int i = 0; i < n; ++i) s.add(f_of_angle(2 * kPi * i / n));
        return (2 * kPi / n) * s.value();
    };
    cplx prev = eval_n(n0);
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        cplx cur = eval_n(n);
        if (std::abs(cur - prev) < abs_tol) return cur;
        prev = cur;
    }
    throw numeric_error("integrate_circle: trapezoid did not converge");
}

}  // namespace curvint

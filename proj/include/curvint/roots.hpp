#pragma once

#include <algorithm>
#include <vector>

#include "curvint/common.hpp"
#include "curvint/unipoly.hpp"

namespace curvint {

// Aberth-Ehrlich simultaneous iteration with Newton polish.
// Returns all complex roots (with multiplicity, clustered afterwards by the
// caller when needed), deterministically ordered by (re, im).
inline std::vector<cplx> poly_roots(const UniPolyC& p_in, double tol = 1e-13, int max_iter = 400) {
    UniPolyC p = p_in;
    if (p.is_zero()) throw numeric_error("poly_roots: zero polynomial");
    // strip leading/trailing numerically-zero coefficients relative to scale
    double scale = 0;
    for (auto& c : p.coeffs()) scale = std::max(scale, std::abs(c));
    std::vector<cplx> c = p.coeffs();
    while (c.size() > 1 && std::abs(c.back()) < 1e-14 * scale) c.pop_back();
    int zero_roots = 0;
    while (c.size() > 1 && std::abs(c.front()) < 1e-14 * scale * 1e-2) {
        c.erase(c.begin());
        ++zero_roots;
    }
    int n = (int)c.size() - 1;
    std::vector<cplx> roots(zero_roots, cplx(0));
    if (n <= 0) return roots;

    // Cauchy-style radius
    double r = 0;
    for (int i = 0; i < n; ++i) r = std::max(r, std::abs(c[i] / c[n]));
    r = 1.0 + r;
    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) {
        double ang = 2 * kPi * (i + 0.35) / n + 0.4;
        z[i] = std::polar(0.5 * r + 0.5, ang);
    }
    UniPolyC poly{std::vector<cplx>(c)};
    UniPolyC dpoly = poly.derivative();

    for (int it = 0; it < max_iter; ++it) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            cplx pv = poly.eval(z[i]);
            cplx dv = dpoly.eval(z[i]);
            if (pv == cplx(0)) continue;
            cplx newton = (dv == cplx(0)) ? cplx(0.5, 0.5) : pv / dv;
            cplx sum = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    cplx diff = z[i] - z[j];
                    if (std::abs(diff) < 1e-300) diff = cplx(1e-300, 0);
                    sum += 1.0 / diff;
                }
            cplx denom = 1.0 - newton * sum;
            cplx step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < tol * std::max(1.0, r)) break;
        if (it == max_iter - 1 && moved > 1e-6 * std::max(1.0, r))
            throw numeric_error("poly_roots: Aberth iteration did not converge");
    }
    // Newton polish
    for (auto& zi : z) {
        for (int k = 0; k < 4; ++k) {
            cplx pv = poly.eval(zi), dv = dpoly.eval(zi);
            if (std::abs(dv) < 1e-300) break;
            cplx step = pv / dv;
            if (!is_finite(step)) break;
            if (std::abs(step) > 0.5 * std::max(1.0, std::abs(zi))) break;  // near multiple root
            zi -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(zi))) break;
        }
    }
    for (auto& zi : z) roots.push_back(zi);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

// Cluster near-coincident roots; returns representatives with multiplicities.
// The clustering radius follows the 10*ulp-scale guidance, widened by the
// polynomial scale so multiple roots found to ~sqrt(eps) collapse.
struct RootCluster {
    cplx value;
    int multiplicity;
};

inline std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots, double radius = -1) {
    if (roots.empty()) return {};
    double scale = 0;
    for (auto& r : roots) scale = std::max(scale, std::abs(r));
    if (radius < 0) radius = 1e-6 * std::max(1.0, scale);
    std::vector<RootCluster> out;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cplx sum = roots[i];
        int cnt = 1;
        used[i] = true;
        for (size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) < radius) {
                sum += roots[j];
                ++cnt;
                used[j] = true;
            }
        }
        out.push_back({sum / (double)cnt, cnt});
    }
    return out;
}

}  // namespace curvint

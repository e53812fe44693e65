#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "curvint/bivarpoly.hpp"
#include "curvint/discriminant.hpp"
#include "curvint/roots.hpp"

namespace curvint {

namespace lattice {

inline long long cross(LatticePoint o, LatticePoint a, LatticePoint b) {
    return (long long)(a.first - o.first) * (b.second - o.second) -
           (long long)(a.second - o.second) * (b.first - o.first);
}

// Monotone-chain convex hull, counterclockwise, no three consecutive
// collinear vertices.
inline std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() <= 2) return pts;
    std::vector<LatticePoint> lo, hi;
    for (auto& p : pts) {
        while (lo.size() >= 2 && cross(lo[lo.size() - 2], lo.back(), p) <= 0) lo.pop_back();
        lo.push_back(p);
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (hi.size() >= 2 && cross(hi[hi.size() - 2], hi.back(), *it) <= 0) hi.pop_back();
        hi.push_back(*it);
    }
    lo.pop_back();
    hi.pop_back();
    lo.insert(lo.end(), hi.begin(), hi.end());
    return lo;
}

enum class Position { Interior, Boundary, Exterior };

// Exact position of q relative to the hull (CCW vertex list).
inline Position locate(const std::vector<LatticePoint>& hull, LatticePoint q) {
    if (hull.empty()) return Position::Exterior;
    if (hull.size() == 1) return q == hull[0] ? Position::Boundary : Position::Exterior;
    if (hull.size() == 2) {
        // degenerate hull: a segment
        long long c = cross(hull[0], hull[1], q);
        if (c != 0) return Position::Exterior;
        auto within = [&](long long a, long long b, long long t) {
            return std::min(a, b) <= t && t <= std::max(a, b);
        };
        return (within(hull[0].first, hull[1].first, q.first) &&
                within(hull[0].second, hull[1].second, q.second))
                   ? Position::Boundary
                   : Position::Exterior;
    }
    bool on_edge = false;
    for (size_t i = 0; i < hull.size(); ++i) {
        long long c = cross(hull[i], hull[(i + 1) % hull.size()], q);
        if (c < 0) return Position::Exterior;
        if (c == 0) on_edge = true;
    }
    return on_edge ? Position::Boundary : Position::Interior;
}

}  // namespace lattice

// One hull side together with its outward data. The local exponents of the
// associated punctures are (a, b) = -(outward normal).
struct Side {
    LatticePoint from, to;          // hull edge endpoints, CCW order
    int nx = 0, ny = 0;             // primitive outward normal
    long long m = 0;                // max of nx*i + ny*j over the support
    int segments = 1;               // number of irreducible integer sub-segments
    std::vector<LatticePoint> support_points;  // points of N on this side line
};

struct NewtonData {
    std::vector<LatticePoint> support;    // N
    std::vector<LatticePoint> hull;       // CCW vertices
    std::vector<LatticePoint> nbar;       // all lattice points in the closed hull
    std::vector<LatticePoint> interior;   // N-circle (1st kind points)
    std::vector<LatticePoint> third;      // N''' (3rd kind points)
    std::vector<LatticePoint> second;     // N'' (2nd kind points)
    std::vector<Side> sides;

    bool is_interior_shifted(LatticePoint p) const {
        return lattice::locate(hull, {p.first + 1, p.second + 1}) == lattice::Position::Interior;
    }
};

template <class T>
NewtonData build_newton(const BivarPoly<T>& P) {
    if (P.is_zero()) throw input_error("build_newton: zero polynomial");
    NewtonData nd;
    nd.support = P.support();
    nd.hull = lattice::convex_hull(nd.support);
    int maxi = 0, maxj = 0;
    for (auto& p : nd.support) {
        maxi = std::max(maxi, p.first);
        maxj = std::max(maxj, p.second);
    }
    for (int i = 0; i <= maxi; ++i)
        for (int j = 0; j <= maxj; ++j)
            if (lattice::locate(nd.hull, {i, j}) != lattice::Position::Exterior)
                nd.nbar.push_back({i, j});
    for (auto& p : nd.nbar) {
        auto pos = lattice::locate(nd.hull, {p.first + 1, p.second + 1});
        if (pos == lattice::Position::Interior)
            nd.interior.push_back(p);
        else if (pos == lattice::Position::Boundary)
            nd.third.push_back(p);
        else
            nd.second.push_back(p);
    }
    // sides with outward primitive normals; m = support value
    size_t n = nd.hull.size();
    if (n >= 2) {
        for (size_t e = 0; e < n; ++e) {
            LatticePoint a = nd.hull[e], b = nd.hull[(e + 1) % n];
            if (n == 2 && e == 1) break;  // segment hull has one geometric edge
            int dx = b.first - a.first, dy = b.second - a.second;
            int g = std::gcd(std::abs(dx), std::abs(dy));
            Side s;
            s.from = a;
            s.to = b;
            s.segments = g;
            s.nx = dy / g;      // CCW outward normal of edge (dx,dy) is (dy,-dx)
            s.ny = -dx / g;
            s.m = (long long)s.nx * a.first + (long long)s.ny * a.second;
            for (auto& p : nd.support)
                if ((long long)s.nx * p.first + (long long)s.ny * p.second == s.m)
                    s.support_points.push_back(p);
            std::sort(s.support_points.begin(), s.support_points.end());
            nd.sides.push_back(s);
        }
    }
    return nd;
}

template <class T>
int degree(const BivarPoly<T>& P) {
    return P.degtotal();
}

// ---------------------------------------------------------------------------
// Punctures

struct PunctureInfo {
    int side_index = -1;   // into NewtonData::sides, or -1 for horizontal punctures
    int a = 0, b = 0;      // local exponents: x = X + xi^a, y ~ Y + eta xi^b
    cplx eta{};            // leading coefficient of y in the local model
    cplx X{}, Y{};         // base values; 0 encodes infinity per the convention
    bool x_infinite = false, y_infinite = false;
    std::vector<cplx> eta_orbit;  // all eta values identified by the xi-root ambiguity
    long long m = 0;              // support value of the side line
    std::vector<cplx> side_poly;  // P_alpha coefficients by power of eta
};

namespace detail {

// side polynomial P_alpha(eta) = sum over support on the side of P_ij eta^j
inline UniPolyC side_polynomial(const BivarPolyC& P, const Side& s) {
    std::vector<cplx> c;
    for (auto& p : s.support_points) {
        if ((int)c.size() <= p.second) c.resize(p.second + 1, cplx(0));
        c[p.second] += P.coeff(p.first, p.second);
    }
    return UniPolyC(std::move(c));
}

}  // namespace detail

// Punctures of the curve: one per irreducible boundary segment whose local
// exponents have a < 0 or b < 0. Sides of the hull away from the coordinate
// axes (outward normal with a positive component) give punctures at infinity;
// zeros of P_d(x) give the finite-x punctures with y -> infinity.
template <class T>
std::vector<PunctureInfo> punctures(const BivarPoly<T>& P, const NewtonData& nd) {
    BivarPolyC Pc = [&] {
        if constexpr (std::is_same_v<T, GaussRational>)
            return to_complex(P);
        else
            return P;
    }();
    std::vector<PunctureInfo> out;
    for (size_t si = 0; si < nd.sides.size(); ++si) {
        const Side& s = nd.sides[si];
        int a = -s.nx, b = -s.ny;
        if (!(a < 0 || b < 0)) continue;
        if (a == 0 && b < 0) continue;  // horizontal top side: handled via P_d below
        if (a >= 0 && b < 0) continue;  // defensive: same case after normalization
        UniPolyC palpha = detail::side_polynomial(Pc, s);
        // roots of P_alpha(eta), eta != 0
        std::vector<cplx> roots;
        for (auto r : poly_roots(palpha))
            if (std::abs(r) > 1e-10) roots.push_back(r);
        // group by the xi -> rho_a xi ambiguity: eta ~ exp(2 pi i b / a) eta
        cplx mu = std::exp(kTwoPiI * (double)b / (double)a);
        std::vector<bool> used(roots.size(), false);
        for (size_t i = 0; i < roots.size(); ++i) {
            if (used[i]) continue;
            PunctureInfo pi;
            pi.side_index = (int)si;
            pi.a = a;
            pi.b = b;
            pi.m = -s.m;  // local-model support value: min of a i + b j over N
            pi.side_poly = palpha.coeffs();
            pi.x_infinite = a < 0;
            pi.y_infinite = b < 0;
            pi.X = cplx(0);
            pi.Y = cplx(0);
            // collect the orbit of roots[i] under multiplication by mu
            cplx cur = roots[i];
            for (int guard = 0; guard < 64; ++guard) {
                bool matched = false;
                for (size_t j = 0; j < roots.size(); ++j) {
                    if (!used[j] && std::abs(roots[j] - cur) < 1e-8 * (1 + std::abs(cur))) {
                        used[j] = true;
                        pi.eta_orbit.push_back(roots[j]);
                        matched = true;
                        break;
                    }
                }
                cur *= mu;
                if (!matched && guard > 0) break;
                if (std::abs(cur - roots[i]) < 1e-8 * (1 + std::abs(cur)) && guard > 0) break;
            }
            // deterministic representative: lexicographically largest (re, im)
            pi.eta = *std::max_element(pi.eta_orbit.begin(), pi.eta_orbit.end(), [](cplx p, cplx q) {
                if (p.real() != q.real()) return p.real() < q.real();
                return p.imag() < q.imag();
            });
            if (!pi.y_infinite && b == 0) pi.Y = pi.eta;
            out.push_back(pi);
        }
    }
    // horizontal punctures: finite x at zeros of P_d(x), y -> infinity
    int d = Pc.degy();
    UniPolyC pd = Pc.coeff_of_y(d);
    if (pd.degree() >= 1) {
        for (auto& cl : cluster_roots(poly_roots(pd))) {
            BivarPolyC shifted = Pc.shift(cl.value, cplx(0));
            // top-left boundary of the shifted polygon, coefficients thresholded
            double scale = 0;
            for (auto& [pt, c] : shifted.terms()) scale = std::max(scale, std::abs(c));
            BivarPolyC clean;
            for (auto& [pt, c] : shifted.terms())
                if (std::abs(c) > 1e-11 * scale) clean.add_term(pt.first, pt.second, c);
            NewtonData snd = build_newton(clean);
            for (auto& s : snd.sides) {
                // top-left corner sides: outward normal up-left
                if (!(s.nx < 0 && s.ny > 0)) continue;
                int a = -s.nx, b = -s.ny;  // a > 0, b < 0: x finite of order a, y pole
                UniPolyC palpha = detail::side_polynomial(clean, s);
                std::vector<cplx> roots;
                for (auto r : poly_roots(palpha))
                    if (std::abs(r) > 1e-10) roots.push_back(r);
                cplx mu = std::exp(kTwoPiI * (double)b / (double)a);
                std::vector<bool> used(roots.size(), false);
                for (size_t i = 0; i < roots.size(); ++i) {
                    if (used[i]) continue;
                    PunctureInfo pi;
                    pi.side_index = -1;
                    pi.a = a;
                    pi.b = b;
                    pi.m = -s.m;  // local-model support value: min of a i + b j over N
                    pi.side_poly = palpha.coeffs();
                    pi.x_infinite = false;
                    pi.y_infinite = true;
                    pi.X = cl.value;
                    pi.Y = cplx(0);
                    cplx cur = roots[i];
                    for (int guard = 0; guard < 64; ++guard) {
                        bool matched = false;
                        for (size_t j = 0; j < roots.size(); ++j)
                            if (!used[j] && std::abs(roots[j] - cur) < 1e-8 * (1 + std::abs(cur))) {
                                used[j] = true;
                                pi.eta_orbit.push_back(roots[j]);
                                matched = true;
                                break;
                            }
                        cur *= mu;
                        if (!matched && guard > 0) break;
                        if (std::abs(cur - roots[i]) < 1e-8 * (1 + std::abs(cur)) && guard > 0) break;
                    }
                    if (pi.eta_orbit.empty()) continue;
                    pi.eta = *std::max_element(pi.eta_orbit.begin(), pi.eta_orbit.end(),
                                               [](cplx p, cplx q) {
                                                   if (p.real() != q.real()) return p.real() < q.real();
                                                   return p.imag() < q.imag();
                                               });
                    out.push_back(pi);
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branch / nodal points

struct BranchSegment {
    int a = 0, b = 0;   // positive local exponents: order of x and y on the disc
    cplx C{};           // local constant: y - y_b ~ C^{1/a} (x - x_b)^{b/a}
};

struct BranchPointInfo {
    cplx x, y;
    int ell = 0;                       // number of local discs
    int genus_beta = 0;                // lattice points of the check region
    int deg_beta = 0;                  // sum of a_s
    bool nodal = false;                // ell > 1
    std::vector<BranchSegment> segments;
    std::vector<LatticePoint> check_points;  // unshifted representatives (i,j), i,j >= 1
};

// Shifted-polygon analysis at a point with P = P_y = 0.
template <class T>
BranchPointInfo branch_analysis(const BivarPoly<T>& P, cplx xb, cplx yb) {
    BivarPolyC Pc = [&] {
        if constexpr (std::is_same_v<T, GaussRational>)
            return to_complex(P);
        else
            return P;
    }();
    BivarPolyC sh = Pc.shift(xb, yb);
    double scale = 0;
    for (auto& [pt, c] : sh.terms()) scale = std::max(scale, std::abs(c));
    BivarPolyC clean;
    for (auto& [pt, c] : sh.terms())
        if (std::abs(c) > 1e-10 * scale) clean.add_term(pt.first, pt.second, c);

    BranchPointInfo out;
    out.x = xb;
    out.y = yb;
    NewtonData nd = build_newton(clean);

    // bottom-left boundary lines: hull sides with outward normal pointing
    // down-left; local exponents (a, b) = -(normal), both positive
    struct Line {
        int a, b;
        long long m;
        int segments;
    };
    std::vector<Line> lines;
    for (auto& s : nd.sides) {
        if (!(s.nx < 0 && s.ny < 0)) continue;
        lines.push_back({-s.nx, -s.ny, -s.m, s.segments});
        // note: with outward normal (nx,ny) and support value m = max(nx i + ny j),
        // the inward form a i + b j has minimum value -m on the side
    }
    for (auto& ln : lines) {
        out.ell += ln.segments;
        out.deg_beta += ln.a * ln.segments;
        // local constants: roots of sum_{(i,j) on line} P_ij C^{(j - jmin)/a}
        std::vector<LatticePoint> on_line;
        for (auto& [pt, c] : clean.terms())
            if ((long long)ln.a * pt.first + (long long)ln.b * pt.second == ln.m)
                on_line.push_back(pt);
        int jmin = on_line.empty() ? 0 : on_line[0].second;
        for (auto& p : on_line) jmin = std::min(jmin, p.second);
        std::vector<cplx> pc;
        for (auto& p : on_line) {
            int e = (p.second - jmin) / ln.a;
            if ((p.second - jmin) % ln.a != 0) continue;  // off-lattice step contributes nothing
            if ((int)pc.size() <= e) pc.resize(e + 1, cplx(0));
            pc[e] += clean.coeff(p.first, p.second);
        }
        for (auto r : poly_roots(UniPolyC(std::move(pc))))
            if (std::abs(r) > 1e-12) out.segments.push_back({ln.a, ln.b, r});
    }
    out.nodal = out.ell > 1;

    // check region: lattice points with i,j >= 1 weakly below at least one
    // bottom-left boundary line (the corner cut out between the boundary and
    // the axes)
    int maxi = 4, maxj = 4;
    for (auto& ln : lines) {
        maxi = std::max<int>(maxi, (int)(ln.m / std::max(1, ln.a)) + 1);
        maxj = std::max<int>(maxj, (int)(ln.m / std::max(1, ln.b)) + 1);
    }
    if (!lines.empty()) {
        for (int i = 1; i <= maxi; ++i)
            for (int j = 1; j <= maxj; ++j) {
                bool below_some = false;
                for (auto& ln : lines)
                    if ((long long)ln.a * i + (long long)ln.b * j <= ln.m) below_some = true;
                if (below_some) out.check_points.push_back({i, j});
            }
    }
    out.genus_beta = (int)out.check_points.size();
    return out;
}

// Generic branch point helper: C = -2 P_x / P_yy at the point.
template <class T>
cplx generic_branch_constant(const BivarPoly<T>& P, cplx xb, cplx yb) {
    BivarPolyC px = [&] {
        if constexpr (std::is_same_v<T, GaussRational>)
            return to_complex(P.partial('x'));
        else
            return P.partial('x');
    }();
    BivarPolyC pyy = [&] {
        if constexpr (std::is_same_v<T, GaussRational>)
            return to_complex(P.partial('y', 2));
        else
            return P.partial('y', 2);
    }();
    return -2.0 * px.eval(xb, yb) / pyy.eval(xb, yb);
}

// Genus of a generic curve (= number of interior points); for degenerate
// curves the genus comes from the extended period matrix in the periods
// module.
inline int genus_generic(const NewtonData& nd) { return (int)nd.interior.size(); }

}  // namespace curvint

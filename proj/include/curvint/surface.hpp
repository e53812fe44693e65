#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvint/bivarpoly.hpp"
#include "curvint/discriminant.hpp"
#include "curvint/quadrature.hpp"
#include "curvint/roots.hpp"

namespace curvint {

struct SurfacePoint {
    cplx x{}, y{};
    double residual = 0;
};

// Piecewise-linear path in the x-plane with a starting sheet.
struct PathSpec {
    std::vector<cplx> waypoints;
    int start_sheet = 0;
    bool closed = false;
    std::string label;
};

struct CircleSpec {
    cplx center{};
    double radius = 0;
    int sheet = 0;
    int windings = 1;  // a_s windings close a loop on a ramified disc
    std::string label;
};

struct CycleSet {
    std::vector<PathSpec> A, B;
    std::vector<CircleSpec> C;
    double clearance = 0;
};

// Shared numeric context for one curve: compiled evaluators, fiber solving,
// branch locus and the default clearance radius.
// Numeric Delta(x) for float curves: determinant of the Sylvester-style
// matrix interpolated from values at nodes on a circle.
inline UniPolyC discriminant_y_numeric(const BivarPolyC& P) {
    auto mq = discriminant_matrix(P);
    int n = (int)mq.size();
    long long degbound = 0;
    for (int i = 0; i < n; ++i) {
        long long rowmax = 0;
        for (int j = 0; j < n; ++j) rowmax = std::max<long long>(rowmax, std::max(0, mq[i][j].degree()));
        degbound += rowmax;
    }
    int npts = (int)degbound + 1;
    double radius = 1.0 + 0.37;  // off the lattice roots of unity
    std::vector<cplx> xs(npts), ys(npts);
    for (int t = 0; t < npts; ++t) {
        xs[t] = std::polar(radius, 2 * kPi * (t + 0.21) / npts);
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = mq[i][j].eval(xs[t]);
        ys[t] = determinant(m);
    }
    // Lagrange interpolation
    UniPolyC acc;
    for (int t = 0; t < npts; ++t) {
        UniPolyC li = UniPolyC::constant(cplx(1));
        cplx denom = 1;
        for (int s = 0; s < npts; ++s) {
            if (s == t) continue;
            li = li * UniPolyC({-xs[s], cplx(1)});
            denom *= xs[t] - xs[s];
        }
        acc = acc + (ys[t] / denom) * li;
    }
    return acc;
}

class CurveContext {
  public:
    explicit CurveContext(const BivarPolyQ& Pq) : exact_(Pq), poly_(to_complex(Pq)) { init(); }
    explicit CurveContext(BivarPolyC Pc) : poly_(std::move(Pc)) { init(); }

    const BivarPolyC& poly() const { return poly_; }
    const BivarPolyQ& exact() const {
        if (!exact_) throw input_error("CurveContext: exact coefficients unavailable");
        return *exact_;
    }
    bool has_exact() const { return exact_.has_value(); }
    int degy() const { return degy_; }
    double scale() const { return scale_; }
    double clearance() const { return clearance_; }
    const std::vector<cplx>& branch_x() const { return branch_x_; }

    cplx P(cplx x, cplx y) const { return p_(x, y); }
    cplx Px(cplx x, cplx y) const { return px_(x, y); }
    cplx Py(cplx x, cplx y) const { return py_(x, y); }
    cplx Pyy(cplx x, cplx y) const { return pyy_(x, y); }

    // All roots of P(x, .), deterministically ordered by (re, im). If the
    // leading coefficient vanishes at x the fiber is reduced.
    std::vector<cplx> fiber(cplx x) const {
        std::vector<cplx> co(degy_ + 1, cplx(0));
        for (auto& [pt, c] : poly_.terms()) {
            cplx xp = std::pow(x, pt.first);
            co[pt.second] += c * xp;
        }
        UniPolyC q(std::move(co));
        if (q.degree() < 1) throw numeric_error("fiber: polynomial in y degenerates at this x");
        auto roots = poly_roots(q);
        for (auto& y : roots) {  // Newton polish on the bivariate
            for (int it = 0; it < 3; ++it) {
                cplx d = py_(x, y);
                if (std::abs(d) < 1e-14 * scale_) break;
                y -= p_(x, y) / d;
            }
        }
        std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });
        return roots;
    }

    int nearest_sheet(cplx x, cplx y) const {
        auto f = fiber(x);
        int best = 0;
        for (size_t i = 1; i < f.size(); ++i)
            if (std::abs(f[i] - y) < std::abs(f[best] - y)) best = (int)i;
        return best;
    }

    SurfacePoint point(cplx x, int sheet) const {
        auto f = fiber(x);
        if (sheet < 0 || sheet >= (int)f.size()) throw input_error("point: sheet out of range");
        return {x, f[sheet], std::abs(p_(x, f[sheet]))};
    }

    double min_branch_distance(cplx x) const {
        double d = 1e300;
        for (auto& b : branch_x_) d = std::min(d, std::abs(x - b));
        return d;
    }

  private:
    std::optional<BivarPolyQ> exact_;
    BivarPolyC poly_;
    CompiledBivar p_, px_, py_, pyy_;
    int degy_ = 0;
    double scale_ = 0, clearance_ = 0;
    std::vector<cplx> branch_x_;

    void init() {
        degy_ = poly_.degy();
        if (degy_ < 1) throw input_error("CurveContext: deg_y P must be >= 1");
        p_ = CompiledBivar(poly_);
        px_ = CompiledBivar(poly_.partial('x'));
        py_ = CompiledBivar(poly_.partial('y'));
        pyy_ = CompiledBivar(poly_.partial('y', 2));
        for (auto& [pt, c] : poly_.terms()) scale_ = std::max(scale_, std::abs(c));
        UniPolyC delta = exact_ ? to_complex(discriminant_y(*exact_)) : discriminant_y_numeric(poly_);
        if (delta.degree() >= 1) {
            // drop numerically negligible leading coefficients before rooting
            double dscale = 0;
            for (auto& c : delta.coeffs()) dscale = std::max(dscale, std::abs(c));
            std::vector<cplx> cc = delta.coeffs();
            while (cc.size() > 1 && std::abs(cc.back()) < 1e-11 * dscale) cc.pop_back();
            UniPolyC clean(std::move(cc));
            if (clean.degree() >= 1)
                for (auto& cl : cluster_roots(poly_roots(clean))) branch_x_.push_back(cl.value);
        }
        double mind = 1e300;
        for (size_t i = 0; i < branch_x_.size(); ++i)
            for (size_t j = i + 1; j < branch_x_.size(); ++j)
                mind = std::min(mind, std::abs(branch_x_[i] - branch_x_[j]));
        if (branch_x_.size() < 2) mind = 2.0;
        clearance_ = mind / 8.0;
    }
};

// Analytic continuation of y along a straight x-segment. A step is accepted
// only when the nearest-fiber match is unambiguous: second-nearest distance
// at least 3x the nearest.
inline cplx continue_y(const CurveContext& C, cplx x_from, cplx y_from, cplx x_to) {
    cplx x = x_from, y = y_from;
    double remaining = 1.0;
    double step = 1.0;
    const cplx dir = x_to - x_from;
    double total = std::abs(dir);
    if (total == 0) return y;
    int guard = 0;
    while (remaining > 1e-15) {
        if (++guard > 100000) throw numeric_error("continue_y: too many steps");
        double h = std::min(step, remaining);
        // nearest matching is only sound while the step stays inside the
        // branch-free disc around the current point; a longer hop can land
        // confidently on the wrong sheet
        double db = C.min_branch_distance(x);
        if (db < 1e-11)
            throw numeric_error("continue_y: path runs through a branch value");
        h = std::min(h, 0.4 * db / total);
        cplx x_next = x + dir * h;
        auto f = C.fiber(x_next);
        // nearest and second nearest to the current y
        int best = 0;
        double d1 = 1e300, d2 = 1e300;
        for (size_t i = 0; i < f.size(); ++i) {
            double d = std::abs(f[i] - y);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                best = (int)i;
            } else {
                d2 = std::min(d2, d);
            }
        }
        bool ok = f.size() == 1 || d2 >= 3.0 * d1;
        if (!ok) {
            step = h / 2;
            if (step * total < 1e-13) {
                throw numeric_error("continue_y: path too close to a branch value near x = (" +
                                    std::to_string(x_next.real()) + "," +
                                    std::to_string(x_next.imag()) + ")");
            }
            continue;
        }
        x = x_next;
        y = f[best];
        remaining -= h;
        step = std::min(1.0, h * 2);
    }
    return y;
}

// Sheet cache along one straight segment; quadrature nodes re-use the nearest
// previously tracked point.
class SegmentSheet {
  public:
    SegmentSheet(const CurveContext& C, cplx a, cplx b, cplx y_at_a) : C_(C), a_(a), b_(b) {
        cache_[0.0] = y_at_a;
    }
    cplx x_at(double t) const { return a_ + t * (b_ - a_); }
    cplx y_at(double t) {
        auto it = cache_.lower_bound(t);
        double tn = -1;
        cplx yn;
        if (it != cache_.end()) {
            tn = it->first;
            yn = it->second;
        }
        if (it != cache_.begin()) {
            auto p = std::prev(it);
            if (tn < 0 || t - p->first < tn - t) {
                tn = p->first;
                yn = p->second;
            }
        }
        cplx y = continue_y(C_, x_at(tn), yn, x_at(t));
        cache_[t] = y;
        return y;
    }

  private:
    const CurveContext& C_;
    cplx a_, b_;
    std::map<double, cplx> cache_;
};

inline void check_clearance(const CurveContext& C, const PathSpec& path, double clearance) {
    for (size_t s = 0; s + 1 < path.waypoints.size(); ++s) {
        cplx a = path.waypoints[s], b = path.waypoints[s + 1];
        for (auto& br : C.branch_x()) {
            // distance from br to segment [a, b]
            cplx ab = b - a;
            double L2 = std::norm(ab);
            double t = L2 == 0 ? 0.0 : std::clamp(((br - a) / ab).real(), 0.0, 1.0);
            // projection parameter: real part of (br-a)/ab equals <br-a, ab>/|ab|^2
            double dist = std::abs(br - (a + t * ab));
            if (dist < 0.9 * clearance)
                throw input_error("path violates the clearance radius near a branch value");
        }
    }
}

// Track a path; returns the endpoint (and optionally the trace of accepted
// waypoint sheets).
inline SurfacePoint track(const CurveContext& C, const PathSpec& path,
                          std::vector<cplx>* waypoint_ys = nullptr) {
    if (path.waypoints.size() < 1) throw input_error("track: empty path");
    auto f0 = C.fiber(path.waypoints[0]);
    if (path.start_sheet < 0 || path.start_sheet >= (int)f0.size())
        throw input_error("track: start_sheet out of range");
    cplx y = f0[path.start_sheet];
    if (waypoint_ys) waypoint_ys->push_back(y);
    for (size_t s = 0; s + 1 < path.waypoints.size(); ++s) {
        y = continue_y(C, path.waypoints[s], y, path.waypoints[s + 1]);
        if (waypoint_ys) waypoint_ys->push_back(y);
    }
    cplx xe = path.waypoints.back();
    return {xe, y, std::abs(C.P(xe, y))};
}

// Permutation of fiber indices induced by a closed loop.
inline std::vector<int> monodromy(const CurveContext& C, const PathSpec& loop) {
    if (loop.waypoints.front() != loop.waypoints.back())
        throw input_error("monodromy: loop is not closed in the x-plane");
    auto f = C.fiber(loop.waypoints.front());
    std::vector<int> perm(f.size());
    for (size_t s = 0; s < f.size(); ++s) {
        PathSpec p = loop;
        p.start_sheet = (int)s;
        auto end = track(C, p);
        int best = 0;
        for (size_t i = 1; i < f.size(); ++i)
            if (std::abs(f[i] - end.y) < std::abs(f[best] - end.y)) best = (int)i;
        perm[s] = best;
    }
    return perm;
}

// Integral of F(x, y) dx along a tracked path.
inline cplx integrate_along_path(const CurveContext& C, const PathSpec& path,
                                 const std::function<cplx(cplx, cplx)>& F, double abs_tol = 1e-11) {
    auto f0 = C.fiber(path.waypoints.at(0));
    cplx y = f0.at(path.start_sheet);
    CompensatedCSum total;
    int nseg = (int)path.waypoints.size() - 1;
    for (int s = 0; s < nseg; ++s) {
        cplx a = path.waypoints[s], b = path.waypoints[s + 1];
        SegmentSheet sheet(C, a, b, y);
        cplx dxdt = b - a;
        // long rays carry proportionally larger integrands; keep the target
        // relative to the segment length
        double seg_tol = abs_tol / std::max(1, nseg) * std::max(1.0, std::abs(dxdt));
        cplx val = integrate_gk(
            [&](double t) { return F(sheet.x_at(t), sheet.y_at(t)) * dxdt; }, 0.0, 1.0, seg_tol);
        total.add(val);
        y = sheet.y_at(1.0);
    }
    return total.value();
}

// helper for circular arcs with tracked sheet
struct SegmentArc {
    const CurveContext& C;
    cplx center;
    double radius, th0, th1;
    std::map<double, cplx> cache;
    SegmentArc(const CurveContext& c, cplx ce, double r, double a, double b, cplx ys)
        : C(c), center(ce), radius(r), th0(a), th1(b) {
        cache[0.0] = ys;
    }
    cplx x_at(double t) const { return center + radius * std::exp(cplx(0, th0 + t * (th1 - th0))); }
    cplx y_at(double t) {
        auto it = cache.lower_bound(t);
        double tn = -1;
        cplx yn;
        if (it != cache.end()) {
            tn = it->first;
            yn = it->second;
        }
        if (it != cache.begin()) {
            auto p = std::prev(it);
            if (tn < 0 || t - p->first < tn - t) {
                tn = p->first;
                yn = p->second;
            }
        }
        // short chord hops along the arc
        cplx y = yn;
        const int hops = std::max(1, (int)std::ceil(std::abs(t - tn) * 8));
        for (int h = 1; h <= hops; ++h) {
            double tt = tn + (t - tn) * h / hops;
            y = continue_y(C, x_at(tn + (t - tn) * (h - 1.0) / hops), y, x_at(tt));
        }
        cache[t] = y;
        return y;
    }
    cplx value(double t, const std::function<cplx(cplx, cplx)>& F) {
        cplx x = x_at(t);
        cplx dxdt = cplx(0, th1 - th0) * (x - center);
        return F(x, y_at(t)) * dxdt;
    }
    cplx y_end() { return y_at(1.0); }
};

// Integral of F(x, y) dx over the closed lift of a small circle around
// `center`, winding `windings` times (a ramified disc of order a needs a
// windings to close).
inline cplx integrate_around_point(const CurveContext& C, cplx center, double radius, cplx y_seed,
                                   int windings, const std::function<cplx(cplx, cplx)>& F,
                                   double abs_tol = 1e-11) {
    int segments_per_turn = 24;
    int nseg = segments_per_turn * std::max(1, windings);
    cplx y = y_seed;
    // land the seed exactly on the fiber at angle 0
    {
        auto f = C.fiber(center + radius);
        int best = 0;
        for (size_t i = 1; i < f.size(); ++i)
            if (std::abs(f[i] - y) < std::abs(f[best] - y)) best = (int)i;
        y = f[best];
    }
    CompensatedCSum total;
    for (int s = 0; s < nseg; ++s) {
        double th0 = 2 * kPi * s / segments_per_turn;
        double th1 = 2 * kPi * (s + 1) / segments_per_turn;
        SegmentArc arc{C, center, radius, th0, th1, y};
        cplx val = integrate_gk([&](double t) { return arc.value(t, F); }, 0.0, 1.0,
                                abs_tol / nseg);
        total.add(val);
        y = arc.y_end();
    }
    return total.value();
}

// ---------------------------------------------------------------------------
// Default hyperelliptic marking. Branch values are sorted by (re, im); with
// 2g+2 of them, A_i surrounds the gap pair (a_{2i}, a_{2i+1}) and B_i
// surrounds {a_{2i+1}, ..., a_{2g+2}}; with 2g+1 (odd degree), A_i surrounds
// the cut (a_{2i-1}, a_{2i}) and B_i surrounds {a_{2i}, ..., a_{2g+1}}.
// For the Legendre curve this puts A around [-1,1] and B around [1,1/k].
inline PathSpec rectangle_loop(cplx u, cplx v, double pad, const std::string& label,
                               double pad_perp = -1) {
    if (pad_perp < 0) pad_perp = pad;
    cplx d = v - u;
    if (std::abs(d) < 1e-14) d = cplx(1, 0);
    cplx e = d / std::abs(d);
    cplx n = e * cplx(0, 1);
    PathSpec p;
    cplx c0 = u - pad * e + pad_perp * n, c1 = v + pad * e + pad_perp * n;
    cplx c2 = v + pad * e - pad_perp * n, c3 = u - pad * e - pad_perp * n;
    // counterclockwise: bottom edge first, then up the far side
    p.waypoints = {c3, c2, c1, c0, c3};
    p.closed = true;
    p.start_sheet = 0;
    p.label = label;
    return p;
}

inline int winding_number(const PathSpec& loop, cplx z) {
    double total = 0;
    for (size_t s = 0; s + 1 < loop.waypoints.size(); ++s) {
        cplx a = loop.waypoints[s] - z, b = loop.waypoints[s + 1] - z;
        total += std::arg(b / a);
    }
    return (int)std::lround(total / (2 * kPi));
}

struct HyperellipticShape {
    bool ok = false;
    UniPolyC phat;     // P = c y^2 - phat(x) after normalization
    cplx c{};
};

template <class T>
HyperellipticShape hyperelliptic_shape(const BivarPoly<T>& P) {
    HyperellipticShape out;
    BivarPolyC Pc = [&] {
        if constexpr (std::is_same_v<T, GaussRational>)
            return to_complex(P);
        else
            return P;
    }();
    if (Pc.degy() != 2) return out;
    UniPolyC p2 = Pc.coeff_of_y(2), p1 = Pc.coeff_of_y(1);
    if (p2.degree() != 0 || !p1.is_zero()) return out;
    out.c = p2.coeff(0);
    UniPolyC p0 = Pc.coeff_of_y(0);
    std::vector<cplx> neg(p0.coeffs());
    for (auto& v : neg) v = -v / out.c;
    out.phat = UniPolyC(std::move(neg));
    out.ok = true;
    return out;
}

inline CycleSet default_cycles_hyperelliptic(const CurveContext& C) {
    auto shape = hyperelliptic_shape(C.poly());
    if (!shape.ok)
        throw input_error("default cycles: curve is not in hyperelliptic shape y^2 = phat(x); "
                          "supply cycles explicitly");
    // odd-multiplicity roots of phat are the finite branch values
    std::vector<cplx> br;
    for (auto& cl : cluster_roots(poly_roots(shape.phat)))
        if (cl.multiplicity % 2 == 1) br.push_back(cl.value);
    std::sort(br.begin(), br.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    CycleSet cs;
    cs.clearance = C.clearance();
    double pad = C.clearance();
    int n = (int)br.size();
    int g = (n % 2 == 0) ? n / 2 - 1 : (n - 1) / 2;
    if (g <= 0) return cs;  // genus 0: empty marking
    // B loops are drawn taller than A loops so x-plane crossings stay
    // transversal (used by the winding-count intersection check)
    for (int i = 1; i <= g; ++i) {
        double bpad = pad * (1.5 + 0.15 * i);
        if (n % 2 == 0) {
            cs.A.push_back(rectangle_loop(br[2 * i - 1], br[2 * i], pad, "A" + std::to_string(i)));
            cs.B.push_back(rectangle_loop(br[2 * i], br[n - 1], pad, "B" + std::to_string(i), bpad));
        } else {
            cs.A.push_back(rectangle_loop(br[2 * i - 2], br[2 * i - 1], pad, "A" + std::to_string(i)));
            cs.B.push_back(rectangle_loop(br[2 * i - 1], br[n - 1], pad, "B" + std::to_string(i), bpad));
        }
    }
    // each loop must enclose exactly its designated branch values
    for (auto& vec : {&cs.A, &cs.B})
        for (auto& loop : *vec) {
            int inside = 0;
            for (auto& b : br) inside += winding_number(loop, b) != 0;
            if (inside % 2 != 0)
                throw numeric_error("default cycles: loop encloses an odd number of branch points");
        }
    // deterministic orientation: the A-period of dx/P_y is taken with
    // positive real part (positive imaginary part as tiebreak), matching the
    // classical sign for real branch loci
    for (auto& loop : cs.A) {
        cplx q = integrate_along_path(
            C, loop, [&](cplx x, cplx y) { return 1.0 / C.Py(x, y); }, 1e-9);
        bool flip = q.real() < -1e-10 || (std::abs(q.real()) <= 1e-10 && q.imag() < 0);
        if (flip) std::reverse(loop.waypoints.begin(), loop.waypoints.end());
    }
    return cs;
}

// Signed intersection number of two closed tracked loops: x-plane crossings
// count only where the two lifts are on the same sheet.
inline int intersection_number(const CurveContext& C, const PathSpec& la, const PathSpec& lb) {
    std::vector<cplx> ya, yb;
    track(C, la, &ya);
    track(C, lb, &yb);
    double total = 0;
    for (size_t i = 0; i + 1 < la.waypoints.size(); ++i) {
        cplx a0 = la.waypoints[i], a1 = la.waypoints[i + 1];
        for (size_t j = 0; j + 1 < lb.waypoints.size(); ++j) {
            cplx b0 = lb.waypoints[j], b1 = lb.waypoints[j + 1];
            // segment intersection in the plane
            cplx r = a1 - a0, s = b1 - b0;
            double denom = r.real() * s.imag() - r.imag() * s.real();
            if (std::abs(denom) < 1e-14) continue;
            cplx qp = b0 - a0;
            double t = (qp.real() * s.imag() - qp.imag() * s.real()) / denom;
            double u = (qp.real() * r.imag() - qp.imag() * r.real()) / denom;
            if (t <= 0 || t >= 1 || u <= 0 || u >= 1) continue;
            cplx xc = a0 + t * r;
            cplx yA = continue_y(C, a0, ya[i], xc);
            cplx yB = continue_y(C, b0, yb[j], xc);
            if (std::abs(yA - yB) < 1e-6 * (1 + std::abs(yA)))
                total += denom > 0 ? 1.0 : -1.0;
        }
    }
    return (int)std::lround(total);
}

}  // namespace curvint

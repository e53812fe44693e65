#pragma once

#include <functional>
#include <vector>

#include "curvint/forms.hpp"
#include "curvint/puiseux.hpp"
#include "curvint/surface.hpp"

namespace curvint {

// One nodal residue functional: integrate (x-xb)^{I-1} (y-yb)^{J-1} (.) over
// the closed lift of a small circle on one local disc, divided by 2 pi i.
struct NodalFunctional {
    cplx xb{}, yb{};
    int I = 1, J = 1;     // unshifted check-region representative, I,J >= 1
    BranchSegment disc;   // which local disc (seed slope and winding)
    double radius = 0;
};

struct PeriodData {
    std::vector<LatticePoint> interior;  // row order of K, L, S
    int genus = 0;
    Mat K;     // #interior x g   A-periods of Omega_ij
    Mat L;     // #interior x g   B-periods of Omega_ij
    Mat Khat;  // g x #interior   normalizing matrix: omega_k = sum Khat Omega
    Mat tau;   // g x g
    Mat S;     // #interior x #interior, symmetric
    double s_asymmetry = 0;
    SurfacePoint origin;
    CycleSet cycles;
    double abs_tol = 1e-11;

    bool degenerate = false;
    std::vector<NodalFunctional> nodal;   // residue functionals (degenerate case)
    Mat Ktilde;                           // square selected extension [K | residue cols]
    Mat Ktilde_inv;
    std::vector<int> selected_columns;    // indices into the residue list
};

namespace detail {

inline cplx omega_eval(const CurveContext& C, LatticePoint ij, cplx x, cplx y) {
    return std::pow(x, ij.first) * std::pow(y, ij.second) / C.Py(x, y);
}

inline cplx nodal_residue_of(const CurveContext& C, const NodalFunctional& nf,
                             const std::function<cplx(cplx, cplx)>& F, double tol) {
    cplx seed = nf.yb + std::pow(nf.disc.C, 1.0 / (double)nf.disc.a) *
                            std::pow(cplx(nf.radius), (double)nf.disc.b / nf.disc.a);
    auto integrand = [&](cplx x, cplx y) {
        return std::pow(x - nf.xb, nf.I - 1) * std::pow(y - nf.yb, nf.J - 1) * F(x, y);
    };
    return integrate_around_point(C, nf.xb, nf.radius, seed, nf.disc.a, integrand, tol) / kTwoPiI;
}

}  // namespace detail

// A-period matrix K (and Khat = K^{-1}) for a generic curve.
inline PeriodData compute_K(const CurveContext& C, const CycleSet& cycles, double abs_tol = 1e-11) {
    PeriodData pd;
    pd.interior = build_newton(C.poly()).interior;
    pd.cycles = cycles;
    pd.abs_tol = abs_tol;
    int n = (int)pd.interior.size(), g = (int)cycles.A.size();
    pd.genus = g;
    pd.K = Mat(n, g);
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (int k = 0; k < g; ++k)
            pd.K(r, k) = integrate_along_path(
                C, cycles.A[k], [&](cplx x, cplx y) { return detail::omega_eval(C, ij, x, y); },
                abs_tol);
    }
    if (n == g && n > 0) {
        pd.Khat = inverse(pd.K);
    } else if (n != g) {
        throw input_error("compute_K: #A-cycles differs from #interior points; "
                          "use the degenerate builder");
    }
    return pd;
}

// Extended builder for degenerate curves: residue columns at the nodal
// points, column selection, and the Khat block.
inline PeriodData compute_K_degenerate(const CurveContext& C, const CycleSet& cycles,
                                       const std::vector<BranchPointInfo>& nodal_points,
                                       double abs_tol = 1e-11) {
    PeriodData pd;
    pd.interior = build_newton(C.poly()).interior;
    pd.cycles = cycles;
    pd.abs_tol = abs_tol;
    pd.degenerate = true;
    int n = (int)pd.interior.size(), g = (int)cycles.A.size();
    pd.genus = g;
    pd.K = Mat(n, g);
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (int k = 0; k < g; ++k)
            pd.K(r, k) = integrate_along_path(
                C, cycles.A[k], [&](cplx x, cplx y) { return detail::omega_eval(C, ij, x, y); },
                abs_tol);
    }
    // residue functionals per nodal point, disc, check representative
    for (auto& bp : nodal_points) {
        if (!bp.nodal) continue;
        double radius = std::max(1e-3, 0.5 * C.clearance());
        for (auto& seg : bp.segments)
            for (auto& cpt : bp.check_points)
                pd.nodal.push_back({bp.x, bp.y, cpt.first, cpt.second, seg, radius});
    }
    Mat R(n, (int)pd.nodal.size());
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (size_t c = 0; c < pd.nodal.size(); ++c)
            R(r, (int)c) = kTwoPiI * detail::nodal_residue_of(
                                         C, pd.nodal[c],
                                         [&](cplx x, cplx y) { return detail::omega_eval(C, ij, x, y); },
                                         abs_tol);
    }
    // greedy selection of residue columns to complete K to an invertible square
    pd.Ktilde = Mat(n, n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < g; ++k) pd.Ktilde(r, k) = pd.K(r, k);
    int need = n - g;
    std::vector<int> chosen;
    for (int pick = 0; pick < need; ++pick) {
        double best = -1;
        int bestc = -1;
        for (int c = 0; c < R.cols; ++c) {
            if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
            Mat trial = pd.Ktilde;
            for (int r = 0; r < n; ++r) trial(r, g + pick) = R(r, c);
            // score: magnitude of the pivot after eliminating prior columns
            auto qr = qr_column_pivot(trial, 1e-13);
            double score = std::abs(determinant([&] {
                Mat sq(g + pick + 1, g + pick + 1);
                for (int i = 0; i <= g + pick; ++i)
                    for (int j = 0; j <= g + pick; ++j) sq(i, j) = trial(i, j);
                return sq;
            }()));
            (void)qr;
            if (score > best) {
                best = score;
                bestc = c;
            }
        }
        if (bestc < 0 || best < 1e-12)
            throw numeric_error("compute_K_degenerate: rank below #interior; inconsistent nodal data");
        chosen.push_back(bestc);
        for (int r = 0; r < n; ++r) pd.Ktilde(r, g + pick) = R(r, bestc);
    }
    pd.selected_columns = chosen;
    pd.Ktilde_inv = inverse(pd.Ktilde);
    pd.Khat = Mat(g, n);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < n; ++j) pd.Khat(i, j) = pd.Ktilde_inv(i, j);
    return pd;
}

// Numeric moduli-space basis for a degenerate curve: coefficient vectors in
// the interior-monomial basis annihilating every nodal residue functional.
inline std::vector<std::vector<cplx>> moduli_basis_degenerate(const CurveContext& C,
                                                              const PeriodData& pd) {
    int n = (int)pd.interior.size();
    if (pd.nodal.empty()) {
        std::vector<std::vector<cplx>> id;
        for (int i = 0; i < n; ++i) {
            std::vector<cplx> e(n, cplx(0));
            e[i] = 1;
            id.push_back(e);
        }
        return id;
    }
    Mat R((int)pd.nodal.size(), n);
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (size_t c = 0; c < pd.nodal.size(); ++c)
            R((int)c, r) = detail::nodal_residue_of(
                C, pd.nodal[c], [&](cplx x, cplx y) { return detail::omega_eval(C, ij, x, y); },
                pd.abs_tol);
    }
    return nullspace(R, 1e-7);
}

// tau_{k,l} = B_k-period of omega_l; fills L and tau, flipping the B loops
// if the Siegel condition comes out mirrored.
inline void compute_tau(const CurveContext& C, PeriodData& pd, double sym_tol = 1e-8) {
    int n = (int)pd.interior.size(), g = pd.genus;
    pd.L = Mat(n, g);
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (int k = 0; k < g; ++k)
            pd.L(r, k) = integrate_along_path(
                C, pd.cycles.B[k], [&](cplx x, cplx y) { return detail::omega_eval(C, ij, x, y); },
                pd.abs_tol);
    }
    auto build_tau = [&] {
        Mat t(g, g);
        for (int k = 0; k < g; ++k)
            for (int l = 0; l < g; ++l) {
                cplx v = 0;
                for (int r = 0; r < n; ++r) v += pd.Khat(l, r) * pd.L(r, k);
                t(k, l) = v;
            }
        return t;
    };
    pd.tau = build_tau();
    double asym = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) asym = std::max(asym, std::abs(pd.tau(i, j) - pd.tau(j, i)));
    if (asym > 100 * sym_tol)
        throw numeric_error("compute_tau: period matrix asymmetry indicates an inconsistent marking");
    if (g > 0) {
        std::vector<std::vector<double>> im(g, std::vector<double>(g));
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) im[i][j] = 0.5 * (pd.tau(i, j).imag() + pd.tau(j, i).imag());
        auto ev = sym_eigenvalues(im);
        double mn = ev[0], mx = ev[0];
        for (double e : ev) {
            mn = std::min(mn, e);
            mx = std::max(mx, e);
        }
        if (mx < 0) {  // mirrored orientation: flip every B loop
            for (auto& b : pd.cycles.B) std::reverse(b.waypoints.begin(), b.waypoints.end());
            for (auto& v : pd.L.a) v = -v;
            pd.tau = build_tau();
        } else if (mn < 0) {
            throw numeric_error("compute_tau: Im tau is indefinite; marking is not symplectic");
        }
    }
}

// S-matrix: the unique symmetric correction with vanishing A-periods of
// B = B^comb + Omega^T S Omega (and vanishing nodal functionals in the
// degenerate case). Collocation in the second slot expands each functional
// of B^comb over the Omega basis.
inline void compute_S(const CurveContext& C, const FormsContext& F, PeriodData& pd, Rng& rng,
                      double abs_tol = 1e-10) {
    int n = (int)pd.interior.size(), g = pd.genus;
    if (n == 0) {
        pd.S = Mat(0, 0);
        return;
    }
    // collocation points: pseudo-random x away from branch values, all sheets
    // cycled for maximal separation
    std::vector<SurfacePoint> pts;
    int guard = 0;
    while ((int)pts.size() < n) {
        if (++guard > 400) throw numeric_error("compute_S: failed to place collocation points");
        cplx x = rng.in_rect(-1.6, 1.6, -1.2, 1.2);
        if (C.min_branch_distance(x) < 2.5 * C.clearance()) continue;
        auto f = C.fiber(x);
        pts.push_back({x, f[(int)pts.size() % f.size()], 0.0});
    }
    // Vandermonde of the Omega basis at the collocation points
    Mat V(n, n);
    for (int s = 0; s < n; ++s)
        for (int c = 0; c < n; ++c)
            V(s, c) = detail::omega_eval(C, pd.interior[c], pts[s].x, pts[s].y);
    // functionals: A-cycles then the selected residue functionals
    int total = n;  // number of selected functionals equals n
    Mat coeffs(total, n);  // expansion of functional_t(B^comb(., p2)) over Omega(p2)
    for (int t = 0; t < total; ++t) {
        std::vector<cplx> vals(n);
        for (int s = 0; s < n; ++s) {
            const auto& p2 = pts[s];
            if (t < g) {
                vals[s] = integrate_along_path(
                    C, pd.cycles.A[t],
                    [&](cplx x, cplx y) { return F.bergman_comb(x, y, p2.x, p2.y); }, abs_tol);
            } else {
                const auto& nf = pd.nodal[pd.selected_columns[t - g]];
                vals[s] = kTwoPiI * detail::nodal_residue_of(
                                        C, nf,
                                        [&](cplx x, cplx y) { return F.bergman_comb(x, y, p2.x, p2.y); },
                                        abs_tol);
            }
        }
        auto row = solve(V, vals);
        for (int c = 0; c < n; ++c) coeffs(t, c) = row[c];
    }
    // solve Ktilde^T S = -coeffs  (generic case: Ktilde = K, total = n)
    Mat Kt = pd.degenerate ? pd.Ktilde : pd.K;
    Mat KtT = Kt.transpose();
    pd.S = Mat(n, n);
    for (int col = 0; col < n; ++col) {
        std::vector<cplx> rhs(n);
        for (int t = 0; t < n; ++t) rhs[t] = -coeffs(t, col);
        auto scol = solve(KtT, rhs);
        for (int r = 0; r < n; ++r) pd.S(r, col) = scol[r];
    }
    double asym = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) asym = std::max(asym, std::abs(pd.S(i, j) - pd.S(j, i)));
    pd.s_asymmetry = asym;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx sym = 0.5 * (pd.S(i, j) + pd.S(j, i));
            pd.S(i, j) = pd.S(j, i) = sym;
        }
}

// Full Bergman kernel value (coefficient of dx1 dx2).
inline cplx bergman(const CurveContext& C, const FormsContext& F, const PeriodData& pd, cplx x1,
                    cplx y1, cplx x2, cplx y2) {
    cplx b = F.bergman_comb(x1, y1, x2, y2);
    int n = (int)pd.interior.size();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            b += pd.S(i, j) * detail::omega_eval(C, pd.interior[i], x1, y1) *
                 detail::omega_eval(C, pd.interior[j], x2, y2);
    return b;
}

// dzeta vector (coefficient of dx at p) given S and the C-polynomials.
inline std::vector<cplx> dzeta_coeff(const CurveContext& C, const PeriodData& pd,
                                     const CPolynomial& cp, cplx x, cplx y) {
    int n = (int)pd.interior.size();
    std::vector<cplx> out(n);
    cplx py = C.Py(x, y);
    for (int i = 0; i < n; ++i) {
        cplx s = 0;
        for (int j = 0; j < n; ++j)
            s += pd.S(i, j) * std::pow(x, pd.interior[j].first) * std::pow(y, pd.interior[j].second);
        s += to_complex(cp.C[i]).eval(x, y);
        out[i] = s / py;
    }
    return out;
}

// Straight-line path from a to b in the x-plane (the caller is responsible
// for clearance; integration paths between collocation-scale points).
inline PathSpec straight_path(const CurveContext& C, const SurfacePoint& from, cplx x_to) {
    PathSpec p;
    p.waypoints = {from.x, x_to};
    p.start_sheet = C.nearest_sheet(from.x, from.y);
    return p;
}

// Net signed sheet-matched crossings of an open path with one marked loop.
// A nonzero count means the path leaves the fundamental domain and integrals
// along it pick up periods.
inline int net_crossings(const CurveContext& C, const PathSpec& path, const PathSpec& loop) {
    std::vector<cplx> yp, yl;
    track(C, path, &yp);
    track(C, loop, &yl);
    double total = 0;
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
        cplx a0 = path.waypoints[i], a1 = path.waypoints[i + 1];
        for (size_t j = 0; j + 1 < loop.waypoints.size(); ++j) {
            cplx b0 = loop.waypoints[j], b1 = loop.waypoints[j + 1];
            cplx r = a1 - a0, sgm = b1 - b0;
            double denom = r.real() * sgm.imag() - r.imag() * sgm.real();
            if (std::abs(denom) < 1e-14) continue;
            cplx qp = b0 - a0;
            double t = (qp.real() * sgm.imag() - qp.imag() * sgm.real()) / denom;
            double u = (qp.real() * r.imag() - qp.imag() * r.real()) / denom;
            if (t <= 0 || t >= 1 || u <= 0 || u >= 1) continue;
            cplx xc = a0 + t * r;
            cplx yA = continue_y(C, a0, yp[i], xc);
            cplx yB = continue_y(C, b0, yl[j], xc);
            if (std::abs(yA - yB) < 1e-6 * (1 + std::abs(yA))) total += denom > 0 ? 1.0 : -1.0;
        }
    }
    return (int)std::lround(total);
}

// Route from `from` to the surface point `to` that lands on the declared
// sheet: straight if the continuation already matches, otherwise with a
// detour looping one branch value (retried over branch points and then
// pairs) to realize the required sheet permutation. Routes that carry a net
// crossing with any loop of `avoid` are rejected (the fundamental-domain
// rule for zeta and the Abel map).
inline std::vector<PathSpec> route_to_point(const CurveContext& C, const SurfacePoint& from,
                                            const SurfacePoint& to, const CycleSet* avoid = nullptr) {
    double cl = C.clearance();
    auto segment_clear = [&](cplx a, cplx b, double margin) {
        for (auto& br : C.branch_x()) {
            if (std::abs(br - a) < 1e-12 || std::abs(br - b) < 1e-12) continue;
            cplx ab = b - a;
            double L2 = std::norm(ab);
            double t = L2 == 0 ? 0.0 : std::clamp(((br - a) / ab).real(), 0.0, 1.0);
            if (std::abs(br - (a + t * ab)) < margin) return false;
        }
        return true;
    };
    auto try_route = [&](const std::vector<cplx>& mids,
                         bool need_clear) -> std::optional<std::vector<PathSpec>> {
        PathSpec p;
        p.waypoints.push_back(from.x);
        for (auto& m : mids) p.waypoints.push_back(m);
        p.waypoints.push_back(to.x);
        if (need_clear)
            for (size_t s = 0; s + 1 < p.waypoints.size(); ++s)
                if (!segment_clear(p.waypoints[s], p.waypoints[s + 1], 0.6 * cl))
                    return std::nullopt;
        p.start_sheet = C.nearest_sheet(from.x, from.y);
        auto f0 = C.fiber(from.x);
        if (std::abs(f0[p.start_sheet] - from.y) > 1e-6 * (1 + std::abs(from.y))) return std::nullopt;
        try {
            auto end = track(C, p);
            if (std::abs(end.y - to.y) > 1e-6 * (1 + std::abs(to.y))) return std::nullopt;
            if (avoid) {
                for (auto& loop : avoid->A)
                    if (net_crossings(C, p, loop) != 0) return std::nullopt;
                for (auto& loop : avoid->B)
                    if (net_crossings(C, p, loop) != 0) return std::nullopt;
            }
            return std::vector<PathSpec>{p};
        } catch (const numeric_error&) {
        }
        return std::nullopt;
    };
    // dodge waypoints over branch values that sit near the straight chord
    auto dodges = [&](cplx a, cplx b) {
        std::vector<cplx> mids;
        cplx ab = b - a;
        double L2 = std::norm(ab);
        std::vector<std::pair<double, cplx>> hits;
        for (auto& br : C.branch_x()) {
            double t = L2 == 0 ? 0.0 : std::clamp(((br - a) / ab).real(), 0.0, 1.0);
            if (t <= 0 || t >= 1) continue;
            if (std::abs(br - (a + t * ab)) < 2.0 * cl) hits.push_back({t, br});
        }
        std::sort(hits.begin(), hits.end(), [](auto& u, auto& v) { return u.first < v.first; });
        cplx n = (L2 == 0) ? cplx(0, 1) : ab / std::abs(ab) * cplx(0, 1);
        for (auto& [t, br] : hits) mids.push_back(br + 3.0 * cl * n);
        return mids;
    };
    if (auto r = try_route({}, true)) return *r;
    if (auto r = try_route(dodges(from.x, to.x), true)) return *r;
    {
        auto flipped = dodges(from.x, to.x);
        for (auto& m : flipped) m = std::conj(m - from.x) + from.x;  // other side
        if (auto r = try_route(flipped, true)) return *r;
    }

    // single-branch detours: approach above the branch value, loop around it
    double rad = 1.2 * C.clearance();
    auto loop_mids = [&](cplx b) {
        std::vector<cplx> m;
        cplx up(0, rad), right(rad, 0);
        m.push_back(b + up * 2.0);
        m.push_back(b + right);
        m.push_back(b - up);
        m.push_back(b - right);
        m.push_back(b + up);
        m.push_back(b + up * 2.0);
        return m;
    };
    for (auto& b : C.branch_x()) {
        auto m = loop_mids(b);
        auto tail = dodges(m.back(), to.x);
        m.insert(m.end(), tail.begin(), tail.end());
        if (auto r = try_route(m, false)) return *r;
    }
    for (auto& b1 : C.branch_x())
        for (auto& b2 : C.branch_x()) {
            auto m = loop_mids(b1);
            auto m2 = loop_mids(b2);
            m.insert(m.end(), m2.begin(), m2.end());
            auto tail = dodges(m.back(), to.x);
            m.insert(m.end(), tail.begin(), tail.end());
            if (auto r = try_route(m, false)) return *r;
        }
    throw numeric_error("route_to_point: no admissible route reaches the requested sheet");
}

// zeta(p) = integral from the origin of dzeta, with zeta(o) = 0.
inline std::vector<cplx> zeta(const CurveContext& C, const PeriodData& pd, const CPolynomial& cp,
                              const SurfacePoint& p, const std::vector<PathSpec>* route = nullptr) {
    int n = (int)pd.interior.size();
    std::vector<cplx> out(n, cplx(0));
    std::vector<PathSpec> legs;
    if (route) {
        legs = *route;
    } else {
        legs = route_to_point(C, pd.origin, p, &pd.cycles);
    }
    for (int i = 0; i < n; ++i) {
        cplx acc = 0;
        for (auto& leg : legs)
            acc += integrate_along_path(
                C, leg,
                [&](cplx x, cplx y) { return dzeta_coeff(C, pd, cp, x, y)[i]; }, pd.abs_tol);
        out[i] = acc;
    }
    return out;
}

// Abel map F(p) = integral of the normalized holomorphic basis from o.
inline std::vector<cplx> abel_map(const CurveContext& C, const PeriodData& pd,
                                  const SurfacePoint& p, const std::vector<PathSpec>* route = nullptr) {
    int n = (int)pd.interior.size(), g = pd.genus;
    std::vector<PathSpec> legs;
    if (route) {
        legs = *route;
    } else {
        legs = route_to_point(C, pd.origin, p, &pd.cycles);
    }
    std::vector<cplx> omega_ints(n, cplx(0));
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (auto& leg : legs)
            omega_ints[r] += integrate_along_path(
                C, leg, [&](cplx x, cplx y) { return detail::omega_eval(C, ij, x, y); }, pd.abs_tol);
    }
    std::vector<cplx> out(g, cplx(0));
    for (int i = 0; i < g; ++i)
        for (int r = 0; r < n; ++r) out[i] += pd.Khat(i, r) * omega_ints[r];
    return out;
}

// Normalized third-kind form dS_{p1,p2} evaluated at (x, y): the
// combinatorial part plus the zeta-difference combination of the Omega basis.
inline cplx ds_normalized_value(const CurveContext& C, const FormsContext& F, const PeriodData& pd,
                                const std::vector<cplx>& zeta1, const std::vector<cplx>& zeta2,
                                const SurfacePoint& p1, const SurfacePoint& p2, cplx x, cplx y) {
    cplx v = F.ds_comb(x, y, p1, p2);
    for (size_t i = 0; i < pd.interior.size(); ++i)
        v += (zeta1[i] - zeta2[i]) * detail::omega_eval(C, pd.interior[i], x, y);
    return v;
}

// ---------------------------------------------------------------------------
// Change of the cycle basis by an integer symplectic matrix
// U = [[alpha, beta], [gamma, delta]] acting as A' = alpha A + beta B,
// B' = gamma A + delta B.

struct SymplecticU {
    std::vector<std::vector<long long>> alpha, beta, gamma, delta;
};

inline bool is_symplectic(const SymplecticU& u, int g) {
    // U J U^T = J  <=>  alpha delta^T - beta gamma^T = Id,
    // alpha beta^T and gamma delta^T symmetric
    auto mul = [&](const std::vector<std::vector<long long>>& a,
                   const std::vector<std::vector<long long>>& b, bool transpose_b) {
        std::vector<std::vector<long long>> r(g, std::vector<long long>(g, 0));
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j)
                for (int k = 0; k < g; ++k) r[i][j] += a[i][k] * (transpose_b ? b[j][k] : b[k][j]);
        return r;
    };
    auto ab = mul(u.alpha, u.beta, true);
    auto gd = mul(u.gamma, u.delta, true);
    auto ad = mul(u.alpha, u.delta, true);
    auto bg = mul(u.beta, u.gamma, true);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            if (ab[i][j] != ab[j][i]) return false;
            if (gd[i][j] != gd[j][i]) return false;
            if (ad[i][j] - bg[i][j] != (i == j ? 1 : 0)) return false;
        }
    return true;
}

inline PeriodData change_cycles(const PeriodData& pd, const SymplecticU& u) {
    int g = pd.genus, n = (int)pd.interior.size();
    if (!is_symplectic(u, g)) throw input_error("change_cycles: U is not integer symplectic");
    auto toMat = [&](const std::vector<std::vector<long long>>& m) {
        Mat r(g, g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) r(i, j) = (double)m[i][j];
        return r;
    };
    Mat alpha = toMat(u.alpha), beta = toMat(u.beta), gamma = toMat(u.gamma), delta = toMat(u.delta);
    PeriodData out = pd;
    // K'_(ij),k = A'_k-period = sum_l alpha_{kl} K_l + beta_{kl} L_l
    out.K = pd.K * alpha.transpose() + pd.L * beta.transpose();
    out.L = pd.K * gamma.transpose() + pd.L * delta.transpose();
    Mat apbt = alpha.transpose() + pd.tau * beta.transpose();
    out.Khat = inverse(apbt) * pd.Khat;
    out.tau = (gamma + delta * pd.tau) * inverse(alpha + beta * pd.tau);
    out.S = pd.S - kTwoPiI * (pd.Khat.transpose() * inverse(alpha + beta * pd.tau) * beta * pd.Khat);
    // consistency: Khat' K' = Id
    Mat chk = out.Khat * out.K;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            if (std::abs(chk(i, j) - (i == j ? 1.0 : 0.0)) > 1e-7)
                throw numeric_error("change_cycles: Khat' K' deviates from the identity");
    // transformed loops (bookkeeping only; combinations are formal)
    out.cycles.A.clear();
    out.cycles.B.clear();
    return out;
}

// ---------------------------------------------------------------------------
// Rauch variational check: the residue formula for (delta K) Khat against
// central finite differences of K.

struct RauchReport {
    Mat from_residues;     // (delta K . Khat) as an #interior x #interior matrix
    Mat from_differences;
    double max_deviation = 0;
};

inline RauchReport rauch_check(const CurveContext& C, const FormsContext& F, const PeriodData& pd,
                               const BivarPolyC& deltaP, double fd_eps = 1e-5) {
    int n = (int)pd.interior.size();
    RauchReport rep;
    rep.from_residues = Mat(n, n);
    rep.from_differences = Mat(n, n);
    if (deltaP.is_zero()) {
        rep.from_residues = Mat(n, n);
        rep.from_differences = Mat(n, n);
        return rep;
    }
    CompiledBivar dP(deltaP), dPy(deltaP.partial('y'));
    BivarPolyC PxQ = C.poly().partial('x');
    CompiledBivar Px(PxQ), Pyy(C.poly().partial('y', 2));

    // sample points for the polynomial fit of the right hand side
    Rng rng(2024);
    std::vector<SurfacePoint> pts;
    while ((int)pts.size() < n) {
        cplx x = rng.in_rect(-1.4, 1.4, 0.4, 1.3);
        if (C.min_branch_distance(x) < 2.0 * C.clearance()) continue;
        auto f = C.fiber(x);
        pts.push_back({x, f[(int)pts.size() % f.size()], 0});
    }
    // generic branch points: all simple Delta roots with P_x != 0
    struct BP {
        cplx x, y;
    };
    std::vector<BP> branch;
    for (auto& bx : C.branch_x()) {
        auto fib = C.fiber(bx + 1e-7);
        // collapse pair: the two nearest fiber values
        double dmin = 1e300;
        cplx ycol = 0;
        for (size_t i = 0; i < fib.size(); ++i)
            for (size_t j = i + 1; j < fib.size(); ++j)
                if (std::abs(fib[i] - fib[j]) < dmin) {
                    dmin = std::abs(fib[i] - fib[j]);
                    ycol = 0.5 * (fib[i] + fib[j]);
                }
        if (std::abs(Px(bx, ycol)) < 1e-8 * C.scale())
            throw input_error("rauch_check: non-generic branch point; unsupported");
        branch.push_back({bx, ycol});
    }
    double radius = 0.6 * C.clearance();
    Mat V(n, n);
    for (int s = 0; s < n; ++s)
        for (int c = 0; c < n; ++c)
            V(s, c) = std::pow(pts[s].x, pd.interior[c].first) *
                      std::pow(pts[s].y, pd.interior[c].second);
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        std::vector<cplx> vals(n);
        for (int s = 0; s < n; ++s) {
            cplx x = pts[s].x, y = pts[s].y;
            cplx py = C.Py(x, y);
            cplx xiyj = std::pow(x, ij.first) * std::pow(y, ij.second);
            cplx term = -xiyj * dPy(x, y) / py;
            cplx jy = ij.second > 0 ? (double)ij.second * std::pow(x, ij.first) *
                                          std::pow(y, ij.second - 1)
                                    : cplx(0);
            term -= (jy / py - xiyj * Pyy(x, y) / (py * py)) * dP(x, y);
            // residue sum over the branch points
            for (auto& bp : branch) {
                auto f = [&](cplx xp, cplx yp) {
                    cplx bhat = bergman(C, F, pd, xp, yp, x, y) * C.Py(xp, yp) * py;
                    return dP(xp, yp) * bhat * std::pow(xp, ij.first) * std::pow(yp, ij.second) /
                           (Px(xp, yp) * C.Py(xp, yp) * C.Py(xp, yp));
                };
                cplx res = integrate_around_point(C, bp.x, radius, bp.y, 2, f, pd.abs_tol) / kTwoPiI;
                term += res;
            }
            vals[s] = term;
        }
        auto row = solve(V, vals);
        for (int c = 0; c < n; ++c) rep.from_residues(r, c) = row[c];
    }
    // finite differences of K under P -> P +- eps deltaP with the same cycles
    BivarPolyC Pp = C.poly() + cplx(fd_eps) * deltaP;
    BivarPolyC Pm = C.poly() - cplx(fd_eps) * deltaP;
    CurveContext Cp(Pp), Cm(Pm);
    Mat Kp(n, pd.genus), Km(n, pd.genus);
    for (int r = 0; r < n; ++r) {
        auto ij = pd.interior[r];
        for (int k = 0; k < pd.genus; ++k) {
            Kp(r, k) = integrate_along_path(
                Cp, pd.cycles.A[k], [&](cplx x, cplx y) { return detail::omega_eval(Cp, ij, x, y); },
                pd.abs_tol);
            Km(r, k) = integrate_along_path(
                Cm, pd.cycles.A[k], [&](cplx x, cplx y) { return detail::omega_eval(Cm, ij, x, y); },
                pd.abs_tol);
        }
    }
    Mat dK(n, pd.genus);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k < pd.genus; ++k) dK(r, k) = (Kp(r, k) - Km(r, k)) / (2 * fd_eps);
    rep.from_differences = dK * pd.Khat;
    rep.max_deviation = (rep.from_residues - rep.from_differences).max_abs();
    return rep;
}

}  // namespace curvint

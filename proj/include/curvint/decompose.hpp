#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "curvint/periods.hpp"
#include "curvint/primeform.hpp"
#include "curvint/puiseux.hpp"

namespace curvint {

// Rational 1-form (num/den) dx on the curve.
struct RationalForm {
    BivarPolyC num, den;
    cplx value(cplx x, cplx y) const { return num.eval(x, y) / den.eval(x, y); }
};

struct PoleData {
    bool at_puncture = false;
    int puncture_index = -1;  // into the punctures list when at a puncture
    SurfacePoint point;       // finite pole: the surface point
    LocalChart chart;
    int a = 1;                // order of the chart
    cplx x_p{};               // 0 at punctures of x per the convention
    int deg = 0;              // pole order of R dx in the local coordinate
    std::string label;
};

struct Times {
    std::vector<PoleData> poles;
    std::vector<std::vector<cplx>> t;  // t[p][k], k = 0 .. deg_p - 1
};

struct Decomposition {
    Times times;
    std::vector<cplx> t_holo;            // t_i over the A-cycle index
    std::vector<cplx> residual_coeffs;   // P_y * Rtilde over the interior monomials
    std::vector<cplx> third_kind_comb;   // optional N''' combination for puncture residues
    std::vector<LatticePoint> third_kind_points;
    double residual_mismatch = 0;        // support check residual at fresh samples
    double series_vs_circle = 0;         // times cross-check discrepancy
};

namespace detail {

// compose a univariate polynomial with a Laurent series
inline LaurentSeries compose_univar(const UniPolyC& q, const LaurentSeries& s, int len) {
    LaurentSeries acc;
    for (int i = q.degree(); i >= 0; --i) {
        acc = acc * s;
        cplx c = q.coeff(i);
        if (c != cplx(0)) acc = acc + LaurentSeries::constant(c, len);
    }
    return acc.truncated(len);
}

inline std::vector<LaurentSeries> pow_table(const LaurentSeries& s, int maxexp, int len) {
    std::vector<LaurentSeries> t(maxexp + 1);
    t[0] = LaurentSeries::constant(1.0, len);
    for (int e = 1; e <= maxexp; ++e) t[e] = (t[e - 1] * s).truncated(len);
    return t;
}

// series of R(x(xi), y(xi)) * dx/dxi; leading roundoff is trimmed so that
// numerically-centered poles get the true Laurent lead
inline LaurentSeries form_series(const RationalForm& R, const LocalChart& ch) {
    int len = ch.length;
    LaurentSeries n = compose_bivar(R.num, ch.x, ch.y, len).trimmed_relative(1e-10);
    LaurentSeries d = compose_bivar(R.den, ch.x, ch.y, len).trimmed_relative(1e-10);
    if (d.is_zero()) throw numeric_error("form_series: denominator vanishes identically here");
    return (n * d.inverse() * ch.x.derivative()).truncated(len).trimmed_relative(1e-10);
}

// Numeric resultant of den and P in y via interpolation, to locate candidate
// pole x-values of a rational form.
inline UniPolyC resultant_y_numeric(const BivarPolyC& A, const BivarPolyC& B) {
    int da = A.degy(), db = B.degy();
    if (da < 1 || db < 1) {
        // no y-dependence: the resultant degenerates; zeros of the pure-x
        // polynomial are the candidates
        return A.degy() < 1 ? A.coeff_of_y(0) : B.coeff_of_y(0);
    }
    int n = da + db;
    long long degbound = 0;
    {
        long long rowa = std::max(0, A.degx()), rowb = std::max(0, B.degx());
        degbound = rowa * db + rowb * da;
    }
    int npts = (int)degbound + 1;
    std::vector<cplx> xs(npts), ys(npts);
    for (int t = 0; t < npts; ++t) {
        xs[t] = std::polar(1.41, 2 * kPi * (t + 0.13) / npts);
        Mat m(n, n);
        std::vector<cplx> ac(da + 1), bc(db + 1);
        for (int j = 0; j <= da; ++j) ac[j] = A.coeff_of_y(j).eval(xs[t]);
        for (int j = 0; j <= db; ++j) bc[j] = B.coeff_of_y(j).eval(xs[t]);
        for (int r = 0; r < db; ++r)
            for (int kk = 0; kk <= da; ++kk) m(r, r + kk) = ac[da - kk];
        for (int r = 0; r < da; ++r)
            for (int kk = 0; kk <= db; ++kk) m(db + r, r + kk) = bc[db - kk];
        ys[t] = determinant(m);
    }
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

}  // namespace detail

// Orchestrates the decomposition pipeline for one curve.
class Decomposer {
  public:
    Decomposer(const CurveContext& C, const FormsContext& F, const PeriodData& pd,
               const CPolynomial& cp, int deg_cap = 64)
        : C_(C), F_(F), pd_(pd), cp_(cp), deg_cap_(deg_cap) {
        NewtonData nd = build_newton(C.poly());
        punctures_ = punctures(C.poly(), nd);
        third_points_ = nd.third;
        maxi_ = maxj_ = 1;
        for (auto& ij : pd.interior) {
            maxi_ = std::max(maxi_, ij.first);
            maxj_ = std::max(maxj_, ij.second);
        }
    }

    const PeriodData& periods() const { return pd_; }

    // --- pole discovery and times -----------------------------------------

    Times times(const RationalForm& R) const {
        Times out;
        // punctures where R dx grows
        for (size_t a = 0; a < punctures_.size(); ++a) {
            int len = series_len();
            LocalChart ch = chart_at_puncture(C_, punctures_[a], len);
            LaurentSeries w = detail::form_series(R, ch);
            if (w.is_zero() || w.lead() >= 0) continue;
            PoleData pd;
            pd.at_puncture = true;
            pd.puncture_index = (int)a;
            pd.chart = ch;
            pd.a = punctures_[a].a;
            pd.x_p = punctures_[a].x_infinite ? cplx(0) : punctures_[a].X;
            pd.deg = -w.lead();
            if (pd.deg > deg_cap_) throw numeric_error("times: pole order exceeds the cap");
            pd.label = "inf" + std::to_string(a);
            out.poles.push_back(std::move(pd));
        }
        // finite poles: zeros of the denominator on the curve
        UniPolyC res = detail::resultant_y_numeric(R.den, C_.poly());
        if (!res.is_zero() && res.degree() >= 1) {
            double rs = 0;
            for (auto& c : res.coeffs()) rs = std::max(rs, std::abs(c));
            std::vector<cplx> cc = res.coeffs();
            while (cc.size() > 1 && std::abs(cc.back()) < 1e-10 * rs) cc.pop_back();
            UniPolyC clean(std::move(cc));
            if (clean.degree() >= 1) {
                CompiledBivar den(R.den);
                // multiple resultant roots scatter like eps^(1/m); cluster wide
                auto clusters = cluster_roots(poly_roots(clean), 2e-5);
                for (auto& cl : clusters) {
                    if (C_.min_branch_distance(cl.value) < 1e-4) {
                        // candidate over a branch value: expand on each local
                        // disc; the chart decides whether R dx has a pole
                        cplx xb = cl.value;
                        auto fib = C_.fiber(xb + 1e-7);
                        double dmin = 1e300;
                        cplx yb = 0;
                        for (size_t i = 0; i < fib.size(); ++i)
                            for (size_t j = i + 1; j < fib.size(); ++j)
                                if (std::abs(fib[i] - fib[j]) < dmin) {
                                    dmin = std::abs(fib[i] - fib[j]);
                                    yb = 0.5 * (fib[i] + fib[j]);
                                }
                        // joint Newton on (P, P_y) pins the ramification point
                        // to full precision (the chart seed needs it)
                        {
                            CompiledBivar pxc(C_.poly().partial('x'));
                            CompiledBivar pyyc(C_.poly().partial('y', 2));
                            CompiledBivar pxyc(C_.poly().partial('x').partial('y'));
                            for (int it = 0; it < 30; ++it) {
                                cplx f1 = C_.P(xb, yb), f2 = C_.Py(xb, yb);
                                cplx j11 = pxc(xb, yb), j12 = C_.Py(xb, yb);
                                cplx j21 = pxyc(xb, yb), j22 = pyyc(xb, yb);
                                cplx det = j11 * j22 - j12 * j21;
                                if (std::abs(det) < 1e-14) break;
                                cplx dx = (f1 * j22 - f2 * j12) / det;
                                cplx dy = (j11 * f2 - j21 * f1) / det;
                                xb -= dx;
                                yb -= dy;
                                if (std::abs(dx) + std::abs(dy) < 1e-15 * (1 + std::abs(xb))) break;
                            }
                        }
                        auto info = branch_analysis(C_.poly(), xb, yb);
                        if (info.nodal)
                            throw input_error("times: pole at a nodal point is unsupported");
                        for (auto& seg : info.segments) {
                            PoleData p;
                            p.point = {xb, yb, std::abs(C_.P(xb, yb))};
                            p.chart = chart_at_branch(C_, xb, yb, seg, series_len());
                            p.a = seg.a;
                            p.x_p = xb;
                            LaurentSeries w = detail::form_series(R, p.chart);
                            if (w.is_zero() || w.lead() >= 0) continue;
                            p.deg = -w.lead();
                            if (p.deg > deg_cap_)
                                throw numeric_error("times: pole order exceeds the cap");
                            p.label = "b" + std::to_string(out.poles.size());
                            out.poles.push_back(std::move(p));
                        }
                        continue;
                    }
                    for (auto& y0 : C_.fiber(cl.value)) {
                        // polish the pole onto the denominator zero along the
                        // sheet, then test the residual against the local
                        // magnitude envelope of the denominator
                        cplx x = cl.value, y = y0;
                        CompiledBivar denx(R.den.partial('x')), deny(R.den.partial('y'));
                        for (int it = 0; it < 12; ++it) {
                            cplx slope = -C_.Px(x, y) / C_.Py(x, y);
                            cplx df = denx(x, y) + deny(x, y) * slope;
                            if (std::abs(df) < 1e-300) break;
                            cplx step = den(x, y) / df;
                            x -= step;
                            y -= step * slope;
                            y = C_.fiber(x)[C_.nearest_sheet(x, y)];
                            if (std::abs(step) < 1e-15 * (1 + std::abs(x))) break;
                        }
                        double envelope = 0;
                        for (auto& [pt, c] : R.den.terms())
                            envelope += std::abs(c) * std::pow(std::abs(x), pt.first) *
                                        std::pow(std::max(1.0, std::abs(y)), pt.second);
                        if (std::abs(den(x, y)) > 1e-8 * std::max(envelope, 1e-30)) continue;
                        PoleData p;
                        p.point = {x, y, std::abs(C_.P(x, y))};
                        p.chart = chart_at_regular(C_, p.point, series_len());
                        p.a = 1;
                        p.x_p = x;
                        LaurentSeries w = detail::form_series(R, p.chart);
                        if (w.is_zero() || w.lead() >= 0) continue;
                        p.deg = -w.lead();
                        if (p.deg > deg_cap_) throw numeric_error("times: pole order exceeds the cap");
                        p.label = "p" + std::to_string(out.poles.size());
                        out.poles.push_back(std::move(p));
                    }
                }
            }
        }
        // dedupe: cluster scatter of multiple resultant roots can propose the
        // same pole (or the same ramified disc) more than once
        {
            std::vector<PoleData> unique;
            for (auto& p : out.poles) {
                bool dup = false;
                for (auto& q : unique) {
                    if (p.at_puncture != q.at_puncture) continue;
                    if (p.at_puncture) {
                        if (p.puncture_index == q.puncture_index) dup = true;
                        continue;
                    }
                    if (p.a != q.a) continue;
                    if (std::abs(p.point.x - q.point.x) > 1e-6 * (1 + std::abs(p.point.x))) continue;
                    // same center: distinguish discs by the leading y-behavior
                    cplx pl = p.chart.y.coeff(p.chart.y.lead());
                    cplx ql = q.chart.y.coeff(q.chart.y.lead());
                    if (p.chart.y.lead() == q.chart.y.lead() &&
                        std::abs(pl - ql) < 1e-6 * (1 + std::abs(pl)) &&
                        std::abs(p.point.y - q.point.y) < 1e-6 * (1 + std::abs(p.point.y)))
                        dup = true;
                }
                if (!dup) unique.push_back(p);
            }
            out.poles = std::move(unique);
        }
        // the times themselves
        for (auto& p : out.poles) {
            LaurentSeries w = detail::form_series(R, p.chart);
            std::vector<cplx> tp(p.deg, cplx(0));
            for (int k = 0; k < p.deg; ++k) tp[k] = w.coeff(-k - 1);
            out.t.push_back(std::move(tp));
        }
        return out;
    }

    // Cross-check one time by a lifted-circle quadrature. Only charts with
    // |a| = 1 keep xi single-valued along the circle; higher ramification is
    // covered by the series route alone.
    cplx time_by_circle(const RationalForm& R, const PoleData& p, int k) const {
        if (std::abs(p.a) != 1) return std::numeric_limits<double>::quiet_NaN();
        if (p.at_puncture) {
            // the xi-circle at a puncture is a large x-circle with reversed
            // orientation (xi = 1/x)
            double Rad = 75.0;
            cplx y_seed = p.chart.y.eval(1.0 / Rad);
            auto f = [&](cplx x, cplx y) { return std::pow(1.0 / x, k) * R.value(x, y); };
            cplx loop = integrate_around_point(C_, cplx(0), Rad, y_seed, 1, f, 1e-10);
            return -loop / kTwoPiI;
        }
        double rad = std::min(0.5 * C_.clearance(), 0.25 * C_.min_branch_distance(p.point.x));
        auto f = [&](cplx x, cplx y) { return std::pow(x - p.x_p, k) * R.value(x, y); };
        return integrate_around_point(C_, p.point.x, rad, p.point.y, 1, f, 1e-10) / kTwoPiI;
    }

    // --- second-kind blocks -------------------------------------------------

    // residue vector of the Omega basis at the pole: r[(ij)] for order k
    std::vector<cplx> omega_residues(const PoleData& p, int k) const {
        std::vector<cplx> r(pd_.interior.size(), cplx(0));
        for (size_t c = 0; c < pd_.interior.size(); ++c) {
            auto ij = pd_.interior[c];
            RationalForm om;
            om.num = BivarPolyC::monomial(ij.first, ij.second, cplx(1));
            om.den = C_.poly().partial('y');
            LaurentSeries w = detail::form_series(om, p.chart);
            r[c] = w.coeff(k - 1);
        }
        return r;
    }

    // B_{p,k}(x, y): the coefficient of dx; affine of degree one in S with
    // the S-part carried through the omega residues
    cplx b_pk(const PoleData& p, int k, cplx x, cplx y) const {
        if (k < 1) throw input_error("b_pk: k >= 1 required (k = 0 is the third-kind path)");
        cplx comb = bpk_comb(p, k, x, y);
        auto r = omega_residues(p, k);
        cplx scor = 0;
        int n = (int)pd_.interior.size();
        for (int i = 0; i < n; ++i) {
            cplx sr = 0;
            for (int j = 0; j < n; ++j) sr += pd_.S(i, j) * r[j];
            scor += detail::omega_eval(C_, pd_.interior[i], x, y) * sr;
        }
        return (comb + scor) / (double)k;
    }

    // combinatorial part of the slot-2 residue
    cplx bpk_comb(const PoleData& p, int k, cplx x, cplx y) const {
        const LocalChart& ch = p.chart;
        int len = ch.length;
        // A = P(x, y'(xi)), B = P(x'(xi), y)
        UniPolyC qy(std::vector<cplx>{});
        {
            std::vector<cplx> c(C_.poly().degy() + 1, cplx(0));
            for (auto& [pt, cc] : C_.poly().terms()) c[pt.second] += cc * std::pow(x, pt.first);
            qy = UniPolyC(std::move(c));
        }
        UniPolyC qx(std::vector<cplx>{});
        {
            std::vector<cplx> c(C_.poly().degx() + 1, cplx(0));
            for (auto& [pt, cc] : C_.poly().terms()) c[pt.first] += cc * std::pow(y, pt.second);
            qx = UniPolyC(std::move(c));
        }
        LaurentSeries A = detail::compose_univar(qy, ch.y, len);
        LaurentSeries B = detail::compose_univar(qx, ch.x, len);
        LaurentSeries dxf = LaurentSeries::constant(x, len) - ch.x;
        LaurentSeries dyf = LaurentSeries::constant(y, len) - ch.y;
        LaurentSeries dd = (dxf * dxf * dyf * dyf).truncated(len);
        // Q(x, y, x'(xi), y'(xi)) grouped by the primed exponents
        int mx = 0, my = 0;
        for (auto& [key, c] : F_.qcomb().terms()) {
            mx = std::max(mx, key[2]);
            my = std::max(my, key[3]);
        }
        auto px = detail::pow_table(ch.x, mx, len);
        auto py = detail::pow_table(ch.y, my, len);
        LaurentSeries Qs;
        for (auto& [key, c] : F_.qcomb().terms()) {
            cplx coeff = c.to_cplx() * std::pow(x, key[0]) * std::pow(y, key[1]);
            Qs = Qs + coeff * (px[key[2]] * py[key[3]]);
        }
        Qs = Qs.truncated(len);
        LaurentSeries py2 = detail::compose_bivar(C_.poly().partial('y'), ch.x, ch.y, len);
        LaurentSeries T = (cplx(-1) * (A * B)) * dd.inverse() + Qs;
        LaurentSeries Bser = (T * py2.inverse()).truncated(len);
        LaurentSeries full = (Bser * ch.x.derivative()).truncated(len);
        cplx val = full.coeff(k - 1) / C_.Py(x, y);
        return val;
    }

    // --- third-kind data ----------------------------------------------------

    // residue of dS_{p2,p1} expanded at the pole chart, weighted xi^{-k}
    cplx ds_residue_at(const PoleData& p, int k, const SurfacePoint& p1, const SurfacePoint& p2,
                       const std::vector<cplx>& z1, const std::vector<cplx>& z2) const {
        const LocalChart& ch = p.chart;
        int len = ch.length;
        // note the order: dS_{p2,p1} has +1 at p2
        auto half = [&](const SurfacePoint& q) {
            // (P(x_q, y(xi)) - P(x(xi), y_q)) / ((x(xi) - x_q)(y(xi) - y_q))
            UniPolyC qy(std::vector<cplx>{});
            {
                std::vector<cplx> c(C_.poly().degy() + 1, cplx(0));
                for (auto& [pt, cc] : C_.poly().terms()) c[pt.second] += cc * std::pow(q.x, pt.first);
                qy = UniPolyC(std::move(c));
            }
            UniPolyC qx(std::vector<cplx>{});
            {
                std::vector<cplx> c(C_.poly().degx() + 1, cplx(0));
                for (auto& [pt, cc] : C_.poly().terms()) c[pt.first] += cc * std::pow(q.y, pt.second);
                qx = UniPolyC(std::move(c));
            }
            LaurentSeries num = detail::compose_univar(qy, ch.y, len) -
                                detail::compose_univar(qx, ch.x, len);
            LaurentSeries den = (ch.x - LaurentSeries::constant(q.x, len)) *
                                (ch.y - LaurentSeries::constant(q.y, len));
            return (num * den.inverse()).truncated(len);
        };
        LaurentSeries py = detail::compose_bivar(C_.poly().partial('y'), ch.x, ch.y, len);
        LaurentSeries ds = (half(p2) - half(p1)) * (cplx(0.5) * py.inverse());
        // zeta part
        int n = (int)pd_.interior.size();
        auto pxt = detail::pow_table(ch.x, maxi_, len);
        auto pyt = detail::pow_table(ch.y, maxj_, len);
        for (int i = 0; i < n; ++i) {
            cplx zdiff = z2[i] - z1[i];
            auto ij = pd_.interior[i];
            ds = ds + zdiff * (pxt[ij.first] * pyt[ij.second] * py.inverse());
        }
        LaurentSeries full = (ds * ch.x.derivative()).truncated(len);
        return full.coeff(k - 1);
    }

    // --- the decomposition ----------------------------------------------------

    Decomposition decompose(const RationalForm& R, Rng& rng) const {
        Decomposition out;
        out.times = times(R);
        int n = (int)pd_.interior.size();
        // puncture residues are reabsorbed with the third-kind combinatorial
        // basis when present
        std::vector<cplx> punct_res;
        bool has_puncture_residue = false;
        for (size_t p = 0; p < out.times.poles.size(); ++p)
            if (out.times.poles[p].at_puncture && std::abs(out.times.t[p][0]) > 1e-10)
                has_puncture_residue = true;
        if (has_puncture_residue) {
            out.third_kind_points = third_points_;
            if (third_points_.empty())
                throw input_error("decompose: puncture residues need third-kind lattice points");
            // solve for the combination of Omega_{ij}, (i,j) in N''', whose
            // puncture residues match those of R
            std::vector<size_t> pole_rows;
            for (size_t p = 0; p < out.times.poles.size(); ++p)
                if (out.times.poles[p].at_puncture) pole_rows.push_back(p);
            Mat M((int)pole_rows.size(), (int)third_points_.size());
            std::vector<cplx> rhs(pole_rows.size());
            for (size_t r = 0; r < pole_rows.size(); ++r) {
                auto& pole = out.times.poles[pole_rows[r]];
                rhs[r] = out.times.t[pole_rows[r]][0];
                for (size_t c = 0; c < third_points_.size(); ++c) {
                    RationalForm om;
                    om.num = BivarPolyC::monomial(third_points_[c].first, third_points_[c].second,
                                                  cplx(1));
                    om.den = C_.poly().partial('y');
                    LaurentSeries w = detail::form_series(om, pole.chart);
                    M((int)r, (int)c) = w.coeff(-1);
                }
            }
            // least-squares via normal equations (rows >= cols in practice)
            Mat MH = M.transpose();
            for (auto& v : MH.a) v = std::conj(v);
            Mat G = MH * M;
            std::vector<cplx> b((size_t)G.rows, cplx(0));
            for (int i = 0; i < MH.rows; ++i) {
                cplx s = 0;
                for (int j = 0; j < MH.cols; ++j) s += MH(i, j) * rhs[j];
                b[i] = s;
            }
            out.third_kind_comb = solve(G, b);
            // verify the match
            for (size_t r = 0; r < pole_rows.size(); ++r) {
                cplx got = 0;
                for (size_t c = 0; c < third_points_.size(); ++c)
                    got += M((int)r, (int)c) * out.third_kind_comb[c];
                if (std::abs(got - rhs[r]) > 1e-7 * (1 + std::abs(rhs[r])))
                    throw numeric_error("decompose: puncture residues are not matched by the "
                                        "third-kind basis");
            }
        }
        // zeta values at finite poles with nonzero residue; zeta(o) = 0 by
        // the additive convention
        zeta_pole_cache_.clear();
        zeta_o_.assign(n, cplx(0));
        for (size_t p = 0; p < out.times.poles.size(); ++p) {
            if (out.times.poles[p].at_puncture) continue;
            if (std::abs(out.times.t[p][0]) < 1e-12) continue;
            zeta_pole_cache_[p] = zeta(C_, pd_, cp_, out.times.poles[p].point);
        }

        // subtract everything and fit P_y Rtilde over the interior monomials
        auto rtilde = [&](cplx x, cplx y) { return rtilde_value(R, out, x, y); };
        std::vector<SurfacePoint> pts;
        int guard = 0;
        while ((int)pts.size() < n) {
            if (++guard > 500) throw numeric_error("decompose: collocation placement failed");
            cplx x = rng.in_rect(-1.5, 1.5, -1.1, 1.1);
            if (C_.min_branch_distance(x) < 2.0 * C_.clearance()) continue;
            bool near_pole = false;
            for (auto& p : out.times.poles)
                if (!p.at_puncture && std::abs(p.point.x - x) < 0.3) near_pole = true;
            if (near_pole) continue;
            auto f = C_.fiber(x);
            pts.push_back({x, f[(int)pts.size() % f.size()], 0});
        }
        Mat V(n, n);
        std::vector<cplx> vals(n);
        for (int s = 0; s < n; ++s) {
            for (int c = 0; c < n; ++c)
                V(s, c) = std::pow(pts[s].x, pd_.interior[c].first) *
                          std::pow(pts[s].y, pd_.interior[c].second);
            vals[s] = rtilde(pts[s].x, pts[s].y) * C_.Py(pts[s].x, pts[s].y);
        }
        out.residual_coeffs = n > 0 ? solve(V, vals) : std::vector<cplx>{};
        // support check at fresh points
        double worst = 0;
        for (int t = 0; t < 4; ++t) {
            cplx x = rng.in_rect(-1.4, 1.4, -1.0, 1.0);
            if (C_.min_branch_distance(x) < 2.0 * C_.clearance()) continue;
            bool near_pole = false;
            for (auto& p : out.times.poles)
                if (!p.at_puncture && std::abs(p.point.x - x) < 0.3) near_pole = true;
            if (near_pole) continue;
            auto f = C_.fiber(x);
            cplx y = f[t % f.size()];
            cplx fit = 0;
            for (int c = 0; c < n; ++c)
                fit += out.residual_coeffs[c] * std::pow(x, pd_.interior[c].first) *
                       std::pow(y, pd_.interior[c].second);
            worst = std::max(worst, std::abs(rtilde(x, y) * C_.Py(x, y) - fit));
        }
        out.residual_mismatch = worst;
        // periods t_i = K^T w
        out.t_holo.assign(pd_.genus, cplx(0));
        for (int i = 0; i < pd_.genus; ++i)
            for (int c = 0; c < n; ++c) out.t_holo[i] += pd_.K(c, i) * out.residual_coeffs[c];
        return out;
    }

    // R minus all singular blocks, as a pointwise value
    cplx rtilde_value(const RationalForm& R, const Decomposition& d, cplx x, cplx y) const {
        cplx v = R.value(x, y);
        for (size_t p = 0; p < d.times.poles.size(); ++p) {
            auto& pole = d.times.poles[p];
            for (int k = 1; k < pole.deg; ++k) {
                if (std::abs(d.times.t[p][k]) < 1e-14) continue;
                v -= d.times.t[p][k] * b_pk(pole, k, x, y);
            }
            if (!pole.at_puncture && std::abs(d.times.t[p][0]) > 1e-12) {
                auto it = zeta_pole_cache_.find(p);
                const std::vector<cplx>& zp = it->second;
                v -= d.times.t[p][0] *
                     ds_normalized_value(C_, F_, pd_, zp, zeta_o_, pole.point, pd_.origin, x, y);
            }
        }
        for (size_t c = 0; c < d.third_kind_comb.size(); ++c) {
            auto ij = d.third_kind_points[c];
            v -= d.third_kind_comb[c] * std::pow(x, ij.first) * std::pow(y, ij.second) / C_.Py(x, y);
        }
        return v;
    }

    // reconstruction of R from the blocks (the defining identity)
    cplx reconstructed_value(const Decomposition& d, cplx x, cplx y) const {
        cplx v = 0;
        for (size_t p = 0; p < d.times.poles.size(); ++p) {
            auto& pole = d.times.poles[p];
            for (int k = 1; k < pole.deg; ++k)
                if (std::abs(d.times.t[p][k]) > 1e-14) v += d.times.t[p][k] * b_pk(pole, k, x, y);
            if (!pole.at_puncture && std::abs(d.times.t[p][0]) > 1e-12)
                v += d.times.t[p][0] * ds_normalized_value(C_, F_, pd_, zeta_pole_cache_.at(p),
                                                           zeta_o_, pole.point, pd_.origin, x, y);
        }
        for (size_t c = 0; c < d.third_kind_comb.size(); ++c) {
            auto ij = d.third_kind_points[c];
            v += d.third_kind_comb[c] * std::pow(x, ij.first) * std::pow(y, ij.second) / C_.Py(x, y);
        }
        int n = (int)pd_.interior.size();
        for (int i = 0; i < pd_.genus; ++i) {
            cplx om = 0;
            for (int c = 0; c < n; ++c)
                om += pd_.Khat(i, c) * detail::omega_eval(C_, pd_.interior[c], x, y);
            v += d.t_holo[i] * om;
        }
        return v;
    }

    // --- step 3: integrals ----------------------------------------------------

    struct GammaSpec {
        std::vector<long long> a, b;        // integer combination of A_i, B_i
        std::map<int, long long> c;         // pole index -> winding of C_p
    };

    cplx integrate_complete(const Decomposition& d, const GammaSpec& gamma) const {
        int g = pd_.genus;
        if ((int)gamma.a.size() != g || (int)gamma.b.size() != g)
            throw input_error("integrate_complete: gamma has the wrong shape");
        cplx total = 0;
        for (int i = 0; i < g; ++i) {
            if (gamma.a[i]) total += (double)gamma.a[i] * d.t_holo[i];
            if (gamma.b[i]) total += (double)gamma.b[i] * b_cycle_integral(d, i);
        }
        for (auto& [pidx, w] : gamma.c) {
            if (pidx < 0 || pidx >= (int)d.times.poles.size())
                throw input_error("integrate_complete: pole index out of range");
            total += (double)w * kTwoPiI * d.times.t[pidx][0];
        }
        return total;
    }

    // B_i-period of R assembled from the block table
    cplx b_cycle_integral(const Decomposition& d, int i) const {
        int n = (int)pd_.interior.size();
        cplx total = 0;
        for (size_t p = 0; p < d.times.poles.size(); ++p) {
            auto& pole = d.times.poles[p];
            for (int k = 1; k < pole.deg; ++k) {
                if (std::abs(d.times.t[p][k]) < 1e-14) continue;
                // (2 pi i / k) Res_p xi^{-k} omega_i
                auto r = omega_residues(pole, k);
                cplx romega = 0;
                for (int c = 0; c < n; ++c) romega += pd_.Khat(i, c) * r[c];
                total += d.times.t[p][k] * kTwoPiI / (double)k * romega;
            }
            if (!pole.at_puncture && std::abs(d.times.t[p][0]) > 1e-12) {
                auto Fp = abel_map(C_, pd_, pole.point);
                auto Fo = abel_map(C_, pd_, pd_.origin);
                total += d.times.t[p][0] * kTwoPiI * (Fp[i] - Fo[i]);
            }
        }
        if (!d.third_kind_comb.empty())
            throw input_error("integrate_complete: B-periods with puncture residues are not "
                              "assembled; integrate the loop directly");
        for (int j = 0; j < pd_.genus; ++j) total += d.t_holo[j] * pd_.tau(i, j);
        return total;
    }

    // direct quadrature of R over a named cycle (cross-check path)
    cplx direct_cycle_integral(const RationalForm& R, const Decomposition& d,
                               const GammaSpec& gamma) const {
        cplx total = 0;
        for (size_t i = 0; i < pd_.cycles.A.size(); ++i)
            if (gamma.a[i])
                total += (double)gamma.a[i] *
                         integrate_along_path(C_, pd_.cycles.A[i],
                                              [&](cplx x, cplx y) { return R.value(x, y); },
                                              pd_.abs_tol);
        for (size_t i = 0; i < pd_.cycles.B.size(); ++i)
            if (gamma.b[i])
                total += (double)gamma.b[i] *
                         integrate_along_path(C_, pd_.cycles.B[i],
                                              [&](cplx x, cplx y) { return R.value(x, y); },
                                              pd_.abs_tol);
        for (auto& [pidx, w] : gamma.c) {
            auto& pole = d.times.poles.at(pidx);
            if (pole.at_puncture)
                throw input_error("direct_cycle_integral: C-loops around punctures are not drawn");
            double rad = std::min(0.5 * C_.clearance(), 0.25 * C_.min_branch_distance(pole.point.x));
            total += (double)w * integrate_around_point(
                                     C_, pole.point.x, rad, pole.point.y, pole.a,
                                     [&](cplx x, cplx y) { return R.value(x, y); }, pd_.abs_tol);
        }
        return total;
    }

    // incomplete integral over an arc p1 -> p2 assembled from the blocks
    cplx integrate_incomplete(const Decomposition& d, const SurfacePoint& p1,
                              const SurfacePoint& p2, const ThetaContext* theta = nullptr) const {
        int n = (int)pd_.interior.size();
        auto F1 = abel_map(C_, pd_, p1);
        auto F2 = abel_map(C_, pd_, p2);
        cplx total = 0;
        for (int i = 0; i < pd_.genus; ++i) total += d.t_holo[i] * (F2[i] - F1[i]);
        std::vector<cplx> z1, z2;
        bool need_z = false;
        for (size_t p = 0; p < d.times.poles.size(); ++p)
            if (d.times.poles[p].deg > 1) need_z = true;
        if (need_z) {
            z1 = zeta(C_, pd_, cp_, p1);
            z2 = zeta(C_, pd_, cp_, p2);
        }
        for (size_t p = 0; p < d.times.poles.size(); ++p) {
            auto& pole = d.times.poles[p];
            for (int k = 1; k < pole.deg; ++k) {
                if (std::abs(d.times.t[p][k]) < 1e-14) continue;
                total += d.times.t[p][k] / (double)k * ds_residue_at(pole, k, p1, p2, z1, z2);
            }
            if (!pole.at_puncture && std::abs(d.times.t[p][0]) > 1e-12) {
                if (!theta)
                    throw input_error("integrate_incomplete: third-kind blocks need the theta "
                                      "context for the prime-form logarithm");
                // int dS_{p,o} = ln E(p2,p) E(p1,o) / (E(p1,p) E(p2,o))
                PrimeFormContext pf = make_prime_form(C_, pd_, *theta);
                auto Fp = abel_map(C_, pd_, pole.point);
                auto Fo = abel_map(C_, pd_, pd_.origin);
                auto lnE = [&](const std::vector<cplx>& Fa, const std::vector<cplx>& Fb) {
                    std::vector<cplx> u(pd_.genus);
                    for (int i = 0; i < pd_.genus; ++i) u[i] = Fa[i] - Fb[i];
                    return std::log(pf.theta.theta_char(pf.chi, u));
                };
                total += d.times.t[p][0] *
                         (lnE(F2, Fp) + lnE(F1, Fo) - lnE(F1, Fp) - lnE(F2, Fo));
            }
        }
        if (!d.third_kind_comb.empty()) {
            // integrate the N''' combination directly along a route
            auto legs = route_to_point(C_, p1, p2, &pd_.cycles);
            for (size_t c = 0; c < d.third_kind_comb.size(); ++c) {
                auto ij = d.third_kind_points[c];
                cplx acc = 0;
                for (auto& leg : legs)
                    acc += integrate_along_path(
                        C_, leg,
                        [&](cplx x, cplx y) {
                            return std::pow(x, ij.first) * std::pow(y, ij.second) / C_.Py(x, y);
                        },
                        pd_.abs_tol);
                total += d.third_kind_comb[c] * acc;
            }
        }
        return total;
    }

    // direct quadrature along a route for the cross-check
    cplx direct_arc_integral(const RationalForm& R, const SurfacePoint& p1,
                             const SurfacePoint& p2) const {
        auto legs = route_to_point(C_, p1, p2, &pd_.cycles);
        cplx acc = 0;
        for (auto& leg : legs)
            acc += integrate_along_path(C_, leg, [&](cplx x, cplx y) { return R.value(x, y); },
                                        pd_.abs_tol);
        return acc;
    }

  private:
    const CurveContext& C_;
    const FormsContext& F_;
    const PeriodData& pd_;
    const CPolynomial& cp_;
    int deg_cap_;
    std::vector<PunctureInfo> punctures_;
    std::vector<LatticePoint> third_points_;
    mutable std::map<size_t, std::vector<cplx>> zeta_pole_cache_;
    mutable std::vector<cplx> zeta_o_;
    int maxi_ = 8, maxj_ = 8;

    int series_len() const { return std::min(2 * deg_cap_ + 8, 40); }
};

// Third-kind complete elliptic integral on the Legendre curve of modulus k:
// half the A-period of dx/(2 (1 - u x^2) y), assembled from the canonical
// decomposition (the zeta values enter through the normalized third-kind
// blocks; at u = k^2 the poles migrate onto branch points and become
// second-kind blocks on the ramified charts).
inline cplx pi_u_k(const Decomposer& dec, const CurveContext& C, cplx u, Rng& rng) {
    RationalForm R;
    R.num = BivarPolyC::monomial(0, 0, cplx(0.5));
    R.den.add_term(0, 1, cplx(1));
    R.den.add_term(2, 1, -u);
    auto d = dec.decompose(R, rng);
    int g = dec.periods().genus;
    Decomposer::GammaSpec gA;
    gA.a.assign(g, 0);
    gA.b.assign(g, 0);
    gA.a[0] = 1;
    return 0.5 * dec.integrate_complete(d, gA);
}

}  // namespace curvint

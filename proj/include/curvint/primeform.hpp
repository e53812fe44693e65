#pragma once

#include "curvint/periods.hpp"
#include "curvint/theta.hpp"

namespace curvint {

// Canonical-divisor form nu = H dx / P_y with g-1 double zeros.
// Hyperelliptic curves take H = prod over a chosen (g-1)-subset of branch
// roots; genus <= 1 takes the constant H = Theta'_chi . Khat.
struct CanonicalDivisorData {
    BivarPolyC H;                  // element of the moduli space
    std::vector<cplx> divisor_x;   // x-positions of the g-1 double zeros
    std::vector<int> chosen_index; // indices of the branch roots used
    bool theta_normalized = false; // H includes the Theta' normalization
};

inline cplx eval_H(const CanonicalDivisorData& cd, cplx x, cplx y) {
    return cd.H.eval(x, y);
}

inline CanonicalDivisorData canonical_H(const CurveContext& C, const PeriodData& pd,
                                        const ThetaContext& ctx, const Characteristic& chi) {
    CanonicalDivisorData out;
    int g = pd.genus;
    if (g <= 1) {
        // H = Theta'_chi . Khat over the interior-monomial basis (a constant
        // when the only interior point is the origin)
        if (g == 0) {
            out.H.add_term(0, 0, cplx(1));
            return out;
        }
        auto tp = ctx.theta_prime(chi);
        for (size_t r = 0; r < pd.interior.size(); ++r) {
            cplx h = 0;
            for (int k = 0; k < g; ++k) h += tp[k] * pd.Khat(k, (int)r);
            out.H.add_term(pd.interior[r].first, pd.interior[r].second, h);
        }
        out.theta_normalized = true;
        return out;
    }
    auto shape = hyperelliptic_shape(C.poly());
    if (!shape.ok)
        throw input_error("canonical_H: general curves of genus >= 2 are not supported; "
                          "hyperelliptic shape required");
    std::vector<cplx> roots;
    for (auto& cl : cluster_roots(poly_roots(shape.phat)))
        if (cl.multiplicity % 2 == 1) roots.push_back(cl.value);
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    // the g-1 branch roots of smallest sorted index
    BivarPolyC H;
    H.add_term(0, 0, cplx(1));
    for (int i = 0; i < g - 1; ++i) {
        BivarPolyC lin;
        lin.add_term(1, 0, cplx(1));
        lin.add_term(0, 0, -roots[i]);
        H = H * lin;
        out.divisor_x.push_back(roots[i]);
        out.chosen_index.push_back(i);
    }
    out.H = H;
    return out;
}

// Tangency validation: common zeros of P and H must annihilate
// H_x P_y - H_y P_x. For the hyperelliptic construction the divisor points
// are branch points, where P_y = 0 and H_y = 0 make the bracket vanish.
inline double tangency_residual(const CurveContext& C, const CanonicalDivisorData& cd) {
    if (cd.divisor_x.empty()) return 0;
    BivarPolyC hx = cd.H.partial('x'), hy = cd.H.partial('y');
    BivarPolyC px = C.poly().partial('x');
    double worst = 0;
    for (auto& xv : cd.divisor_x) {
        // the double zero sits at the ramification point over xv
        auto f = C.fiber(xv + 1e-9);
        // the two nearest fiber values collapse there
        double dmin = 1e300;
        cplx yv = 0;
        for (size_t i = 0; i < f.size(); ++i)
            for (size_t j = i + 1; j < f.size(); ++j)
                if (std::abs(f[i] - f[j]) < dmin) {
                    dmin = std::abs(f[i] - f[j]);
                    yv = 0.5 * (f[i] + f[j]);
                }
        cplx bracket = hx.eval(xv, yv) * C.Py(xv, yv) - hy.eval(xv, yv) * px.eval(xv, yv);
        worst = std::max(worst, std::abs(bracket));
    }
    return worst;
}

// Prime form E(p, q) in the pinned spinor trivialization: the value of
// Theta_chi(F(p) - F(q)) / sqrt(nu(p) nu(q)) with the square-root branches
// taken principally. Single values are path-dependent through the square
// root; the log-ratio combinations used downstream are branch-free.
struct PrimeFormContext {
    const CurveContext& C;
    const PeriodData& pd;
    const ThetaContext& theta;
    Characteristic chi;
    CanonicalDivisorData H;

    cplx nu(cplx x, cplx y) const { return H.H.eval(x, y) / C.Py(x, y); }

    cplx value(const SurfacePoint& p, const SurfacePoint& q,
               const std::vector<cplx>& Fp, const std::vector<cplx>& Fq) const {
        std::vector<cplx> u(pd.genus);
        for (int i = 0; i < pd.genus; ++i) u[i] = Fp[i] - Fq[i];
        cplx th = theta.theta_char(chi, u);
        cplx np = nu(p.x, p.y), nq = nu(q.x, q.y);
        if (std::abs(np) < 1e-12 || std::abs(nq) < 1e-12)
            throw input_error("prime_form: evaluation at a divisor point of nu");
        return th / std::sqrt(np * nq);
    }
};

inline PrimeFormContext make_prime_form(const CurveContext& C, const PeriodData& pd,
                                        const ThetaContext& theta) {
    Characteristic chi = theta.regular_odd();
    CanonicalDivisorData cd = canonical_H(C, pd, theta, chi);
    return PrimeFormContext{C, pd, theta, chi, cd};
}

// d_p ln(E(p, p1)/E(p, p2)) as the coefficient of dx at p, computed from the
// theta ratio (the nu factors are p-independent and drop out). Central
// differences along the sheet of p.
inline cplx dlog_prime_ratio(const PrimeFormContext& pf, const SurfacePoint& p,
                             const std::vector<cplx>& Fp1, const std::vector<cplx>& Fp2,
                             double h = 1e-4) {
    auto lnratio = [&](cplx x) {
        SurfacePoint q = pf.C.point(x, pf.C.nearest_sheet(x, p.y));
        auto Fq = abel_map(pf.C, pf.pd, q);
        std::vector<cplx> u1(pf.pd.genus), u2(pf.pd.genus);
        for (int i = 0; i < pf.pd.genus; ++i) {
            u1[i] = Fq[i] - Fp1[i];
            u2[i] = Fq[i] - Fp2[i];
        }
        return std::log(pf.theta.theta_char(pf.chi, u1) / pf.theta.theta_char(pf.chi, u2));
    };
    return (lnratio(p.x + h) - lnratio(p.x - h)) / (2 * h);
}

// Residual of B against d_p (X) d_q ln Theta_chi(F(p) - F(q)): a second-order
// mixed stencil in the x-charts of both slots.
inline cplx bergman_from_theta_check(const CurveContext& C, const FormsContext& F,
                                     const PeriodData& pd, const ThetaContext& theta,
                                     const Characteristic& chi, const SurfacePoint& p,
                                     const SurfacePoint& q, double h = 1e-3) {
    auto lnth = [&](cplx xp, cplx xq) {
        SurfacePoint pp = C.point(xp, C.nearest_sheet(xp, p.y));
        SurfacePoint qq = C.point(xq, C.nearest_sheet(xq, q.y));
        auto Fp = abel_map(C, pd, pp);
        auto Fq = abel_map(C, pd, qq);
        std::vector<cplx> u(pd.genus);
        for (int i = 0; i < pd.genus; ++i) u[i] = Fp[i] - Fq[i];
        return std::log(theta.theta_char(chi, u));
    };
    cplx mixed = (lnth(p.x + h, q.x + h) - lnth(p.x + h, q.x - h) - lnth(p.x - h, q.x + h) +
                  lnth(p.x - h, q.x - h)) /
                 (4 * h * h);
    cplx direct = bergman(C, F, pd, p.x, p.y, q.x, q.y);
    return mixed - direct;
}

}  // namespace curvint

#pragma once

#include <vector>

#include "curvint/multipoly.hpp"
#include "curvint/polygon.hpp"
#include "curvint/surface.hpp"

namespace curvint {

// ---------------------------------------------------------------------------
// Combinatorial 1-forms Omega_{ij} = x^i y^j dx / P_y

enum class FormKind { First, Second, Third };

inline FormKind omega_kind(const NewtonData& nd, int i, int j) {
    auto pos = lattice::locate(nd.hull, {i + 1, j + 1});
    if (pos == lattice::Position::Interior) return FormKind::First;
    if (pos == lattice::Position::Boundary) return FormKind::Third;
    return FormKind::Second;
}

inline cplx omega_value(const CurveContext& C, int i, int j, cplx x, cplx y) {
    return std::pow(x, i) * std::pow(y, j) / C.Py(x, y);
}

// Pole degree of Omega_{ij} at a puncture: m - (i+1)a - (j+1)b + 1 when the
// shifted point lies on the pole side of the side line.
inline int omega_pole_degree(const PunctureInfo& p, int i, int j) {
    long long v = p.m - (long long)(i + 1) * p.a - (long long)(j + 1) * p.b;
    return (int)v + 1;
}

// Residue of a third-kind Omega_{ij} at a puncture, from the local model:
// Omega ~ a eta^j / P'_alpha(eta) xi^{a(i+1)+b(j+1)-m-1} dxi.
inline cplx puncture_residue(const PunctureInfo& p, int i, int j) {
    long long exponent = (long long)p.a * (i + 1) + (long long)p.b * (j + 1) - p.m;
    if (exponent != 0) throw input_error("puncture_residue: Omega_{ij} has no simple pole here");
    UniPolyC palpha{std::vector<cplx>(p.side_poly)};
    cplx dp = palpha.derivative().eval(p.eta);
    if (std::abs(dp) < 1e-12) throw numeric_error("puncture_residue: degenerate side polynomial");
    return (double)p.a * std::pow(p.eta, j) / dp;
}

// ---------------------------------------------------------------------------
// Q^comb: the triangle-lattice correction making the naive double-pole
// bidifferential puncture-free. For every unordered support pair with
// (i-i')(j-j') < 0, oriented so A carries the larger j, the right triangle
// with corner (i_B, j_A) contributes the points (u,v) outside the strict hull
// interior, with weight |u-i_B| |v-j_A| (halved on the segment AB itself),
// and the whole sum is symmetrized. The rule reproduces the worked Legendre,
// Weierstrass and cubic kernels exactly and is validated by the double-pole
// and puncture-decay properties.
inline Poly4 q_comb(const BivarPolyQ& P) {
    NewtonData nd = build_newton(P);
    auto support = P.support();
    Poly4 Q;
    GaussRational half{Rational(1, 2)};
    for (size_t s = 0; s < support.size(); ++s)
        for (size_t t = s + 1; t < support.size(); ++t) {
            auto A = support[s], B = support[t];
            if (A.first == B.first || A.second == B.second) continue;
            if ((A.first - B.first) * (A.second - B.second) > 0) continue;  // same-diagonal
            if (A.second < B.second) std::swap(A, B);
            // A = (iA, jA) upper-left, B = (iB, jB) lower-right, corner (iB, jA)
            LatticePoint corner{B.first, A.second};
            GaussRational pab = P.coeff(A.first, A.second) * P.coeff(B.first, B.second);
            for (int u = A.first; u <= B.first; ++u)
                for (int v = B.second; v <= A.second; ++v) {
                    long long sAB = lattice::cross(A, B, {u, v});
                    long long sBC = lattice::cross(B, corner, {u, v});
                    long long sCA = lattice::cross(corner, A, {u, v});
                    long long area = lattice::cross(A, B, corner);
                    if (area > 0) {
                        if (sAB < 0 || sBC < 0 || sCA < 0) continue;
                    } else {
                        if (sAB > 0 || sBC > 0 || sCA > 0) continue;
                    }
                    if (lattice::locate(nd.hull, {u, v}) == lattice::Position::Interior) continue;
                    long long w = std::llabs((long long)(u - B.first) * (v - A.second));
                    if (w == 0) continue;
                    GaussRational c = GaussRational{Rational(w)} * pab;
                    if (sAB == 0) c = half * c;
                    int e1 = u - 1, f1 = v - 1;
                    int e2 = A.first + B.first - u - 1, f2 = A.second + B.second - v - 1;
                    if (e1 < 0 || f1 < 0 || e2 < 0 || f2 < 0)
                        throw numeric_error("q_comb: negative exponent with nonzero weight");
                    Q.add_term(e1, f1, e2, f2, c);
                    Q.add_term(e2, f2, e1, f1, c);
                }
        }
    return Q;
}

// ---------------------------------------------------------------------------
// Evaluation bundle for the combinatorial forms of one curve.

class FormsContext {
  public:
    explicit FormsContext(const CurveContext& C)
        : C_(C), qcomb_(q_comb(C.exact())), qc_(qcomb_) {}

    const CurveContext& curve() const { return C_; }
    const Poly4& qcomb() const { return qcomb_; }

    cplx qcomb_value(cplx x1, cplx y1, cplx x2, cplx y2) const { return qc_(x1, y1, x2, y2); }

    // B^comb as the coefficient of dx1 (X) dx2
    cplx bergman_comb(cplx x1, cplx y1, cplx x2, cplx y2) const {
        cplx num = -C_.P(x1, y2) * C_.P(x2, y1) / ((x1 - x2) * (x1 - x2) * (y1 - y2) * (y1 - y2)) +
                   qc_(x1, y1, x2, y2);
        return num / (C_.Py(x1, y1) * C_.Py(x2, y2));
    }

    // finite part of B^comb on the diagonal: the constant term of the
    // (x1 - x2)^{-2} expansion at a regular point
    cplx bergman_diagonal(cplx x, cplx y) const {
        cplx px = C_.Px(x, y), py = C_.Py(x, y), pyy = C_.Pyy(x, y);
        CompiledBivar pyyy(C_.poly().partial('y', 3));
        CompiledBivar pxy(C_.poly().partial('x').partial('y'));
        CompiledBivar pxyy(C_.poly().partial('x').partial('y', 2));
        cplx t = px * px * pyy * pyy / (4.0 * std::pow(py, 4)) -
                 px * px * pyyy(x, y) / (6.0 * std::pow(py, 3)) -
                 pxy(x, y) * px * pyy / (2.0 * std::pow(py, 3)) +
                 pxyy(x, y) * px / (2.0 * py * py);
        return t + qc_(x, y, x, y) / (py * py);
    }

    // dS^comb_{p1,p2}(x, y): coefficient of dx
    cplx ds_comb(cplx x, cplx y, const SurfacePoint& p1, const SurfacePoint& p2) const {
        auto half_term = [&](const SurfacePoint& p) {
            return (C_.P(p.x, y) - C_.P(x, p.y)) / ((x - p.x) * (y - p.y));
        };
        return (half_term(p1) - half_term(p2)) / (2.0 * C_.Py(x, y));
    }

  private:
    const CurveContext& C_;
    Poly4 qcomb_;
    CompiledPoly4 qc_;
};

// ---------------------------------------------------------------------------
// C polynomial of the dzeta relation: exact extraction.
//
// 2 D sum_{(i,j) in interior} C_{ij}(x1,y1) x^i y^j
//   = -2 P(x,y1) P(x1,y) + 2 D Q^comb
//     - P_y(x1,y1) [ (x-x1)(y-y1) P_x(x1,y) + (y-y1)(P(x1,y) - P(x,y1)) ]
//     + P_x(x1,y1) [ -(x-x1)(y-y1) P_y(x,y1) + (x-x1)(P(x1,y) - P(x,y1)) ]
// with D = (x-x1)^2 (y-y1)^2, as an identity modulo <P(x,y), P(x1,y1)>.

namespace detail {

// normal form modulo P in the (x,y)-slots and P in the (x1,y1)-slots,
// for P monic in y after dividing by the constant leading coefficient
inline Poly4 reduce_nf(Poly4 f, const BivarPolyQ& monicP, int d) {
    // rewrite rule: y^d -> y^d - monicP(x,y) (all remaining terms have lower y-degree)
    BivarPolyQ rest;  // monicP - y^d, negated on use
    for (auto& [pt, c] : monicP.terms())
        if (!(pt.second == d && pt.first == 0)) rest.add_term(pt.first, pt.second, c);
    bool again = true;
    while (again) {
        again = false;
        for (auto& [k, c] : f.terms()) {
            if (k[1] >= d) {
                Poly4 repl;
                for (auto& [pt, rc] : rest.terms())
                    repl.add_term(k[0] + pt.first, k[1] - d + pt.second, k[2], k[3], -(c * rc));
                Poly4 cancel;
                cancel.add_term(k[0], k[1], k[2], k[3], -c);
                f = f + cancel + repl;
                again = true;
                break;
            }
            if (k[3] >= d) {
                Poly4 repl;
                for (auto& [pt, rc] : rest.terms())
                    repl.add_term(k[0], k[1], k[2] + pt.first, k[3] - d + pt.second, -(c * rc));
                Poly4 cancel;
                cancel.add_term(k[0], k[1], k[2], k[3], -c);
                f = f + cancel + repl;
                again = true;
                break;
            }
        }
    }
    return f;
}

}  // namespace detail

struct CPolynomial {
    std::vector<LatticePoint> interior;           // index order of the forms
    std::vector<BivarPolyQ> C;                    // C_{ij}(x1, y1) per interior point
};

inline CPolynomial c_poly(const BivarPolyQ& P) {
    NewtonData nd = build_newton(P);
    int d = P.degy();
    GaussRational lead = P.coeff_of_y(d).degree() == 0 ? P.coeff_of_y(d).coeff(0) : GaussRational();
    if (lead.is_zero())
        throw input_error("c_poly: requires P monic in y up to a constant (P_d constant)");
    GaussRational inv = GaussRational(1) / lead;
    BivarPolyQ M = inv * P;  // monic in y

    BivarPolyQ Px = M.partial('x'), Py = M.partial('y');
    // note: the identity is scale-invariant under P -> c P except Q^comb,
    // which is quadratic in the coefficients; use the monic curve throughout
    Poly4 Q = q_comb(M);
    Poly4 dx = Poly4::monomial(1, 0, 0, 0) - Poly4::monomial(0, 0, 1, 0);   // x - x1
    Poly4 dy = Poly4::monomial(0, 1, 0, 0) - Poly4::monomial(0, 0, 0, 1);   // y - y1
    Poly4 D = dx * dx * dy * dy;
    Poly4 Pxy1 = Poly4::cross_x_y1(M);   // P(x, y1)
    Poly4 Px1y = Poly4::cross_x1_y(M);   // P(x1, y)
    Poly4 Pyp1 = Poly4::in_x1y1(Py);     // P_y(x1, y1)
    Poly4 Pxp1 = Poly4::in_x1y1(Px);     // P_x(x1, y1)
    Poly4 Pxx1y = Poly4::cross_x1_y(Px); // P_x(x1, y)
    Poly4 Pyxy1 = Poly4::cross_x_y1(Py); // P_y(x, y1)
    GaussRational two{Rational(2)};

    Poly4 NUM = two * (D * Q) - two * (Pxy1 * Px1y) -
                Pyp1 * (dx * dy * Pxx1y + dy * (Px1y - Pxy1)) +
                Pxp1 * (GaussRational{Rational(-1)} * (dx * dy * Pyxy1) + dx * (Px1y - Pxy1));
    NUM = detail::reduce_nf(NUM, M, d);

    // ansatz support for each C_{ij}: x1-degree up to degx+2, y1-degree < d
    int amax = M.degx() + 2;
    struct Unknown {
        size_t form;
        int a, b;
    };
    std::vector<Unknown> unknowns;
    for (size_t f = 0; f < nd.interior.size(); ++f)
        for (int a = 0; a <= amax; ++a)
            for (int b = 0; b < d; ++b) unknowns.push_back({f, a, b});

    // LHS basis vectors: NF(2 D x^i y^j x1^a y1^b)
    std::map<Poly4::Key, std::vector<GaussRational>> rows;
    auto addcol = [&](const Poly4& p, size_t col, size_t ncols) {
        for (auto& [k, c] : p.terms()) {
            auto& row = rows[k];
            row.resize(ncols);
            row[col] = row[col] + c;
        }
    };
    size_t n = unknowns.size();
    for (size_t col = 0; col < n; ++col) {
        auto& u = unknowns[col];
        auto [i, j] = nd.interior[u.form];
        Poly4 base = two * (D * Poly4::monomial(i, j, u.a, u.b));
        addcol(detail::reduce_nf(base, M, d), col, n);
    }
    // rhs
    std::map<Poly4::Key, GaussRational> rhs;
    for (auto& [k, c] : NUM.terms()) rhs[k] = c;
    for (auto& [k, c] : rhs) rows[k].resize(n);

    // exact Gaussian elimination on the overdetermined system
    std::vector<std::vector<GaussRational>> A;
    std::vector<GaussRational> b;
    for (auto& [k, row] : rows) {
        std::vector<GaussRational> r = row;
        r.resize(n);
        A.push_back(std::move(r));
        auto it = rhs.find(k);
        b.push_back(it == rhs.end() ? GaussRational() : it->second);
    }
    size_t mrows = A.size();
    std::vector<size_t> pivot_row(n, SIZE_MAX);
    size_t rank = 0;
    for (size_t col = 0; col < n && rank < mrows; ++col) {
        size_t p = SIZE_MAX;
        for (size_t r = rank; r < mrows; ++r)
            if (!A[r][col].is_zero()) {
                p = r;
                break;
            }
        if (p == SIZE_MAX) continue;
        std::swap(A[p], A[rank]);
        std::swap(b[p], b[rank]);
        GaussRational piv = A[rank][col];
        for (size_t r = 0; r < mrows; ++r) {
            if (r == rank || A[r][col].is_zero()) continue;
            GaussRational f = A[r][col] / piv;
            for (size_t cc = col; cc < n; ++cc) A[r][cc] -= f * A[rank][cc];
            b[r] -= f * b[rank];
        }
        pivot_row[col] = rank;
        ++rank;
    }
    // consistency: rows beyond the rank must have zero rhs
    for (size_t r = rank; r < mrows; ++r)
        if (!b[r].is_zero())
            throw numeric_error("c_poly: defining division left a nonzero remainder");
    std::vector<GaussRational> sol(n);
    for (size_t col = 0; col < n; ++col)
        if (pivot_row[col] != SIZE_MAX) sol[col] = b[pivot_row[col]] / A[pivot_row[col]][col];

    CPolynomial out;
    out.interior = nd.interior;
    out.C.resize(nd.interior.size());
    for (size_t col = 0; col < n; ++col) {
        auto& u = unknowns[col];
        if (!sol[col].is_zero()) out.C[u.form].add_term(u.a, u.b, sol[col]);
    }
    // undo the monic normalization: every term of the defining identity is
    // quadratic in the coefficients of the curve, so C_P = lead^2 C_monic
    // (consistent with S_P = lead^2 S_monic for the rescaled Omega basis)
    GaussRational lead2 = lead * lead;
    for (auto& c : out.C) c = lead2 * c;
    return out;
}

// ---------------------------------------------------------------------------
// Finite-difference Schwarzian {f, z} from 5 samples at z-2h .. z+2h.
inline cplx schwarzian(const std::array<cplx, 5>& f, double h) {
    cplx d1 = (8.0 * (f[3] - f[1]) - (f[4] - f[0])) / (12 * h);
    cplx d2 = (16.0 * (f[3] + f[1]) - (f[4] + f[0]) - 30.0 * f[2]) / (12 * h * h);
    cplx d3 = (f[4] - 2.0 * f[3] + 2.0 * f[1] - f[0]) / (2 * h * h * h);
    return d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1);
}

}  // namespace curvint

#pragma once

#include <vector>

#include "curvint/bivarpoly.hpp"
#include "curvint/linalg.hpp"
#include "curvint/roots.hpp"

namespace curvint {

// The (2d-1)x(2d-1) Sylvester-style matrix of P(x, .) and its y-derivative,
// with entries univariate in x. Row layout: d-1 rows of [P_d .. P_0] shifted,
// then d rows of [d P_d .. P_1] shifted.
template <class T>
std::vector<std::vector<UniPoly<T>>> discriminant_matrix(const BivarPoly<T>& P) {
    int d = P.degy();
    if (d < 1) throw input_error("discriminant: deg_y P must be >= 1");
    int n = 2 * d - 1;
    std::vector<UniPoly<T>> pj(d + 1);
    for (int j = 0; j <= d; ++j) pj[j] = P.coeff_of_y(j);
    std::vector<std::vector<UniPoly<T>>> m(n, std::vector<UniPoly<T>>(n));
    for (int r = 0; r < d - 1; ++r)
        for (int k = 0; k <= d; ++k) {
            int col = r + k;
            if (col < n) m[r][col] = pj[d - k];
        }
    for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) {
            int col = r + k;
            if (col < n) m[d - 1 + r][col] = T((long long)(d - k)) * pj[d - k];
        }
    return m;
}

namespace detail {

// Exact determinant of a matrix of rational polynomials by evaluation at
// integer nodes + Lagrange interpolation (degree bound from entries).
inline UniPolyQ poly_matrix_det(const std::vector<std::vector<UniPolyQ>>& m) {
    int n = (int)m.size();
    long long degbound = 0;
    for (int i = 0; i < n; ++i) {
        long long rowmax = 0;
        for (int j = 0; j < n; ++j) rowmax = std::max<long long>(rowmax, std::max(0, m[i][j].degree()));
        degbound += rowmax;
    }
    int npts = (int)degbound + 1;
    std::vector<GaussRational> xs(npts), ys(npts);
    for (int t = 0; t < npts; ++t) {
        GaussRational x{Rational(t - npts / 2)};
        xs[t] = x;
        // fraction-free-ish Gaussian elimination over the exact field
        std::vector<std::vector<GaussRational>> a(n, std::vector<GaussRational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[i][j] = m[i][j].eval(x);
        GaussRational det{Rational(1)};
        bool zero = false;
        for (int k = 0; k < n && !zero; ++k) {
            int p = -1;
            for (int i = k; i < n; ++i)
                if (!a[i][k].is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) {
                zero = true;
                break;
            }
            if (p != k) {
                std::swap(a[p], a[k]);
                det = -det;
            }
            det *= a[k][k];
            for (int i = k + 1; i < n; ++i) {
                GaussRational f = a[i][k] / a[k][k];
                for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            }
        }
        ys[t] = zero ? GaussRational() : det;
    }
    // Lagrange interpolation (Newton form would also do; sizes are small)
    UniPolyQ acc;
    for (int t = 0; t < npts; ++t) {
        UniPolyQ li = UniPolyQ::constant(GaussRational{Rational(1)});
        GaussRational denom{Rational(1)};
        for (int s = 0; s < npts; ++s) {
            if (s == t) continue;
            li = li * UniPolyQ({-xs[s], GaussRational{Rational(1)}});
            denom *= xs[t] - xs[s];
        }
        acc = acc + (ys[t] / denom) * li;
    }
    return acc;
}

}  // namespace detail

// Delta(x) = Discr_y P, exact.
inline UniPolyQ discriminant_y(const BivarPolyQ& P) {
    return detail::poly_matrix_det(discriminant_matrix(P));
}

struct ScalarDiscriminant {
    GaussRational value;   // Discr_x Delta(x); exact
    bool generic;          // value != 0, or Delta(x) a nonzero constant
    bool delta_constant;   // Delta(x) has degree <= 0
};

// Discr_x of Delta(x) via the same Sylvester construction (viewing Delta as a
// polynomial in a dummy second variable), normalized by the leading
// coefficient of Delta so that the classical cubic/quartic values come out:
// det S(Delta, Delta') / lead(Delta).
inline ScalarDiscriminant discriminant_scalar(const BivarPolyQ& P) {
    UniPolyQ dx = discriminant_y(P);
    ScalarDiscriminant out;
    if (dx.degree() <= 0) {
        out.value = dx.is_zero() ? GaussRational() : dx.coeff(0);
        out.generic = !dx.is_zero();
        out.delta_constant = true;
        return out;
    }
    BivarPolyQ as_bivar;
    for (int j = 0; j <= dx.degree(); ++j) as_bivar.add_term(0, j, dx.coeff(j));
    UniPolyQ discx = discriminant_y(as_bivar);
    GaussRational raw = discx.is_zero() ? GaussRational() : discx.coeff(0);
    out.value = raw / dx.leading();
    out.generic = !out.value.is_zero();
    out.delta_constant = false;
    return out;
}

struct DegeneratePoint {
    cplx x, y;
    int x_multiplicity;  // multiplicity of x as a root of Delta(x)
};

// All solutions of P = P_y = 0: roots of Delta(x), then y from the Kramer
// minor ratio (simple roots) or the nullspace of the Sylvester matrix,
// followed by a joint Newton polish on (P, P_y).
inline std::vector<DegeneratePoint> degenerate_points(const BivarPolyQ& P, double tol = 1e-9) {
    UniPolyQ deltaQ = discriminant_y(P);
    if (deltaQ.degree() <= 0) return {};
    UniPolyC delta = to_complex(deltaQ);
    auto clusters = cluster_roots(poly_roots(delta));

    int d = P.degy();
    auto mQ = discriminant_matrix(P);
    int n = 2 * d - 1;
    BivarPolyC Pc = to_complex(P);
    CompiledBivar pe(Pc), pye(to_complex(P.partial('y'))), pyye(to_complex(P.partial('y', 2))),
        pxye(to_complex(P.partial('x') .partial('y')));

    std::vector<DegeneratePoint> out;
    for (auto& cl : clusters) {
        cplx xb = cl.value;
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = to_complex(mQ[i][j]).eval(xb);
        std::vector<cplx> ys;
        if (cl.multiplicity == 1) {
            // Kramer ratio: null vector is (y^{2d-2}, ..., y, 1); the ratio of
            // the last two cofactors of any row gives y.
            auto minor_det = [&](int drop_row, int drop_col) {
                Mat sub(n - 1, n - 1);
                int ri = 0;
                for (int i = 0; i < n; ++i) {
                    if (i == drop_row) continue;
                    int cj = 0;
                    for (int j = 0; j < n; ++j) {
                        if (j == drop_col) continue;
                        sub(ri, cj++) = m(i, j);
                    }
                    ++ri;
                }
                return determinant(sub);
            };
            cplx m1 = minor_det(d - 1, n - 2), m2 = minor_det(d - 1, n - 1);
            if (std::abs(m2) < 1e-12 * std::max(1.0, std::abs(m1)))
                throw numeric_error("degenerate_points: Kramer ratio ill-conditioned; raise precision");
            ys.push_back(-m1 / m2);
        } else {
            auto basis = nullspace(m, 1e-7);
            if (basis.empty())
                throw numeric_error("degenerate_points: null-space extraction failed; raise precision");
            for (auto& v : basis) {
                // read y from successive component ratios v[k]/v[k+1] = y
                cplx best = 0;
                double bestw = -1;
                for (int k = 0; k + 1 < n; ++k) {
                    double w = std::min(std::abs(v[k]), std::abs(v[k + 1]));
                    if (w > bestw && std::abs(v[k + 1]) > 1e-10) {
                        bestw = w;
                        best = v[k] / v[k + 1];
                    }
                }
                ys.push_back(best);
            }
        }
        for (cplx yb : ys) {
            // joint Newton on (P, P_y) in (x, y)
            cplx x = xb, y = yb;
            CompiledBivar pxe(to_complex(P.partial('x'))), pxxe(to_complex(P.partial('x', 2)));
            for (int it = 0; it < 50; ++it) {
                cplx f1 = pe(x, y), f2 = pye(x, y);
                cplx j11 = pxe(x, y), j12 = pye(x, y);
                cplx j21 = pxye(x, y), j22 = pyye(x, y);
                cplx det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-14) break;
                cplx dxs = (f1 * j22 - f2 * j12) / det, dys = (j11 * f2 - j21 * f1) / det;
                x -= dxs;
                y -= dys;
                if (std::abs(dxs) + std::abs(dys) < 1e-15 * (1 + std::abs(x) + std::abs(y))) break;
            }
            // nodal candidates have singular (P, P_y) Jacobians; the system
            // (P_x, P_y) with the Hessian polishes them instead
            if (std::abs(pxe(x, y)) < 1e-4 && std::abs(pye(x, y)) < 1e-4) {
                for (int it = 0; it < 50; ++it) {
                    cplx f1 = pxe(x, y), f2 = pye(x, y);
                    cplx h11 = pxxe(x, y), h12 = pxye(x, y);
                    cplx h21 = pxye(x, y), h22 = pyye(x, y);
                    cplx det = h11 * h22 - h12 * h21;
                    if (std::abs(det) < 1e-12) break;
                    cplx dxs = (f1 * h22 - f2 * h12) / det, dys = (h11 * f2 - h21 * f1) / det;
                    x -= dxs;
                    y -= dys;
                    if (std::abs(dxs) + std::abs(dys) < 1e-15 * (1 + std::abs(x) + std::abs(y)))
                        break;
                }
            }
            double scale = 0;
            for (auto& [pt, c] : Pc.terms()) scale = std::max(scale, std::abs(c));
            if (std::abs(pe(x, y)) < tol * scale && std::abs(pye(x, y)) < tol * scale) {
                bool dup = false;
                for (auto& q : out)
                    if (std::abs(q.x - x) + std::abs(q.y - y) < 1e-8) dup = true;
                if (!dup) out.push_back({x, y, cl.multiplicity});
            }
        }
    }
    return out;
}

}  // namespace curvint

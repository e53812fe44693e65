#pragma once

#include <cmath>
#include <vector>

#include "curvint/common.hpp"

namespace curvint {

// Small dense complex matrices; row-major.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<cplx> a;
    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a((size_t)r * c, cplx(0)) {}
    cplx& operator()(int i, int j) { return a[(size_t)i * cols + j]; }
    cplx operator()(int i, int j) const { return a[(size_t)i * cols + j]; }
    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    Mat transpose() const {
        Mat t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    friend Mat operator*(const Mat& x, const Mat& y) {
        if (x.cols != y.rows) throw numeric_error("Mat: dimension mismatch");
        Mat r(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                cplx v = x(i, k);
                if (v == cplx(0)) continue;
                for (int j = 0; j < y.cols; ++j) r(i, j) += v * y(k, j);
            }
        return r;
    }
    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat r = x;
        for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
        return r;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat r = x;
        for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
        return r;
    }
    friend Mat operator*(cplx s, const Mat& x) {
        Mat r = x;
        for (auto& v : r.a) v *= s;
        return r;
    }
    double max_abs() const {
        double m = 0;
        for (auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

// LU with partial pivoting; solves in place.
inline std::vector<cplx> solve(Mat m, std::vector<cplx> b) {
    int n = m.rows;
    if (m.cols != n || (int)b.size() != n) throw numeric_error("solve: shape mismatch");
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        if (std::abs(m(p, k)) < 1e-300) throw numeric_error("solve: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(m.a[(size_t)p * n + j], m.a[(size_t)k * n + j]);
            std::swap(b[p], b[k]);
        }
        for (int i = k + 1; i < n; ++i) {
            cplx f = m(i, k) / m(k, k);
            m(i, k) = f;
            for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        cplx s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * b[j];
        b[i] = s / m(i, i);
    }
    return b;
}

inline Mat inverse(const Mat& m) {
    int n = m.rows;
    Mat inv(n, n);
    for (int c = 0; c < n; ++c) {
        std::vector<cplx> e(n, cplx(0));
        e[c] = 1;
        auto col = solve(m, e);
        for (int r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
}

inline cplx determinant(Mat m) {
    int n = m.rows;
    cplx det = 1;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        if (std::abs(m(p, k)) == 0.0) return 0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(m.a[(size_t)p * n + j], m.a[(size_t)k * n + j]);
            det = -det;
        }
        det *= m(k, k);
        for (int i = k + 1; i < n; ++i) {
            cplx f = m(i, k) / m(k, k);
            for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

// Householder QR with column pivoting. Returns the pivot order; rank is the
// number of diagonal entries above tol * |R(0,0)|.
struct PivotedQR {
    Mat r;                    // upper trapezoidal after reflections
    std::vector<int> pivots;  // column permutation applied
    int rank = 0;
};

inline PivotedQR qr_column_pivot(Mat m, double rel_tol = 1e-10) {
    int rows = m.rows, cols = m.cols;
    PivotedQR out;
    out.pivots.resize(cols);
    for (int j = 0; j < cols; ++j) out.pivots[j] = j;
    std::vector<double> norms(cols, 0.0);
    auto colnorm = [&](int j, int from) {
        double s = 0;
        for (int i = from; i < rows; ++i) s += std::norm(m(i, j));
        return std::sqrt(s);
    };
    int kmax = std::min(rows, cols);
    double first = -1;
    for (int k = 0; k < kmax; ++k) {
        int best = k;
        double bn = -1;
        for (int j = k; j < cols; ++j) {
            double nj = colnorm(j, k);
            if (nj > bn) {
                bn = nj;
                best = j;
            }
        }
        if (best != k) {
            for (int i = 0; i < rows; ++i) std::swap(m.a[(size_t)i * cols + k], m.a[(size_t)i * cols + best]);
            std::swap(out.pivots[k], out.pivots[best]);
        }
        if (first < 0) first = bn;
        if (bn <= rel_tol * std::max(first, 1e-300)) break;
        // Householder reflector on column k
        double alpha = colnorm(k, k);
        cplx x0 = m(k, k);
        cplx phase = (std::abs(x0) > 0) ? x0 / std::abs(x0) : cplx(1);
        cplx v0 = x0 + phase * alpha;
        std::vector<cplx> v(rows - k);
        v[0] = v0;
        for (int i = k + 1; i < rows; ++i) v[i - k] = m(i, k);
        double vn2 = 0;
        for (auto& t : v) vn2 += std::norm(t);
        if (vn2 > 0) {
            for (int j = k; j < cols; ++j) {
                cplx dot = 0;
                for (int i = k; i < rows; ++i) dot += std::conj(v[i - k]) * m(i, j);
                cplx f = 2.0 * dot / vn2;
                for (int i = k; i < rows; ++i) m(i, j) -= f * v[i - k];
            }
        }
        out.rank = k + 1;
    }
    out.r = std::move(m);
    // tighten rank by diagonal magnitude
    double d0 = std::abs(out.r(0, 0));
    int rank = 0;
    for (int k = 0; k < kmax; ++k)
        if (std::abs(out.r(k, k)) > rel_tol * std::max(d0, 1e-300)) rank = k + 1;
    out.rank = rank;
    return out;
}

// Nullspace basis of m (columns), via pivoted QR of the transpose-conjugate trick:
// solve R-part back-substitution on the free columns.
inline std::vector<std::vector<cplx>> nullspace(const Mat& m, double rel_tol = 1e-9) {
    PivotedQR qr = qr_column_pivot(m, rel_tol);
    int r = qr.rank, cols = m.cols;
    std::vector<std::vector<cplx>> basis;
    for (int f = r; f < cols; ++f) {
        std::vector<cplx> xp(cols, cplx(0));
        xp[f] = 1;
        for (int i = r - 1; i >= 0; --i) {
            cplx s = -qr.r(i, f);
            for (int j = i + 1; j < r; ++j) s -= qr.r(i, j) * xp[j];
            xp[i] = s / qr.r(i, i);
        }
        std::vector<cplx> x(cols, cplx(0));
        for (int j = 0; j < cols; ++j) x[qr.pivots[j]] = xp[j];
        double nrm = 0;
        for (auto& v : x) nrm += std::norm(v);
        nrm = std::sqrt(nrm);
        for (auto& v : x) v /= nrm;
        basis.push_back(std::move(x));
    }
    return basis;
}

// Eigenvalues of a real symmetric matrix by cyclic Jacobi (used for the
// positivity check on Im tau).
inline std::vector<double> sym_eigenvalues(std::vector<std::vector<double>> s) {
    int n = (int)s.size();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += s[i][j] * s[i][j];
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s[p][q]) < 1e-300) continue;
                double theta = (s[q][q] - s[p][p]) / (2 * s[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), sn = t * c;
                for (int k = 0; k < n; ++k) {
                    double skp = s[k][p], skq = s[k][q];
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    double spk = s[p][k], sqk = s[q][k];
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = s[i][i];
    return ev;
}

}  // namespace curvint

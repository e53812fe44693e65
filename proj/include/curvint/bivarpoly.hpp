#pragma once

#include <map>
#include <utility>
#include <vector>

#include "curvint/common.hpp"
#include "curvint/rational.hpp"
#include "curvint/unipoly.hpp"

namespace curvint {

using LatticePoint = std::pair<int, int>;  // (i, j) exponent of x^i y^j

// Bivariate polynomial sum P_{ij} x^i y^j over an exact or floating
// coefficient ring. Zero coefficients are never stored.
template <class T>
class BivarPoly {
  public:
    BivarPoly() = default;

    static BivarPoly monomial(int i, int j, T c) {
        BivarPoly p;
        p.add_term(i, j, std::move(c));
        return p;
    }

    void add_term(int i, int j, T c) {
        if (i < 0 || j < 0) throw input_error("BivarPoly: negative exponent");
        if (detail::coeff_zero(c)) return;
        auto key = LatticePoint{i, j};
        auto it = c_.find(key);
        if (it == c_.end()) {
            c_.emplace(key, std::move(c));
        } else {
            it->second = it->second + c;
            if (detail::coeff_zero(it->second)) c_.erase(it);
        }
    }

    const std::map<LatticePoint, T>& terms() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    T coeff(int i, int j) const {
        auto it = c_.find({i, j});
        return it == c_.end() ? T(0) : it->second;
    }
    std::vector<LatticePoint> support() const {
        std::vector<LatticePoint> s;
        s.reserve(c_.size());
        for (auto& [p, c] : c_) s.push_back(p);
        return s;
    }
    int degy() const {
        int d = -1;
        for (auto& [p, c] : c_) d = std::max(d, p.second);
        return d;
    }
    int degx() const {
        int d = -1;
        for (auto& [p, c] : c_) d = std::max(d, p.first);
        return d;
    }
    int degtotal() const {
        int d = -1;
        for (auto& [p, c] : c_) d = std::max(d, p.first + p.second);
        return d;
    }

    // coefficient of y^j as a polynomial in x
    UniPoly<T> coeff_of_y(int j) const {
        std::vector<T> row;
        for (auto& [p, c] : c_)
            if (p.second == j) {
                if ((int)row.size() <= p.first) row.resize(p.first + 1, T(0));
                row[p.first] = c;
            }
        return UniPoly<T>(std::move(row));
    }

    template <class X>
    X eval(const X& x, const X& y) const {
        // Horner in y of the x-Horner rows
        int dy = degy();
        X acc(0);
        for (int j = dy; j >= 0; --j) {
            X row(0);
            int dx = -1;
            for (auto& [p, c] : c_)
                if (p.second == j) dx = std::max(dx, p.first);
            for (int i = dx; i >= 0; --i) row = row * x + X(coeff(i, j));
            acc = acc * y + row;
        }
        return acc;
    }

    BivarPoly partial(char var, int order = 1) const {
        if (order < 1) throw input_error("BivarPoly: derivative order must be positive");
        BivarPoly p = *this;
        for (int k = 0; k < order; ++k) {
            BivarPoly d;
            for (auto& [pt, c] : p.c_) {
                if (var == 'x' && pt.first > 0)
                    d.add_term(pt.first - 1, pt.second, c * T((long long)pt.first));
                if (var == 'y' && pt.second > 0)
                    d.add_term(pt.first, pt.second - 1, c * T((long long)pt.second));
            }
            p = std::move(d);
        }
        return p;
    }

    // P(x0 + x, y0 + y) by binomial re-expansion.
    BivarPoly shift(const T& x0, const T& y0) const {
        BivarPoly out;
        int maxdeg = std::max(degx(), degy()) + 1;
        std::vector<std::vector<T>> binom(maxdeg + 1, std::vector<T>(maxdeg + 1, T(0)));
        for (int n = 0; n <= maxdeg; ++n) {
            binom[n][0] = T(1);
            for (int k = 1; k <= n; ++k)
                binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : T(0));
        }
        for (auto& [p, c] : c_) {
            std::vector<T> xp(p.first + 1), yp(p.second + 1);
            xp[0] = T(1);
            for (int a = 1; a <= p.first; ++a) xp[a] = xp[a - 1] * x0;
            yp[0] = T(1);
            for (int b = 1; b <= p.second; ++b) yp[b] = yp[b - 1] * y0;
            for (int a = 0; a <= p.first; ++a)
                for (int b = 0; b <= p.second; ++b)
                    out.add_term(a, b, c * binom[p.first][a] * binom[p.second][b] *
                                            xp[p.first - a] * yp[p.second - b]);
        }
        return out;
    }

    friend BivarPoly operator+(const BivarPoly& a, const BivarPoly& b) {
        BivarPoly r = a;
        for (auto& [p, c] : b.c_) r.add_term(p.first, p.second, c);
        return r;
    }
    friend BivarPoly operator-(const BivarPoly& a, const BivarPoly& b) {
        BivarPoly r = a;
        for (auto& [p, c] : b.c_) r.add_term(p.first, p.second, -c);
        return r;
    }
    friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
        BivarPoly r;
        for (auto& [p, c] : a.c_)
            for (auto& [q, d] : b.c_) r.add_term(p.first + q.first, p.second + q.second, c * d);
        return r;
    }
    friend BivarPoly operator*(const T& s, const BivarPoly& a) {
        BivarPoly r;
        for (auto& [p, c] : a.c_) r.add_term(p.first, p.second, s * c);
        return r;
    }
    friend bool operator==(const BivarPoly& a, const BivarPoly& b) { return a.c_ == b.c_; }

  private:
    std::map<LatticePoint, T> c_;
};

using BivarPolyQ = BivarPoly<GaussRational>;
using BivarPolyC = BivarPoly<cplx>;

inline BivarPolyC to_complex(const BivarPolyQ& p) {
    BivarPolyC out;
    for (auto& [pt, c] : p.terms()) out.add_term(pt.first, pt.second, c.to_cplx());
    return out;
}

inline cplx eval(const BivarPolyQ& p, cplx x, cplx y) {
    return to_complex(p).eval(x, y);
}

// Row-compiled evaluator for the hot paths (tracking and quadrature):
// rows[j] holds the dense x-coefficients of [y^j]P.
class CompiledBivar {
  public:
    CompiledBivar() = default;
    explicit CompiledBivar(const BivarPolyC& p) {
        dy_ = std::max(p.degy(), 0);
        rows_.assign(dy_ + 1, {});
        for (auto& [pt, c] : p.terms()) {
            auto& row = rows_[pt.second];
            if ((int)row.size() <= pt.first) row.resize(pt.first + 1, cplx(0));
            row[pt.first] += c;
        }
        if (p.is_zero()) rows_.assign(1, {});
    }
    cplx operator()(cplx x, cplx y) const {
        cplx acc = 0;
        for (size_t j = rows_.size(); j-- > 0;) {
            cplx row = 0;
            for (size_t i = rows_[j].size(); i-- > 0;) row = row * x + rows_[j][i];
            acc = acc * y + row;
        }
        return acc;
    }

  private:
    int dy_ = 0;
    std::vector<std::vector<cplx>> rows_;
};

}  // namespace curvint

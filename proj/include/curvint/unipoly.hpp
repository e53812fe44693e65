#pragma once

#include <vector>

#include "curvint/common.hpp"
#include "curvint/rational.hpp"

namespace curvint {

namespace detail {
inline bool coeff_zero(const GaussRational& c) { return c.is_zero(); }
inline bool coeff_zero(const cplx& c) { return c == cplx(0.0); }
}  // namespace detail

// Dense univariate polynomial; T is GaussRational (exact layer) or cplx.
template <class T>
class UniPoly {
  public:
    UniPoly() = default;
    explicit UniPoly(std::vector<T> c) : c_(std::move(c)) { trim(); }
    static UniPoly constant(T v) { return UniPoly(std::vector<T>{std::move(v)}); }

    int degree() const { return (int)c_.size() - 1; }  // -1 for the zero polynomial
    bool is_zero() const { return c_.empty(); }
    const std::vector<T>& coeffs() const { return c_; }
    T coeff(int k) const { return (k >= 0 && k < (int)c_.size()) ? c_[k] : T(0); }
    T leading() const { return c_.back(); }

    template <class X>
    X eval(const X& x) const {
        X acc(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + X(c_[i]);
        return acc;
    }

    UniPoly derivative() const {
        if (c_.size() < 2) return UniPoly();
        std::vector<T> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T((long long)i);
        return UniPoly(std::move(d));
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] + b.c_[i];
        return UniPoly(std::move(r));
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) {
        std::vector<T> r(std::max(a.c_.size(), b.c_.size()), T(0));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] - b.c_[i];
        return UniPoly(std::move(r));
    }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return UniPoly();
        std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
        return UniPoly(std::move(r));
    }
    friend UniPoly operator*(const T& s, const UniPoly& a) {
        std::vector<T> r = a.c_;
        for (auto& v : r) v = v * s;
        return UniPoly(std::move(r));
    }

    // Euclidean division; requires invertible leading coefficient of d.
    static void divmod(const UniPoly& n, const UniPoly& d, UniPoly& q, UniPoly& r) {
        if (d.is_zero()) throw numeric_error("UniPoly: division by zero polynomial");
        r = n;
        std::vector<T> qc(n.c_.size() > d.c_.size() ? n.c_.size() - d.c_.size() + 1 : 1, T(0));
        while (!r.is_zero() && r.degree() >= d.degree()) {
            T f = r.leading() / d.leading();
            int shift = r.degree() - d.degree();
            qc[shift] = qc[shift] + f;
            for (int i = 0; i <= d.degree(); ++i)
                r.c_[i + shift] = r.c_[i + shift] - f * d.c_[i];
            r.trim();
        }
        q = UniPoly(std::move(qc));
    }
    bool divides_exactly(const UniPoly& n, UniPoly* quotient = nullptr) const {
        UniPoly q, r;
        divmod(n, *this, q, r);
        if (quotient) *quotient = q;
        return r.is_zero();
    }

    // Monic gcd (exact coefficient field only).
    static UniPoly gcd(UniPoly a, UniPoly b) {
        while (!b.is_zero()) {
            UniPoly q, r;
            divmod(a, b, q, r);
            a = b;
            b = r;
        }
        if (a.is_zero()) return a;
        T inv = T(1) / a.leading();
        return inv * a;
    }

  private:
    std::vector<T> c_;
    void trim() {
        while (!c_.empty() && detail::coeff_zero(c_.back())) c_.pop_back();
    }
};

using UniPolyQ = UniPoly<GaussRational>;
using UniPolyC = UniPoly<cplx>;

inline UniPolyC to_complex(const UniPolyQ& p) {
    std::vector<cplx> c(p.coeffs().size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = p.coeffs()[i].to_cplx();
    return UniPolyC(std::move(c));
}

}  // namespace curvint

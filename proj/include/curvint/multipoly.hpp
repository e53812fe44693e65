#pragma once

#include <array>
#include <map>

#include "curvint/bivarpoly.hpp"

namespace curvint {

// Sparse exact polynomial in (x, y, x1, y1); used by the combinatorial
// bidifferential and the dzeta C-polynomial extraction.
class Poly4 {
  public:
    using Key = std::array<int, 4>;

    Poly4() = default;

    void add_term(int ex, int ey, int ex1, int ey1, GaussRational c) {
        if (c.is_zero()) return;
        Key k{ex, ey, ex1, ey1};
        auto it = c_.find(k);
        if (it == c_.end()) {
            c_.emplace(k, std::move(c));
        } else {
            it->second += c;
            if (it->second.is_zero()) c_.erase(it);
        }
    }
    const std::map<Key, GaussRational>& terms() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    friend Poly4 operator+(const Poly4& a, const Poly4& b) {
        Poly4 r = a;
        for (auto& [k, c] : b.c_) r.add_term(k[0], k[1], k[2], k[3], c);
        return r;
    }
    friend Poly4 operator-(const Poly4& a, const Poly4& b) {
        Poly4 r = a;
        for (auto& [k, c] : b.c_) r.add_term(k[0], k[1], k[2], k[3], -c);
        return r;
    }
    friend Poly4 operator*(const Poly4& a, const Poly4& b) {
        Poly4 r;
        for (auto& [k, c] : a.c_)
            for (auto& [l, d] : b.c_)
                r.add_term(k[0] + l[0], k[1] + l[1], k[2] + l[2], k[3] + l[3], c * d);
        return r;
    }
    friend Poly4 operator*(const GaussRational& s, const Poly4& a) {
        Poly4 r;
        for (auto& [k, c] : a.c_) r.add_term(k[0], k[1], k[2], k[3], s * c);
        return r;
    }

    // embeddings of bivariate polynomials into the four-variable ring
    static Poly4 in_xy(const BivarPolyQ& p) {
        Poly4 r;
        for (auto& [pt, c] : p.terms()) r.add_term(pt.first, pt.second, 0, 0, c);
        return r;
    }
    static Poly4 in_x1y1(const BivarPolyQ& p) {
        Poly4 r;
        for (auto& [pt, c] : p.terms()) r.add_term(0, 0, pt.first, pt.second, c);
        return r;
    }
    static Poly4 cross_x_y1(const BivarPolyQ& p) {  // p(x, y1)
        Poly4 r;
        for (auto& [pt, c] : p.terms()) r.add_term(pt.first, 0, 0, pt.second, c);
        return r;
    }
    static Poly4 cross_x1_y(const BivarPolyQ& p) {  // p(x1, y)
        Poly4 r;
        for (auto& [pt, c] : p.terms()) r.add_term(0, pt.second, pt.first, 0, c);
        return r;
    }
    static Poly4 monomial(int ex, int ey, int ex1, int ey1, GaussRational c = GaussRational(1)) {
        Poly4 r;
        r.add_term(ex, ey, ex1, ey1, std::move(c));
        return r;
    }

    // swap (x,y) <-> (x1,y1)
    Poly4 swapped() const {
        Poly4 r;
        for (auto& [k, c] : c_) r.add_term(k[2], k[3], k[0], k[1], c);
        return r;
    }

    cplx eval(cplx x, cplx y, cplx x1, cplx y1) const {
        cplx acc = 0;
        for (auto& [k, c] : c_)
            acc += c.to_cplx() * std::pow(x, k[0]) * std::pow(y, k[1]) * std::pow(x1, k[2]) *
                   std::pow(y1, k[3]);
        return acc;
    }

    int max_deg(int slot) const {
        int d = 0;
        for (auto& [k, c] : c_) d = std::max(d, k[slot]);
        return d;
    }

  private:
    std::map<Key, GaussRational> c_;
};

// Compiled float copy for quadrature inner loops; powers cached per call.
class CompiledPoly4 {
  public:
    CompiledPoly4() = default;
    explicit CompiledPoly4(const Poly4& p) {
        for (auto& [k, c] : p.terms()) {
            terms_.push_back({k, c.to_cplx()});
            for (int s = 0; s < 4; ++s) maxd_[s] = std::max(maxd_[s], k[s]);
        }
    }
    cplx operator()(cplx x, cplx y, cplx x1, cplx y1) const {
        if (terms_.empty()) return 0;
        auto powers = [](cplx v, int n, std::vector<cplx>& out) {
            out.resize(n + 1);
            out[0] = 1;
            for (int i = 1; i <= n; ++i) out[i] = out[i - 1] * v;
        };
        std::vector<cplx> px, py, px1, py1;
        powers(x, maxd_[0], px);
        powers(y, maxd_[1], py);
        powers(x1, maxd_[2], px1);
        powers(y1, maxd_[3], py1);
        cplx acc = 0;
        for (auto& t : terms_) acc += t.c * px[t.k[0]] * py[t.k[1]] * px1[t.k[2]] * py1[t.k[3]];
        return acc;
    }
    bool empty() const { return terms_.empty(); }

  private:
    struct Term {
        Poly4::Key k;
        cplx c;
    };
    std::vector<Term> terms_;
    int maxd_[4] = {0, 0, 0, 0};
};

}  // namespace curvint

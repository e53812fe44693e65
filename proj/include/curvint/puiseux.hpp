#pragma once

#include <vector>

#include "curvint/forms.hpp"
#include "curvint/polygon.hpp"
#include "curvint/surface.hpp"

namespace curvint {

// Truncated Laurent series sum_{m} c[m - lead] xi^m, m = lead .. lead+len-1.
// All arithmetic keeps a fixed window of `len` coefficients from the leading
// exponent, which is exactly what residue extraction needs.
class LaurentSeries {
  public:
    LaurentSeries() = default;
    LaurentSeries(int lead, std::vector<cplx> c) : lead_(lead), c_(std::move(c)) { normalize(); }
    static LaurentSeries constant(cplx v, int len) {
        std::vector<cplx> c(len, cplx(0));
        c[0] = v;
        return LaurentSeries(0, std::move(c));
    }
    static LaurentSeries power(int m, int len) {
        std::vector<cplx> c(len, cplx(0));
        c[0] = 1;
        return LaurentSeries(m, std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    int lead() const { return lead_; }
    int length() const { return (int)c_.size(); }
    cplx coeff(int m) const {
        int idx = m - lead_;
        return (idx >= 0 && idx < (int)c_.size()) ? c_[idx] : cplx(0);
    }

    LaurentSeries truncated(int len) const {
        std::vector<cplx> c = c_;
        if ((int)c.size() > len) c.resize(len);
        return LaurentSeries(lead_, std::move(c));
    }

    // Strip up to a few leading coefficients that are pure roundoff relative
    // to the following ones (a numerically-centered pole leaves an order
    // ~1e-15 ghost below the true lead). The comparison is local because the
    // far tail of a chart series can grow geometrically.
    LaurentSeries trimmed_relative(double rel) const {
        if (is_zero()) return *this;
        size_t k = 0;
        while (k < c_.size() - 1 && k < 4) {
            double local = 0;
            for (size_t j = k + 1; j < std::min(c_.size(), k + 9); ++j)
                local = std::max(local, std::abs(c_[j]));
            if (std::abs(c_[k]) >= rel * local) break;
            ++k;
        }
        if (k == 0) return *this;
        std::vector<cplx> c(c_.begin() + k, c_.end());
        return LaurentSeries(lead_ + (int)k, std::move(c));
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        int lead = std::min(a.lead_, b.lead_);
        int top = std::min(a.lead_ + (int)a.c_.size(), b.lead_ + (int)b.c_.size());
        // the window is limited by the shorter reach
        int len = top - lead;
        if (len <= 0) len = std::max((int)a.c_.size(), (int)b.c_.size());
        std::vector<cplx> c(len, cplx(0));
        for (int m = 0; m < len; ++m) c[m] = a.coeff(lead + m) + b.coeff(lead + m);
        return LaurentSeries(lead, std::move(c));
    }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) {
        return a + (cplx(-1) * b);
    }
    friend LaurentSeries operator*(cplx s, const LaurentSeries& a) {
        LaurentSeries r = a;
        for (auto& v : r.c_) v *= s;
        r.normalize();
        return r;
    }
    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        if (a.is_zero() || b.is_zero()) return LaurentSeries();
        int len = std::min((int)a.c_.size(), (int)b.c_.size());
        std::vector<cplx> c(len, cplx(0));
        for (int i = 0; i < (int)a.c_.size() && i < len; ++i) {
            if (a.c_[i] == cplx(0)) continue;
            for (int j = 0; j + i < len && j < (int)b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        }
        return LaurentSeries(a.lead_ + b.lead_, std::move(c));
    }

    LaurentSeries inverse() const {
        if (is_zero()) throw numeric_error("LaurentSeries: inverse of zero");
        int len = (int)c_.size();
        std::vector<cplx> r(len, cplx(0));
        r[0] = 1.0 / c_[0];
        for (int m = 1; m < len; ++m) {
            cplx s = 0;
            for (int j = 1; j <= m; ++j) s += c_[j] * r[m - j];
            r[m] = -s / c_[0];
        }
        return LaurentSeries(-lead_, std::move(r));
    }

    LaurentSeries derivative() const {  // d/dxi
        if (is_zero()) return {};
        std::vector<cplx> c(c_.size(), cplx(0));
        for (size_t i = 0; i < c_.size(); ++i) c[i] = (double)(lead_ + (int)i) * c_[i];
        return LaurentSeries(lead_ - 1, std::move(c));
    }

    LaurentSeries pow_int(int n, int len) const {
        LaurentSeries acc = constant(1.0, len);
        LaurentSeries base = truncated(len);
        int e = std::abs(n);
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        if (n < 0) acc = acc.inverse();
        return acc;
    }

    cplx eval(cplx xi) const {
        cplx acc = 0, p = std::pow(xi, lead_);
        for (auto& v : c_) {
            acc += v * p;
            p *= xi;
        }
        return acc;
    }

  private:
    int lead_ = 0;
    std::vector<cplx> c_;
    void normalize() {
        size_t k = 0;
        while (k < c_.size() && std::abs(c_[k]) == 0.0) ++k;
        if (k == c_.size()) {
            c_.clear();
            lead_ = 0;
            return;
        }
        if (k > 0) {
            c_.erase(c_.begin(), c_.begin() + k);
            lead_ += (int)k;
        }
    }
};

// Local chart xi -> (x(xi), y(xi)) on the curve, with x either
// x0 + xi^a (finite center, a >= 1) or xi^a with a < 0 (pole of x).
struct LocalChart {
    LaurentSeries x, y;
    int a = 1;            // order of x - x0 (negative at poles of x)
    cplx x0{};            // finite base value, 0 at poles per the convention
    bool x_infinite = false;
    int length = 0;

    cplx xi_of_x(cplx xv) const {
        // principal branch; the chart's ray convention
        if (x_infinite) return std::pow(xv, 1.0 / (double)a);
        return std::pow(xv - x0, 1.0 / (double)a);
    }
};

namespace detail {

inline LaurentSeries compose_bivar(const BivarPolyC& P, const LaurentSeries& x,
                                   const LaurentSeries& y, int len) {
    // Horner in y with x-Horner rows over the series ring
    int dy = P.degy();
    LaurentSeries acc;
    for (int j = dy; j >= 0; --j) {
        LaurentSeries row;
        int dx = -1;
        for (auto& [pt, c] : P.terms())
            if (pt.second == j) dx = std::max(dx, pt.first);
        for (int i = dx; i >= 0; --i) {
            row = row * x;
            cplx cc = P.coeff(i, j);
            if (cc != cplx(0)) row = row + LaurentSeries::constant(cc, len);
        }
        acc = acc * y;
        if (!row.is_zero()) acc = acc + row;
    }
    return acc.truncated(len);
}

// Newton iteration for y(xi) solving P(x(xi), y(xi)) = 0 from a seed whose
// error is higher order than its leading term.
inline LaurentSeries newton_series_y(const CurveContext& C, const LaurentSeries& x,
                                     LaurentSeries y, int len) {
    BivarPolyC Py = C.poly().partial('y');
    // the seed is a simple root of the leading equation, so each step doubles
    // the number of correct orders; a fixed iteration budget covers the window
    int iters = 3;
    while ((1 << iters) < len + 2) ++iters;
    iters += 2;
    for (int it = 0; it < iters; ++it) {
        LaurentSeries f = compose_bivar(C.poly(), x, y, len);
        if (f.is_zero()) break;
        LaurentSeries fp = compose_bivar(Py, x, y, len);
        LaurentSeries step = f * fp.inverse();
        if (step.is_zero()) break;
        y = (y - step).truncated(len);
    }
    return y;
}

}  // namespace detail

// Chart at a regular surface point: x = x_p + xi, y a Taylor series.
inline LocalChart chart_at_regular(const CurveContext& C, const SurfacePoint& p, int len) {
    LocalChart ch;
    ch.a = 1;
    ch.x0 = p.x;
    ch.length = len;
    std::vector<cplx> xc(len, cplx(0));
    xc[0] = p.x;
    if (len > 1) xc[1] = 1;
    ch.x = LaurentSeries(0, std::move(xc));
    LaurentSeries y0 = LaurentSeries::constant(p.y, len);
    ch.y = detail::newton_series_y(C, ch.x, y0, len);
    return ch;
}

// Chart at a puncture from its polygon data: x = xi^a (a < 0) or
// x = X + xi^a for horizontal punctures (a > 0, y poles).
inline LocalChart chart_at_puncture(const CurveContext& C, const PunctureInfo& p, int len) {
    LocalChart ch;
    ch.a = p.a;
    ch.x_infinite = p.x_infinite;
    ch.x0 = p.x_infinite ? cplx(0) : p.X;
    ch.length = len;
    if (p.x_infinite) {
        ch.x = LaurentSeries::power(p.a, len);
    } else {
        std::vector<cplx> xc(len, cplx(0));
        xc[0] = p.X;
        if (p.a < len) xc[p.a] = 1;
        ch.x = LaurentSeries(0, std::move(xc)).truncated(len);
        if (p.a >= len) throw input_error("chart_at_puncture: window too short for the order");
    }
    // seed y ~ eta xi^b (+ Y for finite-y punctures)
    std::vector<cplx> yc(len, cplx(0));
    yc[0] = p.eta;
    LaurentSeries y0(p.b, std::move(yc));
    if (!p.y_infinite && std::abs(p.Y) > 0) y0 = y0 + LaurentSeries::constant(p.Y, len);
    ch.y = detail::newton_series_y(C, ch.x, y0, len);
    return ch;
}

// Chart on one local disc at a branch/nodal point: x = x_b + xi^a,
// y = y_b + C^{1/a} xi^b + ...; the a-th root branch is pinned to the
// principal value (the recorded ray convention).
inline LocalChart chart_at_branch(const CurveContext& C, cplx xb, cplx yb,
                                  const BranchSegment& seg, int len) {
    LocalChart ch;
    ch.a = seg.a;
    ch.x0 = xb;
    ch.length = len;
    std::vector<cplx> xc(len, cplx(0));
    xc[0] = xb;
    if (seg.a < len) xc[seg.a] = 1;
    ch.x = LaurentSeries(0, std::move(xc));
    std::vector<cplx> yc(len, cplx(0));
    yc[0] = std::pow(seg.C, 1.0 / (double)seg.a);
    LaurentSeries y0 = LaurentSeries(seg.b, std::move(yc)) + LaurentSeries::constant(yb, len);
    ch.y = detail::newton_series_y(C, ch.x, y0, len);
    return ch;
}

// Residual check |P(x(xi), y(xi))|: greatest coefficient magnitude left in
// the window, relative to the curve scale.
inline double chart_residual(const CurveContext& C, const LocalChart& ch) {
    LaurentSeries f = detail::compose_bivar(C.poly(), ch.x, ch.y, ch.length);
    double m = 0;
    for (int i = 0; i < f.length(); ++i) m = std::max(m, std::abs(f.coeff(f.lead() + i)));
    return m / C.scale();
}

// Pull back of the 1-form R(x,y) dx through the chart: returns the series w
// with R(x(xi), y(xi)) dx = w(xi) dxi.
inline LaurentSeries pullback_form(const LocalChart& ch,
                                   const std::function<LaurentSeries(const LaurentSeries&,
                                                                     const LaurentSeries&)>& R) {
    return (R(ch.x, ch.y) * ch.x.derivative()).truncated(ch.length);
}

}  // namespace curvint

#pragma once

#include <array>
#include <vector>

#include "curvint/common.hpp"
#include "curvint/linalg.hpp"

namespace curvint {

// ---------------------------------------------------------------------------
// Classical elliptic blocks: K, E by AGM, the nome q(k), and the G2 series.

struct ClassicalBlocks {
    double K = 0, E = 0, Kprime = 0;
    double q = 0;   // nome, q = exp(-pi K'/K) = k^2/16 + k^4/32 + ...
    double G2 = 0;  // (pi^2/3)(1 - 24 sum n q^n/(1-q^n)) at the nome
};

inline double agm_K(double k) {
    if (!(k >= 0 && k < 1)) throw input_error("K(k): need 0 <= k < 1");
    double a = 1.0, b = std::sqrt(1.0 - k * k);
    for (int i = 0; i < 60 && std::abs(a - b) > 1e-17 * a; ++i) {
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return kPi / (2 * a);
}

inline double agm_E(double k) {
    // E = K (1 - sum 2^{n-1} c_n^2), c_0 = k
    if (!(k >= 0 && k < 1)) throw input_error("E(k): need 0 <= k < 1");
    double a = 1.0, b = std::sqrt(1.0 - k * k), c = k;
    double sum = 0.5 * c * c;
    double pow2 = 0.5;
    for (int i = 0; i < 60 && std::abs(c) > 1e-18; ++i) {
        double an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2;
        sum += pow2 * c * c;
    }
    return (kPi / (2 * a)) * (1.0 - sum);
}

// G2 from the Lambert series in the variable Q; callers pass the nome of k
// or exp(2 pi i tau), which coincide on the curve's own marking.
inline cplx g2_from_q(cplx Q) {
    if (std::abs(Q) >= 1) throw input_error("G2: need |q| < 1");
    CompensatedCSum acc;
    for (int n = 1; n < 4000; ++n) {
        cplx qn = std::pow(Q, n);
        cplx term = (double)n * qn / (1.0 - qn);
        acc.add(term);
        if (std::abs(term) < 1e-18 && n > 8) break;
    }
    return kPi * kPi / 3.0 * (1.0 - 24.0 * acc.value());
}

inline ClassicalBlocks classical_series(double k) {
    ClassicalBlocks b;
    b.K = agm_K(k);
    b.E = agm_E(k);
    double kp = std::sqrt(std::max(0.0, 1.0 - k * k));
    b.Kprime = agm_K(std::min(kp, 1.0 - 1e-16));
    // series start, then Newton refinement on K = (pi/2) theta3(q)^2
    double k2 = k * k;
    double q = k2 / 16 * (1 + k2 / 2);
    double target = std::exp(-kPi * b.Kprime / b.K);
    if (std::isfinite(target) && target > 0) q = target;
    auto theta3 = [](double qq) {
        double s = 1;
        for (int n = 1; n < 60; ++n) {
            double t = 2 * std::pow(qq, (double)n * n);
            s += t;
            if (t < 1e-18) break;
        }
        return s;
    };
    auto theta3p = [&](double qq) {  // d theta3 / dq
        double s = 0;
        for (int n = 1; n < 60; ++n) {
            double t = 2.0 * n * n * std::pow(qq, (double)n * n - 1);
            s += t;
            if (t < 1e-18 && n > 2) break;
        }
        return s;
    };
    for (int it = 0; it < 4; ++it) {
        double t3 = theta3(q);
        double f = kPi / 2 * t3 * t3 - b.K;
        double df = kPi * t3 * theta3p(q);
        if (std::abs(df) < 1e-300) break;
        q -= f / df;
    }
    b.q = q;
    b.G2 = g2_from_q(cplx(q)).real();
    return b;
}

// ---------------------------------------------------------------------------
// Riemann theta with half-integer characteristics.

struct Characteristic {
    std::vector<int> alpha, beta;  // defined mod 2
    bool odd() const {
        long long s = 0;
        for (size_t i = 0; i < alpha.size(); ++i) s += (long long)alpha[i] * beta[i];
        return (s % 2 + 2) % 2 == 1;
    }
};

inline std::vector<Characteristic> odd_characteristics(int g) {
    if (g < 1) throw input_error("odd_characteristics: g >= 1 required");
    std::vector<Characteristic> out;
    for (long long a = 0; a < (1ll << g); ++a)
        for (long long b = 0; b < (1ll << g); ++b) {
            Characteristic ch;
            ch.alpha.resize(g);
            ch.beta.resize(g);
            for (int i = 0; i < g; ++i) {
                ch.alpha[i] = (int)((a >> i) & 1);
                ch.beta[i] = (int)((b >> i) & 1);
            }
            if (ch.odd()) out.push_back(ch);
        }
    return out;  // lexicographic in (alpha, beta) by construction
}

class ThetaContext {
  public:
    ThetaContext(Mat tau, double precision_target = 1e-13, int radius_cap = 40)
        : tau_(std::move(tau)), target_(precision_target), cap_(radius_cap) {
        g_ = tau_.rows;
        if (tau_.cols != g_) throw input_error("ThetaContext: tau must be square");
        double asym = 0;
        for (int i = 0; i < g_; ++i)
            for (int j = 0; j < g_; ++j) asym = std::max(asym, std::abs(tau_(i, j) - tau_(j, i)));
        if (asym > 1e-8 * (1 + tau_.max_abs()))
            throw input_error("ThetaContext: tau is not symmetric");
        std::vector<std::vector<double>> im(g_, std::vector<double>(g_));
        for (int i = 0; i < g_; ++i)
            for (int j = 0; j < g_; ++j) im[i][j] = 0.5 * (tau_(i, j).imag() + tau_(j, i).imag());
        auto ev = sym_eigenvalues(im);
        lambda_min_ = ev[0];
        for (double e : ev) lambda_min_ = std::min(lambda_min_, e);
        if (lambda_min_ <= 0) throw input_error("ThetaContext: Im tau is not positive definite");
    }

    int genus() const { return g_; }
    const Mat& tau() const { return tau_; }
    double lambda_min() const { return lambda_min_; }

    // Truncation radius from the Gaussian tail with a 10x safety margin.
    int radius_for(const std::vector<cplx>& u) const {
        double imu = 0;
        for (auto& v : u) imu = std::max(imu, std::abs(v.imag()));
        double L = lambda_min_;
        double logeps = -std::log(target_ / 10.0);
        double R = (imu + std::sqrt(imu * imu + L * logeps / kPi)) / L + 2.0;
        int r = (int)std::ceil(R);
        if (r > cap_) r = cap_;
        return r;
    }

    // Theta(u) = sum over n in Z^g of exp(2 pi i (u,n) + i pi (n, tau n)).
    cplx theta(const std::vector<cplx>& u) const {
        int R = radius_for(u);
        return lattice_sum(u, R, {}, 0);
    }

    // Theta with characteristic chi = alpha/2 + tau beta/2:
    // Theta_chi(u) = Theta(u + chi) exp(i pi (beta, u)).
    cplx theta_char(const Characteristic& ch, const std::vector<cplx>& u) const {
        std::vector<cplx> shifted(u);
        for (int i = 0; i < g_; ++i) {
            shifted[i] += 0.5 * ch.alpha[i];
            for (int j = 0; j < g_; ++j) shifted[i] += 0.5 * tau_(i, j) * (double)ch.beta[j];
        }
        cplx phase = 0;
        for (int i = 0; i < g_; ++i) phase += (double)ch.beta[i] * u[i];
        return theta(shifted) * std::exp(cplx(0, kPi) * phase);
    }

    // gradient of Theta_chi at u = 0
    std::vector<cplx> theta_prime(const Characteristic& ch) const {
        int R = radius_for(char_shift(ch)) + 1;
        std::vector<cplx> out(g_, cplx(0));
        for_each_lattice(R, [&](const std::vector<int>& n) {
            cplx w = char_weight(ch, n);
            for (int i = 0; i < g_; ++i) out[i] += (n[i] + 0.5 * ch.beta[i]) * w;
        });
        for (auto& v : out) v *= kTwoPiI;
        return out;
    }

    // third derivative tensor of Theta_chi at u = 0
    std::vector<cplx> theta_third(const Characteristic& ch) const {
        int R = radius_for(char_shift(ch)) + 1;
        std::vector<cplx> out((size_t)g_ * g_ * g_, cplx(0));
        for_each_lattice(R, [&](const std::vector<int>& n) {
            cplx w = char_weight(ch, n);
            for (int i = 0; i < g_; ++i)
                for (int j = 0; j < g_; ++j)
                    for (int k = 0; k < g_; ++k)
                        out[((size_t)i * g_ + j) * g_ + k] += (n[i] + 0.5 * ch.beta[i]) *
                                                              (n[j] + 0.5 * ch.beta[j]) *
                                                              (n[k] + 0.5 * ch.beta[k]) * w;
        });
        cplx f = kTwoPiI * kTwoPiI * kTwoPiI;
        for (auto& v : out) v *= f;
        return out;
    }

    // first regular odd characteristic in lexicographic order
    Characteristic regular_odd() const {
        for (auto& ch : odd_characteristics(g_)) {
            auto tp = theta_prime(ch);
            double n = 0;
            for (auto& v : tp) n += std::norm(v);
            if (std::sqrt(n) > 1e-8) return ch;
        }
        throw numeric_error("no regular odd characteristic found");
    }

  private:
    Mat tau_;
    double target_, lambda_min_ = 0;
    int cap_ = 40, g_ = 0;

    std::vector<cplx> char_shift(const Characteristic& ch) const {
        std::vector<cplx> s(g_, cplx(0));
        for (int i = 0; i < g_; ++i) {
            s[i] = 0.5 * ch.alpha[i];
            for (int j = 0; j < g_; ++j) s[i] += 0.5 * tau_(i, j) * (double)ch.beta[j];
        }
        return s;
    }
    // exp(i pi (n, alpha)) exp(i pi (n, tau beta)) exp(i pi (n, tau n))
    cplx char_weight(const Characteristic& ch, const std::vector<int>& n) const {
        cplx e = 0;
        for (int i = 0; i < g_; ++i) {
            e += (double)(n[i] * ch.alpha[i]);
            for (int j = 0; j < g_; ++j)
                e += tau_(i, j) * ((double)n[i] * n[j] + (double)n[i] * ch.beta[j]);
        }
        return std::exp(cplx(0, kPi) * e);
    }
    cplx lattice_sum(const std::vector<cplx>& u, int R, std::vector<int>, int) const {
        cplx total = 0;
        std::vector<int> n(g_, -R);
        while (true) {
            cplx e = 0;
            for (int i = 0; i < g_; ++i) {
                e += 2.0 * u[i] * (double)n[i];
                for (int j = 0; j < g_; ++j) e += tau_(i, j) * (double)n[i] * (double)n[j];
            }
            total += std::exp(cplx(0, kPi) * e);
            int k = 0;
            while (k < g_ && ++n[k] > R) n[k++] = -R;
            if (k == g_) break;
        }
        return total;
    }
    template <class F>
    void for_each_lattice(int R, F&& f) const {
        std::vector<int> n(g_, -R);
        while (true) {
            f(n);
            int k = 0;
            while (k < g_ && ++n[k] > R) n[k++] = -R;
            if (k == g_) break;
        }
    }
};

}  // namespace curvint

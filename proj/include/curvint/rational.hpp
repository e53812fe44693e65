#pragma once

#include <string>

#include "curvint/bigint.hpp"
#include "curvint/common.hpp"

namespace curvint {

// Exact rational, always stored normalized (gcd 1, positive denominator).
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    // Accepts "n", "n/d", and decimal strings like "-0.125".
    static Rational from_string(const std::string& s) {
        auto slash = s.find('/');
        if (slash != std::string::npos)
            return Rational(BigInt::from_string(s.substr(0, slash)),
                            BigInt::from_string(s.substr(slash + 1)));
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(BigInt::from_string(s), BigInt(1));
        std::string intpart = s.substr(0, dot), frac = s.substr(dot + 1);
        BigInt den(1);
        for (size_t i = 0; i < frac.size(); ++i) den = den * BigInt(10);
        bool neg = !intpart.empty() && intpart[0] == '-';
        if (intpart == "-" || intpart.empty()) intpart = "0";
        BigInt n = BigInt::from_string(intpart).abs() * den + BigInt::from_string(frac.empty() ? "0" : frac);
        if (neg) n = -n;
        return Rational(n, den);
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw numeric_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (a.num_ * b.den_) < (b.num_ * a.den_);
    }

    double to_double() const { return num_.to_double() / den_.to_double(); }
    std::string to_string() const {
        if (den_ == BigInt(1)) return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }
    std::size_t hash() const { return num_.hash() * 1000003u ^ den_.hash(); }

  private:
    BigInt num_, den_;
    void normalize() {
        if (den_.is_zero()) throw numeric_error("Rational: zero denominator");
        if (num_.is_zero()) {
            den_ = BigInt(1);
            return;
        }
        if (den_.negative()) {
            num_ = -num_;
            den_ = -den_;
        }
        BigInt g = BigInt::gcd(num_, den_);
        num_ = num_ / g;
        den_ = den_ / g;
    }
};

// Gaussian rational a + b*i, the exact coefficient field.
class GaussRational {
  public:
    GaussRational() = default;
    GaussRational(long long n) : re_(n) {}
    GaussRational(Rational re) : re_(std::move(re)) {}
    GaussRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }
    friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend GaussRational operator/(const GaussRational& a, const GaussRational& b) {
        Rational n2 = b.re_ * b.re_ + b.im_ * b.im_;
        if (n2.is_zero()) throw numeric_error("GaussRational: division by zero");
        return {(a.re_ * b.re_ + a.im_ * b.im_) / n2, (a.im_ * b.re_ - a.re_ * b.im_) / n2};
    }
    GaussRational& operator+=(const GaussRational& b) { return *this = *this + b; }
    GaussRational& operator-=(const GaussRational& b) { return *this = *this - b; }
    GaussRational& operator*=(const GaussRational& b) { return *this = *this * b; }

    friend bool operator==(const GaussRational& a, const GaussRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    cplx to_cplx() const { return {re_.to_double(), im_.to_double()}; }
    std::string to_string() const {
        if (im_.is_zero()) return re_.to_string();
        return re_.to_string() + (im_.sign() < 0 ? "" : "+") + im_.to_string() + "i";
    }
    std::size_t hash() const { return re_.hash() * 2654435761u ^ im_.hash(); }

  private:
    Rational re_, im_;
};

}  // namespace curvint

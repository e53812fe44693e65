#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "curvint/common.hpp"

namespace curvint {

// Arbitrary-precision signed integer, sign + base-2^32 magnitude.
// Schoolbook multiplication and division; the exact layer only sees
// desk-scale operands (discriminants, hull data, small linear solves).
class BigInt {
  public:
    BigInt() = default;
    BigInt(long long v) {
        if (v < 0) {
            neg_ = true;
            // avoid overflow on LLONG_MIN
            unsigned long long u = (unsigned long long)(-(v + 1)) + 1ull;
            set_mag(u);
        } else {
            set_mag((unsigned long long)v);
        }
    }
    static BigInt from_string(const std::string& s) {
        BigInt r;
        size_t i = 0;
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
        if (i >= s.size()) throw input_error("BigInt: empty numeral");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw input_error("BigInt: bad digit in '" + s + "'");
            r.mul_small(10);
            r.add_small((std::uint32_t)(s[i] - '0'));
        }
        r.neg_ = neg && !r.is_zero();
        return r;
    }

    bool is_zero() const { return mag_.empty(); }
    bool negative() const { return neg_; }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

    friend BigInt operator-(const BigInt& a) {
        BigInt r = a;
        if (!r.is_zero()) r.neg_ = !r.neg_;
        return r;
    }
    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.neg_ == b.neg_) {
            BigInt r;
            r.mag_ = add_mag(a.mag_, b.mag_);
            r.neg_ = a.neg_ && !r.mag_.empty();
            return r;
        }
        int c = cmp_mag(a.mag_, b.mag_);
        if (c == 0) return BigInt();
        BigInt r;
        if (c > 0) {
            r.mag_ = sub_mag(a.mag_, b.mag_);
            r.neg_ = a.neg_;
        } else {
            r.mag_ = sub_mag(b.mag_, a.mag_);
            r.neg_ = b.neg_;
        }
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }
    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.is_zero() || b.is_zero()) return r;
        r.mag_.assign(a.mag_.size() + b.mag_.size(), 0);
        for (size_t i = 0; i < a.mag_.size(); ++i) {
            std::uint64_t carry = 0;
            for (size_t j = 0; j < b.mag_.size(); ++j) {
                std::uint64_t t = (std::uint64_t)a.mag_[i] * b.mag_[j] + r.mag_[i + j] + carry;
                r.mag_[i + j] = (std::uint32_t)t;
                carry = t >> 32;
            }
            size_t k = i + b.mag_.size();
            while (carry) {
                std::uint64_t t = r.mag_[k] + carry;
                r.mag_[k] = (std::uint32_t)t;
                carry = t >> 32;
                ++k;
            }
        }
        r.trim();
        r.neg_ = (a.neg_ != b.neg_) && !r.is_zero();
        return r;
    }

    // Truncated quotient (toward zero) and matching remainder.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.is_zero()) throw numeric_error("BigInt: division by zero");
        q = BigInt();
        r = BigInt();
        if (cmp_mag(a.mag_, b.mag_) < 0) {
            r = a;
            return;
        }
        // bit-shift long division over the magnitude
        q.mag_.assign(a.mag_.size(), 0);
        std::vector<std::uint32_t> rem;
        for (size_t bit = a.mag_.size() * 32; bit-- > 0;) {
            shl1(rem);
            if ((a.mag_[bit / 32] >> (bit % 32)) & 1u) {
                if (rem.empty()) rem.push_back(0);
                rem[0] |= 1u;
            }
            if (cmp_mag(rem, b.mag_) >= 0) {
                rem = sub_mag(rem, b.mag_);
                q.mag_[bit / 32] |= (1u << (bit % 32));
            }
        }
        q.trim();
        r.mag_ = rem;
        r.trim();
        q.neg_ = (a.neg_ != b.neg_) && !q.is_zero();
        r.neg_ = a.neg_ && !r.is_zero();
    }
    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    friend bool operator==(const BigInt& a, const BigInt& b) {
        return a.neg_ == b.neg_ && a.mag_ == b.mag_;
    }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) {
        if (a.neg_ != b.neg_) return a.neg_;
        int c = cmp_mag(a.mag_, b.mag_);
        return a.neg_ ? c > 0 : c < 0;
    }

    static BigInt gcd(BigInt a, BigInt b) {
        a.neg_ = b.neg_ = false;
        while (!b.is_zero()) {
            BigInt q, r;
            divmod(a, b, q, r);
            a = b;
            b = r;
        }
        if (a.is_zero()) return BigInt(1);
        return a;
    }

    BigInt abs() const {
        BigInt r = *this;
        r.neg_ = false;
        return r;
    }

    double to_double() const {
        double v = 0;
        for (size_t i = mag_.size(); i-- > 0;) v = v * 4294967296.0 + mag_[i];
        return neg_ ? -v : v;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::vector<std::uint32_t> m = mag_;
        std::string digits;
        while (!m.empty()) {
            std::uint64_t rem = 0;
            for (size_t i = m.size(); i-- > 0;) {
                std::uint64_t cur = (rem << 32) | m[i];
                m[i] = (std::uint32_t)(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!m.empty() && m.back() == 0) m.pop_back();
            for (int d = 0; d < 9; ++d) {
                digits.push_back(char('0' + rem % 10));
                rem /= 10;
            }
        }
        while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
        std::string out;
        if (neg_) out.push_back('-');
        out.append(digits.rbegin(), digits.rend());
        return out;
    }

    std::size_t hash() const {
        std::size_t h = neg_ ? 0x9e3779b9u : 0x85ebca6bu;
        for (auto w : mag_) h = h * 1099511628211ull + w;
        return h;
    }

  private:
    bool neg_ = false;
    std::vector<std::uint32_t> mag_;  // little-endian limbs, no trailing zeros

    void set_mag(unsigned long long u) {
        mag_.clear();
        while (u) {
            mag_.push_back((std::uint32_t)u);
            u >>= 32;
        }
    }
    void trim() {
        while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
        if (mag_.empty()) neg_ = false;
    }
    void mul_small(std::uint32_t f) {
        std::uint64_t carry = 0;
        for (auto& w : mag_) {
            std::uint64_t t = (std::uint64_t)w * f + carry;
            w = (std::uint32_t)t;
            carry = t >> 32;
        }
        if (carry) mag_.push_back((std::uint32_t)carry);
    }
    void add_small(std::uint32_t f) {
        std::uint64_t carry = f;
        for (size_t i = 0; carry && i < mag_.size(); ++i) {
            std::uint64_t t = (std::uint64_t)mag_[i] + carry;
            mag_[i] = (std::uint32_t)t;
            carry = t >> 32;
        }
        if (carry) mag_.push_back((std::uint32_t)carry);
    }
    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }
    static std::vector<std::uint32_t> add_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r(std::max(a.size(), b.size()) + 1, 0);
        std::uint64_t carry = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            std::uint64_t t = carry;
            if (i < a.size()) t += a[i];
            if (i < b.size()) t += b[i];
            r[i] = (std::uint32_t)t;
            carry = t >> 32;
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
    // requires |a| >= |b|
    static std::vector<std::uint32_t> sub_mag(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
        std::vector<std::uint32_t> r = a;
        std::int64_t borrow = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            std::int64_t t = (std::int64_t)r[i] - borrow - (i < b.size() ? b[i] : 0);
            borrow = t < 0;
            r[i] = (std::uint32_t)(t + (borrow << 32));
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
    static void shl1(std::vector<std::uint32_t>& v) {
        std::uint32_t carry = 0;
        for (auto& w : v) {
            std::uint32_t nc = w >> 31;
            w = (w << 1) | carry;
            carry = nc;
        }
        if (carry) v.push_back(carry);
    }
};

}  // namespace curvint

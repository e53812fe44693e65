#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvint {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline const cplx kI{0.0, 1.0};
inline const cplx kTwoPiI{0.0, 2.0 * kPi};

// Error taxonomy mirrored by the CLI exit codes.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct check_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Neumaier-compensated accumulator, used wherever long quadrature /
// period sums feed tolerances near 1e-10.
class CompensatedSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0, comp_ = 0.0;
};

class CompensatedCSum {
  public:
    void add(cplx z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    cplx value() const { return {re_.value(), im_.value()}; }

  private:
    CompensatedSum re_, im_;
};

// Deterministic RNG (xoshiro-style); all randomized sampling in the library
// goes through this so a seed pins the run.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : s_(seed ? seed : 1) {}
    std::uint64_t next() {
        std::uint64_t x = s_;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return s_ = x;
    }
    double uniform(double a, double b) {
        return a + (b - a) * (double)(next() >> 11) / (double)(1ull << 53);
    }
    cplx in_rect(double x0, double x1, double y0, double y1) {
        return {uniform(x0, x1), uniform(y0, y1)};
    }

  private:
    std::uint64_t s_;
};

}  // namespace curvint

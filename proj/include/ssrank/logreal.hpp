#pragma once

// Nonnegative magnitudes far outside the range of double.
//
// The selection rules of the strict-singularity construction produce block
// sizes k_i with log2(k_i) growing linearly in the round index, so at the
// larger parameter points k_i is around 2^(10^7). LogReal keeps such values
// as a base-2 logarithm; Count additionally keeps the exact integer while it
// fits into 62 bits.

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace ssrank {

class LogReal {
 public:
  using Float = long double;

  constexpr LogReal() = default;  // zero

  static LogReal of(Float x) {
    if (std::isnan(x) || x < 0) {
      throw std::domain_error("LogReal::of: negative or NaN argument");
    }
    return from_log2(x == 0 ? -kInf : std::log2(x));
  }
  static constexpr LogReal from_log2(Float lg) {
    LogReal r;
    r.lg_ = lg;
    return r;
  }
  static constexpr LogReal zero() { return LogReal(); }
  static constexpr LogReal one() { return from_log2(0); }
  static constexpr LogReal pow2(Float e) { return from_log2(e); }

  constexpr Float log2() const { return lg_; }
  constexpr bool is_zero() const { return lg_ == -kInf; }
  bool is_finite() const { return std::isfinite(lg_) || is_zero(); }

  // Overflows to +inf and underflows to 0 outside the range of Float.
  Float value() const { return is_zero() ? 0 : std::exp2(lg_); }
  double to_double() const { return static_cast<double>(value()); }
  // True when the value round-trips through a normal double (or is zero).
  bool fits_double() const {
    return is_zero() || (lg_ > -1020 && lg_ < 1020);
  }

  LogReal pow(Float e) const {
    if (is_zero()) {
      if (e <= 0) throw std::domain_error("LogReal::pow: 0 to non-positive power");
      return zero();
    }
    return from_log2(lg_ * e);
  }
  LogReal inverse() const {
    if (is_zero()) throw std::domain_error("LogReal::inverse: division by zero");
    return from_log2(-lg_);
  }

  friend LogReal operator*(LogReal a, LogReal b) {
    if (a.is_zero() || b.is_zero()) return zero();
    return from_log2(a.lg_ + b.lg_);
  }
  friend LogReal operator/(LogReal a, LogReal b) { return a * b.inverse(); }
  friend LogReal operator+(LogReal a, LogReal b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const Float hi = a.lg_ > b.lg_ ? a.lg_ : b.lg_;
    const Float lo = a.lg_ > b.lg_ ? b.lg_ : a.lg_;
    return from_log2(hi + std::log2(1 + std::exp2(lo - hi)));
  }
  LogReal& operator+=(LogReal o) { return *this = *this + o; }
  LogReal& operator*=(LogReal o) { return *this = *this * o; }

  friend constexpr bool operator==(LogReal a, LogReal b) { return a.lg_ == b.lg_; }
  friend constexpr std::partial_ordering operator<=>(LogReal a, LogReal b) {
    return a.lg_ <=> b.lg_;
  }

  // a <= b up to a relative slack on the logarithm scale.
  friend bool leq_rel(LogReal a, LogReal b, Float rel) {
    if (a.is_zero()) return true;
    if (b.is_zero()) return false;
    const Float scale = std::fmax(Float(1), std::fabs(b.lg_));
    return a.lg_ <= b.lg_ + rel * scale;
  }

  std::string str() const;

 private:
  static constexpr Float kInf = std::numeric_limits<Float>::infinity();
  Float lg_ = -kInf;
};

inline std::string LogReal::str() const {
  if (fits_double()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", to_double());
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "2^%.12Le", lg_);
  return buf;
}

// A positive integer that may be astronomically large. Exact below 2^62,
// otherwise only its log2 is tracked.
class Count {
 public:
  using Float = LogReal::Float;
  static constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 62;

  constexpr Count() = default;  // zero

  static Count of(std::uint64_t n) {
    if (n >= kExactLimit) {
      Count c;
      c.lg_ = std::log2(static_cast<Float>(n));
      return c;
    }
    Count c;
    c.exact_ = n;
    c.lg_ = n == 0 ? -std::numeric_limits<Float>::infinity()
                   : std::log2(static_cast<Float>(n));
    return c;
  }
  static Count from_log2(Float lg) {
    if (lg < 61) return of(static_cast<std::uint64_t>(std::llround(std::exp2(lg))));
    Count c;
    c.lg_ = lg;
    return c;
  }

  bool is_exact() const { return exact_.has_value(); }
  std::uint64_t exact() const {
    if (!exact_) throw std::overflow_error("Count: value exceeds the exact range");
    return *exact_;
  }
  std::optional<std::uint64_t> maybe_exact() const { return exact_; }
  Float log2() const { return lg_; }
  LogReal real() const { return LogReal::from_log2(lg_); }

  Count plus(const Count& o) const {
    if (exact_ && o.exact_ && *exact_ + *o.exact_ < kExactLimit) {
      return of(*exact_ + *o.exact_);
    }
    Count c;
    c.lg_ = (real() + o.real()).log2();
    return c;
  }
  // Subtraction of a small amount; saturates on the logarithmic tier where
  // the difference is below the resolution of lg_.
  Count minus(std::uint64_t d) const {
    if (exact_) {
      if (*exact_ < d) throw std::domain_error("Count::minus: negative result");
      return of(*exact_ - d);
    }
    return *this;
  }

  friend bool operator==(const Count& a, const Count& b) {
    if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
    return a.lg_ == b.lg_;
  }
  friend std::partial_ordering operator<=>(const Count& a, const Count& b) {
    if (a.exact_ && b.exact_) return *a.exact_ <=> *b.exact_;
    return a.lg_ <=> b.lg_;
  }

  std::string str() const {
    if (exact_) return std::to_string(*exact_);
    char buf[64];
    std::snprintf(buf, sizeof buf, "2^%.12Le", lg_);
    return buf;
  }

 private:
  std::optional<std::uint64_t> exact_;
  Float lg_ = -std::numeric_limits<Float>::infinity();
};

inline Count max(const Count& a, const Count& b) { return a < b ? b : a; }

}  // namespace ssrank

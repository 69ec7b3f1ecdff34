#ifndef SPINQUANT_SCALAR_HPP
#define SPINQUANT_SCALAR_HPP

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>

namespace spinq {

/// Thrown when an exact operation has no result (division by zero, leaving the field tower).
class arithmetic_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

using Rational = mpq_class;
using Integer = mpz_class;

Rational parse_rational(const std::string &text);
/// Canonical num/den (mpq_class's two-argument constructor does not reduce).
inline Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}
std::string to_string(const Rational &q);

/// Gaussian rational a + b*i.
struct Gaussian {
  Rational re, im;

  Gaussian() = default;
  Gaussian(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  Gaussian conj() const { return {re, -im}; }
  Rational norm() const { return re * re + im * im; }

  friend Gaussian operator+(const Gaussian &a, const Gaussian &b) { return {a.re + b.re, a.im + b.im}; }
  friend Gaussian operator-(const Gaussian &a, const Gaussian &b) { return {a.re - b.re, a.im - b.im}; }
  friend Gaussian operator-(const Gaussian &a) { return {-a.re, -a.im}; }
  friend Gaussian operator*(const Gaussian &a, const Gaussian &b) {
    // real operands are the common case
    if (sgn(a.im) == 0) {
      if (sgn(b.im) == 0)
        return Gaussian(a.re * b.re);
      return {a.re * b.re, a.re * b.im};
    }
    if (sgn(b.im) == 0)
      return {a.re * b.re, a.im * b.re};
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  Gaussian &operator+=(const Gaussian &o) {
    if (sgn(o.re))
      re += o.re;
    if (sgn(o.im))
      im += o.im;
    return *this;
  }
  Gaussian &operator-=(const Gaussian &o) {
    if (sgn(o.re))
      re -= o.re;
    if (sgn(o.im))
      im -= o.im;
    return *this;
  }
  friend bool operator==(const Gaussian &a, const Gaussian &b) { return a.re == b.re && a.im == b.im; }
  Gaussian inverse() const;
};

/// Element of Q(i, sqrt2), stored as a + b*sqrt2 with a, b Gaussian rationals.
/// Components are always canonical (mpq is kept reduced), so equality is structural.
class Scalar {
public:
  Scalar() = default;
  Scalar(int v) : a_(Rational(v)) {}
  Scalar(Rational v) : a_(std::move(v)) {}
  Scalar(Gaussian a, Gaussian b = {}) : a_(std::move(a)), b_(std::move(b)) {}

  static Scalar i() { return Scalar(Gaussian(0, 1)); }
  static Scalar sqrt2() { return Scalar(Gaussian(), Gaussian(1)); }
  static Scalar frac(long num, long den) { return Scalar(spinq::frac(num, den)); }

  const Gaussian &rational_part() const { return a_; }
  const Gaussian &sqrt2_part() const { return b_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  bool is_one() const { return b_.is_zero() && a_.im == 0 && a_.re == 1; }
  bool is_rational() const { return b_.is_zero() && sgn(a_.im) == 0; }
  /// The value as a rational; throws if it has an i or sqrt2 component.
  Rational to_rational() const;

  Scalar inverse() const;
  /// Complex conjugation i -> -i (fixes sqrt2).
  Scalar conj() const { return Scalar(a_.conj(), b_.conj()); }

  Scalar &operator+=(const Scalar &o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
  }
  Scalar &operator-=(const Scalar &o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
  }
  Scalar &operator*=(const Scalar &o) { return *this = *this * o; }
  Scalar &operator/=(const Scalar &o) { return *this = *this * o.inverse(); }

  friend Scalar operator+(Scalar a, const Scalar &b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar &b) { return a -= b; }
  friend Scalar operator-(const Scalar &a) { return Scalar(-a.a_, -a.b_); }
  friend Scalar operator*(const Scalar &x, const Scalar &y);
  friend Scalar operator/(const Scalar &x, const Scalar &y) { return x * y.inverse(); }
  friend bool operator==(const Scalar &x, const Scalar &y) { return x.a_ == y.a_ && x.b_ == y.b_; }

  /// Total order on the coefficient tuple; only used for deterministic sorting.
  friend bool lex_less(const Scalar &x, const Scalar &y);

  /// Plain-text rendering, e.g. "3/4", "-I", "1/2*sqrt2", "(1 + I*sqrt2)".
  std::string str() const;
  /// True if str() needs parentheses when used as a factor.
  bool is_compound() const;

private:
  Gaussian a_, b_;
};

Scalar pow(const Scalar &x, int e);

/// Integer power of a rational (negative exponents allowed for nonzero base).
Rational pow(const Rational &x, int e);

} // namespace spinq

#endif

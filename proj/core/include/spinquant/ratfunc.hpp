#ifndef SPINQUANT_RATFUNC_HPP
#define SPINQUANT_RATFUNC_HPP

#include "spinquant/scalar.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spinq {

/// Univariate polynomial over Q(i, sqrt2) in one formal parameter (delta or lambda).
/// Coefficients are stored low degree first with no trailing zeros.
class UPoly {
public:
  UPoly() = default;
  UPoly(Scalar c);
  explicit UPoly(std::vector<Scalar> coeffs);

  /// The polynomial t.
  static UPoly variable();

  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Scalar> &coeffs() const { return c_; }
  const Scalar &lead() const { return c_.back(); }
  Scalar coeff(int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : Scalar(0); }

  Scalar eval(const Scalar &t) const;
  UPoly monic() const;

  friend UPoly operator+(const UPoly &a, const UPoly &b);
  friend UPoly operator-(const UPoly &a, const UPoly &b);
  friend UPoly operator-(const UPoly &a);
  friend UPoly operator*(const UPoly &a, const UPoly &b);
  friend bool operator==(const UPoly &a, const UPoly &b) { return a.c_ == b.c_; }

  /// Euclidean division; throws on zero divisor.
  static void divmod(const UPoly &a, const UPoly &b, UPoly &q, UPoly &r);
  /// Monic gcd (gcd(0, 0) = 0).
  static UPoly gcd(UPoly a, UPoly b);

  /// Splits into rational polynomials P0 + i P1 + sqrt2 P2 + i sqrt2 P3.
  std::vector<UPoly> rational_components() const;
  /// Distinct rational roots, ascending.
  std::vector<Rational> rational_roots() const;

  std::string str(const std::string &var) const;

private:
  void trim();
  std::vector<Scalar> c_;
};

/// Element of Q(i, sqrt2)(t): reduced fraction with monic denominator.
class RatFunc {
public:
  RatFunc() : den_(Scalar(1)) {}
  RatFunc(int c) : num_(Scalar(c)), den_(Scalar(1)) {}
  RatFunc(Scalar c) : num_(std::move(c)), den_(Scalar(1)) {}
  RatFunc(UPoly p) : num_(std::move(p)), den_(Scalar(1)) {}
  RatFunc(UPoly num, UPoly den);

  static RatFunc variable() { return RatFunc(UPoly::variable()); }

  const UPoly &num() const { return num_; }
  const UPoly &den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  /// The constant value; throws if not constant.
  Scalar constant() const;

  /// Value at t0, or nullopt at a pole.
  std::optional<Scalar> eval(const Scalar &t0) const;
  RatFunc inverse() const;

  friend RatFunc operator+(const RatFunc &a, const RatFunc &b);
  friend RatFunc operator-(const RatFunc &a, const RatFunc &b);
  friend RatFunc operator-(const RatFunc &a);
  friend RatFunc operator*(const RatFunc &a, const RatFunc &b);
  friend RatFunc operator/(const RatFunc &a, const RatFunc &b) { return a * b.inverse(); }
  friend bool operator==(const RatFunc &a, const RatFunc &b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  RatFunc &operator+=(const RatFunc &o) { return *this = *this + o; }
  RatFunc &operator-=(const RatFunc &o) { return *this = *this - o; }
  RatFunc &operator*=(const RatFunc &o) { return *this = *this * o; }

  std::string str(const std::string &var) const;

private:
  UPoly num_, den_;
};

/// Distinct rational roots of an integer-valued polynomial given by rational coefficients.
std::vector<Rational> rational_roots_of(const std::vector<Rational> &coeffs);

} // namespace spinq

#endif

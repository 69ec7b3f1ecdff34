#ifndef SPINQUANT_SYMALG_HPP
#define SPINQUANT_SYMALG_HPP

#include "spinquant/mono.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spinq {

/// Density weight a + b*delta (b = 0 for numeric weights).
struct Weight {
  Rational value = 0;
  Rational delta_coeff = 0;

  static Weight formal_delta() { return {0, 1}; }
  friend Weight operator+(const Weight &a, const Weight &b) {
    return {a.value + b.value, a.delta_coeff + b.delta_coeff};
  }
  friend bool operator==(const Weight &, const Weight &) = default;
};

class SuperSymbol;

/// Superbracket conventions on the flat supercotangent bundle.
///   {x^i, p_j} = delta^i_j,   {xi^i, xi^j} = c_odd * eta^ij,   c_odd = odd_factor / hbar.
/// With odd_factor = -i the spin components S^ij = (hbar/i) xi^i xi^j close on o(p,q), and
/// the momentum map quantizes to the Kosmann derivative with one uniform commutator sign.
struct BracketConvention {
  /// Value substituted for hbar; nullopt keeps hbar formal (tracked as an exponent).
  std::optional<Rational> hbar = Rational(1);
  Scalar odd_factor = -Scalar::i();

  static BracketConvention standard() { return {}; }
  static BracketConvention formal() { return {std::nullopt, -Scalar::i()}; }
};

/// Polynomial super-symbol sum c * x^a p^b xi^I hbar^e on T*R^n + Pi T R^n.
class SuperSymbol {
public:
  SuperSymbol() = default;
  explicit SuperSymbol(Signature sig) : sig_(sig) {}
  SuperSymbol(Signature sig, Terms<Scalar> terms, Weight w = {}) : sig_(sig), terms_(std::move(terms)), weight_(w) {}

  static SuperSymbol constant(Signature sig, const Scalar &c);
  static SuperSymbol monomial(Signature sig, const Mono &m, const Scalar &c = Scalar(1));
  static SuperSymbol x(Signature sig, int i);
  static SuperSymbol p(Signature sig, int i);
  static SuperSymbol xi(Signature sig, int i);
  /// The formal parameter hbar (one term with hbar exponent 1).
  static SuperSymbol hbar(Signature sig);

  const Signature &signature() const { return sig_; }
  const Terms<Scalar> &terms() const { return terms_; }
  Terms<Scalar> &terms() { return terms_; }
  const Weight &weight() const { return weight_; }
  SuperSymbol &set_weight(Weight w) {
    weight_ = w;
    return *this;
  }
  bool is_zero() const { return terms_.is_zero(); }

  /// Grassmann parity when all terms agree; nullopt for mixed or zero symbols.
  std::optional<int> parity() const;

  SuperSymbol &operator+=(const SuperSymbol &o);
  SuperSymbol &operator-=(const SuperSymbol &o);
  friend SuperSymbol operator+(SuperSymbol a, const SuperSymbol &b) { return a += b; }
  friend SuperSymbol operator-(SuperSymbol a, const SuperSymbol &b) { return a -= b; }
  friend SuperSymbol operator-(const SuperSymbol &a) { return a.scaled(Scalar(-1)); }
  friend SuperSymbol operator*(const Scalar &c, const SuperSymbol &s) { return s.scaled(c); }
  SuperSymbol scaled(const Scalar &c) const;

  /// Equality of values (the density weight is metadata and not compared).
  friend bool operator==(const SuperSymbol &a, const SuperSymbol &b) {
    return a.sig_ == b.sig_ && a.terms_ == b.terms_;
  }

  /// Partial derivatives; the xi-derivative is the left derivative.
  SuperSymbol dx(int i) const;
  SuperSymbol dp(int i) const;
  SuperSymbol dxi(int i) const;
  /// Right derivative in xi^i.
  SuperSymbol dxi_right(int i) const;

  /// Part of the symbol with the given p-degree.
  SuperSymbol p_homogeneous(int k) const;
  /// Replaces hbar by a rational value.
  SuperSymbol specialize_hbar(const Rational &h) const;

  /// Canonical rendering, e.g. "x1^2*p1 + 1/2*I*xi1*xi2". Zero renders as "0".
  std::string str() const;

private:
  Signature sig_;
  Terms<Scalar> terms_;
  Weight weight_;
};

/// Grassmann-commutative product; weights add.
SuperSymbol mul(const SuperSymbol &s, const SuperSymbol &t);
inline SuperSymbol operator*(const SuperSymbol &s, const SuperSymbol &t) { return mul(s, t); }
SuperSymbol power(const SuperSymbol &s, int e);

/// Product of monomials: writes the result and returns the sign (0 if xi^I xi^J = 0).
int mono_mul(const Mono &a, const Mono &b, Mono &out);

/// Even/odd Poisson superbracket.
SuperSymbol superbracket(const SuperSymbol &s, const SuperSymbol &t,
                         const BracketConvention &conv = BracketConvention::standard());

/// S^ij = (hbar/i) xi^i xi^j (0-based indices).
SuperSymbol spin_tensor(int i, int j, Signature sig, const BracketConvention &conv = BracketConvention::standard());

enum class NamedSymbol { Delta, R };
/// Delta = p_i xi^i, R = eta^ij p_i p_j.
SuperSymbol named_symbol(NamedSymbol name, Signature sig);

/// Filtration data: maximal p-degree, set of xi-degrees present, maximal x-degree.
/// The zero symbol reports p_degree = x_degree = -1 and an empty xi-degree set.
struct Degrees {
  int p_degree = -1;
  std::vector<int> xi_degrees;
  int x_degree = -1;
};
Degrees degrees(const SuperSymbol &s);

/// Sanity check of a convention: o(p,q) closure of the S^ij against matrix commutators
/// and {Delta, Delta} = nonzero * R. Throws std::logic_error on failure.
void verify_convention(const BracketConvention &conv, Signature sig);

/// Renders the monomial part of a term ("x1^2*p1*xi2*hbar"); empty for the unit monomial.
std::string render_mono(const Mono &m, const char *pname = "p", const char *xiname = "xi");
/// Renders a list of (monomial, coefficient) terms.
std::string render_terms(const Terms<Scalar> &t, const char *pname = "p", const char *xiname = "xi");

} // namespace spinq

#endif

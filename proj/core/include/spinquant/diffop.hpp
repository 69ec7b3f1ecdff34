#ifndef SPINQUANT_DIFFOP_HPP
#define SPINQUANT_DIFFOP_HPP

#include "spinquant/clifford.hpp"
#include "spinquant/conformal.hpp"

namespace spinq {

/// Spinor differential operator sum c x^a gamma^I d^b (x left, gamma middle, d right) mapping
/// lambda-densities to mu-densities. Mono layout: p holds the d exponents, xi the gamma blade,
/// hbar a formal hbar power.
class SpinorOperator {
public:
  SpinorOperator() = default;
  explicit SpinorOperator(Signature sig, Rational lambda = 0, Rational mu = 0)
      : sig_(sig), lambda_(std::move(lambda)), mu_(std::move(mu)) {}
  SpinorOperator(Signature sig, Terms<Scalar> t, Rational lambda = 0, Rational mu = 0)
      : sig_(sig), t_(std::move(t)), lambda_(std::move(lambda)), mu_(std::move(mu)) {}

  static SpinorOperator identity(Signature sig, Rational lambda = 0, Rational mu = 0);
  static SpinorOperator derivative(Signature sig, int i);
  static SpinorOperator gamma(Signature sig, int i);
  /// Multiplication by an x-only symbol.
  static SpinorOperator multiplication(const SuperSymbol &f);
  /// gamma^i d_i with the given weights.
  static SpinorOperator dirac(Signature sig, Rational lambda = 0, Rational mu = 0);

  const Signature &signature() const { return sig_; }
  const Terms<Scalar> &terms() const { return t_; }
  const Rational &lambda() const { return lambda_; }
  const Rational &mu() const { return mu_; }
  SpinorOperator with_weights(Rational lambda, Rational mu) const { return {sig_, t_, lambda, mu}; }
  bool is_zero() const { return t_.is_zero(); }
  /// Highest derivative order; -1 for the zero operator.
  int order() const;

  SpinorOperator &operator+=(const SpinorOperator &o);
  SpinorOperator &operator-=(const SpinorOperator &o);
  friend SpinorOperator operator+(SpinorOperator a, const SpinorOperator &b) { return a += b; }
  friend SpinorOperator operator-(SpinorOperator a, const SpinorOperator &b) { return a -= b; }
  SpinorOperator scaled(const Scalar &c) const { return {sig_, t_.scaled(c), lambda_, mu_}; }
  /// Compares values; weights are metadata.
  friend bool operator==(const SpinorOperator &a, const SpinorOperator &b) {
    return a.sig_ == b.sig_ && a.t_ == b.t_;
  }

  /// e.g. "x1*d2 - x2*d1 + 1/2*gamma1*gamma2".
  std::string str() const;

private:
  Signature sig_;
  Terms<Scalar> t_;
  Rational lambda_ = 0, mu_ = 0;
};

/// Composition of raw operator terms (no weight bookkeeping).
Terms<Scalar> compose_terms(Signature sig, const Terms<Scalar> &a, const Terms<Scalar> &b);

/// A o B; requires B's target weight to equal A's source weight.
SpinorOperator compose(const SpinorOperator &a, const SpinorOperator &b);
inline SpinorOperator operator*(const SpinorOperator &a, const SpinorOperator &b) { return compose(a, b); }

/// Kosmann Lie derivative L^lambda_X = X^i d_i + (1/4) d_[i X_j] gamma^i gamma^j + lambda Div(X).
SpinorOperator kosmann(const VectorField &X, Signature sig, const Rational &lambda = 0);
inline SpinorOperator kosmann(const ConfGenerator &X, Signature sig, const Rational &lambda = 0) {
  return kosmann(X.field, sig, lambda);
}

/// L_X D = L^mu_X o D - D o L^lambda_X with (lambda, mu) read from D.
SpinorOperator adjoint_action(const ConfGenerator &X, const SpinorOperator &D);

/// D^(lambda, lambda + delta) as a module: base is the commutator with L^lambda_X and the
/// weight part is left multiplication by Div(X).
class OperatorModule : public ModuleAction {
public:
  OperatorModule(Signature sig, Rational lambda)
      : sig_(sig), lambda_(std::move(lambda)), cache_(std::make_shared<Cache>()) {}
  Signature signature() const override { return sig_; }
  const Rational &lambda() const { return lambda_; }
  Terms<Scalar> base(const ConfGenerator &X, const Terms<Scalar> &v) const override;
  Terms<Scalar> weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const override;

private:
  // Kosmann derivatives and divergences per field
  struct Cache {
    std::mutex mu;
    std::deque<std::pair<VectorField, std::pair<Terms<Scalar>, Terms<Scalar>>>> entries;
  };
  const std::pair<Terms<Scalar>, Terms<Scalar>> &lookup(const VectorField &X) const;

  Signature sig_;
  Rational lambda_;
  std::shared_ptr<Cache> cache_;
};

/// Baseline ordering map: c x^a p^b xi^I -> c x^a (gamma^I / sqrt2^|I|) (hbar/i)^|b| d^b.
SpinorOperator normal_order(const SuperSymbol &s, const BracketConvention &conv = BracketConvention::standard());
/// Exact inverse of normal_order.
SuperSymbol full_symbol(const SpinorOperator &D, const BracketConvention &conv = BracketConvention::standard());
/// Top p-degree part of the full symbol.
SuperSymbol principal_symbol(const SpinorOperator &D,
                             const BracketConvention &conv = BracketConvention::standard());

/// Quantization of a single coordinate generator x^i, p_i or xi^i; anything else is rejected.
SpinorOperator quantize_generator(const SuperSymbol &v, const BracketConvention &conv = BracketConvention::standard());

} // namespace spinq

#endif

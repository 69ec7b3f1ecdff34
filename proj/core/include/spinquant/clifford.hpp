#ifndef SPINQUANT_CLIFFORD_HPP
#define SPINQUANT_CLIFFORD_HPP

#include "spinquant/mono.hpp"

#include <map>
#include <string>
#include <vector>

namespace spinq {

/// gamma^I gamma^J for orthonormal blades (bitmasks). Writes the product blade and returns
/// its sign; the relation is gamma^i gamma^j + gamma^j gamma^i = 2 eta^ij.
int blade_mul(std::uint16_t a, std::uint16_t b, Signature sig, std::uint16_t &out);

/// Element of Cl(R^n, eta) complexified over Q(i, sqrt2): sum c_I gamma^I, where gamma^I is the
/// ordered product gamma^{i1} ... gamma^{ik}, i1 < ... < ik (equal to the antisymmetrized product).
class CliffordElement {
public:
  CliffordElement() = default;
  explicit CliffordElement(Signature sig) : sig_(sig) {}

  static CliffordElement scalar(Signature sig, const Scalar &c);
  static CliffordElement blade(Signature sig, std::uint16_t mask, const Scalar &c = Scalar(1));
  static CliffordElement gamma(Signature sig, int i);

  const Signature &signature() const { return sig_; }
  const std::map<std::uint16_t, Scalar> &terms() const { return t_; }
  Scalar coeff(std::uint16_t mask) const;
  bool is_zero() const { return t_.empty(); }

  void add(std::uint16_t mask, const Scalar &c);
  CliffordElement &operator+=(const CliffordElement &o);
  CliffordElement &operator-=(const CliffordElement &o);
  friend CliffordElement operator+(CliffordElement a, const CliffordElement &b) { return a += b; }
  friend CliffordElement operator-(CliffordElement a, const CliffordElement &b) { return a -= b; }
  CliffordElement scaled(const Scalar &c) const;
  friend bool operator==(const CliffordElement &a, const CliffordElement &b) {
    return a.sig_ == b.sig_ && a.t_ == b.t_;
  }

  /// e.g. "1/2*gamma1*gamma2 + I".
  std::string str() const;

private:
  Signature sig_;
  std::map<std::uint16_t, Scalar> t_;
};

/// Clifford product; throws std::invalid_argument on signature mismatch.
CliffordElement cliff_mul(const CliffordElement &a, const CliffordElement &b);
inline CliffordElement operator*(const CliffordElement &a, const CliffordElement &b) { return cliff_mul(a, b); }

using Matrix = std::vector<std::vector<Scalar>>;

Matrix identity_matrix(std::size_t d);
Matrix matmul(const Matrix &a, const Matrix &b);
Matrix matadd(const Matrix &a, const Matrix &b, const Scalar &scale = Scalar(1));

/// Gamma matrices of size 2^(n/2) built from Pauli tensor products; a factor i is put
/// on the generators with eta = -1.
struct GammaRealization {
  Signature signature;
  std::vector<Matrix> gammas;

  std::size_t dim() const { return gammas.empty() ? 0 : gammas.front().size(); }
  Matrix realize(const CliffordElement &a) const;
};

GammaRealization gamma_matrices(Signature sig);

} // namespace spinq

#endif

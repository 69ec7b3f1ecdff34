#ifndef SPINQUANT_APPLICATIONS_HPP
#define SPINQUANT_APPLICATIONS_HPP

#include "spinquant/conformal.hpp"
#include "spinquant/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace spinq {

/// Skew-symmetric covariant tensor f = sum_{I increasing} f_I dx^I, coefficients polynomial in x.
/// Stored on increasing index sets, so antisymmetry holds by construction. Indices are 0-based.
class SkewForm {
public:
  SkewForm() = default;
  SkewForm(Signature sig, int degree);

  /// (1/k!) sum_s sign(s) T_{s(I)} for a covariant tensor given on index tuples (absent = 0).
  static SkewForm antisymmetrize(Signature sig, int degree, const std::map<std::vector<int>, SuperSymbol> &tensor);

  Signature signature() const { return sig_; }
  int degree() const { return degree_; }
  /// f_{i1..ik} for any tuple: signed stored component, 0 on repeated indices.
  SuperSymbol component(const std::vector<int> &idx) const;
  /// Sets f_idx (distinct indices, any order); the other orderings follow by antisymmetry.
  void set(const std::vector<int> &idx, const SuperSymbol &value);
  const std::map<std::uint16_t, SuperSymbol> &components() const { return c_; }

  bool is_zero() const { return c_.empty(); }
  int x_degree() const;
  SkewForm &operator+=(const SkewForm &o);
  SkewForm scaled(const Scalar &s) const;
  friend bool operator==(const SkewForm &a, const SkewForm &b) {
    return a.sig_ == b.sig_ && a.degree_ == b.degree_ && a.c_ == b.c_;
  }
  /// e.g. "x1*dx1^dx2 + dx2^dx3"
  std::string str() const;

private:
  Signature sig_{1, 0};
  int degree_ = 0;
  std::map<std::uint16_t, SuperSymbol> c_; // nonzero only
};

/// P_f = f^i_{j1..j(k-1)} xi^{j1}...xi^{j(k-1)} p_i, summed over all index tuples, first index
/// raised with eta. Degree (1, k-1). Throws for k = 0.
SuperSymbol symbol_of_form(const SkewForm &f);

enum class KYClass { KillingYano, ConformalKY, Neither };
const char *to_string(KYClass c);

/// Flat defining equations, no superization involved. With A_iJ = d_i f_J - (df)_iJ / (k+1):
/// Killing-Yano iff A = 0; conformal Killing-Yano iff A = eta_i ^ h with h = div f / (n-k+1).
KYClass ky_pde_oracle(const SkewForm &f);

/// b = {Delta, S^0(P_f)}: Killing-Yano if b = 0, conformal if b = h Delta for a polynomial
/// symbol h, Neither otherwise. `s0` must be a superization at delta = 0 covering (1, k-1).
KYClass ky_bracket_test(const SkewForm &f, const EquivariantMap &s0);
/// Same with S^0 built on demand.
KYClass ky_bracket_test(const SkewForm &f);
/// S^0 on the blocks needed for k-forms.
EquivariantMap ky_superization(Signature sig, int degree);

/// Both classifications on the space of k-forms with coefficients of x-degree <= max_x.
/// Each method's Killing-Yano and conformal Killing-Yano sets are linear subspaces, so
/// comparing them decides agreement on every form of the ansatz.
struct KYComparison {
  std::size_t ansatz_dim = 0;
  std::size_t ky_dim_pde = 0, cky_dim_pde = 0;
  std::size_t ky_dim_bracket = 0, cky_dim_bracket = 0;
  bool ky_agree = false, cky_agree = false;
  /// Per-form agreement of the two classifiers on every basis form and the witnesses.
  std::size_t forms_checked = 0, forms_agreeing = 0;
  std::vector<SkewForm> ky_witness, cky_witness, neither_witness;
  bool ok() const { return ky_agree && cky_agree && forms_checked == forms_agreeing; }
};
KYComparison compare_ky(Signature sig, int degree, int max_x = 2);

struct Invariant {
  ModuleKind module = ModuleKind::TensorSymbols;
  Signature signature;
  int k = 0;      // p-degree (operator order)
  int kappa = -1; // xi-degree (Clifford degree); -1 when mixed
  Rational delta, lambda, mu;
  Terms<Scalar> element;
  /// Odd under the reflection x1 -> -x1, e.g. a Hodge dual of an even invariant. The
  /// generators only see the identity component of O(p,q), so these show up too.
  bool pseudo = false;
  std::string str() const;
};

/// x-free elements killed by every generator, per p-degree k <= max_p. Dilation fixes
/// delta = k/n; for operators lambda is solved for, mu = lambda + delta. Each kernel is split
/// into reflection-even and reflection-odd parts.
std::vector<Invariant> invariant_scan(Signature sig, ModuleKind kind, int max_p = 3, int max_xi = -1);

/// gamma^i d_i with weights ((n-1)/2n, (n+1)/2n).
SpinorOperator dirac(Signature sig);

} // namespace spinq

#endif

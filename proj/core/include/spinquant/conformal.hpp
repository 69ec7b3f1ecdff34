#ifndef SPINQUANT_CONFORMAL_HPP
#define SPINQUANT_CONFORMAL_HPP

#include "spinquant/ratfunc.hpp"
#include "spinquant/symalg.hpp"

#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace spinq {

/// Polynomial vector field on R^n: upper-index components X^i as x-only symbols.
using VectorField = std::vector<SuperSymbol>;

enum class GeneratorKind { Translation, Rotation, Dilation, Special };

/// Basis element of o(p+1,q+1) realized as a conformal Killing field of (R^n, eta):
///   translation(i) = d_i, rotation(i,j) = x_i d_j - x_j d_i, dilation = x^i d_i,
///   special(i) = (x.x) d_i - 2 x_i x^j d_j        (indices lowered with eta).
struct ConfGenerator {
  GeneratorKind kind;
  int i = -1, j = -1;
  VectorField field;

  std::string name() const;
};

std::vector<ConfGenerator> generators(Signature sig);
ConfGenerator translation(Signature sig, int i);
ConfGenerator rotation(Signature sig, int i, int j);
ConfGenerator dilation(Signature sig);
ConfGenerator special(Signature sig, int i);

/// Div(X) = d_i X^i.
SuperSymbol div(const VectorField &X);
/// True iff d_(i X_j) - (2/n) Div(X) eta_ij vanishes identically.
bool is_conformal_killing(const VectorField &X, Signature sig);
/// Lie bracket of vector fields [X, Y]^i = X^j d_j Y^i - Y^j d_j X^i.
VectorField vf_bracket(const VectorField &X, const VectorField &Y);
/// Coordinates of a conformal Killing field in the generators() basis; throws if outside the span.
std::vector<Scalar> decompose(const VectorField &X, Signature sig);

/// Structure constants: [g_a, g_b] = sum_c f[a][b][c] g_c for the generators() basis.
std::vector<std::vector<std::vector<Scalar>>> structure_constants(Signature sig);
/// Killing form K_ab = tr(ad_a ad_b) of the generators() basis.
std::vector<std::vector<Scalar>> killing_form(Signature sig);
/// Inverse of the Killing form; throws if degenerate.
std::vector<std::vector<Scalar>> inverse_killing_form(Signature sig);

/// B_ij = (d_i X_j - d_j X_i)/2, the antisymmetrized derivative (lower indices).
std::vector<std::vector<SuperSymbol>> antisym_derivative(const VectorField &X, Signature sig);

/// Super momentum J_X = p_k X^k + (1/2) B_ij S^ij. Throws for non conformal Killing X.
SuperSymbol moment(const VectorField &X, Signature sig, const BracketConvention &conv = BracketConvention::standard());

enum class ModuleKind { TensorSymbols, HamiltonianSymbols, SpinorOperators };
const char *to_string(ModuleKind k);

/// Module tag with the density weights. For spinor operators delta = mu - lambda.
struct ModuleTag {
  ModuleKind kind = ModuleKind::TensorSymbols;
  Rational delta = 0;
  Rational lambda = 0;
  Rational mu() const { return lambda + delta; }
};

/// An o(p+1,q+1)-module on polynomial terms whose action is affine in the weight delta:
///   L_X v = base(X, v) + delta * weight_part(X, v).
class ModuleAction {
public:
  virtual ~ModuleAction() = default;
  virtual Signature signature() const = 0;
  virtual Terms<Scalar> base(const ConfGenerator &X, const Terms<Scalar> &v) const = 0;
  virtual Terms<Scalar> weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const = 0;

  Terms<Scalar> apply(const ConfGenerator &X, const Scalar &delta, const Terms<Scalar> &v) const {
    Terms<Scalar> out = base(X, v);
    if (!delta.is_zero())
      out.add(weight_part(X, v), delta);
    return out;
  }
};

/// Tensorial symbols T^delta[xi]: natural action on weighted tensors, the xi^i transforming
/// as dx^i, component of xi-degree k carrying density weight delta - k/n.
class TensorModule : public ModuleAction {
public:
  explicit TensorModule(Signature sig) : sig_(sig) {}
  Signature signature() const override { return sig_; }
  Terms<Scalar> base(const ConfGenerator &X, const Terms<Scalar> &v) const override;
  Terms<Scalar> weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const override;

private:
  Signature sig_;
};

/// Hamiltonian symbols S^delta[xi]: L_X s = {s, J_X} + delta Div(X) s.
class HamiltonianModule : public ModuleAction {
public:
  explicit HamiltonianModule(Signature sig, BracketConvention conv = BracketConvention::standard())
      : sig_(sig), conv_(conv), cache_(std::make_shared<Cache>()) {}
  Signature signature() const override { return sig_; }
  Terms<Scalar> base(const ConfGenerator &X, const Terms<Scalar> &v) const override;
  Terms<Scalar> weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const override;

private:
  // moments and divergences already computed, keyed by the field
  struct Cache {
    std::mutex mu;
    std::deque<std::pair<VectorField, std::pair<SuperSymbol, SuperSymbol>>> entries; // stable references
  };
  const std::pair<SuperSymbol, SuperSymbol> &lookup(const VectorField &X) const;

  Signature sig_;
  BracketConvention conv_;
  std::shared_ptr<Cache> cache_;
};

/// Symbol-level conveniences for the two symbol modules.
SuperSymbol action_T(const ConfGenerator &X, const Scalar &delta, const SuperSymbol &t);
SuperSymbol action_S(const ConfGenerator &X, const Scalar &delta, const SuperSymbol &s,
                     const BracketConvention &conv = BracketConvention::standard());

/// Thrown when an operator applied on a bounded subspace leaves it.
class bound_error : public std::runtime_error {
public:
  bound_error(const std::string &what, int required) : std::runtime_error(what), required_bound(required) {}
  int required_bound;
};

/// Casimir operator sum K^ab L_a L_b on the span of `basis`, with entries polynomial in
/// delta. Column c is the image of basis[c].
struct CasimirMatrix {
  std::vector<Mono> basis;
  std::vector<std::vector<UPoly>> entries; // entries[row][col]
};

/// Casimir images of one vector: coefficients of delta^0, delta^1, delta^2.
std::array<Terms<Scalar>, 3> casimir_apply(const ModuleAction &module, const Terms<Scalar> &v);

/// Matrix of the Casimir on span(basis); throws bound_error if some image escapes the span.
CasimirMatrix casimir(const ModuleAction &module, const std::vector<Mono> &basis);

} // namespace spinq

#endif

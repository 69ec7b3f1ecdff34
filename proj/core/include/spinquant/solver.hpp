#ifndef SPINQUANT_SOLVER_HPP
#define SPINQUANT_SOLVER_HPP

#include "spinquant/diffop.hpp"
#include "spinquant/linsolve.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace spinq {

/// Pairwise O(p,q)-invariant contractions of p, xi (multiplications) and d/dx, d/dp, d/dxi.
/// Euler operators p.d/dp and xi.d/dxi are left out: on homogeneous inputs they are scalars.
enum class Pair : int {
  PP,     // eta^ij p_i p_j            (R)
  PXi,    // p_i xi^i                  (Delta)
  PDx,    // eta^ij p_i d/dx^j
  PDxi,   // eta^ij p_i d/dxi^j
  XiDx,   // xi^i d/dx^i
  XiDp,   // eta_ij xi^i d/dp_j
  DxDx,   // eta^ij d/dx^i d/dx^j
  DxDp,   // d/dx^i d/dp_i
  DxDxi,  // eta^ij d/dx^i d/dxi^j
  DpDp,   // eta_ij d/dp_i d/dp_j
  DpDxi,  // d/dp_i d/dxi^i
  Count
};
inline constexpr int kPairKinds = static_cast<int>(Pair::Count);
const char *to_string(Pair p);

/// Normal-ordered product of contractions: all multiplications to the left of all derivatives,
/// factors in Pair order. Commutes with translations and rotations by construction.
struct CorrectionOp {
  std::array<std::uint8_t, kPairKinds> count{};

  int mult_p() const;
  int mult_xi() const;
  int der_x() const;
  int der_p() const;
  int der_xi() const;
  /// p-degree change and xi-degree change on a symbol.
  int p_shift() const { return mult_p() - der_p(); }
  int xi_shift() const { return mult_xi() - der_xi(); }
  bool is_identity() const;

  Terms<Scalar> apply(Signature sig, const Terms<Scalar> &t) const;
  /// e.g. "(xi.dx)*(dp.dxi)"; "id" for the empty product.
  std::string str() const;
  friend auto operator<=>(const CorrectionOp &, const CorrectionOp &) = default;
};

enum class MapKind { Superization, Quantization };
const char *to_string(MapKind k);

/// c0 + c1 t in the formal parameter t.
struct Affine {
  Rational c0 = 0, c1 = 0;
  bool is_constant() const { return c1 == 0; }
  Scalar at(const Scalar &t) const { return Scalar(c0) + Scalar(c1) * t; }
  static Affine constant(Rational v) { return {std::move(v), 0}; }
  static Affine formal() { return {0, 1}; }
};

/// What to build. delta = mu - lambda; lambda only matters for quantization.
struct MapSpec {
  MapKind kind = MapKind::Superization;
  Signature signature{3, 0};
  Affine delta = Affine::formal();
  Affine lambda = Affine::constant(0);
  int max_p = 2;
  int max_xi = -1; // -1: min(n, 3)
  BracketConvention conv = BracketConvention::standard();
  /// Impose equivariance under every generator on more inputs (cross-check, slower).
  bool all_generators = false;

  bool formal() const { return !delta.is_constant() || (kind == MapKind::Quantization && !lambda.is_constant()); }
  int xi_cap() const;
};

/// Solution of one (p-degree, xi-degree) input block.
struct BlockSolution {
  int k = 0, kappa = 0;
  std::vector<CorrectionOp> ops;
  std::vector<RatFunc> coeffs;
  SolveStatus status = SolveStatus::Unique; // generic status (or at the fixed parameters)
  std::vector<SingularPoint> singular;
  std::vector<Rational> solvable_at;
  /// Generic kernel directions when underdetermined.
  std::vector<std::vector<RatFunc>> nullspace;
  std::size_t equations = 0;
};

struct EquivariantMap {
  MapSpec spec;
  std::vector<BlockSolution> blocks;

  /// True when every block is uniquely solvable generically (or at the fixed parameters).
  bool valid() const;
  /// Union of singular points, ascending; a value failing existence anywhere is reported as such.
  std::vector<SingularPoint> singular() const;
  const BlockSolution *block(int k, int kappa) const;
};

/// Monomials x^a p^b xi^I with |a| <= max_x, |b| = k, |I| = kappa.
std::vector<Mono> graded_monomials(Signature sig, int max_x, int k, int kappa);

/// Candidate corrections for an input block, after dropping linearly dependent ones.
std::vector<CorrectionOp> correction_basis(Signature sig, MapKind kind, int k, int kappa);

EquivariantMap build_superization(Signature sig, Affine delta, int max_p = 2, int max_xi = -1,
                                  const BracketConvention &conv = BracketConvention::standard());
EquivariantMap build_quantization(Signature sig, Affine lambda, Affine delta, int max_p = 2, int max_xi = -1,
                                  const BracketConvention &conv = BracketConvention::standard());
EquivariantMap build_map(const MapSpec &spec);

/// Thrown by apply when the input is outside the constructed blocks or the map is singular there.
class unavailable_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Applies a superization; `t` is the value of the formal parameter (ignored for fixed maps).
SuperSymbol apply_superization(const EquivariantMap &map, const SuperSymbol &s, const Scalar &t = Scalar(0));
SpinorOperator apply_quantization(const EquivariantMap &map, const SuperSymbol &s, const Scalar &t = Scalar(0));

struct EquivarianceReport {
  bool ok = true;
  std::size_t checks = 0;       // (generator, basis symbol) pairs compared
  std::vector<Rational> points; // parameter values used
  std::string failure;          // first mismatch, if any
};

/// Compares L_X o M and M o L_X exactly for every generator X on every basis symbol of each
/// requested block with x-degree up to k + extra_x, at parameter value t.
EquivarianceReport verify_equivariance(const EquivariantMap &map, const Rational &t, int extra_x = 1);
/// Same identity with coefficients in Q(i, sqrt2)(t), checked symbolically; `points` stays empty.
EquivarianceReport verify_equivariance_formal(const EquivariantMap &map, int extra_x = 1);

struct Resonance {
  Rational delta;
  Failure failure;
  int k = 0, kappa = 0; // first offending block
};

/// Singular values of delta with formal delta (and lambda = lambda0 + lambda1 delta for Q).
std::vector<Resonance> resonances(Signature sig, MapKind kind, int max_p = 2, int max_xi = -1,
                                  Affine lambda = Affine::constant(0));
/// Same, read off an already built formal map.
std::vector<Resonance> resonances(const EquivariantMap &map);

} // namespace spinq

#endif

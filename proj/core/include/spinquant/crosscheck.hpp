#ifndef SPINQUANT_CROSSCHECK_HPP
#define SPINQUANT_CROSSCHECK_HPP

#include "spinquant/solver.hpp"

#include <string>
#include <vector>

namespace spinq {

/// Joint eigenspace of the Casimir on the x-free part of one graded component of T^delta[xi]
/// (for n = 4 also of the squared Pfaffian of o(p,q)). The Casimir of T acts fibrewise, so
/// a piece times polynomials in x is an eigenspace of the whole component.
struct CasimirPiece {
  int k = 0, kappa = 0;
  std::size_t dim = 0;
  Rational c0, c1, c2; // eigenvalue c0 + c1 delta + c2 delta^2
  /// |mu + rho| coordinates of the o(p,q) highest weight, descending.
  std::vector<Rational> levi;

  Rational eigenvalue(const Rational &delta) const;
  /// Infinitesimal character up to signed permutations: |n delta - n/2 - k| and the levi
  /// coordinates, sorted.
  std::vector<Rational> character(int n, const Rational &delta) const;
  std::string str() const;
};

/// Equal Casimir eigenvalues of a piece and of a piece of lower p-degree.
struct Coincidence {
  Rational delta;
  std::size_t from = 0, to = 0; // indices into CasimirReport::pieces
  bool connected = false;       // some admissible correction maps `from` into `to`
  bool same_character = false;  // all Casimirs agree, not just the quadratic one
  bool degenerate() const { return connected && same_character; }
};

struct CasimirReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::size_t central_checks = 0;     // (module, generator, basis symbol)
  std::size_t fibrewise_checks = 0;   // C_T(x^a v) = x^a C_T(v)
  std::size_t conjugation_checks = 0; // C o M = M o C at conjugation_delta
  Rational conjugation_delta;
  std::vector<CasimirPiece> pieces;
  std::vector<Coincidence> coincidences;
  std::vector<Rational> predicted; // degenerate coincidences, ascending
  std::vector<Resonance> resonances;
  std::vector<Rational> missing; // resonances not predicted
  std::vector<Rational> extra;   // predicted values that are not resonances
  double seconds = 0;
};

struct CasimirOptions {
  int max_p = 2;
  int max_xi = -1;
  Rational lambda = 0;            // quantization only
  int central_x = 1;              // x-degree of the symbols used for the centrality check
  bool conjugation = true;
};

/// Independent check of the resonances: Casimir spectra of T^delta[xi] per graded component,
/// coincidences between a piece and a lower piece, centrality of the Casimirs, and C o M = M o C
/// for the constructed map M at a non-resonant delta. n <= 4.
CasimirReport casimir_crosscheck(Signature sig, MapKind kind, const CasimirOptions &opt = {});

} // namespace spinq

#endif

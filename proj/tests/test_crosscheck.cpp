#include "doctest.h"

#include "spinquant/crosscheck.hpp"

#include <map>

using namespace spinq;

namespace {

const Signature E3{3, 0}, L3{2, 1}, E2{2, 0};

std::vector<Rational> deltas(const std::vector<Resonance> &rs) {
  std::vector<Rational> out;
  for (const auto &r : rs)
    out.push_back(r.delta);
  return out;
}

std::vector<Rational> rs(std::initializer_list<std::pair<long, long>> v) {
  std::vector<Rational> out;
  for (auto [a, b] : v)
    out.push_back(frac(a, b));
  return out;
}

// eigenvalues at delta = 0 of one component, ascending
std::vector<Rational> spectrum(const CasimirReport &r, int k, int kappa) {
  std::vector<Rational> out;
  for (const auto &p : r.pieces)
    if (p.k == k && p.kappa == kappa)
      out.push_back(p.c0);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("Casimir spectrum of tensorial symbols, n = 3") {
  CasimirOptions opt;
  opt.central_x = 0;
  opt.conjugation = false;
  auto r = casimir_crosscheck(E3, MapKind::Superization, opt);
  CHECK_MESSAGE(r.ok, (r.failures.empty() ? "" : r.failures[0]));
  // trace, antisymmetric and traceless symmetric parts of p xi
  CHECK(spectrum(r, 1, 1) == rs({{2, 3}, {1, 1}, {5, 3}}));
  // R and traceless p_i p_j
  CHECK(spectrum(r, 2, 0) == rs({{5, 3}, {8, 3}}));
  CHECK(spectrum(r, 0, 0) == rs({{0, 1}}));
  CHECK(spectrum(r, 1, 0) == rs({{1, 1}}));
  std::map<std::pair<int, int>, std::size_t> dims;
  for (const auto &p : r.pieces) {
    dims[{p.k, p.kappa}] += p.dim;
    CHECK(p.c2 == frac(3, 2));
    CHECK(p.c1 == -(frac(3, 2) + p.k));
  }
  CHECK(dims[{1, 1}] == 9);
  CHECK(dims[{2, 1}] == 18);
  // highest weights l + 1/2 of o(3)
  for (const auto &p : r.pieces)
    if (p.k == 2 && p.kappa == 0)
      CHECK(p.levi == std::vector<Rational>{p.c0 == frac(5, 3) ? frac(1, 2) : frac(5, 2)});
}

TEST_CASE("quadratic Casimir coincidences are not enough") {
  CasimirOptions opt;
  opt.central_x = 0;
  opt.conjugation = false;
  auto r = casimir_crosscheck(E3, MapKind::Superization, opt);
  // traceless p_i p_j against xi^i xi^j at 7/6: connected, same quadratic eigenvalue,
  // different infinitesimal character
  bool seen = false;
  for (const auto &c : r.coincidences) {
    const auto &a = r.pieces[c.from], &b = r.pieces[c.to];
    if (c.delta == frac(7, 6) && a.k == 2 && a.kappa == 0 && b.k == 0 && b.kappa == 2) {
      seen = true;
      CHECK(a.eigenvalue(c.delta) == b.eigenvalue(c.delta));
      CHECK(c.connected);
      CHECK_FALSE(c.same_character);
    }
    if (c.delta == 0)
      CHECK_FALSE(c.degenerate());
  }
  CHECK(seen);
}

TEST_CASE("Casimir coincidences locate the resonances") {
  const auto expect = rs({{1, 3}, {2, 3}, {5, 6}, {1, 1}, {4, 3}, {5, 3}, {2, 1}});
  SUBCASE("superization, Euclidean, with centrality and conjugation") {
    auto r = casimir_crosscheck(E3, MapKind::Superization);
    CHECK_MESSAGE(r.ok, (r.failures.empty() ? "" : r.failures[0]));
    CHECK(r.predicted == expect);
    CHECK(deltas(r.resonances) == expect);
    CHECK(r.missing.empty());
    CHECK(r.extra.empty());
    CHECK(r.central_checks > 0);
    CHECK(r.fibrewise_checks > 0);
    CHECK(r.conjugation_checks > 0);
  }
  SUBCASE("quantization, Lorentzian") {
    CasimirOptions opt;
    opt.central_x = 0;
    opt.lambda = frac(1, 5);
    auto r = casimir_crosscheck(L3, MapKind::Quantization, opt);
    CHECK_MESSAGE(r.ok, (r.failures.empty() ? "" : r.failures[0]));
    CHECK(r.predicted == deltas(r.resonances));
    CHECK(r.conjugation_checks > 0);
  }
  SUBCASE("n = 2") {
    for (MapKind kind : {MapKind::Superization, MapKind::Quantization}) {
      auto r = casimir_crosscheck(E2, kind);
      CHECK_MESSAGE(r.ok, (r.failures.empty() ? "" : r.failures[0]));
      CHECK(r.predicted == rs({{1, 2}, {1, 1}, {3, 2}, {2, 1}, {5, 2}}));
    }
  }
}

TEST_CASE("Casimir cross-check rejects unsupported dimensions") {
  CHECK_THROWS_AS(casimir_crosscheck(Signature{5, 0}, MapKind::Superization), std::invalid_argument);
}

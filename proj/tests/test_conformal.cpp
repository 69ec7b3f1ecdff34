#include "doctest.h"

#include "spinquant/conformal.hpp"

#include <random>

using namespace spinq;

namespace {

const Signature E2{2, 0}, E3{3, 0}, L3{2, 1}, E4{4, 0}, L4{3, 1};

SuperSymbol X(Signature s, int i) { return SuperSymbol::x(s, i - 1); }
SuperSymbol P(Signature s, int i) { return SuperSymbol::p(s, i - 1); }
SuperSymbol XI(Signature s, int i) { return SuperSymbol::xi(s, i - 1); }
SuperSymbol C(Signature s, long a, long b = 1) { return SuperSymbol::constant(s, Scalar::frac(a, b)); }

ConfGenerator field_gen(const VectorField &f) { return {GeneratorKind::Dilation, -1, -1, f}; }

// All monomials x^a p^b xi^I with |a| <= dx, |b| <= dp, |I| <= dxi.
std::vector<Mono> monomials(Signature sig, int dx, int dp, int dxi, bool exact = false) {
  std::vector<Mono> out;
  const int n = sig.n();
  std::vector<std::array<std::uint8_t, kMaxDim>> xs, ps;
  auto gen = [&](auto &self, std::array<std::uint8_t, kMaxDim> cur, int pos, int left, int maxd,
                 std::vector<std::array<std::uint8_t, kMaxDim>> &dst) -> void {
    if (pos == n) {
      if (!exact || left == 0)
        dst.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[pos] = static_cast<std::uint8_t>(e);
      self(self, cur, pos + 1, left - e, maxd, dst);
    }
  };
  gen(gen, {}, 0, dx, dx, xs);
  gen(gen, {}, 0, dp, dp, ps);
  for (const auto &a : xs)
    for (const auto &b : ps)
      for (unsigned I = 0; I < (1u << n); ++I) {
        int k = std::popcount(I);
        if (exact ? k != dxi : k > dxi)
          continue;
        Mono m;
        m.x = a;
        m.p = b;
        m.xi = static_cast<std::uint16_t>(I);
        out.push_back(m);
      }
  return out;
}

Terms<Scalar> unit(const Mono &m) {
  Terms<Scalar> t;
  t.add(m, Scalar(1));
  return t;
}

void check_representation(const ModuleAction &mod, const std::vector<Mono> &sample, const Scalar &delta) {
  auto gens = generators(mod.signature());
  for (const auto &m : sample) {
    auto v = unit(m);
    for (std::size_t a = 0; a < gens.size(); ++a)
      for (std::size_t b = a + 1; b < gens.size(); ++b) {
        auto lhs = mod.apply(gens[a], delta, mod.apply(gens[b], delta, v));
        lhs -= mod.apply(gens[b], delta, mod.apply(gens[a], delta, v));
        auto rhs = mod.apply(field_gen(vf_bracket(gens[a].field, gens[b].field)), delta, v);
        CHECK(lhs == rhs);
      }
  }
}

Terms<Scalar> casimir_at(const ModuleAction &mod, const Scalar &delta, const Terms<Scalar> &v) {
  auto parts = casimir_apply(mod, v);
  Terms<Scalar> out = parts[0];
  out.add(parts[1], delta);
  out.add(parts[2], delta * delta);
  return out;
}

} // namespace

TEST_CASE("generators") {
  CHECK(generators(E3).size() == 10);
  CHECK(generators(L4).size() == 15);
  auto d = dilation(E3);
  for (int i = 0; i < 3; ++i)
    CHECK(d.field[i] == SuperSymbol::x(E3, i));
  // special(1), (2,0): (x1^2 + x2^2) d1 - 2 x1 (x1 d1 + x2 d2)
  auto k1 = special(E2, 0);
  CHECK(k1.field[0] == X(E2, 2) * X(E2, 2) - X(E2, 1) * X(E2, 1));
  CHECK(k1.field[1] == (X(E2, 1) * X(E2, 2)).scaled(Scalar(-2)));
  CHECK(rotation(E3, 0, 1).name() == "M12");
  CHECK(special(E3, 2).name() == "K3");
}

TEST_CASE("divergence and conformal Killing check") {
  CHECK(div(translation(E3, 1).field).is_zero());
  CHECK(div(dilation(E3).field) == C(E3, 3));
  for (Signature s : {E3, L3, L4})
    for (int i = 0; i < s.n(); ++i)
      CHECK(div(special(s, i).field) == SuperSymbol::x(s, i).scaled(Scalar(-2 * s.n() * s.eta(i))));
  for (Signature s : {E2, E3, L3, E4, L4})
    for (const auto &g : generators(s))
      CHECK(is_conformal_killing(g.field, s));
  VectorField shear{X(E2, 2), C(E2, 0)};
  CHECK_FALSE(is_conformal_killing(shear, E2));
  VectorField quad{X(E3, 1) * X(E3, 1), C(E3, 0), C(E3, 0)};
  CHECK_FALSE(is_conformal_killing(quad, E3));
}

TEST_CASE("structure constants and Killing form") {
  for (Signature s : {E2, E3, L3, E4}) {
    auto gens = generators(s);
    const std::size_t N = gens.size();
    auto f = structure_constants(s);
    // [P_i, K_i] = -2 eta_ii D, hand expansion of the bracket of d_i with K_i
    for (int i = 0; i < s.n(); ++i) {
      auto c = decompose(vf_bracket(translation(s, i).field, special(s, i).field), s);
      for (std::size_t a = 0; a < N; ++a)
        CHECK(c[a] == (gens[a].kind == GeneratorKind::Dilation ? Scalar(-2 * s.eta(i)) : Scalar(0)));
    }
    auto K = killing_form(s);
    auto Kinv = inverse_killing_form(s);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) {
        Scalar e(0);
        for (std::size_t c = 0; c < N; ++c)
          e += K[a][c] * Kinv[c][b];
        CHECK(e == Scalar(a == b ? 1 : 0));
        // invariance: K([a,b],c) + K(b,[a,c]) = 0
        for (std::size_t c = 0; c < N; ++c) {
          Scalar inv(0);
          for (std::size_t d = 0; d < N; ++d)
            inv += f[a][b][d] * K[d][c] + K[b][d] * f[a][c][d];
          CHECK(inv.is_zero());
        }
      }
  }
  VectorField quad{X(E2, 1) * X(E2, 1) * X(E2, 1), C(E2, 0)};
  CHECK_THROWS_AS(decompose(quad, E2), std::invalid_argument);
}

TEST_CASE("moment map") {
  CHECK(moment(translation(E3, 0).field, E3) == P(E3, 1));
  CHECK(moment(dilation(E3).field, E3) == X(E3, 1) * P(E3, 1) + X(E3, 2) * P(E3, 2) + X(E3, 3) * P(E3, 3));
  // x1 d2 - x2 d1: p2 x1 - p1 x2 plus B_12 S^12 with B_12 = 1
  CHECK(moment(rotation(E3, 0, 1).field, E3) ==
        X(E3, 1) * P(E3, 2) - X(E3, 2) * P(E3, 1) + spin_tensor(0, 1, E3));
  // Lorentzian: x_3 = -x^3, so X = x1 d3 + x3 d1 and B_13 = -1
  CHECK(moment(rotation(L3, 0, 2).field, L3) ==
        X(L3, 1) * P(L3, 3) + X(L3, 3) * P(L3, 1) - spin_tensor(0, 2, L3));
  VectorField shear{X(E2, 2), C(E2, 0)};
  CHECK_THROWS_AS(moment(shear, E2), std::invalid_argument);
}

TEST_CASE("moment map reverses the vector field bracket") {
  // {J_X, J_Y} = -J_[X,Y] with {x, p} = 1 and [X,Y] = X(Y) - Y(X)
  for (auto conv : {BracketConvention::standard(), BracketConvention::formal()})
    for (Signature s : {E2, Signature(1, 1), E3, L3, E4, L4}) {
      auto gens = generators(s);
      for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a + 1; b < gens.size(); ++b) {
          auto lhs = superbracket(moment(gens[a].field, s, conv), moment(gens[b].field, s, conv), conv);
          auto rhs = moment(vf_bracket(gens[a].field, gens[b].field), s, conv);
          CHECK(lhs == -rhs);
        }
    }
}

TEST_CASE("module actions, hand examples") {
  Scalar d = Scalar::frac(2, 5);
  // {p1, x.p} = -p1, plus n delta p1
  CHECK(action_S(dilation(E3), d, P(E3, 1)) == P(E3, 1).scaled(Scalar(-1) + Scalar(3) * d));
  CHECK(action_S(translation(E3, 0), d, P(E3, 2)).is_zero());
  CHECK(action_T(rotation(E3, 0, 1), d, XI(E3, 1)) == -XI(E3, 2));
  CHECK(action_S(rotation(E3, 0, 1), d, XI(E3, 1)) == -XI(E3, 2));
  // dilation on xi1: Jacobian gives xi1, weight (delta - 1/n) n
  CHECK(action_T(dilation(E3), d, XI(E3, 1)) == XI(E3, 1).scaled(Scalar(3) * d));
  CHECK(action_T(translation(E3, 2), d, X(E3, 3) * P(E3, 1)) == P(E3, 1));
}

TEST_CASE("conformal invariants are killed by special conformal generators") {
  for (Signature s : {E3, L3, E4, L4}) {
    const int n = s.n();
    SuperSymbol Dl = named_symbol(NamedSymbol::Delta, s), R = named_symbol(NamedSymbol::R, s);
    for (int sdeg = 0; sdeg <= 1; ++sdeg)
      for (int a = 0; a <= 1; ++a) {
        SuperSymbol t = power(Dl, a) * power(R, sdeg);
        Scalar delta = Scalar::frac(2 * sdeg + a, n);
        for (const auto &g : generators(s))
          if (g.kind == GeneratorKind::Special)
            CHECK(action_T(g, delta, t).is_zero());
        if (a == 1)
          for (const auto &g : generators(s))
            if (g.kind == GeneratorKind::Special)
              CHECK(action_S(g, delta, t).is_zero());
      }
    // off the critical weight Delta is not invariant
    CHECK_FALSE(action_T(special(s, 0), Scalar(0), Dl).is_zero());
  }
}

TEST_CASE("representation property") {
  std::mt19937 rng(11);
  for (Signature s : {E3, L3}) {
    auto all = monomials(s, 2, 2, 2);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(25);
    check_representation(TensorModule(s), all, Scalar::frac(3, 7));
    check_representation(HamiltonianModule(s), all, Scalar::frac(3, 7));
    check_representation(HamiltonianModule(s, BracketConvention::formal()), all, Scalar::frac(-1, 3));
  }
}

TEST_CASE("Casimir on tensorial symbols") {
  for (Signature s : {E3, L3}) {
    TensorModule mod(s);
    const int n = s.n();
    // delta enters only through a scalar (n/2) delta^2 - (n/2 + k) delta on the (k, kappa) component
    for (int k = 0; k <= 2; ++k)
      for (int kappa = 0; kappa <= 2; ++kappa) {
        auto basis = monomials(s, 0, k, kappa, true);
        auto M = casimir(mod, basis);
        for (std::size_t r = 0; r < basis.size(); ++r)
          for (std::size_t c = 0; c < basis.size(); ++c) {
            CHECK(M.entries[r][c].coeff(2) == (r == c ? Scalar::frac(n, 2) : Scalar(0)));
            CHECK(M.entries[r][c].coeff(1) == (r == c ? -Scalar::frac(n + 2 * k, 2) : Scalar(0)));
          }
      }
    // delta-free part: scalar on o(p,q)-isotypic pieces (values from direct matrix computation)
    auto eig0 = [&](const SuperSymbol &v) {
      auto c = casimir_apply(mod, v.terms())[0];
      return c;
    };
    SuperSymbol Dl = named_symbol(NamedSymbol::Delta, s), R = named_symbol(NamedSymbol::R, s);
    CHECK(eig0(C(s, 1)).is_zero());
    CHECK(eig0(XI(s, 1)) == XI(s, 1).scaled(Scalar::frac(1, 3)).terms());
    CHECK(eig0(P(s, 1)) == P(s, 1).terms());
    CHECK(eig0(Dl) == Dl.scaled(Scalar::frac(2, 3)).terms());
    SuperSymbol anti = P(s, 1) * XI(s, 2) - P(s, 2) * XI(s, 1), sym = P(s, 1) * XI(s, 2) + P(s, 2) * XI(s, 1);
    CHECK(eig0(anti) == anti.terms());
    CHECK(eig0(sym) == sym.scaled(Scalar::frac(5, 3)).terms());
    CHECK(eig0(R) == R.scaled(Scalar::frac(5, 3)).terms());
    CHECK(eig0(P(s, 1) * P(s, 2)) == (P(s, 1) * P(s, 2)).scaled(Scalar::frac(8, 3)).terms());
    // a single p-monomial is not closed under the Hamiltonian Casimir (xi-degree is raised)
    HamiltonianModule S(s);
    CHECK_THROWS_AS(casimir(S, {(P(s, 1) * P(s, 1)).terms().begin()->first}), bound_error);
  }
}

TEST_CASE("Casimir commutes with the generators") {
  Scalar delta = Scalar::frac(5, 3);
  for (Signature s : {E3, L3}) {
    auto sample = monomials(s, 0, 2, 2);
    std::mt19937 rng(3);
    std::shuffle(sample.begin(), sample.end(), rng);
    sample.resize(12);
    TensorModule T(s);
    HamiltonianModule S(s);
    for (const ModuleAction *mod : {static_cast<const ModuleAction *>(&T), static_cast<const ModuleAction *>(&S)})
      for (const auto &m : sample)
        for (const auto &g : generators(s)) {
          auto v = unit(m);
          CHECK(casimir_at(*mod, delta, mod->apply(g, delta, v)) == mod->apply(g, delta, casimir_at(*mod, delta, v)));
        }
  }
}

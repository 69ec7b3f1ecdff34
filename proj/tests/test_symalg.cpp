#include "doctest.h"

#include "spinquant/symalg.hpp"

#include <random>

using namespace spinq;

namespace {

const Signature E2{2, 0}, E3{3, 0}, L3{2, 1};

SuperSymbol X(Signature s, int i) { return SuperSymbol::x(s, i - 1); }
SuperSymbol P(Signature s, int i) { return SuperSymbol::p(s, i - 1); }
SuperSymbol XI(Signature s, int i) { return SuperSymbol::xi(s, i - 1); }

// Random homogeneous monomial of total degree <= 3 in (x, p, xi), coefficient 1.
SuperSymbol random_monomial(Signature sig, std::mt19937 &rng) {
  std::uniform_int_distribution<int> deg(0, 3), var(0, 3 * sig.n() - 1);
  SuperSymbol out = SuperSymbol::constant(sig, Scalar(1));
  int d = deg(rng);
  for (int k = 0; k < d; ++k) {
    int v = var(rng);
    int i = v % sig.n();
    if (v < sig.n())
      out = out * SuperSymbol::x(sig, i);
    else if (v < 2 * sig.n())
      out = out * SuperSymbol::p(sig, i);
    else
      out = out * SuperSymbol::xi(sig, i);
  }
  if (out.is_zero())
    return SuperSymbol::xi(sig, 0);
  return out;
}

int sgn_pow(int a, int b) { return (a * b) % 2 ? -1 : 1; }

} // namespace

TEST_CASE("Grassmann product") {
  CHECK((XI(E2, 1) * XI(E2, 2)).str() == "xi1*xi2");
  CHECK((XI(E2, 1) * XI(E2, 1)).is_zero());
  CHECK(XI(E2, 2) * XI(E2, 1) == -(XI(E2, 1) * XI(E2, 2)));
  CHECK_THROWS_AS(XI(E2, 1) * XI(E3, 1), std::invalid_argument);
}

TEST_CASE("canonical brackets") {
  CHECK(superbracket(X(E3, 1), P(E3, 1)) == SuperSymbol::constant(E3, Scalar(1)));
  CHECK(superbracket(P(E3, 1), X(E3, 1)) == SuperSymbol::constant(E3, Scalar(-1)));
  CHECK(superbracket(X(E3, 1), P(E3, 2)).is_zero());
  CHECK(superbracket(X(E3, 1), X(E3, 2)).is_zero());
  CHECK(superbracket(XI(E3, 1), P(E3, 1)).is_zero());
  // {xi^i, xi^j} = -i/hbar * eta^ij, hbar = 1
  CHECK(superbracket(XI(L3, 3), XI(L3, 3)) == SuperSymbol::constant(L3, Scalar::i()));
  CHECK(superbracket(XI(L3, 1), XI(L3, 1)) == SuperSymbol::constant(L3, -Scalar::i()));
  CHECK(superbracket(XI(L3, 1), XI(L3, 2)).is_zero());
}

TEST_CASE("bracket of quadratic monomials") {
  // {p1 p2, x1 x2} = -(d/dp_i)(p1 p2) (d/dx^i)(x1 x2) = -(x1 p1 + x2 p2)
  SuperSymbol got = superbracket(P(E2, 1) * P(E2, 2), X(E2, 1) * X(E2, 2));
  CHECK(got == -(X(E2, 1) * P(E2, 1) + X(E2, 2) * P(E2, 2)));
}

TEST_CASE("spin tensor") {
  CHECK(spin_tensor(0, 0, E3).is_zero());
  // (hbar/i) xi1 xi2 with hbar = 1
  CHECK(spin_tensor(0, 1, E3) == (XI(E3, 1) * XI(E3, 2)).scaled(-Scalar::i()));
  CHECK(spin_tensor(1, 0, E3) == -spin_tensor(0, 1, E3));
  CHECK(spin_tensor(0, 1, E3, BracketConvention::formal()).str() == "-I*xi1*xi2*hbar");
  CHECK_THROWS_AS(spin_tensor(0, 3, E3), std::out_of_range);

  // Hand expansion: only xi2 is shared, right/left derivatives carry no sign, so
  // {S12, S23} = (hbar/i)^2 c_odd eta^22 xi1 xi3 = -eta^22 S13.
  for (Signature sig : {E3, L3, Signature(1, 2)}) {
    SuperSymbol got = superbracket(spin_tensor(0, 1, sig), spin_tensor(1, 2, sig));
    CHECK(got == spin_tensor(0, 2, sig).scaled(Scalar(-sig.eta(1))));
  }
}

TEST_CASE("named symbols") {
  CHECK(named_symbol(NamedSymbol::Delta, E2) == P(E2, 1) * XI(E2, 1) + P(E2, 2) * XI(E2, 2));
  Signature m11(1, 1);
  CHECK(named_symbol(NamedSymbol::R, m11) == P(m11, 1) * P(m11, 1) - P(m11, 2) * P(m11, 2));
  // {Delta, Delta} = c_odd R, brute-force expansion of the odd part: sum_i c eta^ii p_i p_i.
  for (Signature sig : {E2, E3, L3}) {
    SuperSymbol d = named_symbol(NamedSymbol::Delta, sig);
    CHECK(superbracket(d, d) == named_symbol(NamedSymbol::R, sig).scaled(-Scalar::i()));
  }
}

TEST_CASE("degrees") {
  auto d1 = degrees(P(E2, 1) * P(E2, 1) * XI(E2, 1));
  CHECK(d1.p_degree == 2);
  CHECK(d1.xi_degrees == std::vector<int>{1});
  CHECK(d1.x_degree == 0);
  auto d2 = degrees(X(E2, 1) * X(E2, 2) * P(E2, 1));
  CHECK(d2.p_degree == 1);
  CHECK(d2.xi_degrees == std::vector<int>{0});
  CHECK(d2.x_degree == 2);
  auto d3 = degrees(SuperSymbol(E2));
  CHECK(d3.p_degree == -1);
  CHECK(d3.xi_degrees.empty());
  CHECK(d3.x_degree == -1);
}

TEST_CASE("super-Jacobi and Leibniz on random monomials") {
  std::mt19937 rng(2024);
  for (auto conv : {BracketConvention::standard(), BracketConvention::formal()})
    for (Signature sig : {E2, Signature(1, 1), E3, L3}) {
      for (int trial = 0; trial < 150; ++trial) {
        SuperSymbol r = random_monomial(sig, rng), s = random_monomial(sig, rng), t = random_monomial(sig, rng);
        int pr = *r.parity(), ps = *s.parity(), pt = *t.parity();
        SuperSymbol jac = superbracket(r, superbracket(s, t, conv), conv).scaled(Scalar(sgn_pow(pr, pt))) +
                          superbracket(s, superbracket(t, r, conv), conv).scaled(Scalar(sgn_pow(ps, pr))) +
                          superbracket(t, superbracket(r, s, conv), conv).scaled(Scalar(sgn_pow(pt, ps)));
        CHECK(jac.is_zero());
        SuperSymbol lhs = superbracket(r, s * t, conv);
        SuperSymbol rhs = superbracket(r, s, conv) * t + (s * superbracket(r, t, conv)).scaled(Scalar(sgn_pow(pr, ps)));
        CHECK(lhs == rhs);
        // super-antisymmetry
        CHECK(superbracket(r, s, conv) == superbracket(s, r, conv).scaled(Scalar(-sgn_pow(pr, ps))));
      }
    }
}

TEST_CASE("product is super-commutative and associative") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    SuperSymbol a = random_monomial(L3, rng), b = random_monomial(L3, rng), c = random_monomial(L3, rng);
    CHECK(a * b == (b * a).scaled(Scalar(sgn_pow(*a.parity(), *b.parity()))));
    CHECK((a * b) * c == a * (b * c));
  }
}

TEST_CASE("o(p,q) closure of spin components") {
  for (Signature sig : {E2, E3, L3, Signature(4, 0), Signature(3, 1), Signature(2, 2)}) {
    CHECK_NOTHROW(verify_convention(BracketConvention::standard(), sig));
    CHECK_NOTHROW(verify_convention(BracketConvention::formal(), sig));
  }
  BracketConvention broken;
  broken.odd_factor = Scalar(0);
  CHECK_THROWS_AS(verify_convention(broken, E3), std::logic_error);
}

#include "doctest.h"

#include "spinquant/solver.hpp"

#include <random>

using namespace spinq;

namespace {

const Signature E3{3, 0}, L3{2, 1}, E4{4, 0};

SuperSymbol X(Signature s, int i) { return SuperSymbol::x(s, i - 1); }
SuperSymbol P(Signature s, int i) { return SuperSymbol::p(s, i - 1); }
SuperSymbol XI(Signature s, int i) { return SuperSymbol::xi(s, i - 1); }

std::vector<std::string> names(const std::vector<CorrectionOp> &ops) {
  std::vector<std::string> out;
  for (const auto &op : ops)
    out.push_back(op.str());
  return out;
}

bool contains(const std::vector<Resonance> &rs, const Rational &v) {
  for (const auto &r : rs)
    if (r.delta == v)
      return true;
  return false;
}

// random rational in (0, 3) avoiding the given values
Rational random_delta(std::mt19937 &rng, const std::vector<SingularPoint> &avoid) {
  std::uniform_int_distribution<int> num(1, 89), den(2, 31);
  while (true) {
    Rational v(num(rng), den(rng));
    v.canonicalize();
    bool ok = v < 3;
    for (const auto &s : avoid)
      ok = ok && s.value != v;
    if (ok)
      return v;
  }
}

} // namespace

TEST_CASE("correction operators") {
  CorrectionOp op;
  op.count[int(Pair::DxDp)] = 1;
  CHECK(op.str() == "(dx.dp)");
  CHECK(op.p_shift() == -1);
  CHECK(op.xi_shift() == 0);
  // (dx.dp)(x1 p1) = 1, (dx.dp)(x1 p2) = 0
  CHECK(op.apply(E3, (X(E3, 1) * P(E3, 1)).terms()) == SuperSymbol::constant(E3, 1).terms());
  CHECK(op.apply(E3, (X(E3, 1) * P(E3, 2)).terms()).is_zero());

  CorrectionOp xx;
  xx.count[int(Pair::XiDx)] = 1;
  xx.count[int(Pair::XiDp)] = 1;
  CHECK(xx.str() == "(xi.dx)*(xi.dp)");
  CHECK(xx.xi_shift() == 2);
  // xi^i d_xi . xi^j eta_jk d_pk on x2 p3: xi2 xi3 with eta_33 = -1 in (2,1)
  CHECK(xx.apply(E3, (X(E3, 2) * P(E3, 3)).terms()) == (XI(E3, 2) * XI(E3, 3)).terms());
  CHECK(xx.apply(L3, (X(L3, 2) * P(L3, 3)).terms()) == (XI(L3, 2) * XI(L3, 3)).scaled(-1).terms());
  CHECK(CorrectionOp{}.str() == "id");
  CHECK(CorrectionOp{}.apply(E3, P(E3, 1).terms()) == P(E3, 1).terms());
}

TEST_CASE("correction bases") {
  CHECK(correction_basis(E3, MapKind::Superization, 0, 2).empty());
  CHECK(names(correction_basis(E3, MapKind::Quantization, 1, 0)) ==
        std::vector<std::string>{"(dx.dp)", "(xi.dx)*(xi.dp)"});
  for (auto [k, kappa] : {std::pair{1, 1}, {2, 0}, {2, 2}})
    for (const auto &op : correction_basis(E4, MapKind::Quantization, k, kappa)) {
      CHECK(op.p_shift() < 0);
      CHECK(op.der_x() + op.mult_p() == op.der_p());
      CHECK(op.xi_shift() % 2 == 0);
    }
}

TEST_CASE("superization anchors") {
  for (Signature sig : {E3, L3, E4}) {
    const int n = sig.n();
    CAPTURE(sig.str());
    // generic delta: unique everywhere, existence fails at 2/n
    auto map = build_superization(sig, Affine::formal());
    CHECK(map.valid());
    bool found = false;
    for (const auto &s : map.singular())
      if (s.value == frac(2, n))
        found = s.failure == Failure::Existence;
    CHECK(found);

    auto bad = build_superization(sig, Affine::constant(frac(2, n)));
    CHECK_FALSE(bad.valid());
    bool inconsistent = false;
    for (const auto &b : bad.blocks)
      inconsistent = inconsistent || b.status == SolveStatus::Inconsistent;
    CHECK(inconsistent);

    std::mt19937 rng(11 + n);
    for (int r = 0; r < 5; ++r) {
      Rational d = random_delta(rng, map.singular());
      CAPTURE(to_string(d));
      auto fixed = build_superization(sig, Affine::constant(d));
      REQUIRE(fixed.valid());
      // agrees with the generic solution specialized
      for (const auto &b : fixed.blocks) {
        const BlockSolution *g = map.block(b.k, b.kappa);
        REQUIRE(g);
        for (std::size_t c = 0; c < b.coeffs.size(); ++c)
          CHECK(g->coeffs[c].eval(Scalar(d)) == b.coeffs[c].constant());
      }
      if (n == 3) {
        auto rep = verify_equivariance(fixed, 0);
        CHECK_MESSAGE(rep.ok, rep.failure);
      }
    }
  }
}

TEST_CASE("superization application") {
  auto map = build_superization(E3, Affine::formal());
  // p-degree 0 tensors are untouched
  SuperSymbol s = X(E3, 1) * X(E3, 1) * XI(E3, 2);
  CHECK(apply_superization(map, s, Scalar::frac(1, 5)) == s);
  // x2 p1 picks up i/(3 delta - 2) xi2 xi1
  SuperSymbol v = X(E3, 2) * P(E3, 1);
  SuperSymbol expect = v + (XI(E3, 2) * XI(E3, 1)).scaled(Scalar::i() * Scalar::frac(1, 3) / Scalar::frac(-1, 3));
  CHECK(apply_superization(map, v, Scalar::frac(1, 3)) == expect);
  CHECK_THROWS_AS(apply_superization(map, v, Scalar::frac(2, 3)), unavailable_error);
  CHECK_THROWS_AS(apply_superization(map, P(E3, 1) * P(E3, 1) * P(E3, 1), Scalar(1)), unavailable_error);
}

TEST_CASE("superization is equivariant as a rational function") {
  for (Signature sig : {E3, L3}) {
    CAPTURE(sig.str());
    auto map = build_superization(sig, Affine::formal());
    auto rep = verify_equivariance_formal(map);
    CHECK_MESSAGE(rep.ok, rep.failure);
    CHECK(rep.checks > 0);
  }
}

TEST_CASE("quantization anchors") {
  for (Signature sig : {E3, L3, E4}) {
    const int n = sig.n();
    CAPTURE(sig.str());
    // delta = 0 is never a resonance
    for (Rational lam : {Rational(0), frac(1, 2), frac(-2, 3)}) {
      auto q = build_quantization(sig, Affine::constant(lam), Affine::constant(0));
      CHECK(q.valid());
      if (n == 3) {
        auto rep = verify_equivariance(q, 0);
        CHECK_MESSAGE(rep.ok, rep.failure);
      }
    }
    auto rs = resonances(sig, MapKind::Quantization);
    CHECK(contains(rs, frac(1, n)));
    CHECK(contains(rs, frac(3, n)));
    CHECK_FALSE(contains(rs, 0));
    for (const auto &r : rs)
      CHECK(r.delta > 0);
    auto rsS = resonances(sig, MapKind::Superization);
    CHECK_FALSE(contains(rsS, 0));
    for (const auto &r : rsS)
      CHECK(r.delta > 0);
  }
}

TEST_CASE("quantization examples") {
  for (Signature sig : {E3, L3, E4}) {
    const int n = sig.n();
    CAPTURE(sig.str());
    auto half = build_quantization(sig, Affine::constant(frac(1, 2)), Affine::constant(0));
    REQUIRE(half.valid());
    for (int i = 1; i <= n; ++i)
      for (const auto &g : {X(sig, i), P(sig, i), XI(sig, i)})
        CHECK(apply_quantization(half, g) == quantize_generator(g));
    CHECK(apply_quantization(half, P(sig, 1)) == SpinorOperator::derivative(sig, 0).scaled(-Scalar::i()));
    CHECK(apply_quantization(half, SuperSymbol::constant(sig, 7)) == SpinorOperator::identity(sig).scaled(7));

    // Dirac weights: delta = 1/n is resonant for the whole block, but Q(Delta) is defined
    // and is a nonzero multiple of gamma^i d_i
    Rational lam = frac(n - 1, 2 * n), mu = frac(n + 1, 2 * n);
    auto qd = build_quantization(sig, Affine::constant(lam), Affine::formal(), 1);
    REQUIRE(qd.valid());
    CHECK_FALSE(build_quantization(sig, Affine::constant(lam), Affine::constant(mu - lam), 1).valid());
    SpinorOperator D = apply_quantization(qd, named_symbol(NamedSymbol::Delta, sig), Scalar(mu - lam));
    for (const auto &g : generators(sig))
      CHECK(adjoint_action(g, D).is_zero());
    // the (1,1) block itself is singular there
    const auto *blk = qd.block(1, 1);
    REQUIRE(blk != nullptr);
    bool pole = false;
    for (const auto &sp : blk->singular)
      pole = pole || sp.value == mu - lam;
    CHECK(pole);
    SpinorOperator dirac = SpinorOperator::dirac(sig);
    // Q(Delta) = (gamma^i/sqrt2)(-i d_i): coefficient -i/sqrt2
    CHECK(D == dirac.scaled(-Scalar::i() / Scalar::sqrt2()));
    CHECK(D.lambda() == lam);
    CHECK(D.mu() == mu);
  }
}

TEST_CASE("quantization is equivariant as a rational function") {
  auto map = build_quantization(E3, Affine::constant(frac(1, 3)), Affine::formal());
  auto rep = verify_equivariance_formal(map, 0);
  CHECK_MESSAGE(rep.ok, rep.failure);
  // lambda tied to delta
  auto tied = build_quantization(L3, Affine{frac(1, 2), frac(-1, 2)}, Affine::formal(), 1);
  rep = verify_equivariance_formal(tied, 0);
  CHECK_MESSAGE(rep.ok, rep.failure);
}

TEST_CASE("K_1 alone determines the maps") {
  for (MapKind kind : {MapKind::Superization, MapKind::Quantization}) {
    MapSpec spec;
    spec.kind = kind;
    spec.signature = L3;
    spec.lambda = Affine::constant(frac(1, 4));
    auto fast = build_map(spec);
    spec.all_generators = true;
    auto full = build_map(spec);
    REQUIRE(fast.blocks.size() == full.blocks.size());
    for (std::size_t b = 0; b < fast.blocks.size(); ++b) {
      CHECK(fast.blocks[b].status == full.blocks[b].status);
      CHECK(fast.blocks[b].coeffs == full.blocks[b].coeffs);
      CHECK(fast.blocks[b].singular == full.blocks[b].singular);
    }
  }
}

TEST_CASE("quantization after superization is equivariant") {
  for (Signature sig : {E3, L3}) {
    CAPTURE(sig.str());
    const Rational delta = frac(2, 7), lam = frac(1, 5);
    auto S = build_superization(sig, Affine::constant(delta));
    auto Q = build_quantization(sig, Affine::constant(lam), Affine::constant(delta));
    REQUIRE(S.valid());
    REQUIRE(Q.valid());
    TensorModule T(sig);
    OperatorModule D(sig, lam);
    auto QS = [&](const Terms<Scalar> &v) {
      return apply_quantization(Q, apply_superization(S, SuperSymbol(sig, v))).terms();
    };
    std::size_t checks = 0;
    for (int k = 0; k <= 2; ++k)
      for (const auto &g : generators(sig)) {
        // a few mixed inputs per p-degree
        SuperSymbol v = X(sig, 1) * X(sig, 2) * XI(sig, 3);
        for (int j = 0; j < k; ++j)
          v = v * P(sig, 1 + j);
        v += X(sig, 3) * XI(sig, 1) * XI(sig, 2) * power(P(sig, 2), k);
        CHECK(D.apply(g, Scalar(delta), QS(v.terms())) == QS(T.apply(g, Scalar(delta), v.terms())));
        ++checks;
      }
    CHECK(checks == 3 * generators(sig).size());
  }
}

TEST_CASE("maps with formal hbar") {
  const auto conv = BracketConvention::formal();
  for (Signature sig : {E3, L3}) {
    CAPTURE(sig.str());
    auto s = build_superization(sig, Affine::formal(), 2, -1, conv);
    auto rs = verify_equivariance(s, frac(2, 7), 1);
    CHECK_MESSAGE(rs.ok, rs.failure);
    auto q = build_quantization(sig, Affine::constant(frac(1, 5)), Affine::formal(), 2, 2, conv);
    auto rq = verify_equivariance(q, frac(3, 11), 1);
    CHECK_MESSAGE(rq.ok, rq.failure);
    // hbar comes with each lost p-degree
    auto h = build_quantization(sig, Affine::constant(0), Affine::formal(), 1, 1, conv);
    SpinorOperator D = apply_quantization(h, X(sig, 1) * P(sig, 2) * XI(sig, 2), Scalar(frac(1, 2)));
    for (const auto &[m, c] : D.terms())
      CHECK(m.hbar == 1);
  }
}

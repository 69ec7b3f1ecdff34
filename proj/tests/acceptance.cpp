// Acceptance run: one line per criterion with its timing and budget. Exit status 0 iff all pass.
#include "spinquant/applications.hpp"
#include "spinquant/crosscheck.hpp"
#include "spinquant/parse.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>

using namespace spinq;

namespace {

// collects failures; `fail` keeps the first few messages
struct Check {
  std::size_t count = 0, failed = 0;
  std::vector<std::string> messages;
  std::vector<std::string> notes;

  void operator()(bool ok, const std::string &what) {
    ++count;
    if (ok)
      return;
    ++failed;
    if (messages.size() < 3)
      messages.push_back(what);
  }
  void note(const std::string &s) { notes.push_back(s); }
};

const std::vector<Signature> kLowDim = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
const std::vector<Signature> kN34 = {{3, 0}, {2, 1}, {4, 0}, {3, 1}};

std::string join(const std::vector<Rational> &v) {
  std::string s;
  for (const auto &q : v)
    s += (s.empty() ? "" : " ") + to_string(q);
  return "{" + s + "}";
}

ConfGenerator field_gen(const VectorField &f) { return {GeneratorKind::Dilation, -1, -1, f}; }

int sgn_pow(int a, int b) { return (a * b) % 2 ? -1 : 1; }

SuperSymbol random_monomial(Signature sig, std::mt19937 &rng, int max_deg) {
  std::uniform_int_distribution<int> deg(0, max_deg), var(0, 3 * sig.n() - 1);
  SuperSymbol out = SuperSymbol::constant(sig, Scalar(1));
  int d = deg(rng);
  for (int k = 0; k < d; ++k) {
    int v = var(rng), i = v % sig.n();
    out = out * (v < sig.n() ? SuperSymbol::x(sig, i) : v < 2 * sig.n() ? SuperSymbol::p(sig, i) : SuperSymbol::xi(sig, i));
  }
  return out.is_zero() ? SuperSymbol::xi(sig, 0) : out;
}

SuperSymbol random_symbol(Signature sig, std::mt19937 &rng, bool with_hbar) {
  std::uniform_int_distribution<int> coef(-4, 4), h(-1, 1);
  SuperSymbol out(sig);
  for (int t = 0; t < 4; ++t) {
    SuperSymbol m = random_monomial(sig, rng, 4);
    Scalar c = Scalar(frac(coef(rng), 1 + std::abs(coef(rng)))) + Scalar::i() * Scalar(coef(rng)) +
               Scalar::sqrt2() * Scalar(frac(coef(rng), 3));
    if (with_hbar)
      m = m * power(SuperSymbol::hbar(sig), 1 + h(rng));
    out += m.scaled(c);
  }
  return out;
}

bool proportional(const Terms<Scalar> &a, const Terms<Scalar> &b) {
  if (a.is_zero() || b.is_zero())
    return a.is_zero() && b.is_zero();
  const auto &[m, c] = *a.begin();
  return b.scaled(c / b.coeff(m)) == a;
}

SuperSymbol delta_R(Signature s, int a, int r) {
  return power(named_symbol(NamedSymbol::Delta, s), a) * power(named_symbol(NamedSymbol::R, s), r);
}

// ---- criteria

void algebraic_soundness(Check &check) {
  std::mt19937 rng(101);
  for (auto conv : {BracketConvention::standard(), BracketConvention::formal()})
    for (Signature sig : kLowDim) {
      // generators and constants exhaustively, then random monomials of degree <= 3
      std::vector<SuperSymbol> gens{SuperSymbol::constant(sig, Scalar(1))};
      for (int i = 0; i < sig.n(); ++i)
        for (auto s : {SuperSymbol::x(sig, i), SuperSymbol::p(sig, i), SuperSymbol::xi(sig, i)})
          gens.push_back(s);
      std::vector<std::array<SuperSymbol, 3>> triples;
      for (const auto &r : gens)
        for (const auto &s : gens)
          for (const auto &t : gens)
            triples.push_back({r, s, t});
      for (int k = 0; k < 200; ++k)
        triples.push_back({random_monomial(sig, rng, 3), random_monomial(sig, rng, 3), random_monomial(sig, rng, 3)});
      for (const auto &[r, s, t] : triples) {
        int pr = *r.parity(), ps = *s.parity(), pt = *t.parity();
        SuperSymbol jac = superbracket(r, superbracket(s, t, conv), conv).scaled(Scalar(sgn_pow(pr, pt))) +
                          superbracket(s, superbracket(t, r, conv), conv).scaled(Scalar(sgn_pow(ps, pr))) +
                          superbracket(t, superbracket(r, s, conv), conv).scaled(Scalar(sgn_pow(pt, ps)));
        check(jac.is_zero(), "super-Jacobi fails on " + r.str() + ", " + s.str() + ", " + t.str());
        SuperSymbol rhs = superbracket(r, s, conv) * t + (s * superbracket(r, t, conv)).scaled(Scalar(sgn_pow(pr, ps)));
        check(superbracket(r, s * t, conv) == rhs, "Leibniz fails on " + r.str() + ", " + s.str() + ", " + t.str());
      }
    }
  for (Signature sig : {Signature{2, 0}, Signature{3, 0}, Signature{2, 1}, Signature{4, 0}, Signature{3, 1}})
    for (auto conv : {BracketConvention::standard(), BracketConvention::formal()}) {
      try {
        verify_convention(conv, sig);
        check(true, "");
      } catch (const std::exception &e) {
        check(false, std::string("o(p,q) closure: ") + e.what());
      }
    }
}

void conformal_representation(Check &check) {
  std::mt19937 rng(202);
  for (Signature sig : kN34) {
    auto gens = generators(sig);
    // moments: {J_X, J_Y} = J of the Lie algebra bracket, which is minus the vector field bracket
    for (auto conv : {BracketConvention::standard(), BracketConvention::formal()})
      for (std::size_t a = 0; a < gens.size(); ++a)
        for (std::size_t b = a + 1; b < gens.size(); ++b)
          check(superbracket(moment(gens[a].field, sig, conv), moment(gens[b].field, sig, conv), conv) ==
                    -moment(vf_bracket(gens[a].field, gens[b].field), sig, conv),
                "moment bracket " + gens[a].name() + ", " + gens[b].name());
    // sampled basis symbols and operators
    std::vector<Terms<Scalar>> symbols, operators;
    for (int t = 0; t < 6; ++t) {
      symbols.push_back(random_monomial(sig, rng, 4).terms());
      Terms<Scalar> op;
      const auto full = normal_order(random_symbol(sig, rng, false));
      for (const auto &[m, c] : full.terms())
        if (m.pdeg() <= 2 && m.xdeg() <= 2)
          op.add(m, c);
      operators.push_back(op);
    }
    const TensorModule T(sig);
    const HamiltonianModule S(sig);
    const OperatorModule D(sig, frac(-2, 9));
    const Scalar delta = Scalar::frac(3, 7);
    auto rep = [&](const ModuleAction &mod, const std::vector<Terms<Scalar>> &vs, const char *name) {
      for (const auto &v : vs)
        for (std::size_t a = 0; a < gens.size(); ++a)
          for (std::size_t b = a + 1; b < gens.size(); ++b) {
            auto lhs = mod.apply(gens[a], delta, mod.apply(gens[b], delta, v));
            lhs -= mod.apply(gens[b], delta, mod.apply(gens[a], delta, v));
            auto rhs = mod.apply(field_gen(vf_bracket(gens[a].field, gens[b].field)), delta, v);
            check(lhs == rhs, std::string(name) + " " + sig.str() + ": [L_" + gens[a].name() + ", L_" +
                                  gens[b].name() + "] on " + render_terms(v));
          }
    };
    rep(T, symbols, "tensor");
    rep(S, symbols, "hamiltonian");
    rep(D, operators, "operators");
  }
  check.note("{J_X,J_Y} = -J_[X,Y] for the vector field bracket, i.e. a morphism for the Lie algebra bracket");
}

void quantization_anchor(Check &check) {
  for (Signature sig : kN34) {
    const int n = sig.n();
    for (int i = 0; i < n; ++i) {
      check(quantize_generator(SuperSymbol::x(sig, i)) == SpinorOperator::multiplication(SuperSymbol::x(sig, i)),
            "Q(x)");
      check(quantize_generator(SuperSymbol::p(sig, i)) == SpinorOperator::derivative(sig, i).scaled(-Scalar::i()),
            "Q(p) = (hbar/i) d");
      check(quantize_generator(SuperSymbol::xi(sig, i)) ==
                SpinorOperator::gamma(sig, i).scaled(Scalar::sqrt2().inverse()),
            "Q(xi) = gamma / sqrt2");
      check(kosmann(translation(sig, i), sig) == SpinorOperator::derivative(sig, i), "Kosmann of a translation");
    }
    for (const auto &g : generators(sig)) {
      if (g.kind == GeneratorKind::Rotation) {
        // J = p_k X^k + sum_{a<b} (d_a X_b - d_b X_a)/2 S^ab, indices lowered with eta
        SuperSymbol J(sig);
        for (int k = 0; k < n; ++k)
          J += SuperSymbol::p(sig, k) * g.field[k];
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) {
            SuperSymbol B = (g.field[b].dx(a).scaled(Scalar(sig.eta(b))) - g.field[a].dx(b).scaled(Scalar(sig.eta(a))))
                                .scaled(Scalar::frac(1, 2));
            J += B * spin_tensor(a, b, sig);
          }
        check(moment(g.field, sig) == J, "moment of " + g.name());
      }
      check(normal_order(moment(g.field, sig)) == kosmann(g, sig).scaled(-Scalar::i()),
            "Q(J_X) = (hbar/i) L_X for " + g.name());
      const auto conv = BracketConvention::formal();
      Terms<Scalar> expect;
      const auto lie = kosmann(g, sig);
      for (const auto &[m, c] : lie.terms()) {
        Mono k = m;
        k.hbar = 1;
        expect.add(k, -Scalar::i() * c);
      }
      check(normal_order(moment(g.field, sig, conv), conv).terms() == expect,
            "Q(J_X) = (hbar/i) L_X, formal hbar, " + g.name());
    }
  }
  check.note("convention constant 1: [Q u, Q v] = i hbar Q({u, v})");
}

void quantization_existence(Check &check) {
  for (Signature sig : kN34) {
    const int n = sig.n();
    auto at0 = build_quantization(sig, Affine::constant(0), Affine::constant(0));
    check(at0.valid(), "quantization not unique at delta = 0 for " + sig.str());
    auto half = build_quantization(sig, Affine::constant(frac(1, 2)), Affine::constant(0), 1, 1);
    for (int i = 0; i < n; ++i)
      for (const auto &u : {SuperSymbol::x(sig, i), SuperSymbol::p(sig, i), SuperSymbol::xi(sig, i)})
        check(apply_quantization(half, u) == quantize_generator(u), "Q^(1/2,1/2)(" + u.str() + ")");
    auto rs = resonances(sig, MapKind::Quantization, 2);
    std::set<Rational> ds;
    for (const auto &r : rs)
      ds.insert(r.delta);
    check(ds.count(frac(1, n)) && ds.count(frac(3, n)), "resonances of Q miss (2s+1)/n for " + sig.str());
    check(!ds.count(Rational(0)), "0 is a resonance for " + sig.str());
    if (sig.q == 0)
      check.note("n=" + std::to_string(n) + " Q resonances " + join({ds.begin(), ds.end()}));
  }
}

void superization_existence(Check &check) {
  std::mt19937 rng(303);
  for (Signature sig : kN34) {
    const int n = sig.n();
    auto bad = build_superization(sig, Affine::constant(frac(2, n)));
    bool existence = false;
    for (const auto &b : bad.blocks)
      existence = existence || b.status == SolveStatus::Inconsistent;
    check(existence, "superization exists at 2/n for " + sig.str());
    auto rs = resonances(sig, MapKind::Superization, 2);
    std::set<Rational> res;
    for (const auto &r : rs)
      res.insert(r.delta);
    check(res.count(frac(2, n)) && rs.size() > 0, "2/n not reported for " + sig.str());
    std::uniform_int_distribution<long> num(-40, 40), den(1, 17);
    int done = 0;
    while (done < 5) {
      Rational d = frac(num(rng), den(rng));
      if (res.count(d))
        continue;
      auto map = build_superization(sig, Affine::constant(d));
      check(map.valid(), "superization not unique at " + to_string(d));
      auto rep = verify_equivariance(map, 0, 1);
      check(rep.ok, "superization at " + to_string(d) + ": " + rep.failure);
      ++done;
    }
  }
}

void invariants_and_dirac(Check &check) {
  for (Signature sig : kN34) {
    const int n = sig.n();
    auto even = [](std::vector<Invariant> v) {
      std::erase_if(v, [](const Invariant &i) { return i.pseudo; });
      return v;
    };
    auto T = even(invariant_scan(sig, ModuleKind::TensorSymbols, 3));
    for (int s = 0; s <= 1; ++s)
      for (int a = 0; a <= 1; ++a) {
        const int k = 2 * s + a;
        bool found = false;
        for (const auto &v : T)
          found = found || (v.k == k && v.delta == frac(k, n) && proportional(v.element, delta_R(sig, a, s).terms()));
        check(found, "T invariant Delta^" + std::to_string(a) + " R^" + std::to_string(s) + " for " + sig.str());
      }
    check(T.size() == 4, "unexpected T invariants for " + sig.str());
    auto S = even(invariant_scan(sig, ModuleKind::HamiltonianSymbols, 3));
    for (int s = 0; s <= 1; ++s) {
      const int k = 2 * s + 1;
      bool found = false;
      for (const auto &v : S)
        found = found || (v.k == k && v.delta == frac(k, n) && proportional(v.element, delta_R(sig, 1, s).terms()));
      check(found, "S invariant Delta R^" + std::to_string(s) + " for " + sig.str());
    }
    // Dirac: invariant, and Q(Delta) at ((n-1)/2n, (n+1)/2n) up to a constant
    auto D = dirac(sig);
    for (const auto &g : generators(sig))
      check(adjoint_action(g, D).is_zero(), "Dirac not invariant under " + g.name());
    auto q = build_quantization(sig, Affine::constant(frac(n - 1, 2 * n)), Affine::formal(), 1, 1);
    auto QD = apply_quantization(q, named_symbol(NamedSymbol::Delta, sig), Scalar(frac(1, n)));
    check(proportional(QD.terms(), D.terms()), "Q(Delta) is not a multiple of the Dirac operator");
  }
  check.note("pseudo invariants (odd under a reflection) left out");
}

void killing_yano(Check &check) {
  for (Signature sig : {Signature{3, 0}, Signature{2, 1}}) {
    auto c = compare_ky(sig, 2, 2);
    check(c.ok(), "KY methods disagree for " + sig.str());
    check(c.ky_dim_pde == 4 && c.cky_dim_pde == 10, "KY dimensions for " + sig.str());
    check(!c.ky_witness.empty() && !c.cky_witness.empty() && !c.neither_witness.empty(), "missing witnesses");
    check.note(sig.str() + ": ansatz " + std::to_string(c.ansatz_dim) + ", KY " + std::to_string(c.ky_dim_pde) +
               ", CKY " + std::to_string(c.cky_dim_pde) + ", " + std::to_string(c.forms_checked) + " forms");
  }
}

void casimir_coincidences(Check &check) {
  for (Signature sig : kN34)
    for (MapKind kind : {MapKind::Superization, MapKind::Quantization}) {
      CasimirOptions opt;
      // x-linear symbols for n = 4 take minutes; the fibrewise check still covers them
      opt.central_x = sig.n() <= 3 ? 1 : 0;
      auto r = casimir_crosscheck(sig, kind, opt);
      check(r.ok, sig.str() + " " + to_string(kind) + ": " + (r.failures.empty() ? "" : r.failures[0]));
      check(r.missing.empty() && r.extra.empty(), "coincidences differ from resonances");
      check(r.central_checks > 0 && r.conjugation_checks > 0, "no checks ran");
      if (sig.q == 0 && kind == MapKind::Quantization)
        check.note("n=" + std::to_string(sig.n()) + " coincidences " + join(r.predicted));
    }
}

void round_trips(Check &check) {
  std::mt19937 rng(909);
  for (int t = 0; t < 100; ++t) {
    Signature sig = kN34[t % kN34.size()];
    bool formal = t % 2;
    auto conv = formal ? BracketConvention::formal() : BracketConvention::standard();
    SuperSymbol s = random_symbol(sig, rng, formal);
    check(full_symbol(normal_order(s, conv), conv) == s, "full_symbol(normal_order(" + s.str() + "))");
    check(parse_symbol(s.str(), sig) == s, "parse(render(" + s.str() + "))");
  }
}

} // namespace

int main() {
  struct Criterion {
    int id;
    const char *name;
    double budget;
    std::function<void(Check &)> run;
  };
  const std::vector<Criterion> all = {
      {1, "algebraic soundness", 10, algebraic_soundness},
      {2, "conformal representation", 60, conformal_representation},
      {3, "geometric quantization anchor", 10, quantization_anchor},
      {4, "quantization: existence at 0, resonances (2s+1)/n", 300, quantization_existence},
      {5, "superization: failure at 2/n, generic uniqueness", 300, superization_existence},
      {6, "conformal invariants and Dirac operator", 120, invariants_and_dirac},
      {7, "Killing-Yano forms: bracket test against the equations", 300, killing_yano},
      {8, "Casimir cross-check of the resonances", 300, casimir_coincidences},
      {9, "round trips", 10, round_trips},
  };
  int failed = 0;
  double total = 0;
  for (const auto &c : all) {
    Check check;
    auto t0 = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.run(check);
    } catch (const std::exception &e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    total += secs;
    bool ok = error.empty() && check.failed == 0 && secs < c.budget;
    failed += !ok;
    std::printf("%s  %d  %-56s %7.2f s (budget %3.0f s)  %zu checks\n", ok ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget, check.count);
    for (const auto &note : check.notes)
      std::printf("         %s\n", note.c_str());
    if (!error.empty())
      std::printf("         exception: %s\n", error.c_str());
    for (const auto &m : check.messages)
      std::printf("         %s\n", m.c_str());
    if (secs >= c.budget)
      std::printf("         over budget\n");
    std::fflush(stdout);
  }
  std::printf("%s: %zu criteria, %d failed, %.1f s\n", failed ? "FAIL" : "PASS", all.size(), failed, total);
  return failed ? 1 : 0;
}

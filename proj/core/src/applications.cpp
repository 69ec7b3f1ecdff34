#include "spinquant/applications.hpp"

#include <algorithm>
#include <bit>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spinq {

namespace {

Terms<Scalar> unit(const Mono &m) {
  Terms<Scalar> t;
  t.add(m, Scalar(1));
  return t;
}

// sorts idx; returns permutation sign, 0 on a repeated index
int sort_sign(std::vector<int> &idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j])
        return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

std::uint16_t mask_of(const std::vector<int> &sorted) {
  std::uint16_t m = 0;
  for (int i : sorted)
    m |= static_cast<std::uint16_t>(1u << i);
  return m;
}

std::vector<int> indices_of(std::uint16_t m) {
  std::vector<int> out;
  for (int i = 0; m; ++i, m >>= 1)
    if (m & 1)
      out.push_back(i);
  return out;
}

std::vector<std::uint16_t> masks_of_size(int n, int k) {
  std::vector<std::uint16_t> out;
  for (unsigned m = 0; m < (1u << n); ++m)
    if (std::popcount(m) == k)
      out.push_back(static_cast<std::uint16_t>(m));
  return out;
}

Rational factorial(int k) {
  Rational f = 1;
  for (int i = 2; i <= k; ++i)
    f *= i;
  return f;
}

void check_form(Signature sig, int degree) {
  if (degree < 0 || degree > sig.n())
    throw std::invalid_argument("form degree " + std::to_string(degree) + " outside 0.." + std::to_string(sig.n()));
}

// Coordinates of symbols in a growing monomial index.
class Coords {
public:
  std::vector<Scalar> column(const std::vector<std::pair<long, Terms<Scalar>>> &parts) {
    std::vector<std::pair<std::size_t, Scalar>> entries;
    for (const auto &[tag, t] : parts)
      for (const auto &[m, c] : t)
        entries.emplace_back(index(tag, m), c);
    std::vector<Scalar> col(index_.size(), Scalar(0));
    for (auto &[r, c] : entries)
      col[r] += c;
    return col;
  }
  std::size_t size() const { return index_.size(); }

private:
  std::size_t index(long tag, const Mono &m) {
    auto [it, fresh] = index_.try_emplace({tag, m}, index_.size());
    return it->second;
  }
  std::map<std::pair<long, Mono>, std::size_t> index_;
};

// Nullspace of the matrix whose columns are given (ragged, padded with zeros).
std::vector<std::vector<Scalar>> kernel(const std::vector<std::vector<Scalar>> &cols, std::size_t rows) {
  std::vector<std::vector<Scalar>> m(rows, std::vector<Scalar>(cols.size(), Scalar(0)));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r)
      m[r][c] = cols[c][r];
  return solve_exact(m, std::vector<Scalar>(rows, Scalar(0)), cols.size()).nullspace;
}

// Reduced basis of span(vs) restricted to the first `width` coordinates.
Echelon<Scalar> span(const std::vector<std::vector<Scalar>> &vs, std::size_t width) {
  Echelon<Scalar> e(width);
  for (const auto &v : vs)
    e.insert(std::vector<Scalar>(v.begin(), v.begin() + static_cast<long>(width)));
  return e;
}

bool same_span(const Echelon<Scalar> &a, const Echelon<Scalar> &b) {
  if (a.rank() != b.rank())
    return false;
  Echelon<Scalar> u = a;
  for (const auto &r : b.rows())
    if (u.insert(r))
      return false;
  return true;
}

bool in_span(const Echelon<Scalar> &e, std::vector<Scalar> v) {
  e.reduce(v);
  return std::all_of(v.begin(), v.end(), [](const Scalar &s) { return s.is_zero(); });
}

// A_iJ = d_i f_J - (df)_iJ / (k+1), keyed by (i, mask J)
std::map<std::pair<int, std::uint16_t>, SuperSymbol> killing_part(const SkewForm &f) {
  const Signature sig = f.signature();
  const int n = sig.n(), k = f.degree();
  const Rational w = frac(1, k + 1);
  std::map<std::pair<int, std::uint16_t>, SuperSymbol> A;
  for (int i = 0; i < n; ++i)
    for (std::uint16_t J : masks_of_size(n, k)) {
      auto js = indices_of(J);
      SuperSymbol fJ = f.component(js).dx(i);
      SuperSymbol d = fJ;
      for (std::size_t m = 0; m < js.size(); ++m) {
        std::vector<int> rest{i};
        for (std::size_t l = 0; l < js.size(); ++l)
          if (l != m)
            rest.push_back(js[l]);
        SuperSymbol term = f.component(rest).dx(js[m]);
        if ((m + 1) % 2)
          d -= term;
        else
          d += term;
      }
      SuperSymbol a = fJ - Scalar(w) * d;
      if (!a.is_zero())
        A[{i, J}] = a;
    }
  return A;
}

// A - eta ^ h with h = div f / (n - k + 1)
std::map<std::pair<int, std::uint16_t>, SuperSymbol> conformal_part(const SkewForm &f) {
  const Signature sig = f.signature();
  const int n = sig.n(), k = f.degree();
  auto A = killing_part(f);
  if (k == 0)
    return A;
  // (div f)_K = eta^ll d_l f_lK
  std::map<std::uint16_t, SuperSymbol> h;
  const Scalar w(frac(1, n - k + 1));
  for (std::uint16_t K : masks_of_size(n, k - 1)) {
    auto ks = indices_of(K);
    SuperSymbol s(sig);
    for (int l = 0; l < n; ++l) {
      std::vector<int> idx{l};
      idx.insert(idx.end(), ks.begin(), ks.end());
      s += Scalar(sig.eta(l)) * f.component(idx).dx(l);
    }
    if (!s.is_zero())
      h[K] = w * s;
  }
  auto h_at = [&](std::vector<int> idx) {
    int sg = sort_sign(idx);
    auto it = h.find(mask_of(idx));
    return sg == 0 || it == h.end() ? SuperSymbol(sig) : Scalar(sg) * it->second;
  };
  // (eta_i ^ h)_J = sum_m (-1)^(m-1) eta_{i j_m} h_{J \ j_m}
  for (int i = 0; i < n; ++i)
    for (std::uint16_t J : masks_of_size(n, k)) {
      if (!(J & (1u << i)))
        continue;
      auto js = indices_of(J);
      auto pos = static_cast<std::size_t>(std::find(js.begin(), js.end(), i) - js.begin());
      std::vector<int> rest;
      for (std::size_t l = 0; l < js.size(); ++l)
        if (l != pos)
          rest.push_back(js[l]);
      SuperSymbol e = Scalar(pos % 2 ? -sig.eta(i) : sig.eta(i)) * h_at(rest);
      if (e.is_zero())
        continue;
      SuperSymbol &slot = A[{i, J}];
      if (slot.signature() != sig)
        slot = SuperSymbol(sig);
      slot -= e;
      if (slot.is_zero())
        A.erase({i, J});
    }
  return A;
}

std::vector<std::pair<long, Terms<Scalar>>> tagged(const std::map<std::pair<int, std::uint16_t>, SuperSymbol> &A) {
  std::vector<std::pair<long, Terms<Scalar>>> out;
  for (const auto &[key, s] : A)
    out.emplace_back(static_cast<long>(key.first) * 65536 + key.second, s.terms());
  return out;
}

SuperSymbol bracket_with_dirac(const SkewForm &f, const EquivariantMap &s0) {
  const Signature sig = f.signature();
  SuperSymbol S = apply_superization(s0, symbol_of_form(f));
  return superbracket(named_symbol(NamedSymbol::Delta, sig), S);
}

// candidate h for b = h Delta: x-degree <= xmax, (p, xi) degrees one below those of b
std::vector<Mono> multiplier_monomials(Signature sig, const std::vector<SuperSymbol> &bs) {
  int xmax = -1;
  std::set<std::pair<int, int>> grades;
  for (const auto &b : bs)
    for (const auto &[m, c] : b.terms()) {
      xmax = std::max(xmax, m.xdeg());
      if (m.pdeg() >= 1 && m.xideg() >= 1)
        grades.insert({m.pdeg() - 1, m.xideg() - 1});
    }
  std::vector<Mono> out;
  for (auto [k, kappa] : grades)
    for (const Mono &m : graded_monomials(sig, xmax, k, kappa))
      out.push_back(m);
  return out;
}

bool is_multiple_of_dirac(const SuperSymbol &b) {
  const Signature sig = b.signature();
  auto hs = multiplier_monomials(sig, {b});
  if (hs.empty())
    return false;
  const SuperSymbol Delta = named_symbol(NamedSymbol::Delta, sig);
  Coords rows;
  std::vector<std::vector<Scalar>> cols;
  for (const Mono &m : hs)
    cols.push_back(rows.column({{0, (SuperSymbol::monomial(sig, m) * Delta).terms()}}));
  auto rhs = rows.column({{0, b.terms()}});
  std::vector<std::vector<Scalar>> mat(rows.size(), std::vector<Scalar>(cols.size(), Scalar(0)));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < cols[c].size(); ++r)
      mat[r][c] = cols[c][r];
  return solve_exact(mat, rhs, cols.size()).status != SolveStatus::Inconsistent;
}

// sign of a monomial under x1 -> -x1 (p1, xi1 and d1, gamma1 follow)
int reflection_sign(const Mono &m) { return (m.x[0] + m.p[0] + (m.xi & 1u)) % 2 ? -1 : 1; }

// kernel split into reflection-even and -odd parts; the reflection preserves every kernel
// since it normalizes the generators
std::pair<Echelon<Scalar>, Echelon<Scalar>> by_parity(const std::vector<Mono> &basis,
                                                     const std::vector<std::vector<Scalar>> &vs) {
  Echelon<Scalar> even(basis.size()), odd(basis.size());
  for (const auto &v : vs) {
    std::vector<Scalar> e(basis.size(), Scalar(0)), o = e;
    for (std::size_t j = 0; j < basis.size(); ++j)
      (reflection_sign(basis[j]) > 0 ? e : o)[j] = v[j];
    even.insert(std::move(e));
    odd.insert(std::move(o));
  }
  if (even.rank() + odd.rank() != vs.size())
    throw std::logic_error("invariant kernel not stable under reflection");
  return {even, odd};
}

} // namespace

// ---- SkewForm

SkewForm::SkewForm(Signature sig, int degree) : sig_(sig), degree_(degree) { check_form(sig, degree); }

SkewForm SkewForm::antisymmetrize(Signature sig, int degree, const std::map<std::vector<int>, SuperSymbol> &tensor) {
  SkewForm f(sig, degree);
  const Scalar w(1 / factorial(degree));
  std::map<std::uint16_t, SuperSymbol> acc;
  for (const auto &[idx, v] : tensor) {
    if (static_cast<int>(idx.size()) != degree)
      throw std::invalid_argument("antisymmetrize: index tuple of wrong length");
    for (int i : idx)
      if (i < 0 || i >= sig.n())
        throw std::out_of_range("antisymmetrize: index out of range");
    auto s = idx;
    int sg = sort_sign(s);
    if (sg == 0)
      continue;
    auto [it, fresh] = acc.try_emplace(mask_of(s), sig);
    it->second += Scalar(sg) * w * v;
  }
  for (auto &[m, v] : acc)
    if (!v.is_zero())
      f.c_[m] = v;
  return f;
}

SuperSymbol SkewForm::component(const std::vector<int> &idx) const {
  if (static_cast<int>(idx.size()) != degree_)
    throw std::invalid_argument("component: expected " + std::to_string(degree_) + " indices");
  auto s = idx;
  int sg = sort_sign(s);
  auto it = sg ? c_.find(mask_of(s)) : c_.end();
  if (it == c_.end())
    return SuperSymbol(sig_);
  return sg > 0 ? it->second : -it->second;
}

void SkewForm::set(const std::vector<int> &idx, const SuperSymbol &value) {
  if (static_cast<int>(idx.size()) != degree_)
    throw std::invalid_argument("set: expected " + std::to_string(degree_) + " indices");
  for (int i : idx)
    if (i < 0 || i >= sig_.n())
      throw std::out_of_range("set: index out of range");
  auto s = idx;
  int sg = sort_sign(s);
  if (sg == 0)
    throw std::invalid_argument("set: repeated index");
  if (value.is_zero())
    c_.erase(mask_of(s));
  else
    c_[mask_of(s)] = sg > 0 ? value : -value;
}

int SkewForm::x_degree() const {
  int d = -1;
  for (const auto &[m, v] : c_)
    d = std::max(d, degrees(v).x_degree);
  return d;
}

SkewForm &SkewForm::operator+=(const SkewForm &o) {
  if (o.sig_ != sig_ || o.degree_ != degree_)
    throw std::invalid_argument("adding forms of different type");
  for (const auto &[m, v] : o.c_) {
    auto [it, fresh] = c_.try_emplace(m, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero())
        c_.erase(it);
    }
  }
  return *this;
}

SkewForm SkewForm::scaled(const Scalar &s) const {
  SkewForm out(sig_, degree_);
  if (!s.is_zero())
    for (const auto &[m, v] : c_)
      out.c_[m] = v.scaled(s);
  return out;
}

std::string SkewForm::str() const {
  if (c_.empty())
    return "0";
  std::string out;
  for (const auto &[m, v] : c_) {
    std::string coef = render_terms(v.terms());
    std::string basis;
    for (int i : indices_of(m))
      basis += (basis.empty() ? "dx" : "^dx") + std::to_string(i + 1);
    std::string term;
    if (basis.empty())
      term = coef;
    else if (coef == "1")
      term = basis;
    else if (coef == "-1")
      term = "-" + basis;
    else if (v.terms().size() > 1)
      term = "(" + coef + ")*" + basis;
    else
      term = coef + "*" + basis;
    if (out.empty())
      out = term;
    else if (term[0] == '-')
      out += " - " + term.substr(1);
    else
      out += " + " + term;
  }
  return out;
}

// ---- symbols of forms

SuperSymbol symbol_of_form(const SkewForm &f) {
  const Signature sig = f.signature();
  const int k = f.degree();
  if (k == 0)
    throw std::invalid_argument("symbol_of_form: 0-forms have no symbol");
  // the sum over orderings of J gives (k-1)! times the increasing one
  const Scalar w(factorial(k - 1));
  SuperSymbol P(sig);
  for (int i = 0; i < sig.n(); ++i)
    for (std::uint16_t J : masks_of_size(sig.n(), k - 1)) {
      auto js = indices_of(J);
      std::vector<int> idx{i};
      idx.insert(idx.end(), js.begin(), js.end());
      SuperSymbol c = f.component(idx);
      if (c.is_zero())
        continue;
      Mono m;
      m.p[i] = 1;
      m.xi = J;
      P += (w * Scalar(sig.eta(i))) * c * SuperSymbol::monomial(sig, m);
    }
  return P;
}

const char *to_string(KYClass c) {
  switch (c) {
  case KYClass::KillingYano:
    return "Killing-Yano";
  case KYClass::ConformalKY:
    return "conformal Killing-Yano";
  case KYClass::Neither:
    return "neither";
  }
  return "?";
}

KYClass ky_pde_oracle(const SkewForm &f) {
  if (killing_part(f).empty())
    return KYClass::KillingYano;
  if (conformal_part(f).empty())
    return KYClass::ConformalKY;
  return KYClass::Neither;
}

EquivariantMap ky_superization(Signature sig, int degree) {
  check_form(sig, degree);
  if (degree == 0)
    throw std::invalid_argument("ky_superization: 0-forms have no symbol");
  return build_superization(sig, Affine::constant(0), 1, degree - 1);
}

KYClass ky_bracket_test(const SkewForm &f, const EquivariantMap &s0) {
  SuperSymbol b = bracket_with_dirac(f, s0);
  if (b.is_zero())
    return KYClass::KillingYano;
  return is_multiple_of_dirac(b) ? KYClass::ConformalKY : KYClass::Neither;
}

KYClass ky_bracket_test(const SkewForm &f) { return ky_bracket_test(f, ky_superization(f.signature(), f.degree())); }

KYComparison compare_ky(Signature sig, int degree, int max_x) {
  check_form(sig, degree);
  KYComparison out;
  const auto s0 = ky_superization(sig, degree);
  const auto xs = graded_monomials(sig, max_x, 0, 0);
  std::vector<SkewForm> basis;
  for (std::uint16_t J : masks_of_size(sig.n(), degree))
    for (const Mono &m : xs) {
      SkewForm f(sig, degree);
      f.set(indices_of(J), SuperSymbol::monomial(sig, m));
      basis.push_back(f);
    }
  const std::size_t N = basis.size();
  out.ansatz_dim = N;

  // defining equations
  Coords ra, rc;
  std::vector<std::vector<Scalar>> ca, cc;
  for (const auto &f : basis) {
    ca.push_back(ra.column(tagged(killing_part(f))));
    cc.push_back(rc.column(tagged(conformal_part(f))));
  }
  const auto ky_pde = span(kernel(ca, ra.size()), N);
  const auto cky_pde = span(kernel(cc, rc.size()), N);

  // brackets with Delta; conformal: b_f = h Delta for some h
  std::vector<SuperSymbol> bs;
  for (const auto &f : basis)
    bs.push_back(bracket_with_dirac(f, s0));
  Coords rb;
  std::vector<std::vector<Scalar>> cb;
  for (const auto &b : bs)
    cb.push_back(rb.column({{0, b.terms()}}));
  const auto ky_br = span(kernel(cb, rb.size()), N);
  const SuperSymbol Delta = named_symbol(NamedSymbol::Delta, sig);
  for (const Mono &m : multiplier_monomials(sig, bs))
    cb.push_back(rb.column({{0, (-(SuperSymbol::monomial(sig, m) * Delta)).terms()}}));
  const auto cky_br = span(kernel(cb, rb.size()), N);

  out.ky_dim_pde = ky_pde.rank();
  out.cky_dim_pde = cky_pde.rank();
  out.ky_dim_bracket = ky_br.rank();
  out.cky_dim_bracket = cky_br.rank();
  out.ky_agree = same_span(ky_pde, ky_br);
  out.cky_agree = same_span(cky_pde, cky_br);

  auto form_of = [&](const std::vector<Scalar> &v) {
    SkewForm f(sig, degree);
    for (std::size_t j = 0; j < N; ++j)
      if (!v[j].is_zero())
        f += basis[j].scaled(v[j]);
    return f;
  };
  for (const auto &r : ky_pde.rows())
    out.ky_witness.push_back(form_of(r));
  for (const auto &r : cky_pde.rows())
    if (!in_span(ky_pde, r))
      out.cky_witness.push_back(form_of(r));
  for (std::size_t j = 0; j < N; ++j) {
    std::vector<Scalar> e(N, Scalar(0));
    e[j] = Scalar(1);
    if (!in_span(cky_pde, e)) {
      out.neither_witness.push_back(basis[j]);
      break;
    }
  }

  auto check = [&](const SkewForm &f) {
    ++out.forms_checked;
    if (ky_pde_oracle(f) == ky_bracket_test(f, s0))
      ++out.forms_agreeing;
  };
  for (const auto &f : basis)
    check(f);
  for (const auto *ws : {&out.ky_witness, &out.cky_witness, &out.neither_witness})
    for (const auto &f : *ws)
      check(f);
  return out;
}

// ---- invariants

std::string Invariant::str() const {
  std::ostringstream os;
  os << to_string(module) << " k=" << k;
  if (kappa >= 0)
    os << " kappa=" << kappa;
  if (pseudo)
    os << " pseudo";
  if (module == ModuleKind::SpinorOperators)
    os << " lambda=" << to_string(lambda) << " mu=" << to_string(mu) << ": "
       << SpinorOperator(signature, element).str();
  else
    os << " delta=" << to_string(delta) << ": " << render_terms(element);
  return os.str();
}

std::vector<Invariant> invariant_scan(Signature sig, ModuleKind kind, int max_p, int max_xi) {
  const int n = sig.n();
  const int cap = max_xi < 0 ? n : std::min(max_xi, n);
  const auto gens = generators(sig);
  std::vector<Invariant> out;

  auto record = [&](int k, const std::vector<Mono> &span_basis, const std::vector<Scalar> &v, const Rational &delta,
                    const Rational &lambda, bool pseudo) {
    Invariant inv;
    inv.pseudo = pseudo;
    inv.module = kind;
    inv.signature = sig;
    inv.k = k;
    inv.delta = delta;
    if (kind == ModuleKind::SpinorOperators) {
      inv.lambda = lambda;
      inv.mu = lambda + delta;
    }
    // first nonzero coefficient normalized to 1
    Scalar lead(0);
    for (const auto &c : v)
      if (!c.is_zero()) {
        lead = c;
        break;
      }
    std::set<int> kappas;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!v[j].is_zero()) {
        inv.element.add(span_basis[j], v[j] / lead);
        kappas.insert(span_basis[j].xideg());
      }
    inv.kappa = kappas.size() == 1 ? *kappas.begin() : -1;
    out.push_back(std::move(inv));
  };

  // the identity operator is invariant for every lambda, so operators start at order one
  for (int k = kind == ModuleKind::SpinorOperators ? 1 : 0; k <= max_p; ++k) {
    std::vector<Mono> basis;
    for (int kappa = 0; kappa <= cap; ++kappa)
      for (const Mono &m : graded_monomials(sig, 0, k, kappa))
        basis.push_back(m);
    const Rational delta = frac(k, n);
    const Scalar d(delta);

    if (kind != ModuleKind::SpinorOperators) {
      std::unique_ptr<ModuleAction> mod;
      if (kind == ModuleKind::TensorSymbols)
        mod = std::make_unique<TensorModule>(sig);
      else
        mod = std::make_unique<HamiltonianModule>(sig);
      Coords rows;
      std::vector<std::vector<Scalar>> cols;
      for (const Mono &m : basis) {
        std::vector<std::pair<long, Terms<Scalar>>> parts;
        for (std::size_t g = 0; g < gens.size(); ++g)
          parts.emplace_back(static_cast<long>(g), mod->apply(gens[g], d, unit(m)));
        cols.push_back(rows.column(parts));
      }
      auto [even, odd] = by_parity(basis, kernel(cols, rows.size()));
      for (const auto &v : even.rows())
        record(k, basis, v, delta, 0, false);
      for (const auto &v : odd.rows())
        record(k, basis, v, delta, 0, true);
      continue;
    }

    // operators: L_X = base_0 + lambda (base_1 - base_0) + delta Div o D, lambda formal
    const OperatorModule m0(sig, 0), m1(sig, 1);
    Coords rows;
    std::vector<std::vector<Scalar>> c0, c1;
    for (const Mono &m : basis) {
      std::vector<std::pair<long, Terms<Scalar>>> p0, p1;
      for (std::size_t g = 0; g < gens.size(); ++g) {
        Terms<Scalar> a = m0.apply(gens[g], d, unit(m));
        Terms<Scalar> b = m1.base(gens[g], unit(m));
        b -= m0.base(gens[g], unit(m));
        p0.emplace_back(static_cast<long>(g), a);
        p1.emplace_back(static_cast<long>(g), b);
      }
      c0.push_back(rows.column(p0));
      c1.push_back(rows.column(p1));
    }
    auto entry = [&](const std::vector<std::vector<Scalar>> &cs, std::size_t r, std::size_t c) {
      return r < cs[c].size() ? cs[c][r] : Scalar(0);
    };
    // rows without lambda first (translations, rotations): their kernel is small
    std::vector<std::size_t> mixed;
    std::vector<std::vector<Scalar>> fixed_cols(basis.size());
    std::size_t fixed_rows = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool has_lambda = false;
      for (std::size_t c = 0; c < basis.size() && !has_lambda; ++c)
        has_lambda = !entry(c1, r, c).is_zero();
      if (has_lambda) {
        mixed.push_back(r);
        continue;
      }
      for (std::size_t c = 0; c < basis.size(); ++c)
        fixed_cols[c].push_back(entry(c0, r, c));
      ++fixed_rows;
    }
    const auto N = kernel(fixed_cols, fixed_rows);
    if (N.empty())
      continue;
    // the remaining rows on span(N), affine in lambda
    ParamLinearSystem sys;
    sys.unknowns = N.size();
    const RatFunc t = RatFunc::variable();
    for (std::size_t r : mixed) {
      std::vector<RatFunc> row(N.size());
      bool any = false;
      for (std::size_t j = 0; j < N.size(); ++j) {
        Scalar a(0), b(0);
        for (std::size_t c = 0; c < basis.size(); ++c)
          if (!N[j][c].is_zero()) {
            a += entry(c0, r, c) * N[j][c];
            b += entry(c1, r, c) * N[j][c];
          }
        row[j] = RatFunc(a) + RatFunc(b) * t;
        any = any || !row[j].is_zero();
      }
      if (any)
        sys.add_row(std::move(row), RatFunc(0));
    }
    if (sys.matrix.empty())
      throw std::logic_error("invariant_scan: operators of order " + std::to_string(k) + " invariant for every lambda");
    ParamSolution sol = solve_param(sys);
    if (sol.status == SolveStatus::Underdetermined)
      throw std::logic_error("invariant_scan: operators of order " + std::to_string(k) + " invariant for every lambda");
    for (const auto &sp : sol.singular) {
      if (sp.failure != Failure::Uniqueness)
        continue;
      std::vector<std::vector<Scalar>> vs;
      for (const auto &y : solve_specialized(sys, Scalar(sp.value)).nullspace) {
        std::vector<Scalar> v(basis.size(), Scalar(0));
        for (std::size_t j = 0; j < N.size(); ++j)
          for (std::size_t c = 0; c < basis.size(); ++c)
            v[c] += y[j] * N[j][c];
        vs.push_back(std::move(v));
      }
      auto [even, odd] = by_parity(basis, vs);
      for (const auto &v : even.rows())
        record(k, basis, v, delta, sp.value, false);
      for (const auto &v : odd.rows())
        record(k, basis, v, delta, sp.value, true);
    }
  }
  return out;
}

SpinorOperator dirac(Signature sig) {
  const int n = sig.n();
  return SpinorOperator::dirac(sig, frac(n - 1, 2 * n), frac(n + 1, 2 * n));
}

} // namespace spinq

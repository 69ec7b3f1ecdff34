#include "spinquant/conformal.hpp"
#include "spinquant/linsolve.hpp"

#include <map>
#include <mutex>

namespace spinq {

namespace {

SuperSymbol lowered_x(Signature sig, int i) { return SuperSymbol::x(sig, i).scaled(Scalar(sig.eta(i))); }

SuperSymbol zero(Signature sig) { return SuperSymbol(sig); }

Signature sig_of(const VectorField &X) {
  if (X.empty())
    throw std::invalid_argument("empty vector field");
  return X.front().signature();
}

SuperSymbol as_symbol(Signature sig, const Terms<Scalar> &v) { return SuperSymbol(sig, v); }

} // namespace

std::string ConfGenerator::name() const {
  switch (kind) {
  case GeneratorKind::Translation:
    return "P" + std::to_string(i + 1);
  case GeneratorKind::Rotation:
    return "M" + std::to_string(i + 1) + std::to_string(j + 1);
  case GeneratorKind::Dilation:
    return "D";
  case GeneratorKind::Special:
    return "K" + std::to_string(i + 1);
  }
  return "?";
}

ConfGenerator translation(Signature sig, int i) {
  if (i < 0 || i >= sig.n())
    throw std::out_of_range("translation index");
  VectorField f(sig.n(), zero(sig));
  f[i] = SuperSymbol::constant(sig, Scalar(1));
  return {GeneratorKind::Translation, i, -1, f};
}

ConfGenerator rotation(Signature sig, int i, int j) {
  if (i < 0 || j < 0 || i >= sig.n() || j >= sig.n() || i == j)
    throw std::out_of_range("rotation indices");
  // x_i d_j - x_j d_i
  VectorField f(sig.n(), zero(sig));
  f[j] = lowered_x(sig, i);
  f[i] = -lowered_x(sig, j);
  return {GeneratorKind::Rotation, i, j, f};
}

ConfGenerator dilation(Signature sig) {
  VectorField f;
  for (int k = 0; k < sig.n(); ++k)
    f.push_back(SuperSymbol::x(sig, k));
  return {GeneratorKind::Dilation, -1, -1, f};
}

ConfGenerator special(Signature sig, int i) {
  if (i < 0 || i >= sig.n())
    throw std::out_of_range("special conformal index");
  SuperSymbol xx = zero(sig);
  for (int k = 0; k < sig.n(); ++k)
    xx += SuperSymbol::x(sig, k) * lowered_x(sig, k);
  SuperSymbol xi_low = lowered_x(sig, i).scaled(Scalar(-2));
  VectorField f;
  for (int k = 0; k < sig.n(); ++k) {
    SuperSymbol c = xi_low * SuperSymbol::x(sig, k);
    if (k == i)
      c += xx;
    f.push_back(c);
  }
  return {GeneratorKind::Special, i, -1, f};
}

std::vector<ConfGenerator> generators(Signature sig) {
  std::vector<ConfGenerator> out;
  const int n = sig.n();
  for (int i = 0; i < n; ++i)
    out.push_back(translation(sig, i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      out.push_back(rotation(sig, i, j));
  out.push_back(dilation(sig));
  for (int i = 0; i < n; ++i)
    out.push_back(special(sig, i));
  return out;
}

SuperSymbol div(const VectorField &X) {
  Signature sig = sig_of(X);
  SuperSymbol d = zero(sig);
  for (int i = 0; i < sig.n(); ++i)
    d += X[i].dx(i);
  return d;
}

bool is_conformal_killing(const VectorField &X, Signature sig) {
  if (static_cast<int>(X.size()) != sig.n())
    return false;
  for (const auto &c : X)
    if (c.signature() != sig || degrees(c).p_degree > 0 || (!c.is_zero() && degrees(c).xi_degrees != std::vector<int>{0}))
      return false;
  SuperSymbol d = div(X).scaled(Scalar::frac(2, sig.n()));
  for (int i = 0; i < sig.n(); ++i)
    for (int j = i; j < sig.n(); ++j) {
      SuperSymbol s = X[j].dx(i).scaled(Scalar(sig.eta(j))) + X[i].dx(j).scaled(Scalar(sig.eta(i)));
      if (i == j)
        s -= d.scaled(Scalar(sig.eta(i)));
      if (!s.is_zero())
        return false;
    }
  return true;
}

VectorField vf_bracket(const VectorField &X, const VectorField &Y) {
  Signature sig = sig_of(X);
  const int n = sig.n();
  VectorField out(n, zero(sig));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[i] += X[j] * Y[i].dx(j) - Y[j] * X[i].dx(j);
  return out;
}

std::vector<Scalar> decompose(const VectorField &X, Signature sig) {
  auto gens = generators(sig);
  // rows indexed by (component, monomial)
  std::map<std::pair<int, Mono>, std::size_t> row_of;
  auto row_index = [&](int comp, const Mono &m) {
    auto [it, ins] = row_of.try_emplace({comp, m}, row_of.size());
    return it->second;
  };
  for (const auto &g : gens)
    for (int k = 0; k < sig.n(); ++k)
      for (const auto &[m, c] : g.field[k].terms())
        row_index(k, m);
  for (int k = 0; k < sig.n(); ++k)
    for (const auto &[m, c] : X[k].terms())
      row_index(k, m);
  std::vector<std::vector<Scalar>> A(row_of.size(), std::vector<Scalar>(gens.size(), Scalar(0)));
  std::vector<Scalar> b(row_of.size(), Scalar(0));
  for (std::size_t a = 0; a < gens.size(); ++a)
    for (int k = 0; k < sig.n(); ++k)
      for (const auto &[m, c] : gens[a].field[k].terms())
        A[row_of.at({k, m})][a] = c;
  for (int k = 0; k < sig.n(); ++k)
    for (const auto &[m, c] : X[k].terms())
      b[row_of.at({k, m})] = c;
  auto sol = solve_exact(A, b, gens.size());
  if (sol.status != SolveStatus::Unique)
    throw std::invalid_argument("vector field is not in the span of the conformal generators");
  return sol.solution;
}

std::vector<std::vector<std::vector<Scalar>>> structure_constants(Signature sig) {
  auto gens = generators(sig);
  const std::size_t N = gens.size();
  std::vector<std::vector<std::vector<Scalar>>> f(N, std::vector<std::vector<Scalar>>(N));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      if (b < a) {
        f[a][b] = f[b][a];
        for (auto &v : f[a][b])
          v = -v;
        continue;
      }
      f[a][b] = decompose(vf_bracket(gens[a].field, gens[b].field), sig);
    }
  return f;
}

std::vector<std::vector<Scalar>> killing_form(Signature sig) {
  auto f = structure_constants(sig);
  const std::size_t N = f.size();
  // (ad_a)_{dc} = f[a][c][d]
  std::vector<std::vector<Scalar>> K(N, std::vector<Scalar>(N, Scalar(0)));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a; b < N; ++b) {
      Scalar s(0);
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t d = 0; d < N; ++d)
          if (!f[a][d][c].is_zero() && !f[b][c][d].is_zero())
            s += f[a][d][c] * f[b][c][d];
      K[a][b] = K[b][a] = s;
    }
  return K;
}

std::vector<std::vector<Scalar>> inverse_killing_form(Signature sig) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<Scalar>>> cache;
  {
    std::lock_guard lock(mu);
    auto it = cache.find({sig.p, sig.q});
    if (it != cache.end())
      return it->second;
  }
  auto K = killing_form(sig);
  const std::size_t N = K.size();
  std::vector<std::vector<Scalar>> inv(N, std::vector<Scalar>(N, Scalar(0)));
  for (std::size_t c = 0; c < N; ++c) {
    std::vector<Scalar> e(N, Scalar(0));
    e[c] = Scalar(1);
    auto sol = solve_exact(K, e, N);
    if (sol.status != SolveStatus::Unique)
      throw std::logic_error("degenerate Killing form for signature " + sig.str());
    for (std::size_t r = 0; r < N; ++r)
      inv[r][c] = sol.solution[r];
  }
  std::lock_guard lock(mu);
  cache.emplace(std::pair{sig.p, sig.q}, inv);
  return inv;
}

std::vector<std::vector<SuperSymbol>> antisym_derivative(const VectorField &X, Signature sig) {
  const int n = sig.n();
  std::vector<std::vector<SuperSymbol>> B(n, std::vector<SuperSymbol>(n, zero(sig)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j)
        B[i][j] = (X[j].dx(i).scaled(Scalar(sig.eta(j))) - X[i].dx(j).scaled(Scalar(sig.eta(i))))
                      .scaled(Scalar::frac(1, 2));
  return B;
}

SuperSymbol moment(const VectorField &X, Signature sig, const BracketConvention &conv) {
  if (!is_conformal_killing(X, sig))
    throw std::invalid_argument("moment: vector field is not conformal Killing");
  SuperSymbol J = zero(sig);
  for (int k = 0; k < sig.n(); ++k)
    J += SuperSymbol::p(sig, k) * X[k];
  auto B = antisym_derivative(X, sig);
  // (1/2) B_ij S^ij summed over all i, j equals the sum over i < j
  for (int i = 0; i < sig.n(); ++i)
    for (int j = i + 1; j < sig.n(); ++j)
      if (!B[i][j].is_zero())
        J += B[i][j] * spin_tensor(i, j, sig, conv);
  return J;
}

const char *to_string(ModuleKind k) {
  switch (k) {
  case ModuleKind::TensorSymbols:
    return "tensor";
  case ModuleKind::HamiltonianSymbols:
    return "hamiltonian";
  case ModuleKind::SpinorOperators:
    return "operators";
  }
  return "?";
}

Terms<Scalar> TensorModule::base(const ConfGenerator &X, const Terms<Scalar> &v) const {
  const Signature sig = sig_;
  const int n = sig.n();
  SuperSymbol t = as_symbol(sig, v);
  SuperSymbol out = zero(sig);
  for (int i = 0; i < n; ++i) {
    if (!X.field[i].is_zero())
      out += X.field[i] * t.dx(i);
    SuperSymbol tp = t.dp(i), txi = t.dxi(i);
    for (int j = 0; j < n; ++j) {
      // -p_j d_i X^j d/dp_i  and  d_j X^i xi^j d/dxi^i
      if (!tp.is_zero()) {
        SuperSymbol dX = X.field[j].dx(i);
        if (!dX.is_zero())
          out -= SuperSymbol::p(sig, j) * dX * tp;
      }
      if (!txi.is_zero()) {
        SuperSymbol dX = X.field[i].dx(j);
        if (!dX.is_zero())
          out += dX * SuperSymbol::xi(sig, j) * txi;
      }
    }
  }
  // -(kappa/n) Div(X) on the xi-degree kappa component
  SuperSymbol d = div(X.field);
  if (!d.is_zero()) {
    std::map<int, Terms<Scalar>> by_kappa;
    for (const auto &[m, c] : v)
      if (m.xideg() > 0)
        by_kappa[m.xideg()].add(m, c);
    for (const auto &[kappa, part] : by_kappa)
      out -= (d * as_symbol(sig, part)).scaled(Scalar::frac(kappa, n));
  }
  return out.terms();
}

Terms<Scalar> TensorModule::weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const {
  return (div(X.field) * as_symbol(sig_, v)).terms();
}

const std::pair<SuperSymbol, SuperSymbol> &HamiltonianModule::lookup(const VectorField &X) const {
  std::lock_guard lock(cache_->mu);
  for (const auto &[f, v] : cache_->entries)
    if (f == X)
      return v;
  cache_->entries.push_back({X, {moment(X, sig_, conv_), div(X)}});
  return cache_->entries.back().second;
}

Terms<Scalar> HamiltonianModule::base(const ConfGenerator &X, const Terms<Scalar> &v) const {
  return superbracket(as_symbol(sig_, v), lookup(X.field).first, conv_).terms();
}

Terms<Scalar> HamiltonianModule::weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const {
  return (lookup(X.field).second * as_symbol(sig_, v)).terms();
}

SuperSymbol action_T(const ConfGenerator &X, const Scalar &delta, const SuperSymbol &t) {
  TensorModule m(t.signature());
  return SuperSymbol(t.signature(), m.apply(X, delta, t.terms()), t.weight());
}

SuperSymbol action_S(const ConfGenerator &X, const Scalar &delta, const SuperSymbol &s,
                     const BracketConvention &conv) {
  HamiltonianModule m(s.signature(), conv);
  return SuperSymbol(s.signature(), m.apply(X, delta, s.terms()), s.weight());
}

std::array<Terms<Scalar>, 3> casimir_apply(const ModuleAction &module, const Terms<Scalar> &v) {
  const Signature sig = module.signature();
  auto gens = generators(sig);
  auto Kinv = inverse_killing_form(sig);
  const std::size_t N = gens.size();
  std::vector<Terms<Scalar>> Bv(N), Dv(N);
  for (std::size_t b = 0; b < N; ++b) {
    Bv[b] = module.base(gens[b], v);
    Dv[b] = module.weight_part(gens[b], v);
  }
  std::array<Terms<Scalar>, 3> out;
  for (std::size_t a = 0; a < N; ++a) {
    Terms<Scalar> w0, w1;
    for (std::size_t b = 0; b < N; ++b)
      if (!Kinv[a][b].is_zero()) {
        w0.add(Bv[b], Kinv[a][b]);
        w1.add(Dv[b], Kinv[a][b]);
      }
    if (w0.is_zero() && w1.is_zero())
      continue;
    out[0] += module.base(gens[a], w0);
    out[1] += module.base(gens[a], w1);
    out[1] += module.weight_part(gens[a], w0);
    out[2] += module.weight_part(gens[a], w1);
  }
  return out;
}

CasimirMatrix casimir(const ModuleAction &module, const std::vector<Mono> &basis) {
  CasimirMatrix M;
  M.basis = basis;
  std::map<Mono, std::size_t> index;
  for (std::size_t k = 0; k < basis.size(); ++k)
    index.emplace(basis[k], k);
  M.entries.assign(basis.size(), std::vector<UPoly>(basis.size()));
  for (std::size_t col = 0; col < basis.size(); ++col) {
    Terms<Scalar> v;
    v.add(basis[col], Scalar(1));
    auto img = casimir_apply(module, v);
    std::vector<std::vector<Scalar>> coeffs(basis.size(), std::vector<Scalar>(3, Scalar(0)));
    for (int e = 0; e < 3; ++e)
      for (const auto &[m, c] : img[e]) {
        auto it = index.find(m);
        if (it == index.end())
          throw bound_error("casimir: image of " + render_mono(basis[col]) + " leaves the working subspace via " +
                                render_mono(m),
                            std::max(m.xdeg(), std::max(m.pdeg(), m.xideg())));
        coeffs[it->second][e] = c;
      }
    for (std::size_t row = 0; row < basis.size(); ++row)
      M.entries[row][col] = UPoly(coeffs[row]);
  }
  return M;
}

} // namespace spinq

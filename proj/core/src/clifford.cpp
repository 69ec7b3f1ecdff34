#include "spinquant/clifford.hpp"
#include "spinquant/symalg.hpp"

#include <bit>

namespace spinq {

int blade_mul(std::uint16_t a, std::uint16_t b, Signature sig, std::uint16_t &out) {
  // reorder sign counts pairs (i in a, j in b, i > j); shared indices contract to eta_kk
  int sign = merge_sign(a, b);
  std::uint16_t common = a & b;
  while (common) {
    int k = std::countr_zero(common);
    sign *= sig.eta(k);
    common &= static_cast<std::uint16_t>(common - 1);
  }
  out = a ^ b;
  return sign;
}

CliffordElement CliffordElement::scalar(Signature sig, const Scalar &c) { return blade(sig, 0, c); }

CliffordElement CliffordElement::blade(Signature sig, std::uint16_t mask, const Scalar &c) {
  if (mask >> sig.n())
    throw std::out_of_range("blade index outside the signature");
  CliffordElement e(sig);
  e.add(mask, c);
  return e;
}

CliffordElement CliffordElement::gamma(Signature sig, int i) {
  if (i < 0 || i >= sig.n())
    throw std::out_of_range("gamma index");
  return blade(sig, static_cast<std::uint16_t>(1u << i));
}

Scalar CliffordElement::coeff(std::uint16_t mask) const {
  auto it = t_.find(mask);
  return it == t_.end() ? Scalar(0) : it->second;
}

void CliffordElement::add(std::uint16_t mask, const Scalar &c) {
  if (c.is_zero())
    return;
  auto [it, ins] = t_.try_emplace(mask, c);
  if (!ins) {
    it->second += c;
    if (it->second.is_zero())
      t_.erase(it);
  }
}

CliffordElement &CliffordElement::operator+=(const CliffordElement &o) {
  if (!(o.sig_ == sig_))
    throw std::invalid_argument("Clifford signature mismatch");
  for (const auto &[m, c] : o.t_)
    add(m, c);
  return *this;
}

CliffordElement &CliffordElement::operator-=(const CliffordElement &o) {
  if (!(o.sig_ == sig_))
    throw std::invalid_argument("Clifford signature mismatch");
  for (const auto &[m, c] : o.t_)
    add(m, -c);
  return *this;
}

CliffordElement CliffordElement::scaled(const Scalar &c) const {
  CliffordElement out(sig_);
  if (c.is_zero())
    return out;
  for (const auto &[m, v] : t_)
    out.t_.emplace(m, v * c);
  return out;
}

std::string CliffordElement::str() const {
  Terms<Scalar> t;
  for (const auto &[m, c] : t_) {
    Mono k;
    k.xi = m;
    t.add(k, c);
  }
  return render_terms(t, "d", "gamma");
}

CliffordElement cliff_mul(const CliffordElement &a, const CliffordElement &b) {
  if (!(a.signature() == b.signature()))
    throw std::invalid_argument("Clifford signature mismatch");
  CliffordElement out(a.signature());
  for (const auto &[ma, ca] : a.terms())
    for (const auto &[mb, cb] : b.terms()) {
      std::uint16_t m;
      int s = blade_mul(ma, mb, a.signature(), m);
      out.add(m, ca * cb * Scalar(s));
    }
  return out;
}

Matrix identity_matrix(std::size_t d) {
  Matrix m(d, std::vector<Scalar>(d, Scalar(0)));
  for (std::size_t i = 0; i < d; ++i)
    m[i][i] = Scalar(1);
  return m;
}

Matrix matmul(const Matrix &a, const Matrix &b) {
  const std::size_t r = a.size(), k = b.size(), c = b.empty() ? 0 : b.front().size();
  Matrix out(r, std::vector<Scalar>(c, Scalar(0)));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero())
        continue;
      for (std::size_t j = 0; j < c; ++j)
        if (!b[l][j].is_zero())
          out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

Matrix matadd(const Matrix &a, const Matrix &b, const Scalar &scale) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      out[i][j] += b[i][j] * scale;
  return out;
}

namespace {

Matrix kron(const Matrix &a, const Matrix &b) {
  const std::size_t ra = a.size(), rb = b.size();
  Matrix out(ra * rb, std::vector<Scalar>(ra * rb, Scalar(0)));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ra; ++j) {
      if (a[i][j].is_zero())
        continue;
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < rb; ++l)
          out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
    }
  return out;
}

Matrix kron_all(const std::vector<Matrix> &fs) {
  Matrix out = identity_matrix(1);
  for (const auto &f : fs)
    out = kron(out, f);
  return out;
}

} // namespace

GammaRealization gamma_matrices(Signature sig) {
  const Scalar I = Scalar::i();
  const Matrix s1{{Scalar(0), Scalar(1)}, {Scalar(1), Scalar(0)}};
  const Matrix s2{{Scalar(0), -I}, {I, Scalar(0)}};
  const Matrix s3{{Scalar(1), Scalar(0)}, {Scalar(0), Scalar(-1)}};
  const Matrix id2 = identity_matrix(2);
  const int n = sig.n(), m = n / 2;
  // Euclidean generators e_1..e_n squaring to 1
  std::vector<Matrix> e;
  for (int k = 0; k < m; ++k)
    for (const Matrix *s : {&s1, &s2}) {
      std::vector<Matrix> fs;
      for (int l = 0; l < m; ++l)
        fs.push_back(l < k ? s3 : (l == k ? *s : id2));
      e.push_back(kron_all(fs));
    }
  if (n % 2) {
    std::vector<Matrix> fs(m, s3);
    e.push_back(kron_all(fs));
  }
  GammaRealization g{sig, {}};
  for (int i = 0; i < n; ++i) {
    Matrix gi = e[i];
    if (sig.eta(i) < 0)
      for (auto &row : gi)
        for (auto &v : row)
          v *= I;
    g.gammas.push_back(std::move(gi));
  }
  return g;
}

Matrix GammaRealization::realize(const CliffordElement &a) const {
  const std::size_t d = dim();
  Matrix out(d, std::vector<Scalar>(d, Scalar(0)));
  for (const auto &[mask, c] : a.terms()) {
    Matrix prod = identity_matrix(d);
    for (int i = 0; i < signature.n(); ++i)
      if (mask & (1u << i))
        prod = matmul(prod, gammas[i]);
    out = matadd(out, prod, c);
  }
  return out;
}

} // namespace spinq

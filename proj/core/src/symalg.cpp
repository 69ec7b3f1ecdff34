#include "spinquant/symalg.hpp"

#include <algorithm>
#include <set>

namespace spinq {

namespace {

void check_index(const Signature &sig, int i) {
  if (i < 0 || i >= sig.n())
    throw std::out_of_range("index " + std::to_string(i + 1) + " outside 1.." + std::to_string(sig.n()));
}

void check_same(const SuperSymbol &a, const SuperSymbol &b) {
  if (!(a.signature() == b.signature()))
    throw std::invalid_argument("signature mismatch: " + a.signature().str() + " vs " + b.signature().str());
}

} // namespace

SuperSymbol SuperSymbol::constant(Signature sig, const Scalar &c) { return monomial(sig, Mono{}, c); }

SuperSymbol SuperSymbol::monomial(Signature sig, const Mono &m, const Scalar &c) {
  SuperSymbol s(sig);
  s.terms_.add(m, c);
  return s;
}

SuperSymbol SuperSymbol::x(Signature sig, int i) {
  check_index(sig, i);
  Mono m;
  m.x[i] = 1;
  return monomial(sig, m);
}

SuperSymbol SuperSymbol::p(Signature sig, int i) {
  check_index(sig, i);
  Mono m;
  m.p[i] = 1;
  return monomial(sig, m);
}

SuperSymbol SuperSymbol::xi(Signature sig, int i) {
  check_index(sig, i);
  Mono m;
  m.xi = static_cast<std::uint16_t>(1u << i);
  return monomial(sig, m);
}

SuperSymbol SuperSymbol::hbar(Signature sig) {
  Mono m;
  m.hbar = 1;
  return monomial(sig, m);
}

std::optional<int> SuperSymbol::parity() const {
  std::optional<int> par;
  for (const auto &[m, c] : terms_) {
    int q = m.xideg() & 1;
    if (par && *par != q)
      return std::nullopt;
    par = q;
  }
  return par;
}

SuperSymbol &SuperSymbol::operator+=(const SuperSymbol &o) {
  if (terms_.is_zero() && !(sig_ == o.sig_))
    sig_ = o.sig_;
  check_same(*this, o);
  terms_ += o.terms_;
  return *this;
}

SuperSymbol &SuperSymbol::operator-=(const SuperSymbol &o) {
  if (terms_.is_zero() && !(sig_ == o.sig_))
    sig_ = o.sig_;
  check_same(*this, o);
  terms_ -= o.terms_;
  return *this;
}

SuperSymbol SuperSymbol::scaled(const Scalar &c) const {
  return SuperSymbol(sig_, terms_.scaled(c), weight_);
}

SuperSymbol SuperSymbol::dx(int i) const {
  SuperSymbol out(sig_);
  out.weight_ = weight_;
  for (const auto &[m, c] : terms_) {
    if (m.x[i] == 0)
      continue;
    Mono k = m;
    --k.x[i];
    out.terms_.add(k, c * Scalar(m.x[i]));
  }
  return out;
}

SuperSymbol SuperSymbol::dp(int i) const {
  SuperSymbol out(sig_);
  out.weight_ = weight_;
  for (const auto &[m, c] : terms_) {
    if (m.p[i] == 0)
      continue;
    Mono k = m;
    --k.p[i];
    out.terms_.add(k, c * Scalar(m.p[i]));
  }
  return out;
}

SuperSymbol SuperSymbol::dxi(int i) const {
  SuperSymbol out(sig_);
  out.weight_ = weight_;
  const auto bit = static_cast<std::uint16_t>(1u << i);
  for (const auto &[m, c] : terms_) {
    if (!(m.xi & bit))
      continue;
    Mono k = m;
    k.xi &= static_cast<std::uint16_t>(~bit);
    out.terms_.add(k, (bits_below(m.xi, i) & 1) ? -c : c);
  }
  return out;
}

SuperSymbol SuperSymbol::dxi_right(int i) const {
  SuperSymbol out(sig_);
  out.weight_ = weight_;
  const auto bit = static_cast<std::uint16_t>(1u << i);
  for (const auto &[m, c] : terms_) {
    if (!(m.xi & bit))
      continue;
    Mono k = m;
    k.xi &= static_cast<std::uint16_t>(~bit);
    out.terms_.add(k, (bits_above(m.xi, i) & 1) ? -c : c);
  }
  return out;
}

SuperSymbol SuperSymbol::p_homogeneous(int k) const {
  SuperSymbol out(sig_);
  out.weight_ = weight_;
  for (const auto &[m, c] : terms_)
    if (m.pdeg() == k)
      out.terms_.add(m, c);
  return out;
}

SuperSymbol SuperSymbol::specialize_hbar(const Rational &h) const {
  SuperSymbol out(sig_);
  out.weight_ = weight_;
  for (const auto &[m, c] : terms_) {
    if (m.hbar == 0) {
      out.terms_.add(m, c);
      continue;
    }
    Mono k = m;
    k.hbar = 0;
    out.terms_.add(k, c * Scalar(pow(h, m.hbar)));
  }
  return out;
}

int mono_mul(const Mono &a, const Mono &b, Mono &out) {
  if (a.xi & b.xi)
    return 0;
  for (int i = 0; i < kMaxDim; ++i) {
    out.x[i] = static_cast<std::uint8_t>(a.x[i] + b.x[i]);
    out.p[i] = static_cast<std::uint8_t>(a.p[i] + b.p[i]);
  }
  out.xi = static_cast<std::uint16_t>(a.xi | b.xi);
  out.hbar = static_cast<std::int8_t>(a.hbar + b.hbar);
  return merge_sign(a.xi, b.xi);
}

SuperSymbol mul(const SuperSymbol &s, const SuperSymbol &t) {
  check_same(s, t);
  SuperSymbol out(s.signature());
  out.set_weight(s.weight() + t.weight());
  Mono k;
  for (const auto &[ma, ca] : s.terms())
    for (const auto &[mb, cb] : t.terms()) {
      int sign = mono_mul(ma, mb, k);
      if (sign == 0)
        continue;
      Scalar c = ca * cb;
      out.terms().add(k, sign > 0 ? c : -c);
    }
  return out;
}

SuperSymbol power(const SuperSymbol &s, int e) {
  if (e < 0)
    throw std::invalid_argument("negative power of a symbol");
  SuperSymbol out = SuperSymbol::constant(s.signature(), Scalar(1));
  for (int k = 0; k < e; ++k)
    out = mul(out, s);
  return out;
}

SuperSymbol superbracket(const SuperSymbol &s, const SuperSymbol &t, const BracketConvention &conv) {
  check_same(s, t);
  const Signature sig = s.signature();
  const int n = sig.n();
  SuperSymbol out(sig);
  out.set_weight(s.weight() + t.weight());
  auto &acc = out.terms();
  Mono a, b, k;
  for (const auto &[ma, ca] : s.terms()) {
    for (const auto &[mb, cb] : t.terms()) {
      const Scalar cab = ca * cb;
      for (int i = 0; i < n; ++i) {
        // d/dx^i s * d/dp_i t
        if (ma.x[i] && mb.p[i]) {
          a = ma;
          b = mb;
          --a.x[i];
          --b.p[i];
          if (int sign = mono_mul(a, b, k))
            acc.add(k, cab * Scalar(sign * ma.x[i] * mb.p[i]));
        }
        // - d/dp_i s * d/dx^i t
        if (ma.p[i] && mb.x[i]) {
          a = ma;
          b = mb;
          --a.p[i];
          --b.x[i];
          if (int sign = mono_mul(a, b, k))
            acc.add(k, cab * Scalar(-sign * ma.p[i] * mb.x[i]));
        }
        // c_odd eta^ii (s <-d/dxi^i)(d/dxi^i -> t)
        const auto bit = static_cast<std::uint16_t>(1u << i);
        if ((ma.xi & bit) && (mb.xi & bit)) {
          a = ma;
          b = mb;
          a.xi &= static_cast<std::uint16_t>(~bit);
          b.xi &= static_cast<std::uint16_t>(~bit);
          int sign = mono_mul(a, b, k);
          if (sign == 0)
            continue;
          if (bits_above(ma.xi, i) & 1)
            sign = -sign;
          if (bits_below(mb.xi, i) & 1)
            sign = -sign;
          k.hbar = static_cast<std::int8_t>(k.hbar - 1);
          acc.add(k, cab * conv.odd_factor * Scalar(sign * sig.eta(i)));
        }
      }
    }
  }
  if (conv.hbar)
    return out.specialize_hbar(*conv.hbar);
  return out;
}

SuperSymbol spin_tensor(int i, int j, Signature sig, const BracketConvention &conv) {
  check_index(sig, i);
  check_index(sig, j);
  SuperSymbol s = mul(SuperSymbol::hbar(sig), mul(SuperSymbol::xi(sig, i), SuperSymbol::xi(sig, j)));
  s = s.scaled(Scalar::i().inverse());
  if (conv.hbar)
    return s.specialize_hbar(*conv.hbar);
  return s;
}

SuperSymbol named_symbol(NamedSymbol name, Signature sig) {
  SuperSymbol out(sig);
  for (int i = 0; i < sig.n(); ++i) {
    if (name == NamedSymbol::Delta)
      out += mul(SuperSymbol::p(sig, i), SuperSymbol::xi(sig, i));
    else
      out += mul(SuperSymbol::p(sig, i), SuperSymbol::p(sig, i)).scaled(Scalar(sig.eta(i)));
  }
  return out;
}

Degrees degrees(const SuperSymbol &s) {
  Degrees d;
  std::set<int> kappas;
  for (const auto &[m, c] : s.terms()) {
    d.p_degree = std::max(d.p_degree, m.pdeg());
    d.x_degree = std::max(d.x_degree, m.xdeg());
    kappas.insert(m.xideg());
  }
  d.xi_degrees.assign(kappas.begin(), kappas.end());
  return d;
}

namespace {

using Matrix = std::vector<std::vector<Rational>>;

Matrix rotation_matrix(const Signature &sig, int a, int b) {
  const int n = sig.n();
  Matrix m(n, std::vector<Rational>(n, 0));
  m[a][b] = sig.eta(b);
  m[b][a] = -sig.eta(a);
  return m;
}

Matrix commutator(const Matrix &x, const Matrix &y) {
  const std::size_t n = x.size();
  Matrix out(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        out[i][j] += x[i][k] * y[k][j] - y[i][k] * x[k][j];
  return out;
}

} // namespace

void verify_convention(const BracketConvention &conv, Signature sig) {
  const int n = sig.n();
  std::optional<Scalar> ratio;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          Matrix comm = commutator(rotation_matrix(sig, a, b), rotation_matrix(sig, c, d));
          SuperSymbol expected(sig);
          for (int e = 0; e < n; ++e)
            for (int f = e + 1; f < n; ++f) {
              Rational coef = comm[e][f] / sig.eta(f);
              if (sgn(coef) != 0)
                expected += spin_tensor(e, f, sig, conv).scaled(Scalar(coef));
            }
          SuperSymbol got = superbracket(spin_tensor(a, b, sig, conv), spin_tensor(c, d, sig, conv), conv);
          if (expected.is_zero()) {
            if (!got.is_zero())
              throw std::logic_error("spin components do not close on o(p,q)");
            continue;
          }
          // got must equal ratio * expected for one common ratio.
          const auto &[m0, c0] = *expected.terms().begin();
          Scalar r = got.terms().coeff(m0) / c0;
          if (ratio && !(*ratio == r))
            throw std::logic_error("spin bracket is not a fixed multiple of the o(p,q) commutator");
          ratio = r;
          if (!(got == expected.scaled(r)) || r.is_zero())
            throw std::logic_error("spin bracket is not proportional to the o(p,q) commutator");
        }
  SuperSymbol delta = named_symbol(NamedSymbol::Delta, sig);
  SuperSymbol dd = superbracket(delta, delta, conv);
  SuperSymbol r = named_symbol(NamedSymbol::R, sig);
  // With formal hbar the constant is c_odd = odd_factor/hbar; compare at hbar = 1.
  if (!conv.hbar)
    dd = dd.specialize_hbar(1);
  const auto &[m0, c0] = *r.terms().begin();
  Scalar k = dd.terms().coeff(m0) / c0;
  if (k.is_zero() || !(dd == r.scaled(k)))
    throw std::logic_error("{Delta, Delta} is not a nonzero multiple of R");
}

std::string render_mono(const Mono &m, const char *pname, const char *xiname) {
  std::string out;
  auto append = [&](const std::string &f) {
    if (!out.empty())
      out += "*";
    out += f;
  };
  for (int i = 0; i < kMaxDim; ++i)
    if (m.x[i])
      append("x" + std::to_string(i + 1) + (m.x[i] > 1 ? "^" + std::to_string(m.x[i]) : ""));
  for (int i = 0; i < kMaxDim; ++i)
    if (m.p[i])
      append(pname + std::to_string(i + 1) + (m.p[i] > 1 ? "^" + std::to_string(m.p[i]) : ""));
  for (int i = 0; i < kMaxDim; ++i)
    if (m.xi & (1u << i))
      append(xiname + std::to_string(i + 1));
  if (m.hbar)
    append(std::string("hbar") + (m.hbar != 1 ? "^" + std::to_string(m.hbar) : ""));
  return out;
}

std::string render_terms(const Terms<Scalar> &t, const char *pname, const char *xiname) {
  if (t.is_zero())
    return "0";
  // Highest p-degree first, then highest xi-degree, then key order.
  std::vector<std::pair<Mono, Scalar>> items(t.begin(), t.end());
  std::stable_sort(items.begin(), items.end(), [](const auto &l, const auto &r) {
    if (l.first.pdeg() != r.first.pdeg())
      return l.first.pdeg() > r.first.pdeg();
    return l.first.xideg() > r.first.xideg();
  });
  std::string out;
  for (const auto &[m, c] : items) {
    std::string mono = render_mono(m, pname, xiname);
    bool neg = false;
    std::string cs;
    if (c.is_compound()) {
      cs = c.str();
    } else {
      cs = c.str();
      if (cs[0] == '-') {
        neg = true;
        cs = cs.substr(1);
      }
    }
    std::string term;
    if (mono.empty())
      term = cs;
    else if (cs == "1")
      term = mono;
    else
      term = cs + "*" + mono;
    if (out.empty())
      out = neg ? "-" + term : term;
    else
      out += (neg ? " - " : " + ") + term;
  }
  return out;
}

std::string SuperSymbol::str() const { return render_terms(terms_); }

} // namespace spinq

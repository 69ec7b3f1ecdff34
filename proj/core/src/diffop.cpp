#include "spinquant/diffop.hpp"

#include <map>

namespace spinq {

namespace {

Mono d_mono(int i) {
  Mono m;
  m.p[i] = 1;
  return m;
}

Scalar scalar_pow(const Scalar &b, int e) {
  Scalar r(1);
  for (int k = 0; k < e; ++k)
    r *= b;
  return r;
}

// c(b, e) * c! / (c - e)!
long leibniz_factor(int b, int c, int e) {
  long f = 1;
  for (int k = 0; k < e; ++k)
    f = f * (b - k) / (k + 1);
  for (int k = 0; k < e; ++k)
    f *= c - k;
  return f;
}

void leibniz(Signature sig, const Mono &a, const Mono &b, const Scalar &coef, int pos, Mono cur, long factor,
             Terms<Scalar> &out) {
  // cur carries x^(a.x + b.x - e) and d^(a.p - e + b.p) for the chosen prefix of e
  if (pos == sig.n()) {
    out.add(cur, coef * Scalar(factor));
    return;
  }
  int top = std::min<int>(a.p[pos], b.x[pos]);
  for (int e = 0; e <= top; ++e) {
    Mono m = cur;
    m.x[pos] = static_cast<std::uint8_t>(a.x[pos] + b.x[pos] - e);
    m.p[pos] = static_cast<std::uint8_t>(a.p[pos] - e + b.p[pos]);
    leibniz(sig, a, b, coef, pos + 1, m, factor * leibniz_factor(a.p[pos], b.x[pos], e), out);
  }
}

void check_weight(const Rational &a, const Rational &b, const char *what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": weight mismatch (" + to_string(a) + " vs " + to_string(b) + ")");
}

} // namespace

SpinorOperator SpinorOperator::identity(Signature sig, Rational lambda, Rational mu) {
  Terms<Scalar> t;
  t.add(Mono{}, Scalar(1));
  return {sig, t, lambda, mu};
}

SpinorOperator SpinorOperator::derivative(Signature sig, int i) {
  if (i < 0 || i >= sig.n())
    throw std::out_of_range("derivative index");
  Terms<Scalar> t;
  t.add(d_mono(i), Scalar(1));
  return {sig, t};
}

SpinorOperator SpinorOperator::gamma(Signature sig, int i) {
  if (i < 0 || i >= sig.n())
    throw std::out_of_range("gamma index");
  Mono m;
  m.xi = static_cast<std::uint16_t>(1u << i);
  Terms<Scalar> t;
  t.add(m, Scalar(1));
  return {sig, t};
}

SpinorOperator SpinorOperator::multiplication(const SuperSymbol &f) {
  for (const auto &[m, c] : f.terms())
    if (m.pdeg() || m.xi || m.hbar)
      throw std::invalid_argument("multiplication operator needs an x-only symbol");
  return {f.signature(), f.terms()};
}

SpinorOperator SpinorOperator::dirac(Signature sig, Rational lambda, Rational mu) {
  Terms<Scalar> t;
  for (int i = 0; i < sig.n(); ++i) {
    Mono m = d_mono(i);
    m.xi = static_cast<std::uint16_t>(1u << i);
    t.add(m, Scalar(1));
  }
  return {sig, t, lambda, mu};
}

int SpinorOperator::order() const {
  int o = -1;
  for (const auto &[m, c] : t_)
    o = std::max(o, m.pdeg());
  return o;
}

SpinorOperator &SpinorOperator::operator+=(const SpinorOperator &o) {
  if (!(o.sig_ == sig_))
    throw std::invalid_argument("operator signature mismatch");
  t_ += o.t_;
  return *this;
}

SpinorOperator &SpinorOperator::operator-=(const SpinorOperator &o) {
  if (!(o.sig_ == sig_))
    throw std::invalid_argument("operator signature mismatch");
  t_ -= o.t_;
  return *this;
}

std::string SpinorOperator::str() const { return render_terms(t_, "d", "gamma"); }

Terms<Scalar> compose_terms(Signature sig, const Terms<Scalar> &a, const Terms<Scalar> &b) {
  Terms<Scalar> out;
  for (const auto &[ma, ca] : a)
    for (const auto &[mb, cb] : b) {
      std::uint16_t blade;
      int s = blade_mul(ma.xi, mb.xi, sig, blade);
      Mono start;
      start.xi = blade;
      start.hbar = static_cast<std::int8_t>(ma.hbar + mb.hbar);
      leibniz(sig, ma, mb, ca * cb * Scalar(s), 0, start, 1, out);
    }
  return out;
}

SpinorOperator compose(const SpinorOperator &a, const SpinorOperator &b) {
  if (!(a.signature() == b.signature()))
    throw std::invalid_argument("operator signature mismatch");
  check_weight(a.lambda(), b.mu(), "compose");
  return {a.signature(), compose_terms(a.signature(), a.terms(), b.terms()), b.lambda(), a.mu()};
}

SpinorOperator kosmann(const VectorField &X, Signature sig, const Rational &lambda) {
  if (!is_conformal_killing(X, sig))
    throw std::invalid_argument("kosmann: vector field is not conformal Killing");
  Terms<Scalar> t;
  for (int i = 0; i < sig.n(); ++i)
    for (const auto &[m, c] : X[i].terms()) {
      Mono k = m;
      k.p[i] = 1;
      t.add(k, c);
    }
  // (1/4) B_ij gamma^i gamma^j = (1/2) sum_{i<j} B_ij gamma^ij
  auto B = antisym_derivative(X, sig);
  for (int i = 0; i < sig.n(); ++i)
    for (int j = i + 1; j < sig.n(); ++j)
      for (const auto &[m, c] : B[i][j].terms()) {
        Mono k = m;
        k.xi = static_cast<std::uint16_t>((1u << i) | (1u << j));
        t.add(k, c * Scalar::frac(1, 2));
      }
  if (lambda != 0)
    t.add(div(X).terms(), Scalar(lambda));
  return {sig, t, lambda, lambda};
}

SpinorOperator adjoint_action(const ConfGenerator &X, const SpinorOperator &D) {
  const Signature sig = D.signature();
  SpinorOperator out = compose(kosmann(X, sig, D.mu()), D);
  out -= compose(D, kosmann(X, sig, D.lambda()));
  return out;
}

const std::pair<Terms<Scalar>, Terms<Scalar>> &OperatorModule::lookup(const VectorField &X) const {
  std::lock_guard lock(cache_->mu);
  for (const auto &[f, v] : cache_->entries)
    if (f == X)
      return v;
  cache_->entries.push_back({X, {kosmann(X, sig_, lambda_).terms(), div(X).terms()}});
  return cache_->entries.back().second;
}

Terms<Scalar> OperatorModule::base(const ConfGenerator &X, const Terms<Scalar> &v) const {
  const Terms<Scalar> &L = lookup(X.field).first;
  Terms<Scalar> out = compose_terms(sig_, L, v);
  out -= compose_terms(sig_, v, L);
  return out;
}

Terms<Scalar> OperatorModule::weight_part(const ConfGenerator &X, const Terms<Scalar> &v) const {
  return compose_terms(sig_, lookup(X.field).second, v);
}

namespace {

// Factor applied to a term with |b| = k derivatives and |I| = kappa when ordering
// (forward) or reading the symbol back (inverse). The hbar exponent shift is returned in `shift`.
Scalar order_factor(int k, int kappa, const BracketConvention &conv, bool forward) {
  Scalar s2 = forward ? Scalar::sqrt2().inverse() : Scalar::sqrt2();
  Scalar f = scalar_pow(s2, kappa);
  // hbar / i = -i hbar and its inverse i / hbar
  Scalar unit = forward ? -Scalar::i() : Scalar::i();
  f *= scalar_pow(unit, k);
  if (conv.hbar) {
    Scalar h(*conv.hbar);
    f *= scalar_pow(forward ? h : h.inverse(), k);
  }
  return f;
}

} // namespace

SpinorOperator normal_order(const SuperSymbol &s, const BracketConvention &conv) {
  Terms<Scalar> t;
  std::map<std::pair<int, int>, Scalar> factors;
  for (const auto &[m, c] : s.terms()) {
    Mono k = m;
    auto key = std::pair{m.pdeg(), m.xideg()};
    auto it = factors.find(key);
    if (it == factors.end())
      it = factors.emplace(key, order_factor(key.first, key.second, conv, true)).first;
    Scalar f = c * it->second;
    if (conv.hbar) {
      if (m.hbar)
        f *= pow(Scalar(*conv.hbar), m.hbar);
      k.hbar = 0;
    } else {
      k.hbar = static_cast<std::int8_t>(m.hbar + m.pdeg());
    }
    t.add(k, f);
  }
  return {s.signature(), t};
}

SuperSymbol full_symbol(const SpinorOperator &D, const BracketConvention &conv) {
  Terms<Scalar> t;
  for (const auto &[m, c] : D.terms()) {
    Mono k = m;
    Scalar f = c * order_factor(m.pdeg(), m.xideg(), conv, false);
    if (conv.hbar) {
      if (m.hbar)
        f *= pow(Scalar(*conv.hbar), m.hbar);
      k.hbar = 0;
    } else {
      k.hbar = static_cast<std::int8_t>(m.hbar - m.pdeg());
    }
    t.add(k, f);
  }
  return {D.signature(), t};
}

SuperSymbol principal_symbol(const SpinorOperator &D, const BracketConvention &conv) {
  SuperSymbol s = full_symbol(D, conv);
  return s.p_homogeneous(D.order());
}

SpinorOperator quantize_generator(const SuperSymbol &v, const BracketConvention &conv) {
  const auto &t = v.terms();
  bool ok = t.size() == 1;
  if (ok) {
    const auto &[m, c] = *t.begin();
    ok = c.is_one() && m.hbar == 0 && m.xdeg() + m.pdeg() + m.xideg() == 1;
  }
  if (!ok)
    throw std::invalid_argument("quantize_generator: input must be a single x^i, p_i or xi^i, got " + v.str());
  return normal_order(v, conv);
}

} // namespace spinq

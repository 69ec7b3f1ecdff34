#include "spinquant/ratfunc.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace spinq {

UPoly::UPoly(Scalar c) {
  if (!c.is_zero())
    c_.push_back(std::move(c));
}

UPoly::UPoly(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) { trim(); }

UPoly UPoly::variable() { return UPoly(std::vector<Scalar>{Scalar(0), Scalar(1)}); }

void UPoly::trim() {
  while (!c_.empty() && c_.back().is_zero())
    c_.pop_back();
}

Scalar UPoly::eval(const Scalar &t) const {
  Scalar acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    acc = acc * t + *it;
  return acc;
}

UPoly UPoly::monic() const {
  if (c_.empty() || lead().is_one())
    return *this;
  Scalar inv = lead().inverse();
  UPoly out = *this;
  for (auto &c : out.c_)
    c *= inv;
  return out;
}

UPoly operator+(const UPoly &a, const UPoly &b) {
  std::vector<Scalar> c(std::max(a.c_.size(), b.c_.size()), Scalar(0));
  for (std::size_t k = 0; k < a.c_.size(); ++k)
    c[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k)
    c[k] += b.c_[k];
  return UPoly(std::move(c));
}

UPoly operator-(const UPoly &a) {
  UPoly out = a;
  for (auto &c : out.c_)
    c = -c;
  return out;
}

UPoly operator-(const UPoly &a, const UPoly &b) { return a + (-b); }

UPoly operator*(const UPoly &a, const UPoly &b) {
  if (a.is_zero() || b.is_zero())
    return {};
  std::vector<Scalar> c(a.c_.size() + b.c_.size() - 1, Scalar(0));
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j)
      c[i + j] += a.c_[i] * b.c_[j];
  return UPoly(std::move(c));
}

void UPoly::divmod(const UPoly &a, const UPoly &b, UPoly &q, UPoly &r) {
  if (b.is_zero())
    throw arithmetic_error("polynomial division by zero");
  r = a;
  if (a.degree() < b.degree()) {
    q = UPoly();
    return;
  }
  std::vector<Scalar> qc(a.degree() - b.degree() + 1, Scalar(0));
  Scalar inv = b.lead().inverse();
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int shift = r.degree() - b.degree();
    Scalar f = r.lead() * inv;
    qc[shift] = f;
    for (int k = 0; k <= b.degree(); ++k)
      r.c_[k + shift] -= f * b.c_[k];
    r.c_.pop_back();
    r.trim();
  }
  q = UPoly(std::move(qc));
}

UPoly UPoly::gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

std::vector<UPoly> UPoly::rational_components() const {
  std::vector<std::vector<Scalar>> parts(4);
  for (const auto &c : c_) {
    parts[0].push_back(Scalar(c.rational_part().re));
    parts[1].push_back(Scalar(c.rational_part().im));
    parts[2].push_back(Scalar(c.sqrt2_part().re));
    parts[3].push_back(Scalar(c.sqrt2_part().im));
  }
  std::vector<UPoly> out;
  for (auto &p : parts)
    out.emplace_back(std::move(p));
  return out;
}

std::vector<Rational> UPoly::rational_roots() const {
  if (is_zero())
    throw arithmetic_error("the zero polynomial has every root");
  // A rational root must be a common root of the rational components.
  UPoly g;
  for (const auto &part : rational_components())
    g = gcd(g, part);
  std::vector<Rational> coeffs;
  for (const auto &c : g.coeffs())
    coeffs.push_back(c.to_rational());
  return rational_roots_of(coeffs);
}

std::string UPoly::str(const std::string &var) const {
  if (c_.empty())
    return "0";
  std::string out;
  for (int k = degree(); k >= 0; --k) {
    const Scalar &c = c_[k];
    if (c.is_zero())
      continue;
    std::string mono = k == 0 ? "" : (k == 1 ? var : var + "^" + std::to_string(k));
    std::string cs = c.str();
    std::string term;
    if (mono.empty())
      term = cs;
    else if (c.is_one())
      term = mono;
    else if (c == Scalar(-1))
      term = "-" + mono;
    else
      term = cs + "*" + mono;
    if (out.empty())
      out = term;
    else if (term[0] == '-')
      out += " - " + term.substr(1);
    else
      out += " + " + term;
  }
  return out;
}

RatFunc::RatFunc(UPoly num, UPoly den) {
  if (den.is_zero())
    throw arithmetic_error("rational function with zero denominator");
  if (num.is_zero()) {
    den_ = UPoly(Scalar(1));
    return;
  }
  if (den.is_constant()) {
    Scalar inv = den.lead().inverse();
    num_ = num * UPoly(inv);
    den_ = UPoly(Scalar(1));
    return;
  }
  UPoly g = UPoly::gcd(num, den);
  UPoly q, r;
  if (g.degree() > 0) {
    UPoly::divmod(num, g, q, r);
    num = q;
    UPoly::divmod(den, g, q, r);
    den = q;
  }
  Scalar inv = den.lead().inverse();
  num_ = num * UPoly(inv);
  den_ = den * UPoly(inv);
}

Scalar RatFunc::constant() const {
  if (!is_constant())
    throw arithmetic_error("parameter-dependent value where a constant was expected");
  return num_.coeff(0);
}

std::optional<Scalar> RatFunc::eval(const Scalar &t0) const {
  Scalar d = den_.eval(t0);
  if (d.is_zero())
    return std::nullopt;
  return num_.eval(t0) / d;
}

RatFunc RatFunc::inverse() const {
  if (is_zero())
    throw arithmetic_error("division by zero");
  return RatFunc(den_, num_);
}

RatFunc operator+(const RatFunc &a, const RatFunc &b) {
  if (a.is_zero())
    return b;
  if (b.is_zero())
    return a;
  if (a.den_ == b.den_) {
    if (a.den_.is_constant()) {
      RatFunc out;
      out.num_ = a.num_ + b.num_;
      return out;
    }
    return RatFunc(a.num_ + b.num_, a.den_);
  }
  return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RatFunc operator-(const RatFunc &a) {
  RatFunc out = a;
  out.num_ = -out.num_;
  return out;
}

RatFunc operator-(const RatFunc &a, const RatFunc &b) { return a + (-b); }

RatFunc operator*(const RatFunc &a, const RatFunc &b) {
  if (a.is_zero() || b.is_zero())
    return {};
  if (a.den_.is_constant() && b.den_.is_constant()) {
    RatFunc out;
    out.num_ = a.num_ * b.num_;
    return out;
  }
  return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
}

std::string RatFunc::str(const std::string &var) const {
  if (den_.is_constant()) {
    if (num_.is_constant())
      return num_.coeff(0).str();
    return num_.str(var);
  }
  auto wrap = [&](const UPoly &p) {
    std::string s = p.str(var);
    bool simple = p.is_constant() || (p.coeffs().size() == 2 && p.coeff(0).is_zero());
    return simple ? s : "(" + s + ")";
  };
  return wrap(num_) + "/" + wrap(den_);
}

namespace {

Integer isqrt_floor(const Integer &n) {
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

Integer pollard_rho(const Integer &n) {
  if (mpz_even_p(n.get_mpz_t()))
    return 2;
  for (unsigned long c = 1;; ++c) {
    Integer x = 2, y = 2, d = 1;
    auto f = [&](const Integer &v) {
      Integer r = v * v + c;
      mpz_mod(r.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t());
      return r;
    };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      Integer diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n)
      return d;
  }
}

void factor_into(Integer n, std::map<Integer, int> &out) {
  if (n <= 1)
    return;
  for (unsigned long p = 2; p < 10000; ++p) {
    if (Integer(p) * p > n)
      break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ++out[Integer(p)];
      n /= p;
    }
  }
  if (n == 1)
    return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 30)) {
    ++out[n];
    return;
  }
  Integer s = isqrt_floor(n);
  if (s * s == n) {
    factor_into(s, out);
    factor_into(s, out);
    return;
  }
  Integer d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

std::vector<Integer> divisors(const Integer &n) {
  std::map<Integer, int> f;
  factor_into(abs(n), f);
  std::vector<Integer> out{1};
  for (const auto &[p, e] : f) {
    std::size_t base = out.size();
    Integer pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t j = 0; j < base; ++j)
        out.push_back(out[j] * pk);
    }
  }
  return out;
}

Rational horner(const std::vector<Integer> &c, const Rational &x) {
  Rational acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
    acc = acc * x + Rational(*it);
  return acc;
}

} // namespace

std::vector<Rational> rational_roots_of(const std::vector<Rational> &coeffs) {
  std::vector<Rational> c = coeffs;
  while (!c.empty() && sgn(c.back()) == 0)
    c.pop_back();
  if (c.size() <= 1)
    return {};
  Integer l = 1;
  for (const auto &q : c)
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
  std::vector<Integer> ic;
  for (const auto &q : c)
    ic.push_back(Integer(q * l));
  std::set<Rational> roots;
  std::size_t low = 0;
  while (ic[low] == 0)
    ++low;
  if (low > 0)
    roots.insert(Rational(0));
  ic.erase(ic.begin(), ic.begin() + static_cast<long>(low));
  if (ic.size() > 1) {
    auto nums = divisors(ic.front());
    auto dens = divisors(ic.back());
    for (const auto &d : dens)
      for (const auto &b : nums)
        for (int s : {1, -1}) {
          Rational x(Integer(b * s), d);
          x.canonicalize();
          if (roots.count(x) == 0 && sgn(horner(ic, x)) == 0)
            roots.insert(x);
        }
  }
  return {roots.begin(), roots.end()};
}

} // namespace spinq

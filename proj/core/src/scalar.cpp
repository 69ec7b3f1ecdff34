#include "spinquant/scalar.hpp"

#include <vector>

namespace spinq {

Rational parse_rational(const std::string &text) {
  Rational q;
  if (q.set_str(text, 10) != 0)
    throw std::invalid_argument("not a rational number: '" + text + "'");
  if (q.get_den() == 0)
    throw arithmetic_error("zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational &q) {
  if (q.get_den() == 1)
    return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Gaussian Gaussian::inverse() const {
  Rational n = norm();
  if (sgn(n) == 0)
    throw arithmetic_error("division by zero");
  return {re / n, -im / n};
}

Rational Scalar::to_rational() const {
  if (!is_rational())
    throw arithmetic_error("value " + str() + " is not rational");
  return a_.re;
}

Scalar operator*(const Scalar &x, const Scalar &y) {
  if (x.b_.is_zero() && y.b_.is_zero())
    return Scalar(x.a_ * y.a_);
  Gaussian bd = x.b_ * y.b_;
  return Scalar(x.a_ * y.a_ + bd + bd, x.a_ * y.b_ + x.b_ * y.a_);
}

Scalar Scalar::inverse() const {
  if (b_.is_zero())
    return Scalar(a_.inverse());
  // (a + b r)(a - b r) = a^2 - 2 b^2, which is nonzero because sqrt2 is not Gaussian-rational.
  Gaussian b2 = b_ * b_;
  Gaussian denom = a_ * a_ - (b2 + b2);
  Gaussian inv = denom.inverse();
  return Scalar(a_ * inv, -b_ * inv);
}

bool lex_less(const Scalar &x, const Scalar &y) {
  const Rational *xs[4] = {&x.a_.re, &x.a_.im, &x.b_.re, &x.b_.im};
  const Rational *ys[4] = {&y.a_.re, &y.a_.im, &y.b_.re, &y.b_.im};
  for (int k = 0; k < 4; ++k) {
    int c = cmp(*xs[k], *ys[k]);
    if (c != 0)
      return c < 0;
  }
  return false;
}

namespace {

// Renders q*unit, with unit "" meaning the plain rational.
std::string render_part(const Rational &q, const std::string &unit) {
  if (unit.empty())
    return to_string(q);
  if (q == 1)
    return unit;
  if (q == -1)
    return "-" + unit;
  return to_string(q) + "*" + unit;
}

} // namespace

bool Scalar::is_compound() const {
  int parts = (sgn(a_.re) != 0) + (sgn(a_.im) != 0) + (sgn(b_.re) != 0) + (sgn(b_.im) != 0);
  return parts > 1;
}

std::string Scalar::str() const {
  std::vector<std::string> parts;
  if (sgn(a_.re) != 0)
    parts.push_back(render_part(a_.re, ""));
  if (sgn(a_.im) != 0)
    parts.push_back(render_part(a_.im, "I"));
  if (sgn(b_.re) != 0)
    parts.push_back(render_part(b_.re, "sqrt2"));
  if (sgn(b_.im) != 0)
    parts.push_back(render_part(b_.im, "I*sqrt2"));
  if (parts.empty())
    return "0";
  if (parts.size() == 1)
    return parts.front();
  std::string out = "(" + parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) {
    if (parts[k][0] == '-')
      out += " - " + parts[k].substr(1);
    else
      out += " + " + parts[k];
  }
  return out + ")";
}

Scalar pow(const Scalar &x, int e) {
  Scalar base = e < 0 ? x.inverse() : x;
  unsigned k = e < 0 ? static_cast<unsigned>(-e) : static_cast<unsigned>(e);
  Scalar out(1);
  while (k) {
    if (k & 1u)
      out *= base;
    base *= base;
    k >>= 1u;
  }
  return out;
}

Rational pow(const Rational &x, int e) {
  if (e < 0) {
    if (sgn(x) == 0)
      throw arithmetic_error("division by zero");
    return 1 / pow(x, -e);
  }
  Rational out = 1;
  for (int k = 0; k < e; ++k)
    out *= x;
  return out;
}

} // namespace spinq

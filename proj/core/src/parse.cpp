#include "spinquant/parse.hpp"

#include <cctype>
#include <optional>

namespace spinq {

parse_error::parse_error(const std::string &what, std::size_t pos)
    : std::invalid_argument(what + " at position " + std::to_string(pos)), position(pos) {}

namespace {

class Parser {
public:
  Parser(const std::string &text, Signature sig) : s_(text), sig_(sig) {}

  SuperSymbol run() {
    skip();
    if (at_end())
      throw parse_error("empty expression", pos_);
    SuperSymbol v = expr();
    if (!at_end())
      throw parse_error(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return v;
  }

private:
  bool at_end() const { return pos_ >= s_.size(); }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool eat(char c) {
    if (!at_end() && s_[pos_] == c) {
      ++pos_;
      skip();
      return true;
    }
    return false;
  }

  SuperSymbol expr() {
    SuperSymbol v = term();
    for (;;) {
      if (eat('+'))
        v += term();
      else if (eat('-'))
        v -= term();
      else
        return v;
    }
  }

  SuperSymbol term() {
    SuperSymbol v = unary();
    for (;;) {
      if (eat('*')) {
        v = mul(v, unary());
      } else if (!at_end() && s_[pos_] == '/') {
        std::size_t at = pos_;
        eat('/');
        SuperSymbol d = unary();
        auto c = constant_of(d);
        if (!c)
          throw parse_error("division by a non-constant", at);
        if (c->is_zero())
          throw parse_error("division by zero", at);
        v = v.scaled(c->inverse());
      } else {
        return v;
      }
    }
  }

  SuperSymbol unary() {
    if (eat('-'))
      return -unary();
    if (eat('+'))
      return unary();
    return power_of();
  }

  SuperSymbol power_of() {
    SuperSymbol base = primary();
    if (at_end() || s_[pos_] != '^')
      return base;
    std::size_t at = pos_;
    eat('^');
    bool neg = eat('-');
    std::size_t num_at = pos_;
    if (at_end() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      throw parse_error("expected an integer exponent", pos_);
    std::size_t end = pos_;
    while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end])))
      ++end;
    if (end - pos_ > 4)
      throw parse_error("exponent too large", num_at);
    int e = std::stoi(s_.substr(pos_, end - pos_));
    pos_ = end;
    skip();
    if (!neg)
      return power(base, e);
    if (auto c = constant_of(base)) {
      if (c->is_zero())
        throw parse_error("negative power of zero", at);
      return SuperSymbol::constant(sig_, pow(*c, -e));
    }
    // hbar^-e
    if (base.terms().size() == 1) {
      const auto &[m, c] = *base.terms().begin();
      Mono h;
      h.hbar = m.hbar;
      if (m == h && c == Scalar(1)) {
        Mono out;
        out.hbar = static_cast<std::int8_t>(-m.hbar * e);
        return SuperSymbol::monomial(sig_, out);
      }
    }
    throw parse_error("negative power of a non-constant", at);
  }

  SuperSymbol primary() {
    if (at_end())
      throw parse_error("unexpected end of expression", pos_);
    const std::size_t at = pos_;
    const char c = s_[pos_];
    if (eat('(')) {
      SuperSymbol v = expr();
      if (!eat(')'))
        throw parse_error("expected ')'", pos_);
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end])))
        ++end;
      Rational q(s_.substr(pos_, end - pos_));
      pos_ = end;
      skip();
      return SuperSymbol::constant(sig_, Scalar(q));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end])))
        ++end;
      std::string word = s_.substr(pos_, end - pos_);
      pos_ = end;
      skip();
      if (word == "I")
        return SuperSymbol::constant(sig_, Scalar::i());
      if (word == "sqrt2")
        return SuperSymbol::constant(sig_, Scalar::sqrt2());
      if (word == "hbar")
        return SuperSymbol::hbar(sig_);
      return variable(word, at);
    }
    throw parse_error(std::string("unexpected '") + c + "'", at);
  }

  SuperSymbol variable(const std::string &word, std::size_t at) {
    std::size_t split = 0;
    while (split < word.size() && std::isalpha(static_cast<unsigned char>(word[split])))
      ++split;
    const std::string name = word.substr(0, split), digits = word.substr(split);
    const bool known = name == "x" || name == "p" || name == "xi";
    if (!known || digits.empty() || digits.size() > 2 ||
        digits.find_first_not_of("0123456789") != std::string::npos || digits[0] == '0')
      throw parse_error("unknown variable '" + word + "'", at);
    const int i = std::stoi(digits);
    if (i > sig_.n())
      throw parse_error("index of '" + word + "' exceeds dimension " + std::to_string(sig_.n()), at);
    if (name == "x")
      return SuperSymbol::x(sig_, i - 1);
    if (name == "p")
      return SuperSymbol::p(sig_, i - 1);
    return SuperSymbol::xi(sig_, i - 1);
  }

  std::optional<Scalar> constant_of(const SuperSymbol &v) const {
    if (v.is_zero())
      return Scalar(0);
    if (v.terms().size() != 1 || !(v.terms().begin()->first == Mono{}))
      return std::nullopt;
    return v.terms().begin()->second;
  }

  const std::string &s_;
  Signature sig_;
  std::size_t pos_ = 0;
};

} // namespace

SuperSymbol parse_symbol(const std::string &text, Signature sig) { return Parser(text, sig).run(); }

} // namespace spinq

#ifndef SPINQUANT_PARSE_HPP
#define SPINQUANT_PARSE_HPP

#include "spinquant/symalg.hpp"

#include <stdexcept>
#include <string>

namespace spinq {

/// Syntax error, unknown variable or index beyond the dimension. `position` is the 0-based
/// offset of the offending token.
class parse_error : public std::invalid_argument {
public:
  parse_error(const std::string &what, std::size_t pos);
  std::size_t position;
};

/// Parses sums of products of rationals (a/b), I, sqrt2, hbar, x1..xn, p1..pn, xi1..xin with
/// + - * ^ and parentheses. '/' divides by a nonzero constant; negative powers are allowed on
/// constants and hbar. Products are the supercommutative ones, so xi1*xi1 = 0.
/// Accepts everything SuperSymbol::str() prints.
SuperSymbol parse_symbol(const std::string &text, Signature sig);

} // namespace spinq

#endif

#pragma once

#include <string>

#include "hho/basis.hpp"

namespace hho {

/// Compiles an arithmetic expression in x and y into a callable.
///
/// Grammar: numbers, x, y, r (= |(x,y)|), pi, e, + - * / ^ (right
/// associative), unary minus, parentheses, and the functions sin cos tan asin
/// acos atan sinh cosh tanh exp log sqrt abs (one argument) and atan2 pow min
/// max (two arguments). Throws ParameterError with the offending position.
ScalarField parse_expression(const std::string& text);

} // namespace hho

#pragma once

#include <string>

#include "qem/poly.hpp"

namespace qem {

// Parses an expression into a canonical Poly.  Grammar: sums/differences of
// terms; a term is a product of factors with optional explicit '*', where a
// factor is an integer literal, a ring variable or field parameter, or a
// parenthesized expression, optionally raised with '^' to a nonnegative
// integer.  '/' divides by a factor that must evaluate to a nonzero constant.
// Whitespace is ignored.
Poly parse_poly(const std::string& text, const RingPtr& ring);

} // namespace qem

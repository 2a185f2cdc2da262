// Concrete syntax for formulas.
//
// Infix grammar (tokens: true false ! & | -> X G F U ( ) and identifiers).
// Precedence, tightest first:
//   unary { ! X G F }  >  U (right-assoc)  >  & (left)  >  | (left)  >  -> (right)
//
// Prefix format: whitespace-separated Polish notation over the same tokens,
// e.g. "F & A F B" for F(A & F B).

#ifndef PLANSAFE_PARSER_HPP
#define PLANSAFE_PARSER_HPP

#include <string>

#include "plansafe/formula.hpp"

namespace plansafe::ltl {

Formula parse_infix(const std::string& text);   // throws ParseError
Formula parse_prefix(const std::string& text);  // throws ParseError

// Tries infix first, then prefix; the two grammars agree wherever both parse.
Formula parse_formula(const std::string& text);

// Renders with minimal parentheses; parse_infix(render_infix(f)) == f.
std::string render_infix(const Formula& f);
std::string render_prefix(const Formula& f);

}  // namespace plansafe::ltl

#endif  // PLANSAFE_PARSER_HPP

#ifndef DTAC_PARSER_HPP
#define DTAC_PARSER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "dtac/ast.hpp"
#include "dtac/error.hpp"

namespace dtac {

enum class ParseMode : std::uint8_t { Program, Pattern };

enum class TokKind : std::uint8_t { Ident, Int, Str, Punct, Marker, Generated, MetaVar, Ellipsis, Eof };

struct Token {
    TokKind kind = TokKind::Eof;
    std::string text;
    int line = 1;
    int col = 1;
};

// Tokenises mini-Dafny text. `/*@name*/` becomes a Marker token and
// `/*generated*/` a Generated token; all other comments are dropped.
std::vector<Token> lex(std::string_view text, ParseMode mode);

// Parses a whole compilation unit.  Throws ParseError.
Program parse_program(std::string_view text);

// Parses a code pattern.  The result is a Unit (declaration run), a Block
// (statement run, possibly empty) or an expression, tried in that order.
Node parse_pattern(std::string_view text);

Node parse_expression(std::string_view text, ParseMode mode = ParseMode::Program);
Node parse_type(std::string_view text);

} // namespace dtac

#endif

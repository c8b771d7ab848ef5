#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace delta::dsl::detail {

enum class Tok { ident, keyword, integer, decimal, string, punct, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text;  // decoded contents for strings, lexeme otherwise
  int line = 1;
  int column = 1;
  int length = 0;

  bool is(Tok k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return is(Tok::punct, t); }
  bool is_keyword(std::string_view t) const { return is(Tok::keyword, t); }
};

// Throws SyntaxError on malformed input.
std::vector<Token> tokenize(std::string_view src);

bool is_keyword(std::string_view word);

}  // namespace delta::dsl::detail

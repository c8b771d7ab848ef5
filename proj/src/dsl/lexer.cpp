#include "lexer.hpp"

#include <array>
#include <cctype>

#include "delta/error.hpp"

namespace delta::dsl::detail {

namespace {

constexpr std::array<std::string_view, 15> kKeywords{
    "role", "increment", "let", "fn", "if", "else", "return", "true",
    "false", "not", "and", "or", "self", "foe", "battle"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

[[noreturn]] void fail(int line, int col, int len, std::string msg) {
  throw SyntaxError({Diagnostic{Severity::error, Span{line, col, len}, std::move(msg), DiagCode::syntax}});
}

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;  // count code points, not UTF-8 continuation bytes
      }
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }

    Token t;
    t.line = line;
    t.column = col;
    const std::size_t start = i;

    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) advance(1);
      t.text = std::string(src.substr(start, i - start));
      t.kind = is_keyword(t.text) ? Tok::keyword : Tok::ident;
    } else if (digit(c)) {
      while (i < src.size() && digit(src[i])) advance(1);
      t.kind = Tok::integer;
      if (i + 1 < src.size() && src[i] == '.' && digit(src[i + 1])) {
        advance(1);
        while (i < src.size() && digit(src[i])) advance(1);
        t.kind = Tok::decimal;
      }
      if (i < src.size() && ident_start(src[i])) fail(line, col, 1, "malformed number");
      t.text = std::string(src.substr(start, i - start));
    } else if (c == '"') {
      advance(1);
      std::string value;
      bool closed = false;
      while (i < src.size()) {
        const char d = src[i];
        if (d == '"') {
          advance(1);
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\') {
          if (i + 1 >= src.size()) break;
          const char e = src[i + 1];
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '"': value += '"'; break;
            case '\\': value += '\\'; break;
            default: fail(line, col, 2, std::string("unknown escape \\") + e);
          }
          advance(2);
          continue;
        }
        value += d;
        advance(1);
      }
      if (!closed) fail(t.line, t.column, 1, "unterminated string literal");
      t.kind = Tok::string;
      t.text = std::move(value);
    } else {
      static constexpr std::array<std::string_view, 4> two{"==", "!=", "<=", ">="};
      std::string_view rest = src.substr(i);
      std::string_view matched;
      for (auto p : two) {
        if (rest.substr(0, 2) == p) matched = p;
      }
      if (matched.empty()) {
        static constexpr std::string_view singles = "{}(),.=<>+-*/%";
        if (singles.find(c) == std::string_view::npos) {
          fail(line, col, 1, std::string("unexpected character '") + c + "'");
        }
        matched = rest.substr(0, 1);
      }
      t.kind = Tok::punct;
      t.text = std::string(matched);
      advance(matched.size());
    }
    t.length = static_cast<int>(i - start);
    out.push_back(std::move(t));
  }

  Token eof;
  eof.kind = Tok::eof;
  eof.line = line;
  eof.column = col;
  out.push_back(eof);
  return out;
}

}  // namespace delta::dsl::detail

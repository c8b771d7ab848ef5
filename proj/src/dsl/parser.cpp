#include "delta/dsl/parser.hpp"

#include <charconv>
#include <limits>

#include "delta/dsl/validator.hpp"
#include "delta/error.hpp"
#include "lexer.hpp"

namespace delta::dsl {

namespace {

using detail::Tok;
using detail::Token;

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program out;
    if (peek().is_keyword("role")) {
      out = role();
    } else if (peek().is_keyword("increment")) {
      out = increment();
    } else {
      error(peek(), "expected 'role' or 'increment'");
    }
    if (peek().kind != Tok::eof) error(peek(), "unexpected trailing input");
    return out;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void error(const Token& at, const std::string& msg) const {
    std::string where = at.kind == Tok::eof ? "end of input" : "'" + at.text + "'";
    throw SyntaxError({Diagnostic{Severity::error, Span{at.line, at.column, std::max(at.length, 1)},
                                  msg + " near " + where, DiagCode::syntax}});
  }

  const Token& expect_punct(std::string_view p) {
    if (!peek().is_punct(p)) error(peek(), "expected '" + std::string(p) + "'");
    return next();
  }
  const Token& expect_keyword(std::string_view k) {
    if (!peek().is_keyword(k)) error(peek(), "expected '" + std::string(k) + "'");
    return next();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::ident) error(peek(), "expected identifier");
    return next().text;
  }

  // Statements are newline-terminated outside parentheses: an expression only
  // continues onto a token that sits on the same line as the previous one.
  bool continues() const { return depth_ > 0 || peek().line == prev().line; }

  static Span span_from(const Token& first, const Token& last) {
    int len = last.line == first.line ? (last.column + last.length - first.column) : first.length;
    return Span{first.line, first.column, std::max(len, 1)};
  }

  RoleAst role() {
    expect_keyword("role");
    RoleAst r;
    r.name = expect_ident();
    expect_punct("{");
    while (peek().is_keyword("let")) {
      const Token& start = next();
      FieldDef f;
      f.name = expect_ident();
      expect_punct("=");
      f.value = literal();
      f.span = span_from(start, prev());
      r.fields.push_back(std::move(f));
    }
    while (peek().is_keyword("fn")) r.methods.push_back(method());
    expect_punct("}");
    return r;
  }

  DeltaAst increment() {
    expect_keyword("increment");
    DeltaAst d;
    d.target = expect_ident();
    expect_punct("{");
    if (!peek().is_keyword("fn")) error(peek(), "an increment needs at least one method");
    while (peek().is_keyword("fn")) d.methods.push_back(method());
    expect_punct("}");
    return d;
  }

  MethodDef method() {
    const Token& start = expect_keyword("fn");
    MethodDef m;
    m.name = expect_ident();
    m.span = span_from(start, prev());
    expect_punct("(");
    if (!peek().is_punct(")")) {
      m.params.push_back(expect_ident());
      while (peek().is_punct(",")) {
        next();
        m.params.push_back(expect_ident());
      }
    }
    expect_punct(")");
    m.body = block();
    return m;
  }

  Block block() {
    expect_punct("{");
    const int saved = depth_;
    depth_ = 0;
    Block b;
    while (!peek().is_punct("}")) {
      if (peek().kind == Tok::eof) error(peek(), "unterminated block");
      b.push_back(statement());
    }
    next();
    depth_ = saved;
    return b;
  }

  Stmt statement() {
    const Token& start = peek();
    if (start.is_keyword("let")) {
      next();
      LetStmt s;
      s.name = expect_ident();
      expect_punct("=");
      s.value = expr();
      return Stmt{std::move(s), span_from(start, prev())};
    }
    if (start.is_keyword("if")) {
      next();
      IfStmt s;
      s.condition = expr();
      s.then_block = block();
      if (peek().is_keyword("else")) {
        next();
        s.else_block = block();
      }
      return Stmt{std::move(s), span_from(start, start)};
    }
    if (start.is_keyword("return")) {
      const Token& kw = next();
      ReturnStmt s;
      if (!peek().is_punct("}") && peek().kind != Tok::eof && peek().line == kw.line) s.value = expr();
      return Stmt{std::move(s), span_from(start, prev())};
    }

    ExprRef e = expr();
    if (peek().is_punct("=") && continues()) {
      const Token& eq = next();
      AssignStmt s;
      if (const auto* n = std::get_if<NameExpr>(&e->node)) {
        s.target = {n->name};
      } else if (const auto* p = std::get_if<PathExpr>(&e->node); p && p->root == PathRoot::self) {
        s.self_path = true;
        s.target = p->segments;
      } else {
        error(eq, "left side of '=' is not assignable");
      }
      s.value = expr();
      return Stmt{std::move(s), span_from(start, prev())};
    }
    return Stmt{ExprStmt{std::move(e)}, span_from(start, prev())};
  }

  Literal literal() {
    const Token& t = peek();
    if (t.is_punct("-") && (peek(1).kind == Tok::integer || peek(1).kind == Tok::decimal)) {
      next();
      return number(next(), true);
    }
    if (t.kind == Tok::integer || t.kind == Tok::decimal) return number(next(), false);
    if (t.kind == Tok::string) return Literal{next().text};
    if (t.is_keyword("true")) {
      next();
      return Literal{true};
    }
    if (t.is_keyword("false")) {
      next();
      return Literal{false};
    }
    error(t, "expected literal");
  }

  Literal number(const Token& t, bool negative) {
    if (t.kind == Tok::decimal) {
      double v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc()) error(t, "decimal literal out of range");
      return Literal{negative ? -v : v};
    }
    // Parse as unsigned so that the most negative int64 is representable.
    std::uint64_t mag = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    const std::uint64_t limit = negative ? std::uint64_t(std::numeric_limits<std::int64_t>::max()) + 1
                                         : std::uint64_t(std::numeric_limits<std::int64_t>::max());
    if (ec != std::errc() || mag > limit) error(t, "integer literal out of range");
    if (negative) return Literal{static_cast<std::int64_t>(0 - mag)};
    return Literal{static_cast<std::int64_t>(mag)};
  }

  ExprRef expr() { return or_expr(); }

  ExprRef binary_level(ExprRef (Parser::*operand)(), std::initializer_list<std::pair<std::string_view, BinaryOp>> ops,
                       bool keyword_ops) {
    const Token& start = peek();
    ExprRef lhs = (this->*operand)();
    for (;;) {
      if (!continues()) return lhs;
      const Token& t = peek();
      std::optional<BinaryOp> op;
      for (auto [text, o] : ops) {
        if (keyword_ops ? t.is_keyword(text) : t.is_punct(text)) op = o;
      }
      if (!op) return lhs;
      next();
      ExprRef rhs = (this->*operand)();
      lhs = Expr{BinaryExpr{*op, std::move(lhs), std::move(rhs)}, span_from(start, prev())};
    }
  }

  ExprRef or_expr() { return binary_level(&Parser::and_expr, {{"or", BinaryOp::logical_or}}, true); }
  ExprRef and_expr() { return binary_level(&Parser::not_expr, {{"and", BinaryOp::logical_and}}, true); }

  ExprRef not_expr() {
    if (peek().is_keyword("not")) {
      const Token& start = next();
      ExprRef operand = not_expr();
      return Expr{NotExpr{std::move(operand)}, span_from(start, prev())};
    }
    return cmp_expr();
  }

  ExprRef cmp_expr() {
    return binary_level(&Parser::add_expr,
                        {{"<", BinaryOp::lt}, {"<=", BinaryOp::le}, {">", BinaryOp::gt},
                         {">=", BinaryOp::ge}, {"==", BinaryOp::eq}, {"!=", BinaryOp::ne}},
                        false);
  }
  ExprRef add_expr() {
    return binary_level(&Parser::mul_expr, {{"+", BinaryOp::add}, {"-", BinaryOp::sub}}, false);
  }
  ExprRef mul_expr() {
    return binary_level(&Parser::primary, {{"*", BinaryOp::mul}, {"/", BinaryOp::div}, {"%", BinaryOp::mod}},
                        false);
  }

  std::vector<std::string> dotted_tail(bool at_least_one) {
    std::vector<std::string> segs;
    if (at_least_one) {
      expect_punct(".");
      segs.push_back(expect_ident());
    }
    while (peek().is_punct(".") && continues()) {
      next();
      segs.push_back(expect_ident());
    }
    return segs;
  }

  ExprRef primary() {
    const Token& t = peek();
    if (t.kind == Tok::integer || t.kind == Tok::decimal || t.kind == Tok::string || t.is_keyword("true") ||
        t.is_keyword("false") ||
        (t.is_punct("-") && (peek(1).kind == Tok::integer || peek(1).kind == Tok::decimal))) {
      Literal lit = literal();
      return Expr{LiteralExpr{std::move(lit)}, span_from(t, prev())};
    }
    if (t.is_punct("(")) {
      next();
      ++depth_;
      ExprRef inner = expr();
      --depth_;
      expect_punct(")");
      return inner;
    }
    if (t.is_keyword("self") || t.is_keyword("foe")) {
      next();
      PathExpr p;
      p.root = t.text == "self" ? PathRoot::self : PathRoot::foe;
      p.segments = dotted_tail(true);
      return Expr{std::move(p), span_from(t, prev())};
    }
    if (t.is_keyword("battle")) {
      next();
      expect_punct(".");
      PathExpr p;
      p.root = PathRoot::battle;
      p.segments = {expect_ident()};
      return Expr{std::move(p), span_from(t, prev())};
    }
    if (t.kind == Tok::ident) {
      next();
      if (peek().is_punct("(") && continues()) {
        next();
        ++depth_;
        CallExpr call;
        call.callee = t.text;
        if (!peek().is_punct(")")) {
          call.args.push_back(expr());
          while (peek().is_punct(",")) {
            next();
            call.args.push_back(expr());
          }
        }
        --depth_;
        expect_punct(")");
        return Expr{std::move(call), span_from(t, prev())};
      }
      return Expr{NameExpr{t.text}, span_from(t, t)};
    }
    error(t, "expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

Program parse_syntax(std::string_view text) {
  Parser p(detail::tokenize(text));
  return p.program();
}

Program parse(const SourceText& src) {
  if (src.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw SyntaxError({Diagnostic{Severity::error, Span{}, "empty source", DiagCode::syntax}});
  }
  Program prog = parse_syntax(src.text);
  auto diags = std::visit([](const auto& ast) { return validate(ast); }, prog);
  if (has_errors(diags)) throw ValidationError(std::move(diags));
  return prog;
}

RoleAst parse_role(std::string_view text, Origin origin) {
  Program p = parse(SourceText{std::string(text), origin});
  if (auto* r = std::get_if<RoleAst>(&p)) return std::move(*r);
  throw SyntaxError({Diagnostic{Severity::error, Span{1, 1, 1}, "expected a role program", DiagCode::syntax}});
}

DeltaAst parse_delta(std::string_view text, Origin origin) {
  Program p = parse(SourceText{std::string(text), origin});
  if (auto* d = std::get_if<DeltaAst>(&p)) return std::move(*d);
  throw SyntaxError({Diagnostic{Severity::error, Span{1, 1, 1}, "expected an increment program", DiagCode::syntax}});
}

}  // namespace delta::dsl

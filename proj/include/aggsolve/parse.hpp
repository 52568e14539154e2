#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aggsolve/constraint.hpp"
#include "aggsolve/term.hpp"

namespace aggsolve {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Concrete syntax, one theory per parser: variables are uppercase-initial,
// constants and functors lowercase-initial, nil is a keyword. Aggregates use
// the theory's brackets with [t1,...,tn|r] sugar (a missing |r means |nil);
// the other theories' brackets are rejected. Relations are =, !=, in, nin;
// conjunction is &. Reserved solver prefixes F_, M_, N_, Z_ are rejected for
// user variables, and each functor must keep one arity throughout the input.
class Parser {
 public:
  explicit Parser(Theory theory) : theory_(theory) {}

  Term parse_term(std::string_view text) {
    start(text);
    Term t = term();
    skip_ws();
    if (pos_ < text_.size()) fail("trailing input after term");
    return t;
  }

  Constraint parse_constraint(std::string_view text) {
    start(text);
    Constraint c;
    c.literals.push_back(literal());
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      expect('&', "expected '&' between literals");
      c.literals.push_back(literal());
    }
    return c;
  }

 private:
  void start(std::string_view text) {
    text_ = text;
    pos_ = 0;
    line_ = 1;
    col_ = 1;
    arity_.clear();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, col_, msg);
  }

  char peek(size_t off = 0) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }

  void advance() {
    if (pos_ >= text_.size()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(unsigned(text_[pos_])))
      advance();
  }

  bool try_take(std::string_view tok) {
    if (text_.substr(pos_, tok.size()) != tok) return false;
    for (size_t i = 0; i < tok.size(); ++i) advance();
    return true;
  }

  void expect(char ch, const std::string& msg) {
    skip_ws();
    if (peek() != ch) fail(msg);
    advance();
  }

  std::string identifier() {
    std::string out;
    while (std::isalnum(unsigned(peek())) || peek() == '_') {
      out += peek();
      advance();
    }
    return out;
  }

  std::string_view agg_open() const {
    switch (theory_.kind) {
      case TheoryKind::List: return "[";
      case TheoryKind::MSet: return "{[";
      case TheoryKind::CList: return "[[";
      case TheoryKind::Set: return "{";
    }
    return "[";
  }

  std::string_view agg_close() const {
    switch (theory_.kind) {
      case TheoryKind::List: return "]";
      case TheoryKind::MSet: return "]}";
      case TheoryKind::CList: return "]]";
      case TheoryKind::Set: return "}";
    }
    return "]";
  }

  void check_arity(const std::string& functor, size_t arity) {
    auto [it, fresh] = arity_.emplace(functor, arity);
    if (!fresh && it->second != arity)
      fail("functor '" + functor + "' used with arity " +
           std::to_string(arity) + " after arity " +
           std::to_string(it->second));
  }

  Term aggregate() {
    std::vector<Term> elems;
    elems.push_back(term());
    for (;;) {
      skip_ws();
      if (try_take(",")) {
        elems.push_back(term());
        continue;
      }
      break;
    }
    Term rest = Term::nil();
    skip_ws();
    if (try_take("|")) rest = term();
    skip_ws();
    if (!try_take(agg_close()))
      fail("expected '" + std::string(agg_close()) + "' closing the aggregate");
    return build_aggregate(theory_, elems, std::move(rest));
  }

  Term term() {
    skip_ws();
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    // Aggregate brackets; any bracket not belonging to this theory is a
    // wrong-theory constructor.
    if (c == '{' || c == '[') {
      if (try_take(agg_open())) return aggregate();
      fail(std::string("aggregate constructor '") + c +
           "' does not belong to theory " + std::string(theory_.name()));
    }
    if (std::isupper(unsigned(c))) {
      std::string name = identifier();
      if (is_reserved_var_name(name))
        fail("variable '" + name + "' uses a reserved solver prefix");
      return Term::var(std::move(name));
    }
    if (std::islower(unsigned(c))) {
      std::string name = identifier();
      if (name == "nil") return Term::nil();
      if (name == "in" || name == "nin")
        fail("'" + name + "' is a relation keyword, not a term");
      skip_ws();
      if (peek() == '(') {
        advance();
        std::vector<Term> args;
        args.push_back(term());
        for (;;) {
          skip_ws();
          if (try_take(",")) {
            args.push_back(term());
            continue;
          }
          break;
        }
        expect(')', "expected ')' closing argument list");
        check_arity(name, args.size());
        return Term::make(std::move(name), std::move(args));
      }
      check_arity(name, 0);
      return Term::make(std::move(name));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Literal literal() {
    Term lhs = term();
    skip_ws();
    if (try_take("!=")) return neq(std::move(lhs), term());
    if (try_take("=")) return eq(std::move(lhs), term());
    if (std::isalpha(unsigned(peek()))) {
      size_t save_pos = pos_;
      int save_line = line_, save_col = col_;
      std::string word = identifier();
      if (word == "in") return member(std::move(lhs), term());
      if (word == "nin") return not_member(std::move(lhs), term());
      pos_ = save_pos;
      line_ = save_line;
      col_ = save_col;
    }
    fail("expected a relation (=, !=, in, nin)");
  }

  Theory theory_;
  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::map<std::string, size_t> arity_;
};

inline Term parse_term(const Theory& th, std::string_view text) {
  return Parser(th).parse_term(text);
}

inline Constraint parse_constraint(const Theory& th, std::string_view text) {
  return Parser(th).parse_constraint(text);
}

}  // namespace aggsolve

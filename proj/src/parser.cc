// Copyright 2026 The RLLF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rllf/parser.h"

#include <cctype>
#include <string>
#include <vector>

#include "rllf/errors.h"

namespace rllf {
namespace {

enum class TokenKind {
  kVariable,
  kName,
  kLParen,
  kRParen,
  kComma,
  kPeriod,
  kNeck,  // ":-"
  kNot,   // "\+"
  kEnd,
};

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int column;
};

std::string Describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::kVariable:
    case TokenKind::kName:
      return "'" + t.text + "'";
    case TokenKind::kLParen:
      return "'('";
    case TokenKind::kRParen:
      return "')'";
    case TokenKind::kComma:
      return "','";
    case TokenKind::kPeriod:
      return "'.'";
    case TokenKind::kNeck:
      return "':-'";
    case TokenKind::kNot:
      return "'\\+'";
    case TokenKind::kEnd:
      return "end of input";
  }
  return "token";
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  int column = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const int start_line = line;
    const int start_column = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_')) {
        ++j;
      }
      std::string word(text.substr(i, j - i));
      const bool is_var =
          std::isupper(static_cast<unsigned char>(c)) || c == '_';
      tokens.push_back({is_var ? TokenKind::kVariable : TokenKind::kName,
                        std::move(word), start_line, start_column});
      advance(j - i);
      continue;
    }
    switch (c) {
      case '(':
        tokens.push_back({TokenKind::kLParen, "(", line, column});
        advance(1);
        continue;
      case ')':
        tokens.push_back({TokenKind::kRParen, ")", line, column});
        advance(1);
        continue;
      case ',':
        tokens.push_back({TokenKind::kComma, ",", line, column});
        advance(1);
        continue;
      case '.':
        tokens.push_back({TokenKind::kPeriod, ".", line, column});
        advance(1);
        continue;
      case ':':
        if (i + 1 < text.size() && text[i + 1] == '-') {
          tokens.push_back({TokenKind::kNeck, ":-", line, column});
          advance(2);
          continue;
        }
        throw SyntaxError(line, column, "expected ':-' after ':'");
      case '\\':
        if (i + 1 < text.size() && text[i + 1] == '+') {
          tokens.push_back({TokenKind::kNot, "\\+", line, column});
          advance(2);
          continue;
        }
        throw SyntaxError(line, column, "expected '\\+' after '\\'");
      default:
        throw SyntaxError(line, column,
                          std::string("unexpected character '") + c + "'");
    }
  }
  tokens.push_back({TokenKind::kEnd, "", line, column});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Program ParseAll() {
    Program program;
    while (Peek().kind != TokenKind::kEnd) {
      program.clauses.push_back(ParseClause());
    }
    return program;
  }

  Term ParseSingleAtom() {
    Term atom = ParseAtom("query");
    if (Peek().kind == TokenKind::kPeriod) Next();
    if (Peek().kind != TokenKind::kEnd) {
      Fail(Peek(), "unexpected " + Describe(Peek()) + " after query");
    }
    return atom;
  }

 private:
  const Token& Peek() const { return tokens_[pos_]; }
  const Token& Next() { return tokens_[pos_++]; }

  [[noreturn]] void Fail(const Token& at, const std::string& message) {
    throw SyntaxError(at.line, at.column, message);
  }

  Clause ParseClause() {
    Clause clause;
    clause.head = ParseAtom("clause head");
    const Token& t = Next();
    if (t.kind == TokenKind::kPeriod) return clause;
    if (t.kind != TokenKind::kNeck) {
      Fail(t, "expected '.' or ':-' after clause head, found " + Describe(t));
    }
    while (true) {
      clause.body.push_back(ParseLiteral());
      const Token& sep = Next();
      if (sep.kind == TokenKind::kPeriod) break;
      if (sep.kind != TokenKind::kComma) {
        Fail(sep, "expected ',' or '.' in clause body, found " + Describe(sep));
      }
    }
    return clause;
  }

  Literal ParseLiteral() {
    Literal lit;
    if (Peek().kind == TokenKind::kNot) {
      Next();
      lit.negated = true;
    }
    lit.atom = ParseAtom("body literal");
    return lit;
  }

  Term ParseAtom(const char* what) {
    const Token& t = Peek();
    if (t.kind == TokenKind::kVariable) {
      Fail(t, std::string(what) + " must be an atom, not the variable '" +
                  t.text + "'");
    }
    if (t.kind != TokenKind::kName) {
      Fail(t, std::string("expected ") + what + ", found " + Describe(t));
    }
    return ParseTerm();
  }

  Term ParseTerm() {
    const Token& t = Next();
    if (t.kind == TokenKind::kVariable) return Term::Variable(t.text);
    if (t.kind != TokenKind::kName) {
      Fail(t, "expected a term, found " + Describe(t));
    }
    if (Peek().kind != TokenKind::kLParen) return Term::Constant(t.text);
    const Token open = Next();
    std::vector<Term> args;
    while (true) {
      const Token& look = Peek();
      if (look.kind == TokenKind::kEnd || look.kind == TokenKind::kPeriod) {
        Fail(look, UnclosedMessage(open));
      }
      args.push_back(ParseTerm());
      const Token& sep = Peek();
      if (sep.kind == TokenKind::kRParen) {
        Next();
        break;
      }
      if (sep.kind == TokenKind::kComma) {
        Next();
        continue;
      }
      if (sep.kind == TokenKind::kEnd || sep.kind == TokenKind::kPeriod ||
          sep.kind == TokenKind::kNeck) {
        Fail(sep, UnclosedMessage(open));
      }
      Fail(sep, "expected ',' or ')' in argument list, found " + Describe(sep));
    }
    return Term::Compound(t.text, std::move(args));
  }

  static std::string UnclosedMessage(const Token& open) {
    return "unclosed parenthesis (opened at line " + std::to_string(open.line) +
           ", column " + std::to_string(open.column) + ")";
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Program ParseProgram(std::string_view text) {
  Program program = Parser(Tokenize(text)).ParseAll();
  program.source_text = std::string(text);
  return program;
}

Term ParseQuery(std::string_view text) {
  return Parser(Tokenize(text)).ParseSingleAtom();
}

}  // namespace rllf

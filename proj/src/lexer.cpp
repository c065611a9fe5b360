// Copyright 2026 The relsynth Authors.
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

#include "lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

#include "relsynth/errors.hpp"
#include "relsynth/utf8.hpp"

namespace relsynth::detail {
namespace {

constexpr std::array<std::string_view, 21> kPuncts = {
    "<=>", "==", "!=", "<=", ">=", "&&", "||", "=>", "->", "<", ">", "!",
    "(",   ")",  ",",  ":",  ".",  ";",  "[",  "]",  "|"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<Token> run(bool keep_newlines) {
    std::vector<Token> out;
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == '\n') {
        if (keep_newlines) out.push_back(make(TokKind::Newline, "\n"));
        advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '#' || (c == '/' && peek(1) == '/')) {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        continue;
      }
      if (ident_start(c)) {
        Token t = make(TokKind::Ident, "");
        while (i_ < src_.size() && ident_char(src_[i_])) {
          t.text.push_back(src_[i_]);
          advance();
        }
        out.push_back(std::move(t));
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        out.push_back(number());
        continue;
      }
      if (c == '\'') {
        out.push_back(char_literal());
        continue;
      }
      if (c == '"') {
        out.push_back(string_literal());
        continue;
      }
      out.push_back(punct());
    }
    out.push_back(make(TokKind::End, ""));
    return out;
  }

 private:
  char peek(std::size_t k) const {
    return i_ + k < src_.size() ? src_[i_ + k] : '\0';
  }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  Token make(TokKind k, std::string text) const {
    return Token{k, std::move(text), Value(), line_, col_};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(what, line_, col_);
  }

  Token number() {
    Token t = make(TokKind::Int, "");
    if (src_[i_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      t.kind = TokKind::Hex;
      advance();
      advance();
      while (i_ < src_.size() &&
             std::isxdigit(static_cast<unsigned char>(src_[i_]))) {
        t.text.push_back(src_[i_]);
        advance();
      }
      if (t.text.empty()) fail("hex literal without digits");
      unsigned long long v = 0;
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v, 16);
      if (ec != std::errc() || v > 0xFF) fail("byte literal out of range");
      t.literal = Value::integer(static_cast<std::int64_t>(v));
      return t;
    }
    while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
      t.text.push_back(src_[i_]);
      advance();
    }
    return t;
  }

  char32_t escape() {
    // Positioned on the backslash.
    advance();
    if (i_ >= src_.size()) fail("unterminated escape");
    char c = src_[i_];
    advance();
    switch (c) {
      case '"': return U'"';
      case '\'': return U'\'';
      case '\\': return U'\\';
      case 'n': return U'\n';
      case 't': return U'\t';
      case 'r': return U'\r';
      case '0': return U'\0';
      case 'u': {
        char32_t cp = 0;
        for (int k = 0; k < 4; ++k) {
          if (i_ >= src_.size() || !std::isxdigit(static_cast<unsigned char>(src_[i_]))) {
            fail("\\u expects four hex digits");
          }
          char h = src_[i_];
          cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h))
                                                    ? h - '0'
                                                    : (std::tolower(h) - 'a' + 10));
          advance();
        }
        return cp;
      }
      default:
        fail(std::string("unknown escape \\") + c);
    }
  }

  // Reads one code point of raw UTF-8 or an escape.
  char32_t code_point() {
    if (src_[i_] == '\\') return escape();
    auto b0 = static_cast<unsigned char>(src_[i_]);
    std::size_t len = b0 < 0x80 ? 1 : (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : 4;
    auto decoded = utf8::decode(src_.substr(i_, len));
    if (!decoded || decoded->size() != 1) fail("malformed UTF-8 in literal");
    for (std::size_t k = 0; k < len; ++k) advance();
    return (*decoded)[0];
  }

  Token char_literal() {
    Token t = make(TokKind::Char, "");
    advance();
    if (i_ >= src_.size()) fail("unterminated character literal");
    char32_t cp = code_point();
    if (i_ >= src_.size() || src_[i_] != '\'') fail("unterminated character literal");
    advance();
    if (!utf8::is_scalar(cp)) fail("character is not a Unicode scalar");
    t.literal = Value::character(cp);
    return t;
  }

  Token string_literal() {
    Token t = make(TokKind::Str, "");
    advance();
    std::string text;
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') fail("unterminated string literal");
      if (src_[i_] == '"') {
        advance();
        break;
      }
      char32_t cp = code_point();
      if (!utf8::append(text, cp)) fail("string contains a non-scalar code point");
    }
    t.literal = Value::str(std::move(text));
    return t;
  }

  Token punct() {
    for (std::string_view p : kPuncts) {
      if (src_.substr(i_, p.size()) == p) {
        Token t = make(TokKind::Punct, std::string(p));
        for (std::size_t k = 0; k < p.size(); ++k) advance();
        return t;
      }
    }
    if (src_[i_] == '-') {
      Token t = make(TokKind::Punct, "-");
      advance();
      return t;
    }
    fail(std::string("unexpected character '") + src_[i_] + "'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src, bool keep_newlines) {
  return Scanner(src).run(keep_newlines);
}

const Token& TokenCursor::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  return k < toks_.size() ? toks_[k] : toks_.back();
}

const Token& TokenCursor::next() {
  const Token& t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool TokenCursor::is_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokKind::Punct && t.text == p;
}

bool TokenCursor::is_ident(std::string_view word, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokKind::Ident && t.text == word;
}

bool TokenCursor::accept_punct(std::string_view p) {
  if (!is_punct(p)) return false;
  next();
  return true;
}

void TokenCursor::expect_punct(std::string_view p) {
  if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
}

std::string TokenCursor::expect_ident() {
  if (peek().kind != TokKind::Ident) fail("expected identifier");
  return next().text;
}

void TokenCursor::fail(const std::string& what) const { fail_at(peek(), what); }

void TokenCursor::fail_at(const Token& t, const std::string& what) const {
  std::string found = t.kind == TokKind::End ? "end of input" : "'" + t.text + "'";
  if (t.kind == TokKind::Str || t.kind == TokKind::Char) found = t.literal.to_literal();
  throw SyntaxError(what + " (found " + found + ")", t.line, t.column);
}

std::optional<Value> TokenCursor::accept_literal() {
  const Token& t = peek();
  switch (t.kind) {
    case TokKind::Ident:
      if (t.text == "true" || t.text == "false") {
        bool b = t.text == "true";
        next();
        return Value::boolean(b);
      }
      return std::nullopt;
    case TokKind::Char:
    case TokKind::Str:
      return next().literal;
    case TokKind::Int: {
      std::int64_t v = 0;
      const std::string& d = t.text;
      auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
      if (ec != std::errc()) fail("integer literal out of range");
      next();
      return Value::integer(v);
    }
    case TokKind::Punct:
      break;
    default:
      return std::nullopt;
  }
  if (is_punct("-") && peek(1).kind == TokKind::Int) {
    next();
    const std::string& d = peek().text;
    std::string neg = "-" + d;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(neg.data(), neg.data() + neg.size(), v);
    if (ec != std::errc()) fail("integer literal out of range");
    next();
    return Value::integer(v);
  }
  if (!is_punct("[")) return std::nullopt;
  next();
  if (accept_punct("]")) return Value::int_array({});
  TokKind first = peek().kind;
  if (first == TokKind::Hex) {
    std::string raw;
    do {
      if (peek().kind != TokKind::Hex) fail("expected byte literal like 0xFF");
      raw.push_back(static_cast<char>(next().literal.as_int()));
    } while (accept_punct(","));
    expect_punct("]");
    return Value::bytes(std::move(raw));
  }
  if (first == TokKind::Char) {
    std::u32string cs;
    do {
      if (peek().kind != TokKind::Char) fail("expected character literal");
      cs.push_back(next().literal.as_char());
    } while (accept_punct(","));
    expect_punct("]");
    return Value::char_array(std::move(cs));
  }
  std::vector<std::int64_t> xs;
  do {
    auto v = accept_literal();
    if (!v || !v->is(Tag::Int)) fail("expected integer literal");
    xs.push_back(v->as_int());
  } while (accept_punct(","));
  expect_punct("]");
  return Value::int_array(std::move(xs));
}

}  // namespace relsynth::detail

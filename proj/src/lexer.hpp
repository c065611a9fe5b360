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

// Tokenizer shared by the spec-file, grammar-file and program parsers.

#ifndef RELSYNTH_SRC_LEXER_HPP_
#define RELSYNTH_SRC_LEXER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsynth/value.hpp"

namespace relsynth::detail {

enum class TokKind { Ident, Int, Hex, Char, Str, Punct, Newline, End };

struct Token {
  TokKind kind;
  std::string text;  // identifier / punctuation / digits
  Value literal;     // decoded Char/Str/Int/Hex payload
  std::size_t line;
  std::size_t column;
};

/// Splits `src` into tokens. Newline tokens are emitted only when
/// `keep_newlines` is set. Comments start with '#' or "//".
std::vector<Token> tokenize(std::string_view src, bool keep_newlines = false);

class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokKind::End; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const;
  bool is_ident(std::string_view word, std::size_t ahead = 0) const;
  bool accept_punct(std::string_view p);
  void expect_punct(std::string_view p);
  std::string expect_ident();
  [[noreturn]] void fail(const std::string& what) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& what) const;

  /// Literal at the cursor (true/false, ints, chars, strings, lists).
  std::optional<Value> accept_literal();

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace relsynth::detail

#endif  // RELSYNTH_SRC_LEXER_HPP_

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

// Dynamic values shared by the DSL interpreters, automaton states and the
// verifier.

#ifndef RELSYNTH_VALUE_HPP_
#define RELSYNTH_VALUE_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <deque>
#include <variant>
#include <vector>

namespace relsynth {

/// Tags in canonical order.
enum class Tag : std::uint8_t {
  Bool,
  Int,
  Char,
  Str,
  Bytes,
  IntArray,
  CharArray,
  Err
};

std::string_view tag_name(Tag t);

class Value {
 public:
  Value() : v_(false) {}

  static Value boolean(bool b) { return Value(Storage(std::in_place_index<0>, b)); }
  static Value integer(std::int64_t i) { return Value(Storage(std::in_place_index<1>, i)); }
  static Value character(char32_t c) { return Value(Storage(std::in_place_index<2>, c)); }
  /// `utf8` must be valid UTF-8.
  static Value str(std::string utf8) { return Value(Storage(std::in_place_index<3>, StrBox{std::move(utf8)})); }
  static Value bytes(std::string raw) { return Value(Storage(std::in_place_index<4>, BytesBox{std::move(raw)})); }
  static Value int_array(std::vector<std::int64_t> xs) { return Value(Storage(std::in_place_index<5>, std::move(xs))); }
  static Value char_array(std::u32string cs) { return Value(Storage(std::in_place_index<6>, std::move(cs))); }
  static Value error(std::string label) { return Value(Storage(std::in_place_index<7>, ErrBox{std::move(label)})); }

  Tag tag() const { return static_cast<Tag>(v_.index()); }
  bool is(Tag t) const { return tag() == t; }
  bool is_err() const { return tag() == Tag::Err; }

  bool as_bool() const { return std::get<0>(v_); }
  std::int64_t as_int() const { return std::get<1>(v_); }
  char32_t as_char() const { return std::get<2>(v_); }
  const std::string& as_str() const { return std::get<3>(v_).text; }
  const std::string& as_bytes() const { return std::get<4>(v_).raw; }
  const std::vector<std::int64_t>& as_int_array() const { return std::get<5>(v_); }
  const std::u32string& as_char_array() const { return std::get<6>(v_); }
  const std::string& err_label() const { return std::get<7>(v_).label; }

  friend bool operator==(const Value& a, const Value& b) { return a.v_ == b.v_; }
  /// Canonical total order: tag first, then lexicographic within the tag.
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  std::size_t hash() const;

  /// Renders in the shared literal syntax.
  std::string to_literal() const;

 private:
  struct StrBox {
    std::string text;
    bool operator==(const StrBox&) const = default;
  };
  struct BytesBox {
    std::string raw;
    bool operator==(const BytesBox&) const = default;
  };
  struct ErrBox {
    std::string label;
    bool operator==(const ErrBox&) const = default;
  };
  using Storage = std::variant<bool, std::int64_t, char32_t, StrBox, BytesBox,
                               std::vector<std::int64_t>, std::u32string, ErrBox>;

  explicit Value(Storage s) : v_(std::move(s)) {}

  Storage v_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

bool value_equals(const Value& a, const Value& b);

/// Sign of an integer; Err propagates; any other tag yields Err("type").
Value builtin_sgn(const Value& v);

/// Arithmetic negation with overflow detection.
Value builtin_neg(const Value& v);

/// A function with fixed semantics usable inside formulas.
struct InterpretedFn {
  std::string name;
  std::size_t arity;
  std::function<Value(std::span<const Value>)> apply;
};

/// Registered interpreted functions (sgn, neg); nullptr when unknown.
const InterpretedFn* find_interpreted(std::string_view name);

/// Parses one literal; nullopt when `text` is not exactly one literal.
std::optional<Value> parse_literal(std::string_view text);

/// Dense ids for interned values. Ids are stable for the pool's lifetime.
using ValueId = std::uint32_t;

class ValuePool {
 public:
  ValueId intern(const Value& v);
  ValueId intern(Value&& v);
  const Value& get(ValueId id) const { return values_[id]; }
  std::optional<ValueId> find(const Value& v) const;
  std::size_t size() const { return values_.size(); }

 private:
  static constexpr ValueId kEmpty = ~ValueId{0};
  std::size_t probe(const Value& v, std::size_t h) const;
  void grow();

  std::deque<Value> values_;  // deque keeps references stable
  std::vector<std::size_t> hashes_;
  std::vector<ValueId> slots_;  // open addressing, linear probing
};

}  // namespace relsynth

#endif  // RELSYNTH_VALUE_HPP_

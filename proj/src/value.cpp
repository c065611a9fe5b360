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

#include "relsynth/value.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "lexer.hpp"
#include "relsynth/errors.hpp"
#include "relsynth/utf8.hpp"

namespace relsynth {
namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  // boost::hash_combine with a 64-bit constant.
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

template <typename Seq>
std::strong_ordering lex(const Seq& a, const Seq& b) {
  return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(),
                                                b.end());
}

std::strong_ordering lex_bytes(const std::string& a, const std::string& b) {
  int c = a.compare(b);  // char_traits<char> compares as unsigned char
  return c < 0 ? std::strong_ordering::less
               : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

void append_escaped(std::string& out, char32_t cp, char quote) {
  switch (cp) {
    case U'\\': out += "\\\\"; return;
    case U'\n': out += "\\n"; return;
    case U'\t': out += "\\t"; return;
    case U'\r': out += "\\r"; return;
    default: break;
  }
  if (cp == static_cast<char32_t>(quote)) {
    out.push_back('\\');
    out.push_back(quote);
    return;
  }
  if (cp < 0x20 || cp == 0x7F) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(cp));
    out += buf;
    return;
  }
  utf8::append(out, cp);
}

}  // namespace

std::string_view tag_name(Tag t) {
  switch (t) {
    case Tag::Bool: return "Bool";
    case Tag::Int: return "Int";
    case Tag::Char: return "Char";
    case Tag::Str: return "Str";
    case Tag::Bytes: return "Bytes";
    case Tag::IntArray: return "IntArray";
    case Tag::CharArray: return "CharArray";
    case Tag::Err: return "Err";
  }
  return "?";
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.tag() != b.tag()) return a.tag() <=> b.tag();
  switch (a.tag()) {
    case Tag::Bool: return a.as_bool() <=> b.as_bool();
    case Tag::Int: return a.as_int() <=> b.as_int();
    case Tag::Char: return a.as_char() <=> b.as_char();
    case Tag::Str: return lex_bytes(a.as_str(), b.as_str());  // UTF-8 preserves code point order
    case Tag::Bytes: return lex_bytes(a.as_bytes(), b.as_bytes());
    case Tag::IntArray: return lex(a.as_int_array(), b.as_int_array());
    case Tag::CharArray: return lex(a.as_char_array(), b.as_char_array());
    case Tag::Err: return lex_bytes(a.err_label(), b.err_label());
  }
  return std::strong_ordering::equal;
}

std::size_t Value::hash() const {
  std::size_t h = static_cast<std::size_t>(tag()) * 0x100000001b3ULL;
  switch (tag()) {
    case Tag::Bool: return mix(h, as_bool());
    case Tag::Int: return mix(h, std::hash<std::int64_t>{}(as_int()));
    case Tag::Char: return mix(h, as_char());
    case Tag::Str: return mix(h, std::hash<std::string>{}(as_str()));
    case Tag::Bytes: return mix(h, std::hash<std::string>{}(as_bytes()));
    case Tag::IntArray:
      for (auto x : as_int_array()) h = mix(h, std::hash<std::int64_t>{}(x));
      return h;
    case Tag::CharArray: return mix(h, std::hash<std::u32string>{}(as_char_array()));
    case Tag::Err: return mix(h, std::hash<std::string>{}(err_label()));
  }
  return h;
}

std::string Value::to_literal() const {
  std::string out;
  switch (tag()) {
    case Tag::Bool: return as_bool() ? "true" : "false";
    case Tag::Int: return std::to_string(as_int());
    case Tag::Char:
      out.push_back('\'');
      append_escaped(out, as_char(), '\'');
      out.push_back('\'');
      return out;
    case Tag::Str:
      out.push_back('"');
      for (char32_t cp : utf8::decode_valid(as_str())) append_escaped(out, cp, '"');
      out.push_back('"');
      return out;
    case Tag::Bytes: {
      out.push_back('[');
      bool first = true;
      for (unsigned char b : as_bytes()) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%s0x%02X", first ? "" : ",", b);
        out += buf;
        first = false;
      }
      out.push_back(']');
      return out;
    }
    case Tag::IntArray: {
      out.push_back('[');
      for (std::size_t i = 0; i < as_int_array().size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(as_int_array()[i]);
      }
      out.push_back(']');
      return out;
    }
    case Tag::CharArray: {
      out.push_back('[');
      for (std::size_t i = 0; i < as_char_array().size(); ++i) {
        if (i) out.push_back(',');
        out.push_back('\'');
        append_escaped(out, as_char_array()[i], '\'');
        out.push_back('\'');
      }
      out.push_back(']');
      return out;
    }
    case Tag::Err:
      return "<error:" + err_label() + ">";
  }
  return out;
}

bool value_equals(const Value& a, const Value& b) { return a == b; }

Value builtin_sgn(const Value& v) {
  if (v.is_err()) return v;
  if (!v.is(Tag::Int)) return Value::error("type");
  std::int64_t x = v.as_int();
  return Value::integer(x < 0 ? -1 : x > 0 ? 1 : 0);
}

Value builtin_neg(const Value& v) {
  if (v.is_err()) return v;
  if (!v.is(Tag::Int)) return Value::error("type");
  if (v.as_int() == std::numeric_limits<std::int64_t>::min()) return Value::error("overflow");
  return Value::integer(-v.as_int());
}

const InterpretedFn* find_interpreted(std::string_view name) {
  static const std::vector<InterpretedFn> kFns = {
      {"sgn", 1, [](std::span<const Value> a) { return builtin_sgn(a[0]); }},
      {"neg", 1, [](std::span<const Value> a) { return builtin_neg(a[0]); }},
  };
  for (const auto& f : kFns) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::optional<Value> parse_literal(std::string_view text) {
  try {
    detail::TokenCursor cur(detail::tokenize(text));
    auto v = cur.accept_literal();
    if (!v || !cur.at_end()) return std::nullopt;
    return v;
  } catch (const SyntaxError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// ValuePool

std::size_t ValuePool::probe(const Value& v, std::size_t h) const {
  std::size_t mask = slots_.size() - 1;
  std::size_t i = h & mask;
  while (slots_[i] != kEmpty) {
    ValueId id = slots_[i];
    if (hashes_[id] == h && values_[id] == v) return i;
    i = (i + 1) & mask;
  }
  return i;
}

void ValuePool::grow() {
  std::size_t cap = slots_.empty() ? 64 : slots_.size() * 2;
  slots_.assign(cap, kEmpty);
  std::size_t mask = cap - 1;
  for (ValueId id = 0; id < values_.size(); ++id) {
    std::size_t i = hashes_[id] & mask;
    while (slots_[i] != kEmpty) i = (i + 1) & mask;
    slots_[i] = id;
  }
}

std::optional<ValueId> ValuePool::find(const Value& v) const {
  if (slots_.empty()) return std::nullopt;
  std::size_t i = probe(v, v.hash());
  if (slots_[i] == kEmpty) return std::nullopt;
  return slots_[i];
}

ValueId ValuePool::intern(const Value& v) { return intern(Value(v)); }

ValueId ValuePool::intern(Value&& v) {
  if ((values_.size() + 1) * 2 > slots_.size()) grow();
  std::size_t h = v.hash();
  std::size_t i = probe(v, h);
  if (slots_[i] != kEmpty) return slots_[i];
  if (values_.size() >= std::numeric_limits<ValueId>::max() - 1) {
    throw CapacityExceeded("value pool exhausted");
  }
  auto id = static_cast<ValueId>(values_.size());
  values_.push_back(std::move(v));
  hashes_.push_back(h);
  slots_[i] = id;
  return id;
}

}  // namespace relsynth

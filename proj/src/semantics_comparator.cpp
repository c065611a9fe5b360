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

// String comparator building blocks. Positions and lengths count code
// points, not bytes.

#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "relsynth/utf8.hpp"
#include "semantics.hpp"

namespace relsynth::detail {
namespace {

Value sign_of(int c) { return Value::integer(c < 0 ? -1 : c > 0 ? 1 : 0); }

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_alpha(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

// Maximal non-overlapping matches of a token as [start, end) pairs.
std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> token_matches(
    const std::u32string& s, const Value& token) {
  bool (*cls)(char32_t) = nullptr;
  if (token.is(Tag::Char)) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == token.as_char()) out.emplace_back(i, i + 1);
    }
    return out;
  }
  if (!token.is(Tag::Str)) return std::nullopt;
  const std::string& name = token.as_str();
  if (name == "Number") {
    cls = is_digit;
  } else if (name == "Alpha") {
    cls = is_alpha;
  } else if (name == "Whitespace") {
    cls = is_space;
  } else if (name == "AlphaNum") {
    cls = [](char32_t c) { return is_alpha(c) || is_digit(c); };
  } else {
    return std::nullopt;
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!cls(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && cls(s[j])) ++j;
    out.emplace_back(i, j);
    i = j;
  }
  return out;
}

// chain(B, C): B unless B is zero, then C.
Value chain(Args a) {
  if (!a[0]->is(Tag::Int) || !a[1]->is(Tag::Int)) return type_error();
  return a[0]->as_int() != 0 ? *a[0] : *a[1];
}

Value int_compare(Args a) {
  if (!a[0]->is(Tag::Int) || !a[1]->is(Tag::Int)) return type_error();
  auto c = a[0]->as_int() <=> a[1]->as_int();
  return sign_of(c < 0 ? -1 : c > 0 ? 1 : 0);
}

Value str_compare(Args a) {
  if (!a[0]->is(Tag::Str) || !a[1]->is(Tag::Str)) return type_error();
  return sign_of(a[0]->as_str().compare(a[1]->as_str()));
}

Value count_char(Args a) {
  if (!a[0]->is(Tag::Str) || !a[1]->is(Tag::Char)) return type_error();
  std::int64_t n = 0;
  for (char32_t c : utf8::decode_valid(a[0]->as_str())) n += c == a[1]->as_char();
  return Value::integer(n);
}

Value length(Args a) {
  if (!a[0]->is(Tag::Str)) return type_error();
  return Value::integer(static_cast<std::int64_t>(utf8::length(a[0]->as_str())));
}

// Optional '-' followed by one or more ASCII digits.
Value to_int(Args a) {
  if (!a[0]->is(Tag::Str)) return type_error();
  const std::string& s = a[0]->as_str();
  std::size_t i = 0;
  bool negative = false;
  if (i < s.size() && s[i] == '-') {
    negative = true;
    ++i;
  }
  if (i == s.size()) return Value::error("toInt");
  std::int64_t r = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return Value::error("toInt");
    std::int64_t d = s[i] - '0';
    // Accumulate negatively so INT64_MIN parses.
    if (__builtin_mul_overflow(r, std::int64_t{10}, &r) || __builtin_sub_overflow(r, d, &r)) {
      return Value::error("overflow");
    }
  }
  if (!negative) {
    if (r == std::numeric_limits<std::int64_t>::min()) return Value::error("overflow");
    r = -r;
  }
  return Value::integer(r);
}

Value substr_range(Args a) {
  if (!a[0]->is(Tag::Str) || !a[1]->is(Tag::Int) || !a[2]->is(Tag::Int)) return type_error();
  std::u32string cps = utf8::decode_valid(a[0]->as_str());
  const std::int64_t from = a[1]->as_int();
  const std::int64_t to = a[2]->as_int();
  if (from < 0 || from > to || to > static_cast<std::int64_t>(cps.size())) {
    return Value::error("substr");
  }
  return Value::str(utf8::encode_all(
      std::u32string_view(cps).substr(static_cast<std::size_t>(from),
                                      static_cast<std::size_t>(to - from))));
}

// pos(v, token, k, dir): start or end index of the k-th match; negative k
// counts from the end.
Value pos(Args a) {
  if (!a[0]->is(Tag::Str) || !a[2]->is(Tag::Int) || !a[3]->is(Tag::Str)) return type_error();
  const std::string& dir = a[3]->as_str();
  if (dir != "Start" && dir != "End") return Value::error("pos");
  auto matches = token_matches(utf8::decode_valid(a[0]->as_str()), *a[1]);
  if (!matches) return Value::error("token");
  const std::int64_t k = a[2]->as_int();
  const auto n = static_cast<std::int64_t>(matches->size());
  std::int64_t idx;
  if (k > 0 && k <= n) {
    idx = k - 1;
  } else if (k < 0 && -k <= n) {
    idx = n + k;
  } else {
    return Value::error("pos");
  }
  const auto& m = (*matches)[static_cast<std::size_t>(idx)];
  return Value::integer(dir == "Start" ? m.first : m.second);
}

Value const_pos(Args a) {
  if (!a[0]->is(Tag::Int)) return type_error();
  return *a[0];
}

}  // namespace

void add_comparator_semantics(std::vector<Constructor>& out) {
  out.push_back({"chain", 2, chain});
  out.push_back({"intCompare", 2, int_compare});
  out.push_back({"strCompare", 2, str_compare});
  out.push_back({"countChar", 2, count_char});
  out.push_back({"length", 1, length});
  out.push_back({"toInt", 1, to_int});
  out.push_back({"substr", 3, substr_range});
  out.push_back({"pos", 4, pos});
  out.push_back({"constPos", 1, const_pos});
}

}  // namespace relsynth::detail

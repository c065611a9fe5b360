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

#include <doctest.h>

#include <random>

#include "relsynth/utf8.hpp"
#include "relsynth/value.hpp"

using relsynth::Tag;
using relsynth::Value;
using relsynth::ValuePool;

namespace {

Value random_value(std::mt19937& rng) {
  std::uniform_int_distribution<int> tag(0, 7);
  std::uniform_int_distribution<int> small(-2, 2);
  std::uniform_int_distribution<int> len(0, 2);
  auto chars = [&] {
    std::u32string s;
    for (int i = len(rng); i > 0; --i) s.push_back(U'a' + static_cast<char32_t>(small(rng) + 2));
    return s;
  };
  switch (tag(rng)) {
    case 0: return Value::boolean(small(rng) > 0);
    case 1: return Value::integer(small(rng));
    case 2: return Value::character(U'a' + static_cast<char32_t>(small(rng) + 2));
    case 3: return Value::str(relsynth::utf8::encode_all(chars()));
    case 4: {
      std::string b;
      for (int i = len(rng); i > 0; --i) b.push_back(static_cast<char>(small(rng) + 2));
      return Value::bytes(b);
    }
    case 5: {
      std::vector<std::int64_t> xs;
      for (int i = len(rng); i > 0; --i) xs.push_back(small(rng));
      return Value::int_array(xs);
    }
    case 6: return Value::char_array(chars());
    default: return Value::error(small(rng) > 0 ? "type" : "range");
  }
}

}  // namespace

TEST_CASE("value_equals on basic pairs") {
  CHECK(relsynth::value_equals(Value::integer(3), Value::integer(3)));
  CHECK(relsynth::value_equals(Value::str("TWFu"), Value::str("TWFu")));
  CHECK_FALSE(relsynth::value_equals(Value::integer(5), Value::str("5")));
  CHECK_FALSE(relsynth::value_equals(Value::str("ab"), Value::bytes("ab")));
  CHECK(Value::error("type") == Value::error("type"));
  CHECK_FALSE(Value::error("type") == Value::error("range"));
}

TEST_CASE("builtin_sgn") {
  CHECK(relsynth::builtin_sgn(Value::integer(-7)) == Value::integer(-1));
  CHECK(relsynth::builtin_sgn(Value::integer(0)) == Value::integer(0));
  CHECK(relsynth::builtin_sgn(Value::integer(42)) == Value::integer(1));
  CHECK(relsynth::builtin_sgn(Value::error("type")) == Value::error("type"));
  CHECK(relsynth::builtin_sgn(Value::str("1")) == Value::error("type"));
  CHECK(relsynth::builtin_neg(Value::integer(INT64_MIN)).is_err());
}

TEST_CASE("equality is an equivalence and the order is total and consistent") {
  std::mt19937 rng(7);
  for (int i = 0; i < 3000; ++i) {
    Value a = random_value(rng), b = random_value(rng), c = random_value(rng);
    CHECK(a == a);
    CHECK((a == b) == (b == a));
    if (a == b && b == c) CHECK(a == c);
    auto ab = a <=> b;
    CHECK(((ab == 0) == (a == b)));
    CHECK((ab < 0) == ((b <=> a) > 0));
    if ((a <=> b) < 0 && (b <=> c) < 0) CHECK((a <=> c) < 0);
    if (a == b) CHECK(a.hash() == b.hash());
  }
}

TEST_CASE("canonical tag order") {
  CHECK(Value::boolean(true) < Value::integer(-100));
  CHECK(Value::integer(100) < Value::character(U'a'));
  CHECK(Value::character(U'z') < Value::str(""));
  CHECK(Value::str("zz") < Value::bytes(""));
  CHECK(Value::bytes("\xff") < Value::int_array({}));
  CHECK(Value::int_array({9}) < Value::char_array(U""));
  CHECK(Value::char_array(U"z") < Value::error("a"));
  CHECK(Value::bytes("\x01") < Value::bytes("\xff"));
}

TEST_CASE("literal syntax round trips") {
  const char* texts[] = {"true", "false", "0", "-12", "'a'", "'\\''", "\"TWFu\"",
                         "\"a\\\"b\\\\c\"", "[0xFF,0x0E]", "[1,2,3]", "['a','b']",
                         "\"\\u00e9\""};
  for (const char* t : texts) {
    auto v = relsynth::parse_literal(t);
    REQUIRE_MESSAGE(v.has_value(), t);
    auto again = relsynth::parse_literal(v->to_literal());
    REQUIRE(again.has_value());
    CHECK(*again == *v);
  }
  CHECK(relsynth::parse_literal("[0xFF,0x0E]")->as_bytes() == std::string("\xff\x0e"));
  CHECK(relsynth::parse_literal("\"\\u00e9\"")->as_str() == "\xc3\xa9");
  CHECK(relsynth::parse_literal("[]")->is(Tag::IntArray));
  CHECK_FALSE(relsynth::parse_literal("1 2").has_value());
  CHECK_FALSE(relsynth::parse_literal("\"open").has_value());
  CHECK(Value::error("toInt").to_literal() == "<error:toInt>");
}

TEST_CASE("ValuePool interns each distinct value once") {
  ValuePool pool;
  std::mt19937 rng(3);
  std::vector<Value> seen;
  for (int i = 0; i < 5000; ++i) {
    Value v = random_value(rng);
    auto id = pool.intern(v);
    CHECK(pool.get(id) == v);
    CHECK(pool.intern(v) == id);
    if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
  }
  CHECK(pool.size() == seen.size());
  CHECK_FALSE(pool.find(Value::str("not interned anywhere")).has_value());
}

TEST_CASE("utf8 strict decoding") {
  CHECK(relsynth::utf8::decode("\xe2\x82\xac").value() == U"\u20ac");
  CHECK_FALSE(relsynth::utf8::decode("\xc0\x80").has_value());      // overlong
  CHECK_FALSE(relsynth::utf8::decode("\xed\xa0\x80").has_value());  // surrogate
  CHECK_FALSE(relsynth::utf8::decode("\xe2\x82").has_value());      // truncated
  CHECK(relsynth::utf8::length("a\xe2\x82\xac") == 2);
}

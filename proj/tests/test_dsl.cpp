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

#include <cstdio>

#include "relsynth/dsl.hpp"
#include "relsynth/errors.hpp"
#include "relsynth/utf8.hpp"
#include "test_support.hpp"

using namespace relsynth;
using relsynth::testing::grammar_path;

namespace {

Value run(const Grammar& g, std::string_view prog, std::vector<Value> args) {
  return eval(parse_program(prog, g), args);
}

Value apply(std::string_view name, std::vector<Value> args) {
  const Constructor* c = find_constructor(name, args.size());
  REQUIRE(c != nullptr);
  std::vector<const Value*> ptrs;
  for (const Value& v : args) ptrs.push_back(&v);
  return apply_constructor(*c, ptrs);
}

Value bytes(std::initializer_list<int> xs) {
  std::string s;
  for (int x : xs) s.push_back(static_cast<char>(x));
  return Value::bytes(s);
}

// Straightforward table-driven reference encoders, written independently of
// the DSL pipeline.
std::string ref_base64(const std::string& in) {
  static const char* kAlpha = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  std::size_t i = 0;
  for (; i + 2 < in.size(); i += 3) {
    unsigned n = (static_cast<unsigned char>(in[i]) << 16) |
                 (static_cast<unsigned char>(in[i + 1]) << 8) | static_cast<unsigned char>(in[i + 2]);
    out += kAlpha[(n >> 18) & 63];
    out += kAlpha[(n >> 12) & 63];
    out += kAlpha[(n >> 6) & 63];
    out += kAlpha[n & 63];
  }
  if (in.size() - i == 1) {
    unsigned n = static_cast<unsigned char>(in[i]) << 16;
    out += kAlpha[(n >> 18) & 63];
    out += kAlpha[(n >> 12) & 63];
    out += "==";
  } else if (in.size() - i == 2) {
    unsigned n = (static_cast<unsigned char>(in[i]) << 16) | (static_cast<unsigned char>(in[i + 1]) << 8);
    out += kAlpha[(n >> 18) & 63];
    out += kAlpha[(n >> 12) & 63];
    out += kAlpha[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string ref_hex(const std::string& in) {
  std::string out;
  for (unsigned char c : in) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02X", c);
    out += buf;
  }
  return out;
}

std::string ref_utf16_hex(const std::string& utf8_text) {
  std::string out;
  char buf[8];
  for (char32_t cp : utf8::decode_valid(utf8_text)) {
    if (cp < 0x10000) {
      std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(cp));
      out += buf;
    } else {
      unsigned v = cp - 0x10000;
      std::snprintf(buf, sizeof buf, "%04X", 0xD800 + (v >> 10));
      out += buf;
      std::snprintf(buf, sizeof buf, "%04X", 0xDC00 + (v & 0x3FF));
      out += buf;
    }
  }
  return out;
}

const char* kBase64Enc = "padToMultiple(enc64(reshape(encUTF8(codePoint(x)),6)),4,'=')";
const char* kBase64Dec = "asUnicode(decUTF8(invReshape(dec64(removePad(x,'=')),6)))";
const char* kHexEnc = "enc16(reshape(encUTF8(codePoint(x)),4))";
const char* kHexDec = "asUnicode(decUTF8(invReshape(dec16(x),4)))";

}  // namespace

TEST_CASE("eval of small programs") {
  Grammar g = parse_grammar("params x1, x2\nE -> x1 | x2 | plus(E, E)");
  CHECK(run(g, "plus(x1,x2)", {Value::integer(1), Value::integer(3)}) == Value::integer(4));
  CHECK(run(g, "x2", {Value::integer(1), Value::integer(3)}) == Value::integer(3));
  Grammar c = load_grammar(grammar_path("comparator.grammar"));
  CHECK(run(c, "toInt(x)", {Value::str("abc"), Value::str("")}) == Value::error("toInt"));
  CHECK(run(c, "toInt(x)", {Value::str("-120"), Value::str("")}) == Value::integer(-120));
  CHECK(run(c, "toInt(x)", {Value::str("99999999999999999999"), Value::str("")}).is_err());
}

TEST_CASE("grammar files load with their start symbols") {
  Grammar enc = load_grammar(grammar_path("encoder.grammar"));
  CHECK(enc.symbol_name(enc.start()) == "EncodedText");
  CHECK(enc.num_params() == 1);
  Grammar dec = load_grammar(grammar_path("decoder.grammar"));
  CHECK(dec.symbol_name(dec.start()) == "DecodedData");
  Grammar cmp = load_grammar(grammar_path("comparator.grammar"));
  CHECK(cmp.symbol_name(cmp.start()) == "Comparator");
  CHECK(cmp.num_params() == 2);
  CHECK(conforms(parse_program(kBase64Enc, enc), enc));
  CHECK(conforms(parse_program(kBase64Dec, dec), dec));
  CHECK_FALSE(conforms(parse_program(kBase64Dec, enc), enc));
  CHECK(conforms(parse_program("chain(intCompare(countChar(x,'5'),countChar(y,'5')),"
                               "intCompare(toInt(x),toInt(y)))", cmp), cmp));
}

TEST_CASE("grammar validation errors") {
  CHECK_THROWS_AS(parse_grammar("params x\nE -> frobnicate(E)"), UnknownConstructor);
  CHECK_THROWS_AS(parse_grammar("params x\nE -> plus(E)"), ArityMismatch);
  CHECK_THROWS_AS(parse_grammar("params x\nE -> plus(E, F)"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("params x\nE -> x\nF -> x"), GrammarError);
  CHECK_THROWS_AS(parse_grammar("params x\nE -> plus(E, E"), SyntaxError);
  CHECK_THROWS_AS(parse_grammar(""), GrammarError);
  CHECK_THROWS_AS(load_grammar("/nonexistent/file.grammar"), IoError);
  try {
    parse_grammar("params x\nE -> x\n  | plus(E,E) )");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("program parsing errors") {
  Grammar g = parse_grammar("params x\nE -> x | inc(E)");
  CHECK_THROWS_AS(parse_program("inc(y)", g), UnknownSymbol);
  CHECK_THROWS_AS(parse_program("inc(x,x)", g), ArityMismatch);
  CHECK_THROWS_AS(parse_program("nope(x)", g), UnknownConstructor);
  CHECK_THROWS_AS(parse_program("inc(x", g), SyntaxError);
  CHECK(parse_program("inc(inc(x))", g).to_string() == "inc(inc(x))");
}

TEST_CASE("encoder building blocks") {
  CHECK(apply("reshape", {bytes({0xFF}), Value::integer(4)}) == bytes({0x0F, 0x0F}));
  CHECK(apply("reshape", {bytes({0xFE}), Value::integer(2)}) == bytes({3, 3, 3, 2}));
  CHECK(apply("reshape", {bytes({0xFF}), Value::integer(9)}).is_err());
  CHECK(apply("enc16", {bytes({6, 14})}) == Value::str("6E"));
  CHECK(apply("enc16", {bytes({16})}).is_err());
  CHECK(apply("padToMultiple", {Value::str("TQ"), Value::integer(4), Value::character(U'=')}) ==
        Value::str("TQ=="));
  CHECK(apply("padToMultiple", {Value::str("TWFu"), Value::integer(4), Value::character(U'=')}) ==
        Value::str("TWFu"));
  CHECK(apply("header", {Value::str("abc")}) == Value::str("3:abc"));
  CHECK(apply("encUU", {bytes({0, 1, 63})}) == Value::str("`!_"));
  CHECK(apply("encUTF16", {Value::int_array({0x1F600})}) == bytes({0xD8, 0x3D, 0xDE, 0x00}));
  CHECK(apply("encUTF32", {Value::int_array({0x20AC})}) == bytes({0, 0, 0x20, 0xAC}));
  CHECK(apply("encUTF8", {Value::int_array({0xD800})}).is_err());
  CHECK(apply("enc16", {Value::error("x")}) == Value::error("x"));
  CHECK(apply("enc16", {Value::str("x")}) == Value::error("type"));
}

TEST_CASE("decoder building blocks") {
  CHECK(apply("invReshape", {bytes({0x0E, 0x0F}), Value::integer(4)}) == bytes({0xEF}));
  CHECK(apply("removePad", {Value::str("TWE="), Value::character(U'=')}) == Value::str("TWE"));
  CHECK(apply("substr", {Value::str("3:abc"), Value::integer(2)}) == Value::str("abc"));
  CHECK(apply("substr", {Value::str("ab"), Value::integer(3)}).is_err());
  CHECK(apply("dec64", {Value::str("T!")}).is_err());
  CHECK(apply("decUU", {Value::str("` !")}) == bytes({0, 0, 1}));
  CHECK(apply("decUTF16", {bytes({0xD8, 0x3D, 0xDE, 0x00})}) == Value::int_array({0x1F600}));
  CHECK(apply("decUTF16", {bytes({0xDE, 0x00})}).is_err());
  CHECK(apply("decUTF8", {bytes({0xC0, 0x80})}).is_err());
}

TEST_CASE("Base64 pipeline matches the worked examples") {
  Grammar enc = load_grammar(grammar_path("encoder.grammar"));
  Grammar dec = load_grammar(grammar_path("decoder.grammar"));
  CHECK(run(enc, kBase64Enc, {Value::str("Man")}) == Value::str("TWFu"));
  CHECK(run(enc, kBase64Enc, {Value::str("Ma")}) == Value::str("TWE="));
  CHECK(run(enc, kBase64Enc, {Value::str("M")}) == Value::str("TQ=="));
  CHECK(run(dec, kBase64Dec, {Value::str("TQ==")}) == Value::str("M"));
  CHECK(run(dec, kBase64Dec, {Value::str("TWE=")}) == Value::str("Ma"));
  CHECK(run(enc, kHexEnc, {Value::str("fo")}) == Value::str("666F"));
  CHECK(run(enc, kHexEnc, {Value::str("€")}) == Value::str("E282AC"));
}

TEST_CASE("encoder/decoder duality and agreement with reference codecs") {
  Grammar enc = load_grammar(grammar_path("encoder.grammar"));
  Grammar dec = load_grammar(grammar_path("decoder.grammar"));
  const std::vector<std::string> alphabet = {"a", "b", "M", "z", "0", "9", " ", "+", "/", "=",
                                             "~", "\n", "\xc3\xa9", "\xe2\x82\xac",
                                             "\xf0\x9f\x98\x80", "\x7f"};
  REQUIRE(alphabet.size() == 16);
  struct Pair {
    const char* enc;
    const char* dec;
    std::string (*ref)(const std::string&);
  };
  const Pair pairs[] = {
      {kBase64Enc, kBase64Dec, ref_base64},
      {kHexEnc, kHexDec, ref_hex},
      {"enc16(reshape(encUTF16(codePoint(x)),4))", "asUnicode(decUTF16(invReshape(dec16(x),4)))",
       ref_utf16_hex},
  };
  for (const Pair& p : pairs) {
    Program e = parse_program(p.enc, enc);
    Program d = parse_program(p.dec, dec);
    std::size_t checked = 0;
    std::vector<std::string> layer = {""};
    for (int len = 0; len <= 4; ++len) {
      std::vector<std::string> next;
      for (const std::string& s : layer) {
        std::vector<Value> in = {Value::str(s)};
        Value out = eval(e, in);
        REQUIRE(out.is(Tag::Str));
        if (out.as_str() != p.ref(s)) FAIL_CHECK(p.enc << " on " << s);
        std::vector<Value> back_in = {out};
        if (!(eval(d, back_in) == in[0])) FAIL_CHECK(p.dec << " on " << s);
        ++checked;
        if (len < 4) {
          for (const std::string& c : alphabet) next.push_back(s + c);
        }
      }
      layer = std::move(next);
    }
    CHECK(checked == 1 + 16 + 256 + 4096 + 65536);
  }
}

TEST_CASE("comparator building blocks") {
  CHECK(apply("pos", {Value::str("12ab"), Value::str("Number"), Value::integer(1),
                      Value::str("Start")}) == Value::integer(0));
  CHECK(apply("pos", {Value::str("12ab"), Value::str("Number"), Value::integer(1),
                      Value::str("End")}) == Value::integer(2));
  CHECK(apply("pos", {Value::str("12ab"), Value::str("Number"), Value::integer(2),
                      Value::str("End")}).is_err());
  CHECK(apply("pos", {Value::str("a1b22"), Value::str("Number"), Value::integer(-1),
                      Value::str("Start")}) == Value::integer(3));
  CHECK(apply("pos", {Value::str("a.b.c"), Value::character(U'.'), Value::integer(2),
                      Value::str("Start")}) == Value::integer(3));
  CHECK(apply("substr", {Value::str("hello"), Value::integer(1), Value::integer(3)}) ==
        Value::str("el"));
  CHECK(apply("substr", {Value::str("hello"), Value::integer(3), Value::integer(1)}).is_err());
  CHECK(apply("strCompare", {Value::str("abc"), Value::str("abd")}) == Value::integer(-1));
  CHECK(apply("length", {Value::str("€x")}) == Value::integer(2));
  CHECK(apply("countChar", {Value::str("1555"), Value::character(U'5')}) == Value::integer(3));

  Grammar c = load_grammar(grammar_path("comparator.grammar"));
  const char* count5 =
      "chain(intCompare(countChar(x,'5'),countChar(y,'5')),intCompare(toInt(x),toInt(y)))";
  CHECK(run(c, count5, {Value::str("24"), Value::str("15")}) == Value::integer(-1));
  CHECK(run(c, count5, {Value::str("101"), Value::str("24")}) == Value::integer(1));
  CHECK(run(c, count5, {Value::str("55"), Value::str("55")}) == Value::integer(0));
}

TEST_CASE("cost sums node costs") {
  Grammar g = parse_grammar("params x1, x2\nE -> x1 | x2 | plus(E, E)");
  CostModel unit;
  CHECK(cost(parse_program("x1", g), unit) == 1);
  CHECK(cost(parse_program("plus(x1,x2)", g), unit) == 3);
  Grammar enc = load_grammar(grammar_path("encoder.grammar"));
  CHECK(cost(parse_program(kBase64Enc, enc), unit) == 9);
  CHECK(parse_program(kBase64Enc, enc).depth() == 5);

  CostModel m = CostModel::parse(R"({"default": 2, "plus": 0.5})");
  CHECK(cost(parse_program("plus(x1,x2)", g), m) == doctest::Approx(4.5));
  CHECK_THROWS_AS(CostModel::parse("{\"plus\": -1}"), Error);
  CHECK_THROWS_AS(CostModel::parse("{oops"), SyntaxError);
}

TEST_CASE("all_programs enumerates by depth") {
  Grammar g = parse_grammar("params x\nE -> x | inc(E)");
  CHECK(all_programs(g, 0).size() == 1);
  CHECK(all_programs(g, 2).size() == 3);
  Grammar h = parse_grammar("params x1, x2\nE -> x1 | x2 | plus(E, E)");
  CHECK(all_programs(h, 1).size() == 2 + 4);
  for (const Program& p : all_programs(h, 2)) {
    CHECK(conforms(p, h));
    CHECK(p.depth() <= 2);
  }
  CHECK_THROWS_AS(all_programs(h, 3, 100), CapacityExceeded);
}

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

#include <fstream>
#include <set>

#include "relsynth/cegis.hpp"
#include "relsynth/errors.hpp"
#include "relsynth/utf8.hpp"
#include "test_support.hpp"

using namespace relsynth;
using relsynth::testing::grammar_path;
using relsynth::testing::source_dir;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "relsynth_test_cegis";
  std::filesystem::create_directories(dir);
  return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  auto path = scratch_dir() / name;
  std::ofstream(path) << text;
  return path;
}

// Hex of the UTF-8 bytes, written independently of the DSL.
std::string hex_upper(const std::string& bytes) {
  static const char* kDigits = "0123456789ABCDEF";
  std::string out;
  for (unsigned char b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

Interpretation programs(const SynthesisProblem& p, const std::string& enc, const std::string& dec) {
  Interpretation out;
  out.emplace("encode", parse_program(enc, *p.grammars.at("encode")));
  out.emplace("decode", parse_program(dec, *p.grammars.at("decode")));
  return out;
}

const char* kBase16Enc = "enc16(reshape(encUTF8(codePoint(x)),4))";
const char* kBase16Dec = "asUnicode(decUTF8(invReshape(dec16(x),4)))";

SynthesisProblem f_g_problem() {
  auto f = write_file("inc.grammar", "params x\nstart E\nE -> inc(E) | x\n");
  auto g = write_file("dbl.grammar", "params y\nstart T\nT -> dbl(T) | y\n");
  std::string text = "fun f : Int -> Int grammar \"" + f.string() + "\";\n" +
                     "fun g : Int -> Int grammar \"" + g.string() + "\";\n" +
                     "example f(2) == g(f(1));\n";
  SynthesisProblem p = make_problem(parse_spec(text));
  p.config.depth_bound = 2;
  return p;
}

}  // namespace

TEST_CASE("validation inputs come shortest first in alphabet order") {
  ValidationConfig c;
  c.alphabet = U"ab";
  c.max_length = 2;
  auto in = validation_inputs(Tag::Str, c, {Value::str("zz"), Value::str("ab"), Value::integer(3)});
  std::vector<std::string> got;
  for (const Value& v : in) got.push_back(v.as_str());
  CHECK(got == std::vector<std::string>{"", "a", "b", "aa", "ab", "ba", "bb", "zz"});

  c.min_length = 2;
  CHECK(validation_inputs(Tag::Str, c).size() == 4);
  c.int_radius = 2;
  CHECK(validation_inputs(Tag::Int, c).size() == 5);

  // The default alphabet has seventeen characters, one of them multibyte.
  ValidationConfig d;
  CHECK(d.alphabet.size() == 17);
  CHECK(validation_inputs(Tag::Str, d).size() == 1 + 17 + 17 * 17 + 17 * 17 * 17);
}

TEST_CASE("a correct Base16 pair is valid") {
  SynthesisProblem p = load_problem(source_dir() / "benchmarks/codec/base16.spec");
  Interpretation progs = programs(p, kBase16Enc, kBase16Dec);
  ValidationConfig c;
  c.alphabet = U"ABCDEFGHIJKLMNOP ";
  c.max_length = 3;
  // Independent oracle for the encoder on every generated input.
  for (const Value& x : validation_inputs(Tag::Str, c)) {
    Value out = eval(progs.at("encode"), std::vector<Value>{x});
    REQUIRE(out.is(Tag::Str));
    CHECK(out.as_str() == hex_upper(x.as_str()));
  }
  CHECK_FALSE(verify(progs, p.spec, c));
}

TEST_CASE("a wrong decoder yields the inversion clause at the first failing input") {
  SynthesisProblem p = load_problem(source_dir() / "benchmarks/codec/base16.spec");
  // Round trips the empty string, then fails on odd byte counts.
  Interpretation progs = programs(p, kBase16Enc, "asUnicode(decUTF16(invReshape(dec16(x),4)))");
  ValidationConfig c;
  c.alphabet = U"ABCDEFGHIJKLMNOP ";
  auto cex = verify(progs, p.spec, c);
  REQUIRE(cex);
  CHECK(cex->ground.to_string() == "decode(encode(\"A\")) == \"A\"");
  CHECK(cex->witness.at("x") == Value::str("A"));
  CHECK_FALSE(evaluate_ground(cex->ground, progs));
}

TEST_CASE("failing examples are reported before properties") {
  SynthesisProblem p = load_problem(source_dir() / "benchmarks/codec/base16.spec");
  Interpretation progs = programs(p, "enc16(reshape(encUTF16(codePoint(x)),4))", kBase16Dec);
  auto cex = verify(progs, p.spec, ValidationConfig{});
  REQUIRE(cex);
  CHECK(cex->ground.to_string() == "encode(\"f\") == \"66\"");
  CHECK(cex->witness.empty());
}

TEST_CASE("anti-symmetry counterexample on a comparator") {
  std::string text = "fun compare : Str, Str -> Int grammar \"" +
                     grammar_path("comparator.grammar").string() + "\";\n" +
                     "example compare(\"15\", \"24\") == 0;\n"
                     "property forall x:Str, y:Str. sgn(compare(x, y)) == -sgn(compare(y, x));\n";
  SynthesisProblem p = make_problem(parse_spec(text));
  Interpretation progs;
  progs.emplace("compare", parse_program("intCompare(countChar(x,'2'),countChar(y,'3'))",
                                         *p.grammars.at("compare")));
  // Only the example inputs: no generated strings.
  ValidationConfig c;
  c.min_length = 1;
  c.max_length = 0;
  auto cex = verify(progs, p.spec, c);
  REQUIRE(cex);
  CHECK(cex->ground.to_string() == "sgn(compare(\"15\", \"24\")) == neg(sgn(compare(\"24\", \"15\")))");
  CHECK(cex->witness.at("x") == Value::str("15"));
  CHECK(cex->witness.at("y") == Value::str("24"));
}

TEST_CASE("a spec without clauses is vacuously valid") {
  std::string text = "fun f : Int -> Int grammar \"" +
                     write_file("inc.grammar", "params x\nstart E\nE -> inc(E) | x\n").string() +
                     "\";\n";
  SynthesisProblem p = make_problem(parse_spec(text));
  Interpretation progs;
  progs.emplace("f", parse_program("x", *p.grammars.at("f")));
  CHECK_FALSE(verify(progs, p.spec, ValidationConfig{}));
}

TEST_CASE("random candidates") {
  Grammar g = parse_grammar("params x\nstart E\nE -> inc(E) | x\n");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Program a = random_program(g, 2, seed);
    CHECK(a.to_string() == random_program(g, 2, seed).to_string());
    CHECK(a.depth() <= 2);
  }
  CHECK(random_program(g, 0, 7).to_string() == "x");

  Grammar enc = load_grammar(grammar_path("encoder.grammar"));
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Program p = random_program(enc, 6, seed);
    CHECK(conforms(p, enc));
    CHECK(p.depth() <= 6);
    seen.insert(p.to_string());
  }
  CHECK(seen.size() > 10);
  CHECK_THROWS_AS(random_program(parse_grammar("params x\nstart S\nS -> inc(x)\n"), 0, 0),
                  GrammarError);

  SynthesisProblem p = load_problem(source_dir() / "benchmarks/codec/base64.spec");
  auto c1 = random_candidate(p, 42);
  auto c2 = random_candidate(p, 42);
  CHECK(c1.at("encode").to_string() == c2.at("encode").to_string());
  CHECK(c1.at("decode").to_string() == c2.at("decode").to_string());
}

TEST_CASE("f(2) = g(f(1)) is solved by identity and doubling") {
  SynthesisProblem p = f_g_problem();
  for (std::uint64_t seed : {0, 1, 2, 3}) {
    p.config.seed = seed;
    SynthesisOutcome o = synthesize(p);
    REQUIRE(o.status == SynthesisOutcome::Status::Solved);
    CHECK(o.programs->at("f").to_string() == "x");
    CHECK(o.programs->at("g").to_string() == "dbl(y)");
    CHECK(o.iterations <= 1);
    CHECK(o.synth_seconds <= o.total_seconds);
    CHECK_FALSE(verify(*o.programs, p.spec, p.config.validation));
  }
}

TEST_CASE("contradictory examples are unsatisfiable") {
  auto f = write_file("inc.grammar", "params x\nstart E\nE -> inc(E) | x\n");
  std::string text = "fun f : Int -> Int grammar \"" + f.string() + "\";\n" +
                     "example f(1) == 1;\nexample f(1) == 2;\n";
  SynthesisProblem p = make_problem(parse_spec(text));
  p.config.depth_bound = 3;
  SynthesisOutcome o = synthesize(p);
  CHECK(o.status == SynthesisOutcome::Status::Unsat);
  CHECK_FALSE(o.programs);
  CHECK(o.reason == "unsat");
}

TEST_CASE("an expired timeout is reported as such") {
  SynthesisProblem p = f_g_problem();
  p.config.timeout = std::chrono::seconds(0);
  SynthesisOutcome o = synthesize(p);
  CHECK(o.status == SynthesisOutcome::Status::Timeout);
  CHECK(status_name(o.status) == "timeout");
}

TEST_CASE("a tiny automaton limit is reported as capacity") {
  SynthesisProblem p = load_problem(source_dir() / "benchmarks/codec/base16.spec");
  p.config.depth_bound = 4;
  p.config.max_states = 10;
  SynthesisOutcome o = synthesize(p);
  CHECK(o.status == SynthesisOutcome::Status::Capacity);
}

TEST_CASE("Base16: every rejected candidate violates its counterexample") {
  SynthesisProblem p = load_problem(source_dir() / "benchmarks/codec/base16.spec");
  p.config.depth_bound = 4;
  std::vector<ProgressRecord> records;
  p.config.progress = [&](const ProgressRecord& r) { records.push_back(r); };
  SynthesisOutcome o = synthesize(p);
  REQUIRE(o.status == SynthesisOutcome::Status::Solved);
  CHECK(o.programs->at("encode").to_string() == kBase16Enc);
  CHECK(o.programs->at("decode").to_string() == kBase16Dec);
  CHECK(o.iterations >= 1);
  CHECK(o.iterations <= 5);
  REQUIRE(o.rejected.size() == o.iterations);
  REQUIRE(records.size() == o.iterations);
  for (std::size_t i = 0; i < o.rejected.size(); ++i) {
    const RejectedCandidate& r = o.rejected[i];
    CHECK_FALSE(evaluate_ground(r.counterexample.ground, r.candidate));
    CHECK(r.counterexample.ground.to_string() == o.ground[i].to_string());
    CHECK(records[i].iteration == i + 1);
    CHECK(records[i].formula_atoms == i + 1);
    // Property clauses: the ground formula is the body at the witness.
    if (!r.counterexample.witness.empty()) {
      Formula again = instantiate(p.spec.properties[0].body, r.counterexample.witness);
      CHECK(again.to_string() == r.counterexample.ground.to_string());
    }
  }
  CHECK_FALSE(verify(*o.programs, p.spec, p.config.validation));
}

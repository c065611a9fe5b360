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

#include <algorithm>
#include <set>

#include "relsynth/dsl.hpp"
#include "relsynth/errors.hpp"
#include "relsynth/fta.hpp"
#include "test_support.hpp"

using namespace relsynth;

namespace {

const char* kPlusGrammar =
    "params x1, x2\n"
    "start E\n"
    "E -> plus(E, E) | x1 | x2\n";

const char* kIncGrammar =
    "params x\n"
    "start E\n"
    "E -> inc(E) | x\n";

std::set<Value> final_values(const Fta& a, const std::vector<StateId>& qs) {
  std::set<Value> out;
  for (StateId q : qs) out.insert(a.value(q));
  return out;
}

std::vector<std::string> accepted(const Fta& a, const std::vector<Program>& programs) {
  std::vector<std::string> out;
  for (const Program& p : programs) {
    if (accepts(a, p)) out.push_back(p.to_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("two-argument sum example: states, finals and accepted programs") {
  Grammar g = parse_grammar(kPlusGrammar);
  auto pool = std::make_shared<ValuePool>();
  std::vector<Value> in = {Value::integer(1), Value::integer(3)};
  Fta a = build_fta_for_example(g, in, Value::integer(4), pool, {.depth_bound = 1});

  std::set<std::string> states;
  for (StateId q = 0; q < a.num_states(); ++q) states.insert(a.state_name(q));
  CHECK(states == std::set<std::string>{"q_x1^1", "q_x2^3", "q_E^1", "q_E^2", "q_E^3",
                                        "q_E^4", "q_E^6"});
  REQUIRE(a.finals().size() == 1);
  CHECK(a.state_name(a.finals()[0]) == "q_E^4");

  auto progs = all_programs(g, 3);
  CHECK(accepted(a, progs) == std::vector<std::string>{"plus(x1,x2)", "plus(x2,x1)"});

  auto run = accepts(a, parse_program("plus(x1,x2)", g));
  REQUIRE(run);
  REQUIRE(run->size() == 3);
  CHECK(a.state_name((*run)[0]) == "q_E^4");
  CHECK(a.state_name((*run)[1]) == "q_E^1");
  CHECK(a.state_name((*run)[2]) == "q_E^3");
  CHECK_FALSE(accepts(a, parse_program("plus(x1,x1)", g)));
}

TEST_CASE("automaton dump is stable") {
  Grammar g = parse_grammar(kPlusGrammar);
  auto pool = std::make_shared<ValuePool>();
  std::vector<Value> in = {Value::integer(1), Value::integer(3)};
  Fta a = build_fta_for_example(g, in, Value::integer(4), pool, {.depth_bound = 1});
  CHECK(a.dump() ==
        "plus(q_E^1,q_E^1) -> q_E^2\n"
        "plus(q_E^1,q_E^3) -> q_E^4 *\n"
        "plus(q_E^3,q_E^1) -> q_E^4 *\n"
        "plus(q_E^3,q_E^3) -> q_E^6\n"
        "q_x1^1 -> q_E^1\n"
        "q_x2^3 -> q_E^3\n"
        "x1 -> q_x1^1\n"
        "x2 -> q_x2^3\n");
}

TEST_CASE("successor chain: two layers give values 2, 3, 4") {
  Grammar g = parse_grammar(kIncGrammar);
  auto pool = std::make_shared<ValuePool>();
  Fta a = build_fta(g, {{pool->intern(Value::integer(2))}}, pool, {.depth_bound = 2});
  CHECK(final_values(a, a.finals()) ==
        std::set<Value>{Value::integer(2), Value::integer(3), Value::integer(4)});
  CHECK(accepted(a, all_programs(g, 5)) ==
        std::vector<std::string>{"inc(inc(x))", "inc(x)", "x"});
}

TEST_CASE("reachable finals pick out the values a program produces") {
  Grammar g = parse_grammar(kIncGrammar);
  auto pool = std::make_shared<ValuePool>();
  // One input value, as for an inner occurrence applied to a constant.
  Fta inner = build_fta(g, {{pool->intern(Value::integer(1))}}, pool, {.depth_bound = 2});
  auto succ = reachable_final_states(inner, parse_program("inc(x)", g));
  CHECK(final_values(inner, succ) == std::set<Value>{Value::integer(2)});
  auto id = reachable_final_states(inner, parse_program("x", g));
  CHECK(final_values(inner, id) == std::set<Value>{Value::integer(1)});

  // Several input values: each parameter occurrence carries the same value.
  Grammar plus = parse_grammar("params x\nstart E\nE -> plus(E, E) | x\n");
  Fta multi = build_fta(plus, {{pool->intern(Value::integer(1)), pool->intern(Value::integer(3))}},
                        pool, {.depth_bound = 1});
  auto twice = reachable_final_states(multi, parse_program("plus(x,x)", plus));
  CHECK(final_values(multi, twice) == std::set<Value>{Value::integer(2), Value::integer(6)});

  // Program outside the grammar.
  Grammar other = parse_grammar("params x\nstart E\nE -> dbl(E) | x\n");
  CHECK(reachable_final_states(inner, parse_program("dbl(x)", other)).empty());
}

TEST_CASE("unreachable output leaves no finals") {
  Grammar g = parse_grammar(kIncGrammar);
  auto pool = std::make_shared<ValuePool>();
  std::vector<Value> in = {Value::integer(0)};
  Fta a = build_fta_for_example(g, in, Value::integer(-5), pool, {.depth_bound = 3});
  CHECK(a.finals().empty());
  CHECK_FALSE(accepts(a, parse_program("x", g)));
}

TEST_CASE("boolean formulas: and/not over constants") {
  Grammar g = parse_grammar("start B\nB -> and(B, B) | not(B) | true | false\n");
  auto pool = std::make_shared<ValuePool>();
  Fta a = build_fta(g, {}, pool, {.depth_bound = 2});
  auto top = a.find_state(g.start(), pool->intern(Value::boolean(true)));
  REQUIRE(top);
  a.set_finals({*top});
  auto run = accepts(a, parse_program("and(true,not(false))", g));
  REQUIRE(run);
  CHECK(a.state_name(run->front()) == "q_B^true");
  CHECK_FALSE(accepts(a, parse_program("and(true,false)", g)));
}

TEST_CASE("no parameters and no literals: nothing to build from") {
  Grammar g = parse_grammar("params x\nstart E\nE -> inc(E) | x\n");
  auto pool = std::make_shared<ValuePool>();
  Fta a = build_fta(g, {{}}, pool, {.depth_bound = 3});
  CHECK(a.num_states() == 0);
  CHECK(a.finals().empty());
}

TEST_CASE("capacity ceiling") {
  Grammar g = parse_grammar(kIncGrammar);
  auto pool = std::make_shared<ValuePool>();
  CHECK_THROWS_AS(build_fta(g, {{pool->intern(Value::integer(0))}}, pool,
                            {.depth_bound = 50, .max_states = 10}),
                  CapacityExceeded);
  CHECK_THROWS_AS(build_fta(g, {}, pool), ArityMismatch);
}

TEST_CASE("hand-built automaton with opaque labels") {
  auto pool = std::make_shared<ValuePool>();
  Fta a(pool, {"n", "s"}, 2, 0, 1);
  std::uint32_t two = a.intern_label("2"), three = a.intern_label("3"), add = a.intern_label("+");
  StateId q2 = a.add_state(0, pool->intern(Value::integer(2)));
  StateId q3 = a.add_state(0, pool->intern(Value::integer(3)));
  StateId q5 = a.add_state(1, pool->intern(Value::integer(5)));
  a.add_transition(TransitionKind::Literal, two, {}, q2);
  a.add_transition(TransitionKind::Literal, three, {}, q3);
  StateId in[] = {q2, q3};
  a.add_transition(TransitionKind::Ctor, add, in, q5);
  a.set_finals({q5});
  a.finalize();
  auto t = Program::make_opaque("+", {Program::make_opaque("2", {}), Program::make_opaque("3", {})});
  CHECK(accepts(a, t));
  auto swapped =
      Program::make_opaque("+", {Program::make_opaque("3", {}), Program::make_opaque("2", {})});
  CHECK_FALSE(accepts(a, swapped));
  auto single = Program::make_opaque("2", {});
  a.set_finals({q2});
  auto run = accepts(a, single);
  REQUIRE(run);
  CHECK(run->size() == 1);
}

// Brute-force oracle: every program of bounded depth, evaluated directly.
TEST_CASE("soundness and completeness against enumeration") {
  struct Case {
    const char* grammar;
    std::vector<std::vector<Value>> inputs;  // value set per parameter
    std::size_t bound;
  };
  std::vector<Case> cases = {
      {kPlusGrammar, {{Value::integer(1), Value::integer(2)}, {Value::integer(5)}}, 2},
      {"params x\nstart E\nE -> dbl(E) | inc(E) | minus(E, One) | x\nOne -> 1\n",
       {{Value::integer(0), Value::integer(7)}}, 3},
      {"params x\nstart S\nS -> enc16(M)\nM -> reshape(B, N)\nB -> encUTF8(C) | encUTF16(C)\n"
       "C -> codePoint(x)\nN -> 4 | 8\n",
       {{Value::str("a"), Value::str("\xe2\x82\xac")}}, 4},
  };
  for (const Case& c : cases) {
    Grammar g = parse_grammar(c.grammar);
    auto pool = std::make_shared<ValuePool>();
    InitialValues initial;
    for (const auto& vs : c.inputs) {
      initial.emplace_back();
      for (const Value& v : vs) initial.back().push_back(pool->intern(v));
    }
    Fta a = build_fta(g, initial, pool, {.depth_bound = c.bound});
    CAPTURE(c.grammar);

    // State interning: no two states share (symbol, value).
    std::set<std::pair<SymbolId, ValueId>> seen;
    for (StateId q = 0; q < a.num_states(); ++q) {
      CHECK(seen.insert({a.state(q).symbol, a.state(q).value}).second);
    }

    // Every tuple of input values; a program must reach exactly eval's value.
    std::vector<std::vector<Value>> tuples = {{}};
    for (const auto& vs : c.inputs) {
      std::vector<std::vector<Value>> next;
      for (const auto& t : tuples) {
        for (const Value& v : vs) {
          next.push_back(t);
          next.back().push_back(v);
        }
      }
      tuples = std::move(next);
    }

    for (const Program& p : all_programs(g, c.bound + 1)) {
      std::set<Value> expect;
      for (const auto& t : tuples) expect.insert(eval(p, t));
      auto reached = final_values(a, reachable_final_states(a, p));
      if (p.depth() <= c.bound) {
        CHECK_MESSAGE(reached == expect, p.to_string());
        CHECK(accepts(a, p));
      } else {
        // Deeper programs may or may not be representable; if they are,
        // what they reach must be correct.
        for (const Value& v : reached) CHECK_MESSAGE(expect.count(v), p.to_string());
      }
    }

    // Monotonicity in the bound.
    Fta bigger = build_fta(g, initial, pool, {.depth_bound = c.bound + 1});
    for (const Program& p : all_programs(g, c.bound)) {
      if (accepts(a, p)) CHECK(accepts(bigger, p));
    }
  }
}

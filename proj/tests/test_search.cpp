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

#include "relsynth/search.hpp"

using namespace relsynth;

namespace {

const char* kF = "params x\nstart E\nE -> inc(E) | x\n";
const char* kG = "params y\nstart T\nT -> dbl(T) | y\n";

GrammarMap grammars(std::initializer_list<std::pair<const char*, const char*>> entries) {
  GrammarMap out;
  for (auto [name, text] : entries) {
    out.emplace(name, std::make_shared<const Grammar>(parse_grammar(text, name)));
  }
  return out;
}

struct Problem {
  Formula original;
  Relaxed relaxed;
  Hfta h;
};

Problem make(const char* text, const GrammarMap& gs, std::size_t bound) {
  Formula phi = parse_formula(text);
  std::vector<std::string> targets;
  for (const auto& [f, g] : gs) targets.push_back(f);
  Relaxed r = relax(phi, targets);
  HftaOptions opt;
  opt.depth_bound = bound;
  Hfta h = build_hfta(r.formula, r.occurrences, gs, std::make_shared<ValuePool>(), opt);
  return {phi, std::move(r), std::move(h)};
}

std::vector<std::string> names(const GrammarMap& gs) {
  std::vector<std::string> out;
  for (const auto& [f, g] : gs) out.push_back(f);
  return out;
}

std::size_t count_trees(const Hfta& h) {
  std::size_t n = 0;
  TreeStream s = enumerate(h, CostModel{});
  while (s.next()) ++n;
  return n;
}

}  // namespace

TEST_CASE("f(2) = g(f(1)): identity and doubling") {
  auto gs = grammars({{"f", kF}, {"g", kG}});
  auto [phi, r, h] = make("f(2) == g(f(1))", gs, 2);
  std::vector<std::string> trace;
  SearchOptions opt;
  opt.trace = [&](const std::string& line) { trace.push_back(line); };
  SearchResult res = find_progs(h, unassigned(names(gs)), phi, gs, opt);
  REQUIRE(res.programs);
  CHECK(res.programs->at("f").to_string() == "x");
  CHECK(res.programs->at("g").to_string() == "dbl(y)");
  CHECK(evaluate_ground(phi, *res.programs));
  CHECK(trace == std::vector<std::string>{
                     "choose f at f#1 (3 finals)",
                     "try f := x cost 4 -> nonempty",
                     "choose g at g#1 (7 finals)",
                     "try g := y cost 5 -> nonempty",
                     "reject f := x, g := y: inconsistent on the original formula",
                     "try g := dbl(y) cost 5 -> nonempty",
                 });
}

TEST_CASE("propagation on f(2) = g(f(1))") {
  auto gs = grammars({{"f", kF}, {"g", kG}});
  auto [phi, r, h] = make("f(2) == g(f(1))", gs, 2);
  Hfta h2 = propagate(h, parse_program("inc(x)", *gs.at("f")), "f");
  CHECK(derivably_empty(h2));
  CHECK(is_empty(h2));
  Hfta h3 = propagate(h, parse_program("x", *gs.at("f")), "f");
  CHECK_FALSE(is_empty(h3));
  CHECK(count_trees(h3) == 1);
  CHECK(count_trees(h3) <= count_trees(h));
  // Propagating the same program again changes nothing.
  Hfta again = propagate(h3, parse_program("x", *gs.at("f")), "f");
  for (std::size_t v = 0; v < h3.size(); ++v) CHECK(again.node(v).finals == h3.node(v).finals);
}

TEST_CASE("two examples pick the successor") {
  auto gs = grammars({{"f", kF}});
  auto [phi, r, h] = make("f(1) == 2 && f(2) == 3", gs, 2);
  auto res = find_progs(h, unassigned({"f"}), phi, gs);
  REQUIRE(res.programs);
  CHECK(res.programs->at("f").to_string() == "inc(x)");
}

TEST_CASE("contradictory examples") {
  auto gs = grammars({{"f", kF}});
  auto [phi, r, h] = make("f(1) == 1 && f(1) == 2", gs, 3);
  auto res = find_progs(h, unassigned({"f"}), phi, gs);
  CHECK_FALSE(res.programs);
  CHECK(res.reason == "unsat");
}

TEST_CASE("relaxation alone is not enough: occurrences must agree") {
  // Each occurrence can satisfy its own conjunct, but no single f does.
  auto gs = grammars({{"f", kF}});
  auto [phi, r, h] = make("f(1) == 2 && f(3) == 5", gs, 2);
  CHECK_FALSE(is_empty(h));
  auto res = find_progs(h, unassigned({"f"}), phi, gs);
  CHECK_FALSE(res.programs);
}

TEST_CASE("choosing the next function") {
  auto gs = grammars({{"f", kF}, {"g", kG}});
  auto [phi, r, h] = make("f(2) == g(f(1))", gs, 2);
  Assignment p = unassigned({"f", "g"});
  CHECK(choose_unassigned(h, p) == "f");
  p["f"] = parse_program("x", *gs.at("f"));
  CHECK(choose_unassigned(h, p) == "g");
  p["g"] = parse_program("y", *gs.at("g"));
  CHECK_FALSE(choose_unassigned(h, p));

  // Ties go by name.
  auto [phi2, r2, h2] = make("g(1) == f(1)", gs, 1);
  CHECK(choose_unassigned(h2, unassigned({"f", "g"})) == "f");
  CHECK(choose_occurrence(h, "f") == 1u);
}

TEST_CASE("functions that do not occur get a fallback") {
  auto gs = grammars({{"f", kF}, {"g", kG}});
  auto [phi, r, h] = make("f(1) == 2", gs, 2);
  auto res = find_progs(h, unassigned({"f", "g"}), phi, gs);
  REQUIRE(res.programs);
  CHECK(res.programs->at("g").to_string() == "y");

  SearchOptions opt;
  opt.fallback.emplace("g", parse_program("dbl(y)", *gs.at("g")));
  res = find_progs(h, unassigned({"f", "g"}), phi, gs, opt);
  REQUIRE(res.programs);
  CHECK(res.programs->at("g").to_string() == "dbl(y)");
}

TEST_CASE("cheapest program") {
  Grammar g = parse_grammar("params x\nstart S\nS -> plus(E, N)\nE -> inc(E) | x\nN -> 4 | 8\n");
  CHECK(cheapest_program(g, CostModel{}).to_string() == "plus(x,4)");
}

TEST_CASE("deadline in the past reports a timeout") {
  auto gs = grammars({{"f", kF}});
  auto [phi, r, h] = make("f(1) == 2", gs, 2);
  SearchOptions opt;
  opt.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  auto res = find_progs(h, unassigned({"f"}), phi, gs, opt);
  CHECK_FALSE(res.programs);
  CHECK(res.reason == "timeout");
}

TEST_CASE("an argument the outer call never reads still gets a program") {
  auto gs = grammars({{"f", "params x\nstart E\nE -> 1 | x\n"}, {"g", "params y, z\nstart E\nE -> y\n"}});
  auto [phi, r, h] = make("g(f(0), g(1, 3)) < 1", gs, 2);
  auto res = find_progs(h, unassigned(names(gs)), phi, gs);
  REQUIRE(res.programs);
  CHECK(res.programs->at("f").to_string() == "x");
  CHECK(res.programs->at("g").to_string() == "y");
}

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

#include "relsynth/cegis.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "relsynth/errors.hpp"
#include "relsynth/utf8.hpp"

namespace relsynth {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void collect_args(const Term& t, std::vector<Value>& out) {
  if (t.kind != Term::Kind::Apply) return;
  for (const Term& a : t.args) {
    if (a.kind == Term::Kind::Const) out.push_back(a.value);
    collect_args(a, out);
  }
}

void collect_args(const Formula& f, std::vector<Value>& out) {
  for (const Term& t : f.terms) collect_args(t, out);
  for (const Formula& k : f.kids) collect_args(k, out);
}

std::size_t count_atoms(const Formula& f) {
  if (f.kind == Formula::Kind::Atom) return 1;
  std::size_t n = 0;
  for (const Formula& k : f.kids) n += count_atoms(k);
  return n;
}

}  // namespace

std::vector<Value> validation_inputs(Tag sort, const ValidationConfig& config,
                                     const std::vector<Value>& extra) {
  std::vector<Value> out;
  switch (sort) {
    case Tag::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case Tag::Int:
      for (std::int64_t i = -config.int_radius; i <= config.int_radius; ++i) {
        out.push_back(Value::integer(i));
      }
      break;
    case Tag::Char:
      for (char32_t c : config.alphabet) out.push_back(Value::character(c));
      break;
    case Tag::Str:
    case Tag::Bytes:
    case Tag::CharArray: {
      std::vector<std::u32string> layer = {U""};
      for (std::size_t len = 0; len <= config.max_length; ++len) {
        if (len >= config.min_length) {
          for (const auto& s : layer) {
            if (sort == Tag::Str) {
              out.push_back(Value::str(utf8::encode_all(s)));
            } else if (sort == Tag::CharArray) {
              out.push_back(Value::char_array(s));
            } else {
              std::string raw;
              for (char32_t c : s) raw.push_back(static_cast<char>(c & 0xff));
              out.push_back(Value::bytes(raw));
            }
          }
        }
        std::vector<std::u32string> next;
        for (const auto& s : layer) {
          for (char32_t c : config.alphabet) next.push_back(s + c);
        }
        layer = std::move(next);
      }
      break;
    }
    case Tag::IntArray:
    case Tag::Err:
      throw Error("no validation inputs for sort " + std::string(tag_name(sort)));
  }
  std::set<Value> seen(out.begin(), out.end());
  for (const Value& v : extra) {
    if (v.tag() == sort && seen.insert(v).second) out.push_back(v);
  }
  return out;
}

std::vector<Value> example_inputs(const RelationalSpec& spec) {
  std::vector<Value> out;
  for (const Formula& f : spec.examples) collect_args(f, out);
  return out;
}

std::optional<Counterexample> verify(const Interpretation& programs, const RelationalSpec& spec,
                                     const ValidationConfig& config) {
  for (const Formula& ex : spec.examples) {
    if (!evaluate_ground(ex, programs)) return Counterexample{ex, {}};
  }
  std::vector<Value> extra = example_inputs(spec);
  std::map<Tag, std::vector<Value>> cache;
  for (const Property& prop : spec.properties) {
    std::vector<const std::vector<Value>*> domains;
    bool empty = false;
    for (const Binding& b : prop.vars) {
      auto it = cache.find(b.sort);
      if (it == cache.end()) it = cache.emplace(b.sort, validation_inputs(b.sort, config, extra)).first;
      domains.push_back(&it->second);
      empty |= it->second.empty();
    }
    if (empty) continue;
    std::vector<std::size_t> idx(domains.size(), 0);
    while (true) {
      Valuation env;
      for (std::size_t i = 0; i < domains.size(); ++i) {
        env.insert_or_assign(prop.vars[i].name, (*domains[i])[idx[i]]);
      }
      Formula ground = instantiate(prop.body, env);
      if (!evaluate_ground(ground, programs)) return Counterexample{std::move(ground), env};
      // Lexicographic: the last variable varies fastest.
      std::size_t i = idx.size();
      while (i > 0 && ++idx[i - 1] == domains[i - 1]->size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  return std::nullopt;
}

std::vector<std::string> SynthesisProblem::targets() const {
  std::vector<std::string> out;
  for (const FunDecl& f : spec.funs) out.push_back(f.name);
  return out;
}

SynthesisProblem make_problem(RelationalSpec spec) {
  SynthesisProblem p;
  for (const FunDecl& f : spec.funs) {
    auto g = std::make_shared<const Grammar>(load_grammar(f.grammar));
    if (g->num_params() != f.params.size()) {
      throw ArityMismatch("function '" + f.name + "' takes " + std::to_string(f.params.size()) +
                          " arguments but its grammar has " + std::to_string(g->num_params()) +
                          " parameters");
    }
    p.grammars.emplace(f.name, std::move(g));
  }
  p.spec = std::move(spec);
  return p;
}

SynthesisProblem load_problem(const std::filesystem::path& spec_path) {
  return make_problem(load_spec(spec_path));
}

Program random_program(const Grammar& g, std::size_t depth_bound, std::uint64_t seed) {
  constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);
  std::vector<std::size_t> min_depth(g.num_symbols(), kUnreachable);
  for (std::size_t i = 0; i < g.num_params(); ++i) min_depth[g.param_symbol(i)] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Production& pr : g.productions()) {
      std::size_t d = kUnreachable;
      switch (pr.kind) {
        case Production::Kind::Literal: d = 0; break;
        case Production::Kind::Chain: d = min_depth[pr.rhs[0]]; break;
        case Production::Kind::Ctor: {
          std::size_t deepest = 0;
          for (SymbolId s : pr.rhs) deepest = std::max(deepest, min_depth[s]);
          if (deepest != kUnreachable) d = deepest + 1;
          break;
        }
      }
      if (d < min_depth[pr.lhs]) {
        min_depth[pr.lhs] = d;
        changed = true;
      }
    }
  }
  if (min_depth[g.start()] > depth_bound) {
    throw GrammarError("grammar '" + g.name() + "' has no program within depth " +
                       std::to_string(depth_bound));
  }

  std::mt19937_64 rng(seed);
  std::function<Program(SymbolId, std::size_t, std::size_t)> gen =
      [&](SymbolId s, std::size_t depth, std::size_t chains) -> Program {
    if (g.is_param(s)) {
      std::size_t i = g.param_index(s);
      return Program::make_param(g.param_name(i), i);
    }
    std::vector<const Production*> options;
    for (std::size_t id : g.by_lhs()[s]) {
      const Production& pr = g.productions()[id];
      switch (pr.kind) {
        case Production::Kind::Literal:
          options.push_back(&pr);
          break;
        case Production::Kind::Chain:
          if (chains < g.num_symbols() && min_depth[pr.rhs[0]] <= depth) options.push_back(&pr);
          break;
        case Production::Kind::Ctor:
          if (depth > 0 && std::all_of(pr.rhs.begin(), pr.rhs.end(),
                                       [&](SymbolId r) { return min_depth[r] < depth; })) {
            options.push_back(&pr);
          }
          break;
      }
    }
    if (options.empty()) throw GrammarError("no derivation for '" + g.symbol_name(s) + "'");
    const Production& pr =
        *options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    switch (pr.kind) {
      case Production::Kind::Literal:
        return Program::make_literal(pr.literal);
      case Production::Kind::Chain:
        return gen(pr.rhs[0], depth, chains + 1);
      case Production::Kind::Ctor:
        break;
    }
    std::vector<Program> kids;
    for (SymbolId r : pr.rhs) kids.push_back(gen(r, depth - 1, 0));
    return Program::make_ctor(*pr.ctor, std::move(kids));
  };
  return gen(g.start(), depth_bound, 0);
}

Interpretation random_candidate(const SynthesisProblem& problem, std::uint64_t seed) {
  Interpretation out;
  std::uint64_t k = 0;
  for (const auto& f : problem.targets()) {
    auto d = problem.config.function_depth.find(f);
    std::size_t bound = d != problem.config.function_depth.end() ? d->second
                                                                 : problem.config.depth_bound;
    out.emplace(f, random_program(*problem.grammars.at(f), bound, seed + 0x9e3779b97f4a7c15ULL * k++));
  }
  return out;
}

std::string_view status_name(SynthesisOutcome::Status s) {
  switch (s) {
    case SynthesisOutcome::Status::Solved: return "solved";
    case SynthesisOutcome::Status::Unsat: return "unsat";
    case SynthesisOutcome::Status::Timeout: return "timeout";
    case SynthesisOutcome::Status::Capacity: return "capacity";
  }
  return "?";
}

SynthesisOutcome synthesize(const SynthesisProblem& problem) {
  const SynthesisConfig& cfg = problem.config;
  auto start = Clock::now();
  auto deadline = start + std::chrono::duration_cast<Clock::duration>(cfg.timeout);
  SynthesisOutcome out;
  auto finish = [&](SynthesisOutcome::Status s, std::string reason) {
    out.status = s;
    out.reason = std::move(reason);
    out.total_seconds = seconds_since(start);
    return out;
  };

  std::vector<std::string> targets = problem.targets();
  Interpretation candidate = random_candidate(problem, cfg.seed);
  if (cfg.trace) {
    for (const auto& [f, p] : candidate) cfg.trace("seed " + f + " := " + p.to_string());
  }

  while (true) {
    if (Clock::now() > deadline) return finish(SynthesisOutcome::Status::Timeout, "timeout");
    auto cex = verify(candidate, problem.spec, cfg.validation);
    if (!cex) {
      out.programs = candidate;
      return finish(SynthesisOutcome::Status::Solved, "");
    }
    if (out.iterations >= cfg.max_iterations) {
      return finish(SynthesisOutcome::Status::Unsat, "iteration limit");
    }
    ++out.iterations;
    if (cfg.trace) cfg.trace("counterexample " + cex->ground.to_string());
    out.ground.push_back(cex->ground);
    out.rejected.push_back({candidate, *cex});

    Formula phi = Formula::conjunction(out.ground);
    Relaxed relaxed = relax(phi, targets);
    HftaOptions hopt;
    hopt.depth_bound = cfg.depth_bound;
    for (const auto& [f, d] : cfg.function_depth) hopt.function_depth.emplace(f, d);
    hopt.max_states = cfg.max_states;
    hopt.defer_limit = cfg.defer_limit;

    auto t0 = Clock::now();
    SearchResult found;
    std::size_t nodes = 0, states = 0;
    try {
      Hfta h = build_hfta(relaxed.formula, relaxed.occurrences, problem.grammars,
                          std::make_shared<ValuePool>(), hopt);
      nodes = h.size();
      states = h.total_states();
      if (cfg.dump_hfta) cfg.dump_hfta(h);
      SearchOptions sopt;
      sopt.model = cfg.model;
      sopt.candidate_cap = cfg.candidate_cap;
      sopt.deadline = deadline;
      sopt.fallback = candidate;
      sopt.trace = cfg.trace;
      found = find_progs(h, unassigned(targets), phi, problem.grammars, sopt);
    } catch (const CapacityExceeded& e) {
      out.synth_seconds += seconds_since(t0);
      return finish(SynthesisOutcome::Status::Capacity, e.what());
    }
    double took = seconds_since(t0);
    out.synth_seconds += took;
    out.peak_states = std::max({out.peak_states, states, found.stats.peak_states});
    if (cfg.progress) {
      cfg.progress({out.iterations, count_atoms(phi), nodes, states, took, cex->ground.to_string()});
    }
    if (!found.programs) {
      if (found.reason == "timeout") return finish(SynthesisOutcome::Status::Timeout, "timeout");
      return finish(SynthesisOutcome::Status::Unsat, found.reason);
    }
    candidate = std::move(*found.programs);
    if (cfg.trace) {
      for (const auto& [f, p] : candidate) cfg.trace("candidate " + f + " := " + p.to_string());
    }
  }
}

}  // namespace relsynth

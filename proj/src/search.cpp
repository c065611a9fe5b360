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

#include "relsynth/search.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "relsynth/errors.hpp"

namespace relsynth {

Assignment unassigned(const std::vector<std::string>& functions) {
  Assignment p;
  for (const auto& f : functions) p.emplace(f, std::nullopt);
  return p;
}

bool is_total(const Assignment& p) {
  return std::all_of(p.begin(), p.end(), [](const auto& e) { return e.second.has_value(); });
}

Interpretation to_interpretation(const Assignment& p) {
  Interpretation out;
  for (const auto& [f, prog] : p) {
    if (prog) out.emplace(f, *prog);
  }
  return out;
}

namespace {

// The first half of propagation: finals and pins only, nothing built.
Hfta restrict_occurrences(const Hfta& h, const Program& p, std::string_view f) {
  Hfta out = h;
  for (std::size_t v : out.occurrences_of(f)) {
    HftaNode& n = out.node(v);
    if (!n.fta) {
      n.pinned = p;
      continue;
    }
    auto reach = reachable_final_states(*n.fta, p);
    std::vector<StateId> kept;
    std::set_intersection(n.finals.begin(), n.finals.end(), reach.begin(), reach.end(),
                          std::back_inserter(kept));
    out.set_finals(v, std::move(kept));
  }
  return out;
}

}  // namespace

Hfta propagate(const Hfta& h, const Program& p, std::string_view f) {
  Hfta out = restrict_occurrences(h, p, f);
  out.materialize(false);
  return out;
}

std::optional<std::string> choose_unassigned(const Hfta& h, const Assignment& p) {
  struct Entry {
    std::string name;
    std::size_t occurrences;
    bool built;
  };
  std::vector<Entry> open;
  for (const auto& [f, prog] : p) {
    if (prog) continue;
    auto occ = h.occurrences_of(f);
    bool built = std::any_of(occ.begin(), occ.end(), [&](std::size_t v) { return h.is_built(v); });
    open.push_back({f, occ.size(), built});
  }
  if (open.empty()) return std::nullopt;
  bool any_built = std::any_of(open.begin(), open.end(), [](const Entry& e) { return e.built; });
  const Entry* best = nullptr;
  for (const Entry& e : open) {
    if (any_built && e.occurrences > 0 && !e.built) continue;
    if (!best || e.occurrences > best->occurrences) best = &e;  // names arrive sorted
  }
  return best->name;
}

std::optional<std::size_t> choose_occurrence(const Hfta& h, std::string_view f,
                                             const CostTables* tables) {
  auto frontier = [&](std::size_t v) {
    const auto& finals = h.node(v).finals;
    if (!tables) return finals.size();
    return static_cast<std::size_t>(
        std::count_if(finals.begin(), finals.end(), [&](StateId q) { return tables->live(v, q); }));
  };
  std::optional<std::size_t> best;
  std::size_t best_size = 0;
  for (std::size_t v : h.occurrences_of(f)) {
    if (!h.is_built(v)) continue;
    std::size_t n = frontier(v);
    if (!best || n < best_size) {
      best = v;
      best_size = n;
    }
  }
  return best;
}

Program cheapest_program(const Grammar& g, const CostModel& m) {
  std::vector<std::optional<std::pair<double, Program>>> best(g.num_symbols());
  for (std::size_t i = 0; i < g.num_params(); ++i) {
    best[g.param_symbol(i)] = {m.of(g.param_name(i)), Program::make_param(g.param_name(i), i)};
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const Production& pr : g.productions()) {
      std::optional<std::pair<double, Program>> cand;
      switch (pr.kind) {
        case Production::Kind::Literal: {
          Program p = Program::make_literal(pr.literal);
          cand = {m.of(p.node_label()), p};
          break;
        }
        case Production::Kind::Chain:
          cand = best[pr.rhs[0]];
          break;
        case Production::Kind::Ctor: {
          double c = m.of(pr.ctor->name);
          std::vector<Program> kids;
          bool ok = true;
          for (SymbolId s : pr.rhs) {
            if (!best[s]) {
              ok = false;
              break;
            }
            c += best[s]->first;
            kids.push_back(best[s]->second);
          }
          if (ok) cand = {c, Program::make_ctor(*pr.ctor, std::move(kids))};
          break;
        }
      }
      if (cand && (!best[pr.lhs] || cand->first < best[pr.lhs]->first)) {
        best[pr.lhs] = std::move(cand);
        changed = true;
      }
    }
  }
  if (!best[g.start()]) throw GrammarError("grammar '" + g.name() + "' derives no program");
  return best[g.start()]->second;
}

namespace {

struct Timeout {};

class Searcher {
 public:
  Searcher(const Formula& original, const GrammarMap& grammars, const SearchOptions& options)
      : original_(original), grammars_(grammars), options_(options) {}

  std::optional<Interpretation> run(const Hfta& h, Assignment p) {
    check_deadline();
    auto f = choose_unassigned(h, p);
    if (!f) {
      Interpretation interp = to_interpretation(p);
      if (evaluate_ground(original_, interp)) return interp;
      log("reject " + describe(interp) + ": inconsistent on the original formula");
      ++stats.backtracks;
      return std::nullopt;
    }

    if (h.occurrences_of(*f).empty()) {
      auto prev = options_.fallback.find(*f);
      p[*f] = prev != options_.fallback.end() ? prev->second
                                              : cheapest_program(*grammars_.at(*f), options_.model);
      log("fix " + *f + " := " + p[*f]->to_string() + " (does not occur)");
      return run(h, std::move(p));
    }

    Hfta base = h;
    CostTables tables = cost_tables(base, options_.model);
    auto v = choose_occurrence(base, *f, &tables);
    if (!v) {
      base.materialize(true);
      tables = cost_tables(base, options_.model);
      v = choose_occurrence(base, *f, &tables);
      if (!v) return std::nullopt;
    }
    log("choose " + *f + " at " + base.node(*v).label + " (" +
        std::to_string(base.node(*v).finals.size()) + " finals)");

    NodeStream stream(base, *v, options_.model, tables);
    std::set<std::vector<std::string>> signatures;
    std::size_t tried = 0;
    while (auto cand = stream.next()) {
      check_deadline();
      ++stats.candidates;
      // Materializing depends only on the restricted finals and pins, so
      // duplicates are caught before the expensive part.
      Hfta next = restrict_occurrences(base, cand->program, *f);
      if (!signatures.insert(signature(next, *f)).second) continue;
      next.materialize(false);
      stats.peak_states = std::max(stats.peak_states, next.total_states());
      if (++tried > options_.candidate_cap) {
        capped = true;
        log("cap reached for " + *f);
        break;
      }
      bool empty = derivably_empty(next);
      log("try " + *f + " := " + cand->program.to_string() + " cost " + format_cost(cand->cost) +
          (empty ? " -> empty" : " -> nonempty"));
      if (empty) {
        ++stats.pruned;
        continue;
      }
      Assignment q = p;
      q[*f] = cand->program;
      if (auto r = run(next, std::move(q))) return r;
    }
    ++stats.backtracks;
    return std::nullopt;
  }

  SearchStats stats;
  bool capped = false;

 private:
  void check_deadline() const {
    if (options_.deadline && std::chrono::steady_clock::now() > *options_.deadline) throw Timeout{};
  }

  void log(const std::string& line) const {
    if (options_.trace) options_.trace(line);
  }

  static std::string format_cost(double c) {
    std::ostringstream out;
    out << c;
    return out.str();
  }

  static std::string describe(const Interpretation& interp) {
    std::string out;
    for (const auto& [f, p] : interp) {
      if (!out.empty()) out += ", ";
      out += f + " := " + p.to_string();
    }
    return out;
  }

  // Candidates that leave every occurrence with the same finals lead to the
  // same subproblem.
  static std::vector<std::string> signature(const Hfta& h, std::string_view f) {
    std::vector<std::string> sig;
    for (std::size_t v : h.occurrences_of(f)) {
      const HftaNode& n = h.node(v);
      if (!n.fta) {
        sig.push_back("pinned " + n.pinned->to_string());
        continue;
      }
      std::string s;
      for (StateId q : n.finals) s += std::to_string(q) + ",";
      sig.push_back(std::move(s));
    }
    return sig;
  }

  const Formula& original_;
  const GrammarMap& grammars_;
  const SearchOptions& options_;
};

}  // namespace

SearchResult find_progs(const Hfta& h, const Assignment& p, const Formula& original,
                        const GrammarMap& grammars, const SearchOptions& options) {
  Searcher s(original, grammars, options);
  SearchResult result;
  try {
    result.programs = s.run(h, p);
    if (!result.programs) result.reason = s.capped ? "candidate cap" : "unsat";
  } catch (const Timeout&) {
    result.reason = "timeout";
  }
  result.stats = s.stats;
  return result;
}

}  // namespace relsynth

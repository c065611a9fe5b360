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

// Picking one program per function so that all occurrences in a relaxed
// formula agree: backtracking over per-occurrence candidates, pruning the
// automaton after every choice.

#ifndef RELSYNTH_SEARCH_HPP_
#define RELSYNTH_SEARCH_HPP_

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "relsynth/dsl.hpp"
#include "relsynth/hfta.hpp"
#include "relsynth/lang.hpp"

namespace relsynth {

/// Function symbol -> chosen program, or nullopt while unassigned.
using Assignment = std::map<std::string, std::optional<Program>, std::less<>>;

Assignment unassigned(const std::vector<std::string>& functions);
bool is_total(const Assignment& p);
Interpretation to_interpretation(const Assignment& p);

/// Restricts every occurrence of `f` to the finals `p` can reach (or pins
/// `p` on occurrences not built yet), then builds what became buildable.
Hfta propagate(const Hfta& h, const Program& p, std::string_view f);

/// Most occurrences first, ties by name. Functions whose occurrences are all
/// still deferred wait while another one has a built occurrence.
std::optional<std::string> choose_unassigned(const Hfta& h, const Assignment& p);

/// Built occurrence of `f` with the fewest finals, lowest node id on ties.
/// With cost tables, only finals that can still complete a tree count.
std::optional<std::size_t> choose_occurrence(const Hfta& h, std::string_view f,
                                             const CostTables* tables = nullptr);

/// Cheapest program of a grammar (a fallback for functions that do not occur).
Program cheapest_program(const Grammar& g, const CostModel& m);

struct SearchOptions {
  CostModel model;
  /// Distinct subproblems tried per choice point; duplicates are free.
  std::size_t candidate_cap = 10'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Programs for functions that do not occur in the formula.
  Interpretation fallback;
  /// One line per decision when set.
  std::function<void(const std::string&)> trace;
};

struct SearchStats {
  std::size_t candidates = 0;
  std::size_t pruned = 0;  // propagations found empty
  std::size_t backtracks = 0;
  std::size_t peak_states = 0;  // largest automaton seen, deferred parts included
};

struct SearchResult {
  std::optional<Interpretation> programs;
  /// Why no assignment was found: "unsat", "candidate cap", "timeout".
  std::string reason;
  SearchStats stats;
};

/// Programs that satisfy `original` (the formula before relaxation), one
/// per function of `p`, drawn from `h`.
SearchResult find_progs(const Hfta& h, const Assignment& p, const Formula& original,
                        const GrammarMap& grammars, const SearchOptions& options = {});

}  // namespace relsynth

#endif  // RELSYNTH_SEARCH_HPP_

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

// Counterexample-guided synthesis: test candidates against a bounded input
// set, turn the first violation into a ground formula, and resynthesize
// from the conjunction of all violations seen so far.

#ifndef RELSYNTH_CEGIS_HPP_
#define RELSYNTH_CEGIS_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relsynth/dsl.hpp"
#include "relsynth/hfta.hpp"
#include "relsynth/lang.hpp"
#include "relsynth/search.hpp"

namespace relsynth {

/// Sixteen printable ASCII characters and the euro sign.
inline constexpr std::u32string_view kDefaultAlphabet = U"ABMTWamnz019 +/=€";

struct ValidationConfig {
  std::u32string alphabet{kDefaultAlphabet};
  std::size_t min_length = 0;
  std::size_t max_length = 3;
  std::int64_t int_radius = 8;  // Int inputs range over [-r, r]
};

/// Inputs for one sort in generation order: shorter first, then by alphabet
/// position. Str constants of `extra` not already generated are appended.
std::vector<Value> validation_inputs(Tag sort, const ValidationConfig& config,
                                     const std::vector<Value>& extra = {});

/// Str/Int/... constants that appear as function arguments in the examples.
std::vector<Value> example_inputs(const RelationalSpec& spec);

struct Counterexample {
  Formula ground;
  Valuation witness;  // empty for a failed example clause
};

/// nullopt when every clause holds on every generated input.
std::optional<Counterexample> verify(const Interpretation& programs, const RelationalSpec& spec,
                                     const ValidationConfig& config);

struct ProgressRecord {
  std::size_t iteration;
  std::size_t formula_atoms;
  std::size_t hfta_nodes;
  std::size_t hfta_states;
  double find_seconds;
  std::string counterexample;
};

struct SynthesisConfig {
  std::size_t depth_bound = 6;
  std::map<std::string, std::size_t, std::less<>> function_depth;
  ValidationConfig validation;
  std::chrono::duration<double> timeout = std::chrono::seconds(600);
  std::uint64_t seed = 0;
  CostModel model;
  std::size_t defer_limit = 64;
  std::size_t candidate_cap = 10'000;
  std::size_t max_states = 5'000'000;
  std::size_t max_iterations = 100;
  std::function<void(const std::string&)> trace;
  std::function<void(const ProgressRecord&)> progress;
  /// Receives the automaton of every round, for debugging.
  std::function<void(const Hfta&)> dump_hfta;
};

struct SynthesisProblem {
  RelationalSpec spec;
  GrammarMap grammars;
  SynthesisConfig config;

  std::vector<std::string> targets() const;
};

/// Reads a spec file and every grammar it names; checks parameter counts.
SynthesisProblem load_problem(const std::filesystem::path& spec_path);
SynthesisProblem make_problem(RelationalSpec spec);

/// A random derivation of depth <= the bound for every target.
Interpretation random_candidate(const SynthesisProblem& problem, std::uint64_t seed);
Program random_program(const Grammar& g, std::size_t depth_bound, std::uint64_t seed);

struct RejectedCandidate {
  Interpretation candidate;
  Counterexample counterexample;
};

struct SynthesisOutcome {
  enum class Status { Solved, Unsat, Timeout, Capacity };
  Status status = Status::Unsat;
  std::optional<Interpretation> programs;
  std::string reason;
  std::size_t iterations = 0;  // counterexamples added
  double total_seconds = 0;
  double synth_seconds = 0;
  std::size_t peak_states = 0;
  std::vector<RejectedCandidate> rejected;
  std::vector<Formula> ground;  // the strengthened conjunction, clause by clause
};

std::string_view status_name(SynthesisOutcome::Status s);

SynthesisOutcome synthesize(const SynthesisProblem& problem);

}  // namespace relsynth

#endif  // RELSYNTH_CEGIS_HPP_

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

// Bottom-up finite tree automata whose states pair a grammar symbol with a
// concrete value.

#ifndef RELSYNTH_FTA_HPP_
#define RELSYNTH_FTA_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "relsynth/dsl.hpp"
#include "relsynth/value.hpp"

namespace relsynth {

using StateId = std::uint32_t;
using TransitionId = std::uint32_t;

struct FtaState {
  SymbolId symbol;
  ValueId value;
};

/// Param and Literal transitions are nullary leaves; Chain transitions are
/// unary epsilon moves from a chain production and create no tree node.
enum class TransitionKind : std::uint8_t { Ctor, Param, Literal, Chain };

struct Transition {
  TransitionKind kind;
  std::uint32_t label;  // index into Fta::label_text
  std::uint32_t first;  // offset of the inputs
  std::uint32_t arity;
  StateId output;
  const Constructor* ctor = nullptr;  // null for opaque labels
  std::uint32_t param = 0;            // Param: argument index
};

struct FtaOptions {
  std::size_t depth_bound = 6;
  std::size_t max_states = 5'000'000;
  std::size_t max_transitions = 60'000'000;
};

class Fta {
 public:
  /// Symbols [first_param, first_param + num_params) are parameters.
  Fta(std::shared_ptr<ValuePool> pool, std::vector<std::string> symbol_names,
      SymbolId first_param, std::size_t num_params, SymbolId start);

  // ---- construction ----
  StateId add_state(SymbolId symbol, ValueId value, std::uint32_t layer = 0);
  std::uint32_t intern_label(std::string_view text);
  TransitionId add_transition(TransitionKind kind, std::uint32_t label,
                              std::span<const StateId> inputs, StateId output,
                              const Constructor* ctor = nullptr, std::uint32_t param = 0);
  void set_finals(std::vector<StateId> finals);
  /// Builds the lookup indexes; required before queries.
  void finalize();

  // ---- queries ----
  const ValuePool& pool() const { return *pool_; }
  const std::shared_ptr<ValuePool>& shared_pool() const { return pool_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_transitions() const { return transitions_.size(); }
  const FtaState& state(StateId q) const { return states_[q]; }
  const Value& value(StateId q) const { return pool_->get(states_[q].value); }
  std::uint32_t layer(StateId q) const { return layers_[q]; }
  std::optional<StateId> find_state(SymbolId symbol, ValueId value) const;

  std::size_t num_symbols() const { return symbol_names_.size(); }
  const std::string& symbol_name(SymbolId s) const { return symbol_names_[s]; }
  SymbolId start() const { return start_; }
  std::size_t num_params() const { return num_params_; }
  bool is_param_symbol(SymbolId s) const {
    return s >= first_param_ && s < first_param_ + num_params_;
  }
  SymbolId param_symbol(std::size_t i) const { return static_cast<SymbolId>(first_param_ + i); }
  /// States of parameter i, in creation order.
  std::vector<StateId> param_states(std::size_t i) const;

  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& transition(TransitionId t) const { return transitions_[t]; }
  std::span<const StateId> inputs(const Transition& t) const {
    return {inputs_.data() + t.first, t.arity};
  }
  const std::string& label_text(const Transition& t) const { return labels_[t.label]; }
  std::size_t num_labels() const { return labels_.size(); }
  const std::string& label(std::uint32_t id) const { return labels_[id]; }
  std::optional<std::uint32_t> find_label(std::string_view text) const;
  /// Transitions whose output is q.
  std::span<const TransitionId> incoming(StateId q) const;
  /// Transitions with the given label and exact input tuple.
  std::vector<TransitionId> lookup(std::uint32_t label, std::span<const StateId> inputs) const;
  std::span<const TransitionId> with_label(std::uint32_t label) const;
  /// Chain transitions leaving q.
  std::span<const TransitionId> chains_from(StateId q) const;
  /// Transitions that take q as an input (once per transition).
  std::span<const TransitionId> uses(StateId q) const;

  const std::vector<StateId>& finals() const { return finals_; }
  bool is_final(StateId q) const { return final_mask_[q]; }

  /// "label(q_sym^val,...) -> q_sym^val", one line per transition, sorted;
  /// final outputs are followed by " *".
  std::string dump() const;
  std::string state_name(StateId q) const;

 private:
  std::shared_ptr<ValuePool> pool_;
  std::vector<std::string> symbol_names_;
  SymbolId first_param_;
  std::size_t num_params_;
  SymbolId start_;

  std::vector<FtaState> states_;
  std::vector<std::uint32_t> layers_;
  std::unordered_map<std::uint64_t, StateId> state_index_;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> label_index_;
  std::vector<Transition> transitions_;
  std::vector<StateId> inputs_;

  std::vector<StateId> finals_;
  std::vector<bool> final_mask_;

  // finalize()
  std::vector<std::uint32_t> incoming_offsets_;
  std::vector<TransitionId> incoming_;
  std::vector<std::uint32_t> label_offsets_;
  std::vector<TransitionId> by_label_;
  std::vector<std::uint32_t> chain_offsets_;
  std::vector<TransitionId> chains_;
  std::vector<std::uint32_t> use_offsets_;
  std::vector<TransitionId> uses_;
  std::unordered_multimap<std::uint64_t, TransitionId> lookup_;
};

/// Initial value sets per grammar parameter.
using InitialValues = std::vector<std::vector<ValueId>>;

/// Layered construction: layer 0 holds parameter and literal leaves, layer L
/// adds every constructor application with an input from layer L-1. Chain
/// productions are closed within a layer. Finals are all start-symbol states.
Fta build_fta(const Grammar& g, const InitialValues& initial, std::shared_ptr<ValuePool> pool,
              const FtaOptions& options = {});

/// Singleton initial sets; finals restricted to the start state carrying
/// `output` (none if unreachable).
Fta build_fta_for_example(const Grammar& g, std::span<const Value> inputs, const Value& output,
                          std::shared_ptr<ValuePool> pool, const FtaOptions& options = {});

/// State assigned to each node of a tree, in preorder.
using FtaRun = std::vector<StateId>;

/// An accepting run, if one exists. Each leaf may pick any state its label
/// allows.
std::optional<FtaRun> accepts(const Fta& a, const Program& t);

/// Final states rooting a run of `a` on `p` in which every occurrence of a
/// parameter carries the same state, over all parameter-state tuples.
std::vector<StateId> reachable_final_states(const Fta& a, const Program& p);

/// Final states rooting a run of `a` on `p` in which parameter i is pinned to
/// `fixed[i]` at every occurrence; unset entries are unconstrained.
std::vector<StateId> final_states_with(const Fta& a, const Program& p,
                                       const std::vector<std::optional<StateId>>& fixed);

}  // namespace relsynth

#endif  // RELSYNTH_FTA_HPP_

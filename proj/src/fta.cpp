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

#include "relsynth/fta.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <utility>

#include "relsynth/errors.hpp"

namespace relsynth {
namespace {

std::uint64_t state_key(SymbolId s, ValueId v) {
  return (static_cast<std::uint64_t>(s) << 32) | v;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
  h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t lookup_key(std::uint32_t label, std::span<const StateId> inputs) {
  std::uint64_t h = mix(0x51ed270b27a3c1f5ULL, label);
  for (StateId q : inputs) h = mix(h, q);
  return mix(h, inputs.size());
}

// Compressed adjacency: offsets[k]..offsets[k+1] index into items.
void build_csr(std::size_t keys, const std::vector<std::pair<std::uint32_t, TransitionId>>& pairs,
               std::vector<std::uint32_t>& offsets, std::vector<TransitionId>& items) {
  offsets.assign(keys + 1, 0);
  for (const auto& [k, t] : pairs) ++offsets[k + 1];
  for (std::size_t k = 0; k < keys; ++k) offsets[k + 1] += offsets[k];
  items.assign(pairs.size(), 0);
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [k, t] : pairs) items[cursor[k]++] = t;
}

std::span<const TransitionId> csr_row(const std::vector<std::uint32_t>& offsets,
                                      const std::vector<TransitionId>& items, std::size_t k) {
  if (k + 1 >= offsets.size()) return {};
  return {items.data() + offsets[k], offsets[k + 1] - offsets[k]};
}

}  // namespace

Fta::Fta(std::shared_ptr<ValuePool> pool, std::vector<std::string> symbol_names,
         SymbolId first_param, std::size_t num_params, SymbolId start)
    : pool_(std::move(pool)),
      symbol_names_(std::move(symbol_names)),
      first_param_(first_param),
      num_params_(num_params),
      start_(start) {
  if (!pool_) throw Error("automaton needs a value pool");
  if (first_param_ + num_params_ > symbol_names_.size() || start_ >= symbol_names_.size()) {
    throw Error("automaton symbol layout out of range");
  }
}

StateId Fta::add_state(SymbolId symbol, ValueId value, std::uint32_t layer) {
  auto [it, inserted] =
      state_index_.try_emplace(state_key(symbol, value), static_cast<StateId>(states_.size()));
  if (inserted) {
    states_.push_back({symbol, value});
    layers_.push_back(layer);
    final_mask_.push_back(false);
  }
  return it->second;
}

std::optional<StateId> Fta::find_state(SymbolId symbol, ValueId value) const {
  auto it = state_index_.find(state_key(symbol, value));
  if (it == state_index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Fta::intern_label(std::string_view text) {
  auto it = label_index_.find(std::string(text));
  if (it != label_index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.emplace_back(text);
  label_index_.emplace(labels_.back(), id);
  return id;
}

std::optional<std::uint32_t> Fta::find_label(std::string_view text) const {
  auto it = label_index_.find(std::string(text));
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

TransitionId Fta::add_transition(TransitionKind kind, std::uint32_t label,
                                 std::span<const StateId> inputs, StateId output,
                                 const Constructor* ctor, std::uint32_t param) {
  Transition t{kind, label, static_cast<std::uint32_t>(inputs_.size()),
               static_cast<std::uint32_t>(inputs.size()), output, ctor, param};
  inputs_.insert(inputs_.end(), inputs.begin(), inputs.end());
  transitions_.push_back(t);
  return static_cast<TransitionId>(transitions_.size() - 1);
}

void Fta::set_finals(std::vector<StateId> finals) {
  std::sort(finals.begin(), finals.end());
  finals.erase(std::unique(finals.begin(), finals.end()), finals.end());
  std::fill(final_mask_.begin(), final_mask_.end(), false);
  for (StateId q : finals) final_mask_.at(q) = true;
  finals_ = std::move(finals);
}

void Fta::finalize() {
  std::vector<std::pair<std::uint32_t, TransitionId>> out, lab, chain, use;
  out.reserve(transitions_.size());
  lab.reserve(transitions_.size());
  lookup_.clear();
  lookup_.reserve(transitions_.size());
  for (TransitionId id = 0; id < transitions_.size(); ++id) {
    const Transition& t = transitions_[id];
    out.emplace_back(t.output, id);
    lab.emplace_back(t.label, id);
    if (t.kind == TransitionKind::Chain) chain.emplace_back(inputs(t)[0], id);
    auto in = inputs(t);
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (std::find(in.begin(), in.begin() + i, in[i]) == in.begin() + i) use.emplace_back(in[i], id);
    }
    lookup_.emplace(lookup_key(t.label, inputs(t)), id);
  }
  build_csr(states_.size(), out, incoming_offsets_, incoming_);
  build_csr(labels_.size(), lab, label_offsets_, by_label_);
  build_csr(states_.size(), chain, chain_offsets_, chains_);
  build_csr(states_.size(), use, use_offsets_, uses_);
}

std::span<const TransitionId> Fta::incoming(StateId q) const {
  return csr_row(incoming_offsets_, incoming_, q);
}

std::span<const TransitionId> Fta::with_label(std::uint32_t label) const {
  return csr_row(label_offsets_, by_label_, label);
}

std::span<const TransitionId> Fta::chains_from(StateId q) const {
  return csr_row(chain_offsets_, chains_, q);
}

std::span<const TransitionId> Fta::uses(StateId q) const {
  return csr_row(use_offsets_, uses_, q);
}

std::vector<TransitionId> Fta::lookup(std::uint32_t label,
                                      std::span<const StateId> in) const {
  std::vector<TransitionId> found;
  auto [lo, hi] = lookup_.equal_range(lookup_key(label, in));
  for (auto it = lo; it != hi; ++it) {
    const Transition& t = transitions_[it->second];
    auto have = inputs(t);
    if (t.label == label && std::equal(have.begin(), have.end(), in.begin(), in.end())) {
      found.push_back(it->second);
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::vector<StateId> Fta::param_states(std::size_t i) const {
  std::vector<StateId> out;
  SymbolId s = param_symbol(i);
  for (StateId q = 0; q < states_.size(); ++q) {
    if (states_[q].symbol == s) out.push_back(q);
  }
  return out;
}

std::string Fta::state_name(StateId q) const {
  return "q_" + symbol_names_[states_[q].symbol] + "^" + value(q).to_literal();
}

std::string Fta::dump() const {
  std::vector<std::string> lines;
  lines.reserve(transitions_.size());
  for (const Transition& t : transitions_) {
    std::string line;
    auto in = inputs(t);
    if (t.kind == TransitionKind::Chain) {
      line = state_name(in[0]);
    } else {
      line = labels_[t.label];
      if (!in.empty()) {
        line += '(';
        for (std::size_t i = 0; i < in.size(); ++i) {
          if (i) line += ',';
          line += state_name(in[i]);
        }
        line += ')';
      }
    }
    line += " -> " + state_name(t.output);
    if (final_mask_[t.output]) line += " *";
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

class Builder {
 public:
  Builder(const Grammar& g, Fta& a, const FtaOptions& options)
      : g_(g), a_(a), options_(options), by_symbol_(g.num_symbols()),
        chains_into_(g.num_symbols()) {
    for (const Production& p : g.productions()) {
      if (p.kind == Production::Kind::Chain) chains_into_[p.rhs[0]].push_back(p.lhs);
      if (p.kind == Production::Kind::Ctor) ctor_prods_.push_back(&p);
    }
    for (const Production* p : ctor_prods_) ctor_labels_.push_back(a_.intern_label(p->ctor->name));
  }

  void run(const InitialValues& initial) {
    auto& pool = *a_.shared_pool();
    std::vector<StateId> fresh;
    for (std::size_t i = 0; i < g_.num_params(); ++i) {
      std::uint32_t label = a_.intern_label(g_.param_name(i));
      for (ValueId v : initial[i]) {
        auto [q, is_new] = create(g_.param_symbol(i), v, 0);
        if (!is_new) continue;
        a_.add_transition(TransitionKind::Param, label, {}, q, nullptr,
                          static_cast<std::uint32_t>(i));
        fresh.push_back(q);
      }
    }
    for (const Production& p : g_.productions()) {
      if (p.kind != Production::Kind::Literal) continue;
      auto [q, is_new] = create(p.lhs, pool.intern(p.literal), 0);
      a_.add_transition(TransitionKind::Literal, a_.intern_label(p.literal.to_literal()), {}, q);
      if (is_new) fresh.push_back(q);
    }
    close_chains(fresh, 0);

    // prev_: states with layer <= L-2, cur_: layer <= L-1.
    std::vector<std::size_t> prev(g_.num_symbols(), 0);
    for (std::uint32_t layer = 1; layer <= options_.depth_bound; ++layer) {
      std::vector<std::size_t> cur(g_.num_symbols());
      for (std::size_t s = 0; s < cur.size(); ++s) cur[s] = by_symbol_[s].size();
      fresh.clear();
      for (std::size_t k = 0; k < ctor_prods_.size(); ++k) {
        expand(*ctor_prods_[k], ctor_labels_[k], layer, prev, cur, fresh);
      }
      // No new states means later layers have no pivot to expand.
      if (fresh.empty()) break;
      close_chains(fresh, layer);
      prev = std::move(cur);
    }

    std::vector<StateId> finals;
    for (StateId q : by_symbol_[g_.start()]) finals.push_back(q);
    a_.set_finals(std::move(finals));
    a_.finalize();
  }

 private:
  std::pair<StateId, bool> create(SymbolId s, ValueId v, std::uint32_t layer) {
    std::size_t before = a_.num_states();
    StateId q = a_.add_state(s, v, layer);
    bool is_new = a_.num_states() != before;
    if (is_new) {
      by_symbol_[s].push_back(q);
      if (a_.num_states() > options_.max_states) {
        throw CapacityExceeded("automaton exceeded " + std::to_string(options_.max_states) +
                               " states");
      }
    }
    return {q, is_new};
  }

  void check_transitions() {
    if (a_.num_transitions() > options_.max_transitions) {
      throw CapacityExceeded("automaton exceeded " + std::to_string(options_.max_transitions) +
                             " transitions");
    }
  }

  void close_chains(std::vector<StateId> work, std::uint32_t layer) {
    std::uint32_t eps = a_.intern_label("");
    while (!work.empty()) {
      StateId q = work.back();
      work.pop_back();
      FtaState st = a_.state(q);
      for (SymbolId lhs : chains_into_[st.symbol]) {
        auto [out, is_new] = create(lhs, st.value, layer);
        StateId in[] = {q};
        a_.add_transition(TransitionKind::Chain, eps, in, out);
        if (is_new) work.push_back(out);
      }
    }
  }

  // Applies one production to every input tuple whose deepest member was
  // created in layer-1.
  void expand(const Production& p, std::uint32_t label, std::uint32_t layer,
              const std::vector<std::size_t>& prev, const std::vector<std::size_t>& cur,
              std::vector<StateId>& fresh) {
    const std::size_t n = p.rhs.size();
    auto& pool = *a_.shared_pool();
    std::vector<StateId> in(n);
    std::vector<const Value*> args(n);

    auto emit = [&] {
      for (std::size_t i = 0; i < n; ++i) args[i] = &a_.value(in[i]);
      ValueId v = pool.intern(apply_constructor(*p.ctor, args));
      auto [out, is_new] = create(p.lhs, v, layer);
      a_.add_transition(TransitionKind::Ctor, label, in, out, p.ctor);
      check_transitions();
      if (is_new) fresh.push_back(out);
    };

    if (n == 0) {
      if (layer == 1) emit();
      return;
    }

    for (std::size_t pivot = 0; pivot < n; ++pivot) {
      std::vector<std::size_t> lo(n), hi(n);
      bool empty = false;
      for (std::size_t i = 0; i < n; ++i) {
        SymbolId s = p.rhs[i];
        if (i < pivot) {
          lo[i] = 0, hi[i] = prev[s];
        } else if (i == pivot) {
          lo[i] = prev[s], hi[i] = cur[s];
        } else {
          lo[i] = 0, hi[i] = cur[s];
        }
        if (lo[i] >= hi[i]) empty = true;
      }
      if (empty) continue;
      std::vector<std::size_t> idx(lo);
      while (true) {
        for (std::size_t i = 0; i < n; ++i) in[i] = by_symbol_[p.rhs[i]][idx[i]];
        emit();
        std::size_t i = n;
        while (i > 0) {
          --i;
          if (++idx[i] < hi[i]) break;
          idx[i] = lo[i];
          if (i == 0) goto next_pivot;
        }
      }
    next_pivot:;
    }
  }

  const Grammar& g_;
  Fta& a_;
  const FtaOptions& options_;
  std::vector<std::vector<StateId>> by_symbol_;
  std::vector<std::vector<SymbolId>> chains_into_;
  std::vector<const Production*> ctor_prods_;
  std::vector<std::uint32_t> ctor_labels_;
};

std::vector<std::string> symbol_names(const Grammar& g) {
  std::vector<std::string> names;
  for (SymbolId s = 0; s < g.num_symbols(); ++s) names.push_back(g.symbol_name(s));
  return names;
}

}  // namespace

Fta build_fta(const Grammar& g, const InitialValues& initial, std::shared_ptr<ValuePool> pool,
              const FtaOptions& options) {
  if (initial.size() != g.num_params()) {
    throw ArityMismatch("grammar " + g.name() + " takes " + std::to_string(g.num_params()) +
                        " parameters, got " + std::to_string(initial.size()) +
                        " initial value sets");
  }
  Fta a(std::move(pool), symbol_names(g), static_cast<SymbolId>(g.num_nonterminals()),
        g.num_params(), g.start());
  Builder(g, a, options).run(initial);
  return a;
}

Fta build_fta_for_example(const Grammar& g, std::span<const Value> inputs, const Value& output,
                          std::shared_ptr<ValuePool> pool, const FtaOptions& options) {
  InitialValues initial;
  for (const Value& v : inputs) initial.push_back({pool->intern(v)});
  ValueId want = pool->intern(output);
  Fta a = build_fta(g, initial, pool, options);
  std::vector<StateId> finals;
  if (auto q = a.find_state(g.start(), want)) finals.push_back(*q);
  a.set_finals(std::move(finals));
  return a;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

struct Derivation {
  TransitionId via;  // the transition producing the state
  bool chain;        // via is a chain move from its input state
};

using StateSet = std::unordered_map<StateId, Derivation>;

class RunSolver {
 public:
  // `fixed[i]`, when set, pins every occurrence of parameter i.
  RunSolver(const Fta& a, const std::vector<std::optional<StateId>>* fixed)
      : a_(a), fixed_(fixed) {}

  std::vector<StateSet> sets;  // preorder

  const StateSet& solve(const Program& p) {
    std::size_t me = sets.size();
    sets.emplace_back();
    std::vector<std::size_t> kids;
    for (const Program& c : p.children) {
      kids.push_back(sets.size());
      solve(c);
    }
    StateSet mine;
    auto label = a_.find_label(p.node_label());
    if (p.kind == Program::Kind::Param && fixed_ && p.param < fixed_->size() &&
        (*fixed_)[p.param]) {
      StateId q = *(*fixed_)[p.param];
      for (TransitionId t : a_.incoming(q)) {
        if (a_.transition(t).kind == TransitionKind::Param && label &&
            a_.transition(t).label == *label) {
          mine.emplace(q, Derivation{t, false});
        }
      }
    } else if (label) {
      collect(*label, kids, mine);
    }
    close(mine);
    sets[me] = std::move(mine);
    return sets[me];
  }

 private:
  void collect(std::uint32_t label, const std::vector<std::size_t>& kids, StateSet& out) {
    std::size_t combos = 1;
    for (std::size_t k : kids) {
      combos *= sets[k].size();
      if (combos == 0) return;
      if (combos > 4096) break;
    }
    auto row = a_.with_label(label);
    if (combos > row.size() || kids.empty()) {
      for (TransitionId t : row) {
        const Transition& tr = a_.transition(t);
        if (tr.kind == TransitionKind::Chain || tr.arity != kids.size()) continue;
        auto in = a_.inputs(tr);
        bool ok = true;
        for (std::size_t i = 0; ok && i < kids.size(); ++i) ok = sets[kids[i]].count(in[i]) > 0;
        if (ok) out.try_emplace(tr.output, Derivation{t, false});
      }
      return;
    }
    std::vector<std::vector<StateId>> options;
    for (std::size_t k : kids) {
      std::vector<StateId> qs;
      for (const auto& [q, d] : sets[k]) qs.push_back(q);
      std::sort(qs.begin(), qs.end());
      options.push_back(std::move(qs));
    }
    std::vector<std::size_t> idx(kids.size(), 0);
    std::vector<StateId> in(kids.size());
    while (true) {
      for (std::size_t i = 0; i < kids.size(); ++i) in[i] = options[i][idx[i]];
      for (TransitionId t : a_.lookup(label, in)) {
        out.try_emplace(a_.transition(t).output, Derivation{t, false});
      }
      std::size_t i = kids.size();
      while (i > 0) {
        --i;
        if (++idx[i] < options[i].size()) break;
        idx[i] = 0;
        if (i == 0) return;
      }
    }
  }

  void close(StateSet& s) {
    std::vector<StateId> work;
    for (const auto& [q, d] : s) work.push_back(q);
    while (!work.empty()) {
      StateId q = work.back();
      work.pop_back();
      for (TransitionId t : a_.chains_from(q)) {
        StateId out = a_.transition(t).output;
        if (s.try_emplace(out, Derivation{t, true}).second) work.push_back(out);
      }
    }
  }

  const Fta& a_;
  const std::vector<std::optional<StateId>>* fixed_;
};

void assign(const Fta& a, const Program& p, const std::vector<StateSet>& sets, std::size_t& pre,
            StateId target, FtaRun& run) {
  std::size_t me = pre++;
  run[me] = target;
  StateId q = target;
  Derivation d = sets[me].at(q);
  while (d.chain) {
    q = a.inputs(a.transition(d.via))[0];
    d = sets[me].at(q);
  }
  auto in = a.inputs(a.transition(d.via));
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    assign(a, p.children[i], sets, pre, in[i], run);
  }
}

std::vector<StateId> finals_in(const Fta& a, const StateSet& root) {
  std::vector<StateId> out;
  for (const auto& [q, d] : root) {
    if (a.is_final(q)) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void used_params(const Program& p, std::vector<bool>& used) {
  if (p.kind == Program::Kind::Param && p.param < used.size()) used[p.param] = true;
  for (const Program& c : p.children) used_params(c, used);
}

}  // namespace

std::optional<FtaRun> accepts(const Fta& a, const Program& t) {
  RunSolver solver(a, nullptr);
  const StateSet& root = solver.solve(t);
  auto finals = finals_in(a, root);
  if (finals.empty()) return std::nullopt;
  FtaRun run(solver.sets.size(), 0);
  std::size_t pre = 0;
  assign(a, t, solver.sets, pre, finals.front(), run);
  return run;
}

std::vector<StateId> final_states_with(const Fta& a, const Program& p,
                                       const std::vector<std::optional<StateId>>& fixed) {
  RunSolver solver(a, &fixed);
  return finals_in(a, solver.solve(p));
}

std::vector<StateId> reachable_final_states(const Fta& a, const Program& p) {
  std::vector<bool> used(a.num_params(), false);
  used_params(p, used);
  std::vector<std::vector<StateId>> choices(a.num_params());
  for (std::size_t i = 0; i < a.num_params(); ++i) {
    if (used[i]) choices[i] = a.param_states(i);
    if (used[i] && choices[i].empty()) return {};
  }

  std::vector<StateId> out;
  std::vector<std::optional<StateId>> fixed(a.num_params());
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == a.num_params()) {
      RunSolver solver(a, &fixed);
      auto finals = finals_in(a, solver.solve(p));
      out.insert(out.end(), finals.begin(), finals.end());
      return;
    }
    if (!used[i]) {
      go(i + 1);
      return;
    }
    for (StateId q : choices[i]) {
      fixed[i] = q;
      go(i + 1);
    }
    fixed[i].reset();
  };
  go(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace relsynth

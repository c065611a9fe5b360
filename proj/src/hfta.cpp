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

#include "relsynth/hfta.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <utility>

#include "relsynth/errors.hpp"

namespace relsynth {

std::string_view kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Const: return "const";
    case NodeKind::Func: return "func";
    case NodeKind::Interp: return "interp";
    case NodeKind::Relation: return "relation";
    case NodeKind::Logical: return "logical";
    case NodeKind::Not: return "not";
  }
  return "?";
}

namespace {

constexpr std::size_t kOperatorBudget = 64;

std::size_t child_position(const HftaNode& parent, std::size_t child) {
  auto it = std::find(parent.children.begin(), parent.children.end(), child);
  return static_cast<std::size_t>(it - parent.children.begin());
}

// Automaton for a fixed operator over given argument values: parameter
// leaves x1..xn and one transition per argument tuple.
using OperatorFn = std::function<Value(std::span<const Value* const>)>;

std::shared_ptr<const Fta> operator_fta(const std::shared_ptr<ValuePool>& pool,
                                        const std::string& label,
                                        const std::vector<std::vector<ValueId>>& inputs,
                                        const OperatorFn& op, std::size_t max_states) {
  std::size_t n = inputs.size();
  std::vector<std::string> names = {"s0"};
  for (std::size_t j = 0; j < n; ++j) names.push_back("x" + std::to_string(j + 1));
  auto a = std::make_shared<Fta>(pool, names, 1, n, 0);
  std::uint32_t op_label = a->intern_label(label);

  std::size_t combos = 1;
  std::vector<std::vector<StateId>> params(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::uint32_t x = a->intern_label(names[j + 1]);
    for (ValueId v : inputs[j]) {
      StateId p = a->add_state(static_cast<SymbolId>(j + 1), v, 0);
      a->add_transition(TransitionKind::Param, x, {}, p, nullptr, static_cast<std::uint32_t>(j));
      params[j].push_back(p);
    }
    combos *= params[j].size();
    if (combos > max_states) {
      throw CapacityExceeded("operator '" + label + "' over " + std::to_string(combos) +
                             " argument tuples");
    }
  }

  if (combos > 0) {
    std::vector<std::size_t> idx(n, 0);
    std::vector<StateId> in(n);
    std::vector<const Value*> args(n);
    while (true) {
      for (std::size_t j = 0; j < n; ++j) {
        in[j] = params[j][idx[j]];
        args[j] = &a->value(in[j]);
      }
      StateId out = a->add_state(0, pool->intern(op(args)), 1);
      a->add_transition(TransitionKind::Ctor, op_label, in, out);
      std::size_t j = n;
      bool done = n == 0;
      while (j > 0) {
        --j;
        if (++idx[j] < params[j].size()) break;
        idx[j] = 0;
        if (j == 0) done = true;
      }
      if (done) break;
    }
  }

  std::vector<StateId> finals;
  for (StateId q = 0; q < a->num_states(); ++q) {
    if (a->state(q).symbol == 0) finals.push_back(q);
  }
  a->set_finals(std::move(finals));
  a->finalize();
  return a;
}

std::shared_ptr<const Fta> const_fta(const std::shared_ptr<ValuePool>& pool, const Value& c) {
  auto a = std::make_shared<Fta>(pool, std::vector<std::string>{"const"}, 1, 0, 0);
  StateId q = a->add_state(0, pool->intern(c), 0);
  a->add_transition(TransitionKind::Literal, a->intern_label(c.to_literal()), {}, q);
  a->set_finals({q});
  a->finalize();
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hfta

std::size_t Hfta::add_node(HftaNode node, std::optional<std::size_t> parent) {
  node.parent = parent;
  nodes_.push_back(std::move(node));
  std::size_t id = nodes_.size() - 1;
  if (parent) nodes_.at(*parent).children.push_back(id);
  return id;
}

bool Hfta::fully_built() const {
  return std::all_of(nodes_.begin(), nodes_.end(), [](const HftaNode& n) { return n.fta; });
}

std::vector<std::size_t> Hfta::occurrences_of(std::string_view function) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].kind == NodeKind::Func && nodes_[v].function == function) out.push_back(v);
  }
  return out;
}

std::optional<StateId> Hfta::link(std::size_t child, StateId q) const {
  const HftaNode& c = nodes_[child];
  if (!c.parent || !c.fta) return std::nullopt;
  const HftaNode& p = nodes_[*c.parent];
  if (!p.fta) return std::nullopt;
  if (!std::binary_search(c.finals.begin(), c.finals.end(), q)) return std::nullopt;
  std::size_t j = child_position(p, child);
  if (j >= p.fta->num_params()) return std::nullopt;
  return p.fta->find_state(p.fta->param_symbol(j), c.fta->state(q).value);
}

std::vector<Hfta::Link> Hfta::links() const {
  std::vector<Link> out;
  for (std::size_t c = 0; c < nodes_.size(); ++c) {
    if (!nodes_[c].parent) continue;
    for (StateId q : nodes_[c].finals) {
      if (auto to = link(c, q)) out.push_back({c, q, *nodes_[c].parent, *to});
    }
  }
  return out;
}

void Hfta::set_finals(std::size_t v, std::vector<StateId> finals) {
  std::sort(finals.begin(), finals.end());
  finals.erase(std::unique(finals.begin(), finals.end()), finals.end());
  nodes_.at(v).finals = std::move(finals);
}

struct Hfta::BuildCache {
  static constexpr std::size_t kMaxStates = 20'000'000;
  std::map<std::string, std::shared_ptr<const Fta>> entries;
  std::size_t states = 0;
};

Hfta::Hfta(std::shared_ptr<ValuePool> pool)
    : pool_(std::move(pool)), cache_(std::make_shared<BuildCache>()) {}

bool Hfta::try_build(std::size_t v, bool force) {
  HftaNode& n = nodes_[v];
  if (n.fta) return false;

  auto child_values = [&](std::size_t c) {
    std::vector<ValueId> vs;
    for (StateId q : nodes_[c].finals) vs.push_back(nodes_[c].fta->state(q).value);
    return vs;
  };
  bool children_built = std::all_of(n.children.begin(), n.children.end(),
                                    [&](std::size_t c) { return nodes_[c].fta != nullptr; });

  if (n.kind == NodeKind::Func && children_built && !force && options_.defer_limit > 0) {
    std::size_t product = 1;
    for (std::size_t c : n.children) product *= std::max<std::size_t>(nodes_[c].finals.size(), 1);
    if (product > options_.defer_limit) return false;
  }

  std::string key;
  if (children_built && n.kind != NodeKind::Const) {
    std::ostringstream k;
    k << static_cast<int>(n.kind) << '|' << n.label.substr(0, n.label.find('#')) << '|'
      << n.grammar.get() << '|' << n.depth_bound;
    for (std::size_t c : n.children) {
      k << '/';
      if (n.kind == NodeKind::Logical || n.kind == NodeKind::Not) continue;
      for (StateId q : nodes_[c].finals) k << nodes_[c].fta->state(q).value << ',';
    }
    key = k.str();
  }
  if (!key.empty()) {
    auto hit = cache_->entries.find(key);
    if (hit != cache_->entries.end()) n.fta = hit->second;
  }

  if (!n.fta) switch (n.kind) {
    case NodeKind::Const:
      return false;  // created with its automaton
    case NodeKind::Func: {
      if (!children_built) return false;
      InitialValues initial;
      for (std::size_t c : n.children) initial.push_back(child_values(c));
      FtaOptions fo{.depth_bound = n.depth_bound, .max_states = options_.max_states};
      n.fta = std::make_shared<Fta>(build_fta(*n.grammar, initial, pool_, fo));
      break;
    }
    case NodeKind::Interp: {
      if (!children_built) return false;
      const InterpretedFn* fn = find_interpreted(n.label);
      if (!fn) throw UnknownSymbol("no interpretation for '" + n.label + "'");
      std::vector<std::vector<ValueId>> inputs;
      for (std::size_t c : n.children) inputs.push_back(child_values(c));
      n.fta = operator_fta(
          pool_, n.label, inputs,
          [fn](std::span<const Value* const> args) {
            std::vector<Value> vs;
            for (const Value* a : args) vs.push_back(*a);
            return fn->apply(vs);
          },
          options_.max_states);
      break;
    }
    case NodeKind::Relation: {
      if (!children_built) return false;
      RelOp op = RelOp::Eq;
      for (RelOp r : {RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge}) {
        if (op_symbol(r) == n.label) op = r;
      }
      std::vector<std::vector<ValueId>> inputs;
      for (std::size_t c : n.children) inputs.push_back(child_values(c));
      n.fta = operator_fta(
          pool_, n.label, inputs,
          [op](std::span<const Value* const> a) {
            return Value::boolean(apply_rel(op, *a[0], *a[1]));
          },
          options_.max_states);
      break;
    }
    case NodeKind::Logical:
    case NodeKind::Not: {
      // Boolean children: both truth values, whatever the children hold.
      std::vector<ValueId> both = {pool_->intern(Value::boolean(false)),
                                   pool_->intern(Value::boolean(true))};
      std::vector<std::vector<ValueId>> inputs(n.children.size(), both);
      OperatorFn op;
      if (n.kind == NodeKind::Not) {
        op = [](std::span<const Value* const> a) {
          return a[0]->is(Tag::Bool) ? Value::boolean(!a[0]->as_bool()) : Value::error("type");
        };
      } else {
        LogicOp lop = LogicOp::And;
        for (LogicOp l : {LogicOp::And, LogicOp::Or, LogicOp::Implies, LogicOp::Iff}) {
          if (op_symbol(l) == n.label) lop = l;
        }
        op = [lop](std::span<const Value* const> a) {
          return Value::boolean(apply_logic(lop, a[0]->as_bool(), a[1]->as_bool()));
        };
      }
      n.fta = operator_fta(pool_, n.label, inputs, op, options_.max_states);
      break;
    }
  }

  if (!key.empty() && !cache_->entries.contains(key)) {
    if (cache_->states > BuildCache::kMaxStates) {
      cache_->entries.clear();
      cache_->states = 0;
    }
    cache_->states += n.fta->num_states();
    cache_->entries.emplace(std::move(key), n.fta);
  }

  std::vector<StateId> finals = n.fta->finals();
  if (v == root_) {
    finals.clear();
    if (auto top = n.fta->find_state(n.fta->start(), pool_->intern(Value::boolean(true)))) {
      finals.push_back(*top);
    }
  }
  if (n.pinned) {
    auto reach = reachable_final_states(*n.fta, *n.pinned);
    std::vector<StateId> kept;
    std::set_intersection(finals.begin(), finals.end(), reach.begin(), reach.end(),
                          std::back_inserter(kept));
    finals = std::move(kept);
  }
  set_finals(v, std::move(finals));
  return true;
}

std::size_t Hfta::materialize(bool force) {
  std::size_t built = 0;
  // Children always have larger ids than their parent.
  for (std::size_t v = nodes_.size(); v-- > 0;) {
    if (!nodes_[v].fta && try_build(v, force)) ++built;
  }
  return built;
}

std::size_t Hfta::total_states() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.fta ? node.fta->num_states() : 0;
  return n;
}

std::size_t Hfta::total_transitions() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.fta ? node.fta->num_transitions() : 0;
  return n;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string Hfta::to_dot(std::size_t max_transitions) const {
  std::ostringstream out;
  out << "digraph hfta {\n  rankdir=BT;\n  node [fontsize=10];\n";
  auto sid = [](std::size_t v, StateId q) {
    return "n" + std::to_string(v) + "_" + std::to_string(q);
  };
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    const HftaNode& n = nodes_[v];
    out << "  subgraph cluster_" << v << " {\n    label=\"v" << v << ": " << kind_name(n.kind)
        << " " << dot_escape(n.label) << (v == root_ ? " (root)" : "") << "\";\n";
    if (!n.fta) {
      out << "    d" << v << " [label=\"deferred\", shape=box];\n  }\n";
      continue;
    }
    const Fta& a = *n.fta;
    std::set<StateId> shown;
    std::size_t listed = 0;
    for (TransitionId t = 0; t < a.num_transitions() && listed < max_transitions; ++t, ++listed) {
      const Transition& tr = a.transition(t);
      shown.insert(tr.output);
      for (StateId q : a.inputs(tr)) shown.insert(q);
    }
    for (StateId q : shown) {
      bool fin = std::binary_search(n.finals.begin(), n.finals.end(), q);
      out << "    " << sid(v, q) << " [label=\"" << dot_escape(a.state_name(q)) << "\""
          << (fin ? ", shape=doublecircle" : ", shape=circle") << "];\n";
    }
    listed = 0;
    for (TransitionId t = 0; t < a.num_transitions() && listed < max_transitions; ++t, ++listed) {
      const Transition& tr = a.transition(t);
      auto in = a.inputs(tr);
      std::string label = tr.kind == TransitionKind::Chain ? "" : a.label_text(tr);
      if (in.empty()) {
        out << "    t" << v << "_" << t << " [shape=point];\n";
        out << "    t" << v << "_" << t << " -> " << sid(v, tr.output) << " [label=\""
            << dot_escape(label) << "\"];\n";
      } else if (in.size() == 1) {
        out << "    " << sid(v, in[0]) << " -> " << sid(v, tr.output) << " [label=\""
            << dot_escape(label) << "\"];\n";
      } else {
        out << "    t" << v << "_" << t << " [shape=point];\n";
        for (StateId q : in) out << "    " << sid(v, q) << " -> t" << v << "_" << t << ";\n";
        out << "    t" << v << "_" << t << " -> " << sid(v, tr.output) << " [label=\""
            << dot_escape(label) << "\"];\n";
      }
    }
    if (a.num_transitions() > max_transitions) {
      out << "    more" << v << " [shape=note, label=\"" << a.num_transitions() - max_transitions
          << " more transitions\"];\n";
    }
    out << "  }\n";
  }
  for (const Link& l : links()) {
    out << "  " << sid(l.child, l.from) << " -> " << sid(l.parent, l.to) << " [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Construction from a relaxed formula

namespace {

class HftaBuilder {
 public:
  HftaBuilder(Hfta& h, const OccurrenceMap& m, const GrammarMap& grammars,
              const HftaOptions& options)
      : h_(h), m_(m), grammars_(grammars), options_(options) {}

  std::size_t formula(const Formula& f, std::optional<std::size_t> parent) {
    HftaNode n;
    switch (f.kind) {
      case Formula::Kind::Bool:
        return constant(Value::boolean(f.truth), parent);
      case Formula::Kind::Atom: {
        n.kind = NodeKind::Relation;
        n.label = std::string(op_symbol(f.rel));
        std::size_t v = h_.add_node(std::move(n), parent);
        term(f.terms[0], v);
        term(f.terms[1], v);
        return v;
      }
      case Formula::Kind::Binary: {
        n.kind = NodeKind::Logical;
        n.label = std::string(op_symbol(f.logic));
        std::size_t v = h_.add_node(std::move(n), parent);
        formula(f.kids[0], v);
        formula(f.kids[1], v);
        return v;
      }
      case Formula::Kind::Not: {
        n.kind = NodeKind::Not;
        n.label = "!";
        std::size_t v = h_.add_node(std::move(n), parent);
        formula(f.kids[0], v);
        return v;
      }
    }
    throw Error("unknown formula kind");
  }

 private:
  std::size_t constant(const Value& c, std::optional<std::size_t> parent) {
    HftaNode n;
    n.kind = NodeKind::Const;
    n.label = c.to_literal();
    n.fta = const_fta(h_.pool(), c);
    n.finals = n.fta->finals();
    return h_.add_node(std::move(n), parent);
  }

  std::size_t term(const Term& t, std::size_t parent) {
    switch (t.kind) {
      case Term::Kind::Const:
        return constant(t.value, parent);
      case Term::Kind::Var:
        throw Error("formula is not ground: variable '" + t.name + "'");
      case Term::Kind::Apply:
        break;
    }
    HftaNode n;
    n.label = t.name;
    if (auto fn = m_.original(t.name)) {
      auto g = grammars_.find(*fn);
      if (g == grammars_.end()) throw UnknownSymbol("no grammar for function '" + *fn + "'");
      if (g->second->num_params() != t.args.size()) {
        throw ArityMismatch("'" + *fn + "' takes " + std::to_string(g->second->num_params()) +
                            " arguments, got " + std::to_string(t.args.size()));
      }
      n.kind = NodeKind::Func;
      n.function = *fn;
      n.grammar = g->second;
      auto d = options_.function_depth.find(*fn);
      n.depth_bound = d != options_.function_depth.end() ? d->second : options_.depth_bound;
    } else if (find_interpreted(t.name)) {
      n.kind = NodeKind::Interp;
    } else {
      throw UnknownSymbol("'" + t.name + "' is neither synthesized nor interpreted");
    }
    std::size_t v = h_.add_node(std::move(n), parent);
    for (const Term& a : t.args) term(a, v);
    return v;
  }

  Hfta& h_;
  const OccurrenceMap& m_;
  const GrammarMap& grammars_;
  const HftaOptions& options_;
};

}  // namespace

Hfta build_hfta(const Formula& relaxed, const OccurrenceMap& m, const GrammarMap& grammars,
                std::shared_ptr<ValuePool> pool, const HftaOptions& options) {
  Hfta h(std::move(pool));
  h.options_ = options;
  h.set_root(0);
  HftaBuilder(h, m, grammars, options).formula(relaxed, std::nullopt);
  // Const nodes are built on creation; the root may be one.
  if (h.nodes_[0].kind == NodeKind::Const) {
    auto& root = h.nodes_[0];
    std::vector<StateId> finals;
    if (root.fta->value(0) == Value::boolean(true)) finals.push_back(0);
    h.set_finals(0, std::move(finals));
  }
  h.materialize(false);
  return h;
}

// ---------------------------------------------------------------------------
// Hierarchical trees

bool accepts_hierarchical(const Hfta& h, const HierarchicalTree& t) {
  if (t.programs.size() != h.size() || t.children.size() != h.size() || t.root != h.root()) {
    throw ShapeMismatch("hierarchical tree does not match the automaton's node structure");
  }
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (t.children[v] != h.node(v).children) {
      throw ShapeMismatch("children of node " + std::to_string(v) + " differ");
    }
  }
  if (!h.fully_built()) throw Error("automaton has deferred nodes");

  std::vector<std::vector<StateId>> roots(h.size());
  for (std::size_t v = h.size(); v-- > 0;) {
    const HftaNode& n = h.node(v);
    const Fta& a = *n.fta;
    const Program& p = t.programs[v];

    std::vector<bool> used(a.num_params(), false);
    std::function<void(const Program&)> mark = [&](const Program& q) {
      if (q.kind == Program::Kind::Param && q.param < used.size()) used[q.param] = true;
      for (const Program& c : q.children) mark(c);
    };
    mark(p);

    std::vector<StateId> found;
    std::vector<std::optional<StateId>> fixed(a.num_params());
    bool feasible = true;
    for (std::size_t j = 0; j < n.children.size(); ++j) {
      if (roots[n.children[j]].empty()) feasible = false;
    }
    std::function<void(std::size_t)> go = [&](std::size_t j) {
      if (j == n.children.size()) {
        auto fs = final_states_with(a, p, fixed);
        found.insert(found.end(), fs.begin(), fs.end());
        return;
      }
      if (j >= a.num_params() || !used[j]) {
        go(j + 1);
        return;
      }
      for (StateId r : roots[n.children[j]]) {
        if (auto to = h.link(n.children[j], r)) {
          fixed[j] = *to;
          go(j + 1);
        }
      }
      fixed[j].reset();
    };
    if (feasible) go(0);

    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    std::vector<StateId> kept;
    std::set_intersection(found.begin(), found.end(), n.finals.begin(), n.finals.end(),
                          std::back_inserter(kept));
    roots[v] = std::move(kept);
  }
  return !roots[h.root()].empty();
}

double tree_cost(const HierarchicalTree& t, const CostModel& m) {
  double c = 0;
  for (const Program& p : t.programs) c += cost(p, m);
  return c;
}

Interpretation extract_programs(const Hfta& h, const HierarchicalTree& t) {
  Interpretation out;
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (h.node(v).kind == NodeKind::Func) out.try_emplace(h.node(v).function, t.programs[v]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flattening

FlatHypergraph flatten(const Hfta& h, const CostModel& m) {
  FlatHypergraph g;
  std::vector<std::uint32_t> base(h.size(), 0);
  for (std::size_t v = 0; v < h.size(); ++v) {
    base[v] = static_cast<std::uint32_t>(g.vertices.size());
    if (!h.node(v).fta) continue;
    for (StateId q = 0; q < h.node(v).fta->num_states(); ++q) g.vertices.push_back({v, q});
  }
  for (std::size_t v = 0; v < h.size(); ++v) {
    const HftaNode& n = h.node(v);
    if (!n.fta) continue;
    const Fta& a = *n.fta;
    for (const Transition& t : a.transitions()) {
      FlatHypergraph::Edge e;
      e.head = base[v] + t.output;
      if (t.kind == TransitionKind::Param) {
        // The leaf is fed by the child's linked final; its cost stays on the
        // link edge.
        if (t.param >= n.children.size()) continue;
        std::size_t c = n.children[t.param];
        const HftaNode& child = h.node(c);
        if (!child.fta) continue;
        auto q = child.fta->find_state(child.fta->start(), a.state(t.output).value);
        if (!q) {
          for (StateId f : child.finals) {
            if (child.fta->state(f).value == a.state(t.output).value) q = f;
          }
        }
        if (!q || !std::binary_search(child.finals.begin(), child.finals.end(), *q)) continue;
        e.tails = {base[c] + *q};
        e.weight = m.of(a.label_text(t));
      } else {
        for (StateId q : a.inputs(t)) e.tails.push_back(base[v] + q);
        e.weight = t.kind == TransitionKind::Chain ? 0.0 : m.of(a.label_text(t));
        if (e.tails.empty()) g.leaves.push_back(e.head);
      }
      g.edges.push_back(std::move(e));
    }
  }
  for (StateId q : h.node(h.root()).finals) g.finals.push_back(base[h.root()] + q);
  std::sort(g.leaves.begin(), g.leaves.end());
  g.leaves.erase(std::unique(g.leaves.begin(), g.leaves.end()), g.leaves.end());
  return g;
}

std::vector<double> FlatHypergraph::lightest() const {
  std::vector<double> d(vertices.size(), kInfinity);
  std::vector<std::vector<std::uint32_t>> uses(vertices.size());
  std::vector<std::uint32_t> pending(edges.size(), 0);
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (std::uint32_t e = 0; e < edges.size(); ++e) {
    std::vector<std::uint32_t> distinct = edges[e].tails;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    pending[e] = static_cast<std::uint32_t>(distinct.size());
    for (std::uint32_t t : distinct) uses[t].push_back(e);
    if (distinct.empty() && edges[e].weight < d[edges[e].head]) {
      d[edges[e].head] = edges[e].weight;
      pq.push({edges[e].weight, edges[e].head});
    }
  }
  std::vector<bool> done(vertices.size(), false);
  while (!pq.empty()) {
    auto [c, x] = pq.top();
    pq.pop();
    if (done[x] || c > d[x]) continue;
    done[x] = true;
    for (std::uint32_t e : uses[x]) {
      if (--pending[e] != 0) continue;
      double total = edges[e].weight;
      for (std::uint32_t t : edges[e].tails) total += d[t];
      if (total < d[edges[e].head]) {
        d[edges[e].head] = total;
        pq.push({total, edges[e].head});
      }
    }
  }
  return d;
}

double FlatHypergraph::min_final_cost() const {
  auto d = lightest();
  double best = kInfinity;
  for (std::uint32_t f : finals) best = std::min(best, d[f]);
  return best;
}

// ---------------------------------------------------------------------------
// Cost tables

namespace {

std::vector<double> label_weights(const Fta& a, const CostModel& m) {
  std::vector<double> w(a.num_labels());
  for (std::uint32_t l = 0; l < a.num_labels(); ++l) w[l] = m.of(a.label(l));
  return w;
}

double transition_weight(const Transition& t, const std::vector<double>& w) {
  return t.kind == TransitionKind::Chain ? 0.0 : w[t.label];
}

// Whether a parameter leaf of node v may carry state p.
bool param_allowed(const Hfta& h, const CostTables& tables, std::size_t v, const Transition& t) {
  const HftaNode& n = h.node(v);
  if (t.param >= n.children.size()) return false;
  std::size_t c = n.children[t.param];
  if (!h.is_built(c)) return true;  // unconstrained until built
  ValueId val = n.fta->state(t.output).value;
  return tables.live_finals[c].count(val) > 0;
}

// Lightest derivation of every state of v. Leaves for parameter `skip` are
// left out when given.
std::vector<double> inside_costs(const Hfta& h, std::size_t v, const CostModel& m,
                                 const CostTables& tables,
                                 std::optional<std::size_t> skip = std::nullopt) {
  const Fta& a = *h.node(v).fta;
  auto w = label_weights(a, m);
  std::vector<double> d(a.num_states(), kInfinity);
  std::vector<std::uint32_t> pending(a.num_transitions(), 0);
  using Entry = std::pair<double, StateId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (TransitionId id = 0; id < a.num_transitions(); ++id) {
    const Transition& t = a.transition(id);
    auto in = a.inputs(t);
    std::uint32_t distinct = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (std::find(in.begin(), in.begin() + i, in[i]) == in.begin() + i) ++distinct;
    }
    pending[id] = distinct;
    if (distinct > 0) continue;
    if (t.kind == TransitionKind::Param &&
        (t.param == skip || !param_allowed(h, tables, v, t))) {
      continue;
    }
    double c = transition_weight(t, w);
    if (c < d[t.output]) {
      d[t.output] = c;
      pq.push({c, t.output});
    }
  }
  std::vector<bool> done(a.num_states(), false);
  while (!pq.empty()) {
    auto [c, q] = pq.top();
    pq.pop();
    if (done[q] || c > d[q]) continue;
    done[q] = true;
    for (TransitionId id : a.uses(q)) {
      if (--pending[id] != 0) continue;
      const Transition& t = a.transition(id);
      double total = transition_weight(t, w);
      for (StateId s : a.inputs(t)) total += d[s];
      if (total < d[t.output]) {
        d[t.output] = total;
        pq.push({total, t.output});
      }
    }
  }
  return d;
}

void inside_pass(const Hfta& h, std::size_t v, const CostModel& m, CostTables& tables) {
  tables.inside[v] = inside_costs(h, v, m, tables);
}

void outside_pass(const Hfta& h, std::size_t v, const CostModel& m, CostTables& tables) {
  const HftaNode& n = h.node(v);
  const Fta& a = *n.fta;
  auto w = label_weights(a, m);
  const auto& in_cost = tables.inside[v];
  auto& o = tables.outside[v];
  o.resize(a.num_states(), kInfinity);

  // Seeds: root finals, finals under a deferred parent, or values pushed down
  // by the parent pass.
  bool parent_open = !n.parent || !h.is_built(*n.parent);
  for (StateId q : n.finals) {
    if (in_cost[q] == kInfinity) o[q] = kInfinity;
    else if (parent_open) o[q] = 0;
  }
  for (StateId q = 0; q < a.num_states(); ++q) {
    if (!std::binary_search(n.finals.begin(), n.finals.end(), q)) o[q] = kInfinity;
  }

  using Entry = std::pair<double, StateId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (StateId q : n.finals) {
    if (o[q] < kInfinity) pq.push({o[q], q});
  }
  std::vector<bool> done(a.num_states(), false);
  while (!pq.empty()) {
    auto [c, q] = pq.top();
    pq.pop();
    if (done[q] || c > o[q]) continue;
    done[q] = true;
    for (TransitionId id : a.incoming(q)) {
      const Transition& t = a.transition(id);
      auto in = a.inputs(t);
      if (in.empty()) continue;
      double sum = 0;
      for (StateId s : in) sum += in_cost[s];
      if (sum == kInfinity) continue;
      double base = c + transition_weight(t, w) + sum;
      for (StateId s : in) {
        double cand = base - in_cost[s];
        if (cand < o[s]) {
          o[s] = cand;
          pq.push({cand, s});
        }
      }
    }
  }

  // Push down to built children through parameter leaves.
  for (TransitionId id = 0; id < a.num_transitions(); ++id) {
    const Transition& t = a.transition(id);
    if (t.kind != TransitionKind::Param || o[t.output] == kInfinity) continue;
    if (t.param >= n.children.size()) continue;
    std::size_t c = n.children[t.param];
    if (!h.is_built(c)) continue;
    auto it = tables.live_finals[c].find(a.state(t.output).value);
    if (it == tables.live_finals[c].end()) continue;
    auto& oc = tables.outside[c];
    oc.resize(h.node(c).fta->num_states(), kInfinity);
    oc[it->second] = std::min(oc[it->second], o[t.output] + w[t.label]);
  }

  // A program of v that never reads parameter j leaves child j free: any
  // live final of it may complete the tree.
  for (std::size_t j = 0; j < n.children.size(); ++j) {
    std::size_t c = n.children[j];
    if (!h.is_built(c) || tables.live_finals[c].empty()) continue;
    bool reads_j = false;
    for (TransitionId id = 0; id < a.num_transitions() && !reads_j; ++id) {
      const Transition& t = a.transition(id);
      reads_j = t.kind == TransitionKind::Param && t.param == j;
    }
    double best = kInfinity;
    if (!reads_j) {
      for (StateId q : n.finals) best = std::min(best, in_cost[q] + o[q]);
    } else {
      auto without = inside_costs(h, v, m, tables, j);
      for (StateId q : n.finals) best = std::min(best, without[q] + o[q]);
    }
    if (best == kInfinity) continue;
    auto& oc = tables.outside[c];
    oc.resize(h.node(c).fta->num_states(), kInfinity);
    for (const auto& [val, q] : tables.live_finals[c]) oc[q] = std::min(oc[q], best);
  }
}

// Bottom-up half of the tables; stops early at the first built node without
// a live final when `stop_when_dead`.
CostTables inside_tables(const Hfta& h, const CostModel& m, bool stop_when_dead) {
  CostTables tables;
  tables.inside.resize(h.size());
  tables.outside.resize(h.size());
  tables.live_finals.resize(h.size());
  for (std::size_t v = h.size(); v-- > 0;) {
    if (!h.is_built(v)) continue;
    inside_pass(h, v, m, tables);
    for (StateId q : h.node(v).finals) {
      if (tables.inside[v][q] < kInfinity) {
        tables.live_finals[v].emplace(h.node(v).fta->state(q).value, q);
      }
    }
    if (stop_when_dead && tables.live_finals[v].empty()) break;
  }
  return tables;
}

}  // namespace

CostTables cost_tables(const Hfta& h, const CostModel& m) {
  CostTables tables = inside_tables(h, m, false);
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (h.is_built(v)) outside_pass(h, v, m, tables);
  }
  return tables;
}

bool derivably_empty(const Hfta& h) {
  CostTables t = inside_tables(h, CostModel(1.0), true);
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (h.is_built(v) && t.live_finals[v].empty()) return true;
  }
  return false;
}

bool is_empty(const Hfta& h) {
  if (derivably_empty(h)) return true;
  if (!h.fully_built()) return false;
  // Derivability lets repeated parameters carry different values; that is
  // exact unless some node has a child with several live finals.
  CostTables t = cost_tables(h, CostModel(1.0));
  bool ambiguous = false;
  for (std::size_t v = 0; v < h.size() && !ambiguous; ++v) {
    for (std::size_t c : h.node(v).children) {
      if (t.live_finals[c].size() > 1) ambiguous = true;
    }
  }
  if (!ambiguous) return false;
  return !enumerate(h, CostModel(1.0)).next().has_value();
}

// ---------------------------------------------------------------------------
// Best-first enumeration of derivations

namespace {

struct Step {
  std::uint32_t node;
  TransitionId transition;
  std::shared_ptr<const Step> prev;
};

struct Item {
  enum class Kind : std::uint8_t { State, EndNode, AnyFinal };
  Kind kind;
  std::uint32_t node;
  StateId state;
  std::uint16_t budget;
  std::uint16_t chains;
};

struct Partial {
  double g = 0;
  double h = 0;
  std::uint64_t seq = 0;
  StateId root = 0;
  std::shared_ptr<const Step> steps;
  std::vector<Item> stack;
  std::vector<StateId> bindings;  // hierarchical mode: per (node, parameter)
};

struct Later {
  bool operator()(const Partial& a, const Partial& b) const {
    double fa = a.g + a.h, fb = b.g + b.h;
    if (fa != fb) return fa > fb;
    return a.seq > b.seq;
  }
};

constexpr StateId kUnbound = ~StateId{0};

class Searcher {
 public:
  // hierarchical: whole trees from the root; otherwise one node `single`.
  Searcher(const Hfta& h, const CostModel& m, CostTables tables, std::optional<std::size_t> single)
      : h_(h), m_(m), tables_(std::move(tables)), single_(single) {
    weights_.resize(h.size());
    binding_base_.resize(h.size() + 1, 0);
    for (std::size_t v = 0; v < h.size(); ++v) {
      if (h.is_built(v)) weights_[v] = label_weights(*h.node(v).fta, m);
      binding_base_[v + 1] = binding_base_[v] + h.node(v).children.size();
    }
    if (single_) {
      std::size_t v = *single_;
      for (StateId q : h.node(v).finals) {
        if (!tables_.live(v, q)) continue;
        Partial p;
        p.root = q;
        p.stack.push_back(state_item(v, q));
        p.h = tables_.inside[v][q] + tables_.outside[v][q];
        push(std::move(p));
      }
    } else {
      std::size_t r = h.root();
      if (!h.is_built(r)) return;
      for (StateId q : h.node(r).finals) {
        if (tables_.inside[r][q] == kInfinity) continue;
        Partial p;
        p.root = q;
        p.bindings.assign(binding_base_.back(), kUnbound);
        p.stack.push_back({Item::Kind::EndNode, static_cast<std::uint32_t>(r), 0, 0, 0});
        p.stack.push_back(state_item(r, q));
        p.h = tables_.inside[r][q];
        push(std::move(p));
      }
    }
  }

  // Next complete derivation, or nullopt when exhausted.
  std::optional<Partial> next() {
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      Partial p = std::move(heap_.back());
      heap_.pop_back();
      if (p.stack.empty()) return p;
      ++expansions_;
      expand(std::move(p));
    }
    return std::nullopt;
  }

  std::size_t expansions() const { return expansions_; }
  const CostTables& tables() const { return tables_; }

  // Programs per node, from the steps of a complete derivation.
  std::vector<std::optional<Program>> programs(const Partial& p) const {
    std::vector<std::vector<TransitionId>> per(h_.size());
    std::vector<const Step*> chain;
    for (const Step* s = p.steps.get(); s; s = s->prev.get()) chain.push_back(s);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      per[(*it)->node].push_back((*it)->transition);
    }
    std::vector<std::optional<Program>> out(h_.size());
    for (std::size_t v = 0; v < h_.size(); ++v) {
      if (per[v].empty()) continue;
      std::size_t i = 0;
      out[v] = decode(*h_.node(v).fta, per[v], i);
    }
    return out;
  }

 private:
  static Program decode(const Fta& a, const std::vector<TransitionId>& ts, std::size_t& i) {
    const Transition& t = a.transition(ts.at(i++));
    switch (t.kind) {
      case TransitionKind::Chain:
        return decode(a, ts, i);
      case TransitionKind::Param:
        return Program::make_param(a.label_text(t), t.param);
      case TransitionKind::Literal:
        return Program::make_literal(a.value(t.output));
      case TransitionKind::Ctor:
        break;
    }
    std::vector<Program> kids;
    for (std::uint32_t k = 0; k < t.arity; ++k) kids.push_back(decode(a, ts, i));
    if (t.ctor) return Program::make_ctor(*t.ctor, std::move(kids));
    return Program::make_opaque(a.label_text(t), std::move(kids));
  }

  Item state_item(std::size_t v, StateId q) const {
    const HftaNode& n = h_.node(v);
    std::size_t budget = n.kind == NodeKind::Func ? n.depth_bound : kOperatorBudget;
    return {Item::Kind::State, static_cast<std::uint32_t>(v), q,
            static_cast<std::uint16_t>(budget),
            static_cast<std::uint16_t>(n.fta->num_symbols())};
  }

  double item_h(const Item& it) const {
    switch (it.kind) {
      case Item::Kind::State: return tables_.inside[it.node][it.state];
      case Item::Kind::EndNode: return 0;
      case Item::Kind::AnyFinal: {
        double best = kInfinity;
        for (const auto& [val, q] : tables_.live_finals[it.node]) {
          best = std::min(best, tables_.inside[it.node][q]);
        }
        return best;
      }
    }
    return 0;
  }

  void push(Partial p) {
    if (!(p.g + p.h < kInfinity)) return;
    p.seq = seq_++;
    heap_.push_back(std::move(p));
    std::push_heap(heap_.begin(), heap_.end(), Later{});
  }

  void expand(Partial p) {
    Item it = p.stack.back();
    p.stack.pop_back();
    double h0 = p.h - item_h(it);
    const HftaNode& n = h_.node(it.node);

    if (it.kind == Item::Kind::EndNode) {
      for (std::size_t j = 0; j < n.children.size(); ++j) {
        if (p.bindings[binding_base_[it.node] + j] != kUnbound) continue;
        Item any{Item::Kind::AnyFinal, static_cast<std::uint32_t>(n.children[j]), 0, 0, 0};
        h0 += item_h(any);
        p.stack.push_back(any);
      }
      p.h = h0;
      push(std::move(p));
      return;
    }

    if (it.kind == Item::Kind::AnyFinal) {
      std::vector<StateId> finals;
      for (const auto& [val, q] : tables_.live_finals[it.node]) finals.push_back(q);
      std::sort(finals.begin(), finals.end());
      for (StateId q : finals) {
        Partial c = p;
        c.stack.push_back({Item::Kind::EndNode, it.node, 0, 0, 0});
        c.stack.push_back(state_item(it.node, q));
        c.h = h0 + tables_.inside[it.node][q];
        push(std::move(c));
      }
      return;
    }

    const Fta& a = *n.fta;
    for (TransitionId id : sorted_incoming(it.node, it.state)) {
      const Transition& t = a.transition(id);
      Partial c;
      bool ok = true;
      double add_h = 0;
      std::vector<Item> pushed;
      std::optional<std::pair<std::size_t, StateId>> bind;

      switch (t.kind) {
        case TransitionKind::Chain: {
          if (it.chains == 0) {
            ok = false;
            break;
          }
          StateId s = a.inputs(t)[0];
          Item child = it;
          child.state = s;
          child.chains = static_cast<std::uint16_t>(it.chains - 1);
          pushed.push_back(child);
          break;
        }
        case TransitionKind::Param: {
          if (!param_allowed(h_, tables_, it.node, t)) {
            ok = false;
            break;
          }
          if (single_) break;
          std::size_t slot = binding_base_[it.node] + t.param;
          if (p.bindings[slot] != kUnbound) {
            ok = p.bindings[slot] == it.state;
            break;
          }
          std::size_t child = n.children[t.param];
          StateId cq = tables_.live_finals[child].at(a.state(it.state).value);
          bind = {slot, it.state};
          pushed.push_back({Item::Kind::EndNode, static_cast<std::uint32_t>(child), 0, 0, 0});
          pushed.push_back(state_item(child, cq));
          break;
        }
        case TransitionKind::Literal:
          break;
        case TransitionKind::Ctor: {
          auto in = a.inputs(t);
          if (in.empty()) break;
          if (it.budget == 0) {
            ok = false;
            break;
          }
          auto budget = static_cast<std::uint16_t>(it.budget - 1);
          for (std::size_t k = in.size(); k-- > 0;) {
            if (a.layer(in[k]) > budget || tables_.inside[it.node][in[k]] == kInfinity) {
              ok = false;
              break;
            }
            pushed.push_back({Item::Kind::State, it.node, in[k], budget,
                              static_cast<std::uint16_t>(a.num_symbols())});
          }
          break;
        }
      }
      if (!ok) continue;
      for (const Item& x : pushed) add_h += item_h(x);
      c.g = p.g + transition_weight(t, weights_[it.node]);
      c.h = h0 + add_h;
      c.root = p.root;
      c.stack = p.stack;
      c.stack.insert(c.stack.end(), pushed.begin(), pushed.end());
      c.bindings = p.bindings;
      if (bind) c.bindings[bind->first] = bind->second;
      c.steps = std::make_shared<const Step>(Step{it.node, id, p.steps});
      push(std::move(c));
    }
  }

  // Incoming transitions ordered by label, then input values, so that
  // equal-cost results come out in a stable canonical order.
  const std::vector<TransitionId>& sorted_incoming(std::size_t v, StateId q) {
    auto key = (static_cast<std::uint64_t>(v) << 32) | q;
    auto [it, fresh] = incoming_cache_.try_emplace(key);
    if (!fresh) return it->second;
    const Fta& a = *h_.node(v).fta;
    auto in = a.incoming(q);
    it->second.assign(in.begin(), in.end());
    std::stable_sort(it->second.begin(), it->second.end(), [&](TransitionId x, TransitionId y) {
      const Transition& tx = a.transition(x);
      const Transition& ty = a.transition(y);
      if (tx.label != ty.label) return a.label_text(tx) < a.label_text(ty);
      auto ix = a.inputs(tx), iy = a.inputs(ty);
      return std::lexicographical_compare(
          ix.begin(), ix.end(), iy.begin(), iy.end(),
          [&](StateId l, StateId r) { return a.value(l) < a.value(r); });
    });
    return it->second;
  }

  const Hfta& h_;
  const CostModel& m_;
  CostTables tables_;
  std::unordered_map<std::uint64_t, std::vector<TransitionId>> incoming_cache_;
  std::optional<std::size_t> single_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::size_t> binding_base_;
  std::vector<Partial> heap_;
  std::uint64_t seq_ = 0;
  std::size_t expansions_ = 0;
};

}  // namespace

struct TreeStream::Impl {
  Impl(const Hfta& h, const CostModel& m)
      : hfta(h), model(m), search(h, model, cost_tables(h, model), std::nullopt) {}
  const Hfta& hfta;
  CostModel model;
  Searcher search;
  std::set<std::string> seen;
};

TreeStream::TreeStream(const Hfta& h, const CostModel& m) {
  if (!h.fully_built()) throw Error("cannot enumerate an automaton with deferred nodes");
  impl_ = std::make_unique<Impl>(h, m);
}
TreeStream::~TreeStream() = default;
TreeStream::TreeStream(TreeStream&&) noexcept = default;
TreeStream& TreeStream::operator=(TreeStream&&) noexcept = default;

std::optional<ScoredTree> TreeStream::next() {
  while (auto p = impl_->search.next()) {
    auto progs = impl_->search.programs(*p);
    HierarchicalTree t;
    t.root = impl_->hfta.root();
    std::string key;
    for (std::size_t v = 0; v < impl_->hfta.size(); ++v) {
      if (!progs[v]) throw Error("incomplete hierarchical derivation");
      t.programs.push_back(std::move(*progs[v]));
      t.children.push_back(impl_->hfta.node(v).children);
      key += t.programs.back().to_string();
      key += '\n';
    }
    if (!impl_->seen.insert(key).second) continue;
    return ScoredTree{std::move(t), p->g};
  }
  return std::nullopt;
}

std::size_t TreeStream::expansions() const { return impl_->search.expansions(); }

TreeStream enumerate(const Hfta& h, const CostModel& m) { return TreeStream(h, m); }

struct NodeStream::Impl {
  Impl(const Hfta& h, std::size_t v, const CostModel& m, const CostTables& t)
      : node(v), model(m), search(h, model, t, v) {}
  std::size_t node;
  CostModel model;
  Searcher search;
  std::set<std::string> seen;
};

NodeStream::NodeStream(const Hfta& h, std::size_t v, const CostModel& m,
                       const CostTables& tables) {
  if (!h.is_built(v)) throw Error("node " + std::to_string(v) + " is not built");
  impl_ = std::make_unique<Impl>(h, v, m, tables);
}
NodeStream::~NodeStream() = default;
NodeStream::NodeStream(NodeStream&&) noexcept = default;
NodeStream& NodeStream::operator=(NodeStream&&) noexcept = default;

std::optional<NodeCandidate> NodeStream::next() {
  while (auto p = impl_->search.next()) {
    auto progs = impl_->search.programs(*p);
    Program prog = std::move(*progs[impl_->node]);
    if (!impl_->seen.insert(prog.to_string()).second) continue;
    double total = p->g + impl_->search.tables().outside[impl_->node][p->root];
    return NodeCandidate{std::move(prog), p->root, total};
  }
  return std::nullopt;
}

}  // namespace relsynth

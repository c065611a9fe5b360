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

// Hierarchical tree automata: one FTA per subterm/subformula of a relaxed
// ground formula, linked child-final -> parent-parameter by equal values.

#ifndef RELSYNTH_HFTA_HPP_
#define RELSYNTH_HFTA_HPP_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "relsynth/dsl.hpp"
#include "relsynth/fta.hpp"
#include "relsynth/lang.hpp"

namespace relsynth {

enum class NodeKind : std::uint8_t {
  Const,     // constant term or true/false
  Func,      // occurrence of a function being synthesized
  Interp,    // interpreted function (sgn, neg, ...)
  Relation,  // t1 op t2
  Logical,   // f1 op f2
  Not,
};

std::string_view kind_name(NodeKind k);

struct HftaNode {
  NodeKind kind = NodeKind::Const;
  std::string label;     // occurrence symbol, operator, or constant literal
  std::string function;  // Func: the original function symbol
  std::shared_ptr<const Grammar> grammar;  // Func
  std::size_t depth_bound = 0;             // Func
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
  std::shared_ptr<const Fta> fta;  // null while construction is deferred
  std::vector<StateId> finals;     // current finals, sorted
  /// Program propagated into a Func node before its automaton existed.
  std::optional<Program> pinned;
};

struct HftaOptions {
  std::size_t depth_bound = 6;
  /// Per original function symbol; falls back to depth_bound.
  std::map<std::string, std::size_t, std::less<>> function_depth;
  std::size_t max_states = 5'000'000;
  /// A Func node whose argument value sets multiply past this is built only
  /// once propagation has shrunk them; 0 disables deferral.
  std::size_t defer_limit = 0;
};

using GrammarMap = std::map<std::string, std::shared_ptr<const Grammar>, std::less<>>;

class Hfta {
 public:
  explicit Hfta(std::shared_ptr<ValuePool> pool);

  /// Appends a node and wires it under `parent` (if any) as the next child.
  std::size_t add_node(HftaNode node, std::optional<std::size_t> parent);
  void set_root(std::size_t v) { root_ = v; }

  std::size_t size() const { return nodes_.size(); }
  std::size_t root() const { return root_; }
  const HftaNode& node(std::size_t v) const { return nodes_[v]; }
  HftaNode& node(std::size_t v) { return nodes_[v]; }
  const std::shared_ptr<ValuePool>& pool() const { return pool_; }
  bool is_built(std::size_t v) const { return nodes_[v].fta != nullptr; }
  bool fully_built() const;

  /// Nodes annotated with occurrence symbols of `function`, in node order.
  std::vector<std::size_t> occurrences_of(std::string_view function) const;

  /// Inter-automaton transition from a child's final state: the parent's
  /// parameter state with the same value, if the final is still current.
  std::optional<StateId> link(std::size_t child, StateId q) const;
  /// All current inter-automaton transitions as (child, q, parent, q').
  struct Link {
    std::size_t child;
    StateId from;
    std::size_t parent;
    StateId to;
  };
  std::vector<Link> links() const;

  void set_finals(std::size_t v, std::vector<StateId> finals);

  /// Builds deferred Func nodes whose inputs became small enough (or all of
  /// them when `force`), bottom-up; returns how many were built.
  std::size_t materialize(bool force = false);

  std::size_t total_states() const;
  std::size_t total_transitions() const;

  /// Graphviz rendering; at most `max_transitions` listed per node.
  std::string to_dot(std::size_t max_transitions = 200) const;

 private:
  friend Hfta build_hfta(const Formula&, const OccurrenceMap&, const GrammarMap&,
                         std::shared_ptr<ValuePool>, const HftaOptions&);
  bool try_build(std::size_t v, bool force);

  // Automata already built for a given node shape and inputs. Copies of an
  // Hfta share it, so backtracking search does not rebuild them.
  struct BuildCache;

  std::shared_ptr<ValuePool> pool_;
  std::shared_ptr<BuildCache> cache_;
  std::vector<HftaNode> nodes_;
  std::size_t root_ = 0;
  HftaOptions options_;
};

/// Node ids follow a preorder walk of the formula, root first.
Hfta build_hfta(const Formula& relaxed, const OccurrenceMap& m, const GrammarMap& grammars,
                std::shared_ptr<ValuePool> pool, const HftaOptions& options = {});

struct HierarchicalTree {
  std::vector<Program> programs;  // indexed by node
  std::vector<std::vector<std::size_t>> children;
  std::size_t root = 0;
};

/// Every per-node tree accepted, and each child's run root linked to the
/// state carried by its parameter's leaves. A parameter that a node's tree
/// never mentions imposes no link; that child's tree only needs to be
/// accepted on its own.
bool accepts_hierarchical(const Hfta& h, const HierarchicalTree& t);

double tree_cost(const HierarchicalTree& t, const CostModel& m);

/// Function symbol -> program, read off the occurrence nodes of a tree.
/// Occurrences of one function may disagree; the first one wins.
Interpretation extract_programs(const Hfta& h, const HierarchicalTree& t);

// ---------------------------------------------------------------------------
// Flattened hypergraph

struct FlatHypergraph {
  struct Vertex {
    std::size_t node;
    StateId state;
  };
  struct Edge {
    std::vector<std::uint32_t> tails;
    std::uint32_t head;
    double weight;
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::uint32_t> finals;
  std::vector<std::uint32_t> leaves;

  /// Lightest derivation cost of every vertex (infinity if underivable).
  std::vector<double> lightest() const;
  /// Minimum over finals of lightest().
  double min_final_cost() const;
};

/// Intra-automaton transitions become weighted B-edges; each inter link
/// becomes a unary edge weighted like the parameter leaf it replaces.
FlatHypergraph flatten(const Hfta& h, const CostModel& m);

// ---------------------------------------------------------------------------
// Costs and emptiness

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Per node and state: the cheapest derivation inside the node (parameter
/// leaves counted without their child subtree) and the cheapest completion
/// of the rest of the hierarchical tree above it.
struct CostTables {
  std::vector<std::vector<double>> inside;
  std::vector<std::vector<double>> outside;
  /// Per node: value -> current live final.
  std::vector<std::unordered_map<ValueId, StateId>> live_finals;

  bool live(std::size_t v, StateId q) const {
    return inside[v][q] < kInfinity && outside[v][q] < kInfinity;
  }
};

/// Deferred nodes are treated as unconstrained: a deferred relation may be
/// either true or false.
CostTables cost_tables(const Hfta& h, const CostModel& m);

/// Cheap check: no derivation reaches the root final when repeated
/// parameters are allowed to carry different values. Sound for emptiness
/// (true means empty) only on fully built automata.
bool derivably_empty(const Hfta& h);

/// Exact: true iff no hierarchical tree is accepted.
bool is_empty(const Hfta& h);

// ---------------------------------------------------------------------------
// Enumeration

struct ScoredTree {
  HierarchicalTree tree;
  double cost;
};

/// Accepted hierarchical trees in non-decreasing cost, lazily. Requires a
/// fully built HFTA that outlives the stream.
class TreeStream {
 public:
  TreeStream(const Hfta& h, const CostModel& m);
  ~TreeStream();
  TreeStream(TreeStream&&) noexcept;
  TreeStream& operator=(TreeStream&&) noexcept;

  std::optional<ScoredTree> next();
  std::size_t expansions() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TreeStream enumerate(const Hfta& h, const CostModel& m);

struct NodeCandidate {
  Program program;
  StateId root;
  double cost;  // program cost plus a lower bound on the rest of the tree
};

/// Distinct programs of one built node that reach one of its live finals,
/// ordered by `NodeCandidate::cost`.
class NodeStream {
 public:
  NodeStream(const Hfta& h, std::size_t v, const CostModel& m, const CostTables& tables);
  ~NodeStream();
  NodeStream(NodeStream&&) noexcept;
  NodeStream& operator=(NodeStream&&) noexcept;

  std::optional<NodeCandidate> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace relsynth

#endif  // RELSYNTH_HFTA_HPP_

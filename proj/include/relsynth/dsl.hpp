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

// Grammars with executable constructor semantics, program ASTs, the
// interpreter and the cost model.

#ifndef RELSYNTH_DSL_HPP_
#define RELSYNTH_DSL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relsynth/value.hpp"

namespace relsynth {

using Args = std::span<const Value* const>;
using SemanticFn = Value (*)(Args);

/// A terminal with executable semantics. Err inputs never reach `apply`;
/// the interpreter short-circuits them.
struct Constructor {
  std::string name;
  std::size_t arity;
  SemanticFn apply;
};

/// Registered constructors are keyed by (name, arity).
const Constructor* find_constructor(std::string_view name, std::size_t arity);
bool constructor_name_known(std::string_view name);
/// Applies with Err absorption.
Value apply_constructor(const Constructor& c, Args args);

using SymbolId = std::uint32_t;

struct Production {
  enum class Kind : std::uint8_t { Ctor, Chain, Literal };
  Kind kind;
  SymbolId lhs;
  const Constructor* ctor = nullptr;  // Kind::Ctor
  std::vector<SymbolId> rhs;          // Ctor arguments, or the Chain target
  Value literal;                      // Kind::Literal
};

/// Symbols are numbered nonterminals first, then parameters, so a state's
/// symbol id tells which it is.
class Grammar {
 public:
  Grammar() = default;

  const std::string& name() const { return name_; }
  std::size_t num_nonterminals() const { return nonterminals_.size(); }
  std::size_t num_params() const { return params_.size(); }
  std::size_t num_symbols() const { return nonterminals_.size() + params_.size(); }
  SymbolId start() const { return start_; }
  const std::vector<Production>& productions() const { return productions_; }

  bool is_param(SymbolId s) const { return s >= nonterminals_.size(); }
  std::size_t param_index(SymbolId s) const { return s - nonterminals_.size(); }
  SymbolId param_symbol(std::size_t i) const {
    return static_cast<SymbolId>(nonterminals_.size() + i);
  }
  const std::string& symbol_name(SymbolId s) const;
  const std::string& param_name(std::size_t i) const { return params_[i]; }
  std::optional<SymbolId> find_symbol(std::string_view name) const;
  std::optional<std::size_t> find_param(std::string_view name) const;

  /// Productions grouped by left-hand side.
  const std::vector<std::vector<std::size_t>>& by_lhs() const { return by_lhs_; }

 private:
  friend Grammar parse_grammar(std::string_view, std::string);

  std::string name_;
  std::vector<std::string> nonterminals_;
  std::vector<std::string> params_;
  SymbolId start_ = 0;
  std::vector<Production> productions_;
  std::vector<std::vector<std::size_t>> by_lhs_;
};

/// Grammar-file syntax, one production per line (alternatives may be joined
/// with '|'):
///
///   params x, y          # argument names, in order
///   start E              # optional; defaults to the first left-hand side
///   E -> padToMultiple(E, Num, Pad)
///   E -> M               # chain production, no AST node
///   Num -> 4             # literal leaf
Grammar parse_grammar(std::string_view text, std::string name = "<inline>");
Grammar load_grammar(const std::filesystem::path& path);

/// A concrete program tree.
struct Program {
  enum class Kind : std::uint8_t { Ctor, Param, Literal };

  Kind kind = Kind::Literal;
  std::string label;                  // constructor/parameter name
  const Constructor* ctor = nullptr;  // null for opaque labels
  std::size_t param = 0;
  Value literal;
  std::vector<Program> children;

  static Program make_ctor(const Constructor& c, std::vector<Program> kids);
  /// A node labelled by name only (hand-written automata).
  static Program make_opaque(std::string label, std::vector<Program> kids);
  static Program make_param(std::string name, std::size_t index);
  static Program make_literal(Value v);

  std::size_t size() const;
  /// Leaves have depth 0; every constructor node adds one layer.
  std::size_t depth() const;
  std::string to_string() const;
  /// Transition label used by automata: constructor/param name, or the
  /// literal rendering.
  std::string node_label() const;

  friend bool operator==(const Program& a, const Program& b);
  friend std::strong_ordering operator<=>(const Program& a, const Program& b);
};

Value eval(const Program& p, std::span<const Value> args);

/// Parses a program in constructor syntax against `g`.
Program parse_program(std::string_view text, const Grammar& g);

/// True iff `p` is derivable from the start symbol of `g`.
bool conforms(const Program& p, const Grammar& g);

/// All programs of `g` with depth <= `max_depth` (for brute-force oracles).
std::vector<Program> all_programs(const Grammar& g, std::size_t max_depth,
                                  std::size_t limit = 1'000'000);

class CostModel {
 public:
  CostModel() = default;
  explicit CostModel(double default_cost) : default_cost_(default_cost) {}

  /// JSON object {"default": 1, "enc64": 2, ...}.
  static CostModel load(const std::filesystem::path& path);
  static CostModel parse(std::string_view json_text);

  void set(std::string label, double c);
  double of(std::string_view label) const;
  double default_cost() const { return default_cost_; }

 private:
  double default_cost_ = 1.0;
  std::map<std::string, double, std::less<>> costs_;
};

double cost(const Program& p, const CostModel& m);

}  // namespace relsynth

#endif  // RELSYNTH_DSL_HPP_

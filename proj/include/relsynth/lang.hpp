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

// Relational specifications: terms, formulas, spec files, occurrence
// relaxation and ground evaluation.

#ifndef RELSYNTH_LANG_HPP_
#define RELSYNTH_LANG_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relsynth/dsl.hpp"
#include "relsynth/value.hpp"

namespace relsynth {

enum class RelOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp : std::uint8_t { And, Or, Implies, Iff };

std::string_view op_symbol(RelOp op);
std::string_view op_symbol(LogicOp op);

/// False whenever either side is Err or the tags differ.
bool apply_rel(RelOp op, const Value& a, const Value& b);
bool apply_logic(LogicOp op, bool a, bool b);

struct Term {
  enum class Kind : std::uint8_t { Const, Var, Apply };

  Kind kind = Kind::Const;
  Value value;             // Const
  std::string name;        // Var name or function symbol
  std::vector<Term> args;  // Apply

  static Term constant(Value v);
  static Term var(std::string name);
  static Term apply(std::string fn, std::vector<Term> args);

  bool is_ground() const;
  std::string to_string() const;
  friend bool operator==(const Term& a, const Term& b);
};

struct Formula {
  enum class Kind : std::uint8_t { Bool, Atom, Binary, Not };

  Kind kind = Kind::Bool;
  bool truth = true;         // Bool
  RelOp rel = RelOp::Eq;     // Atom
  LogicOp logic = LogicOp::And;  // Binary
  std::vector<Term> terms;   // Atom: lhs, rhs
  std::vector<Formula> kids; // Binary: lhs, rhs; Not: body

  static Formula constant(bool b);
  static Formula atom(Term lhs, RelOp op, Term rhs);
  static Formula binary(Formula lhs, LogicOp op, Formula rhs);
  static Formula negation(Formula body);
  /// Left-nested conjunction; `true` when empty.
  static Formula conjunction(std::vector<Formula> parts);

  bool is_ground() const;
  /// Number of formula and term nodes.
  std::size_t size() const;
  std::string to_string() const;
  friend bool operator==(const Formula& a, const Formula& b);
};

/// Parses a formula without checking function symbols (any name applied to
/// arguments is accepted, bare identifiers are variables).
Formula parse_formula(std::string_view text);

struct FunDecl {
  std::string name;
  std::vector<Tag> params;
  Tag result = Tag::Str;
  std::filesystem::path grammar;
};

struct Binding {
  std::string name;
  Tag sort;
};

/// One universally quantified clause.
struct Property {
  std::vector<Binding> vars;
  Formula body;
  std::string to_string() const;
};

struct RelationalSpec {
  std::vector<FunDecl> funs;
  std::vector<Formula> examples;  // ground
  std::vector<Property> properties;

  const FunDecl* find_fun(std::string_view name) const;
  std::size_t clause_count() const { return examples.size() + properties.size(); }
};

std::optional<Tag> parse_sort(std::string_view name);

/// Spec-file syntax, ';'-terminated declarations:
///
///   fun encode : Str -> Str grammar "../grammars/encoder.grammar";
///   example encode("Man") == "TWFu";
///   property forall x:Str. decode(encode(x)) == x;
///
/// Relative grammar paths are resolved against `base_dir`.
RelationalSpec parse_spec(std::string_view text, const std::filesystem::path& base_dir = {});
RelationalSpec load_spec(const std::filesystem::path& path);

/// Original function symbol -> occurrence symbols, plus the inverse.
class OccurrenceMap {
 public:
  /// Records `occ` as an occurrence of `fn`. An occurrence symbol may belong
  /// to one function only.
  void add(const std::string& fn, const std::string& occ);

  const std::vector<std::string>& occurrences(std::string_view fn) const;
  std::optional<std::string> original(std::string_view occ) const;
  std::vector<std::string> functions() const;
  bool contains(std::string_view fn) const { return fwd_.find(fn) != fwd_.end(); }
  bool empty() const { return fwd_.empty(); }
  std::size_t total_occurrences() const { return inv_.size(); }

  /// Union that keeps functions present in only one operand as they are.
  friend OccurrenceMap merge(const OccurrenceMap& a, const OccurrenceMap& b);
  friend bool operator==(const OccurrenceMap& a, const OccurrenceMap& b) {
    return a.fwd_ == b.fwd_;
  }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> fwd_;
  std::map<std::string, std::string, std::less<>> inv_;
};

/// "f#3" -> "f"; names without '#' are returned unchanged.
std::string erase_occurrence(std::string_view symbol);

struct Relaxed {
  Formula formula;
  OccurrenceMap occurrences;
};

/// Renames every application of a target symbol to a fresh occurrence
/// symbol "f#k", k counting from 1 in preorder per symbol.
Relaxed relax(const Formula& phi, const std::vector<std::string>& targets);

/// Erases occurrence suffixes from every function symbol.
Formula erase_occurrences(const Formula& phi);

using Interpretation = std::map<std::string, Program, std::less<>>;

/// Evaluates a ground term; uninterpreted symbols are looked up in `interp`,
/// others must be registered interpreted functions.
Value evaluate_term(const Term& t, const Interpretation& interp);
bool evaluate_ground(const Formula& phi, const Interpretation& interp);

using Valuation = std::map<std::string, Value, std::less<>>;

Term instantiate(const Term& t, const Valuation& env);
Formula instantiate(const Formula& phi, const Valuation& env);

}  // namespace relsynth

#endif  // RELSYNTH_LANG_HPP_

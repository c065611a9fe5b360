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

#include "relsynth/lang.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lexer.hpp"
#include "relsynth/errors.hpp"

namespace relsynth {

std::string_view op_symbol(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

std::string_view op_symbol(LogicOp op) {
  switch (op) {
    case LogicOp::And: return "&&";
    case LogicOp::Or: return "||";
    case LogicOp::Implies: return "=>";
    case LogicOp::Iff: return "<=>";
  }
  return "?";
}

bool apply_rel(RelOp op, const Value& a, const Value& b) {
  if (a.is_err() || b.is_err() || a.tag() != b.tag()) return false;
  auto c = a <=> b;
  switch (op) {
    case RelOp::Eq: return c == 0;
    case RelOp::Ne: return c != 0;
    case RelOp::Lt: return c < 0;
    case RelOp::Le: return c <= 0;
    case RelOp::Gt: return c > 0;
    case RelOp::Ge: return c >= 0;
  }
  return false;
}

bool apply_logic(LogicOp op, bool a, bool b) {
  switch (op) {
    case LogicOp::And: return a && b;
    case LogicOp::Or: return a || b;
    case LogicOp::Implies: return !a || b;
    case LogicOp::Iff: return a == b;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Terms and formulas

Term Term::constant(Value v) {
  Term t;
  t.kind = Kind::Const;
  t.value = std::move(v);
  return t;
}

Term Term::var(std::string name) {
  Term t;
  t.kind = Kind::Var;
  t.name = std::move(name);
  return t;
}

Term Term::apply(std::string fn, std::vector<Term> args) {
  Term t;
  t.kind = Kind::Apply;
  t.name = std::move(fn);
  t.args = std::move(args);
  return t;
}

bool Term::is_ground() const {
  if (kind == Kind::Var) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.is_ground(); });
}

std::string Term::to_string() const {
  switch (kind) {
    case Kind::Const: return value.to_literal();
    case Kind::Var: return name;
    case Kind::Apply: break;
  }
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].to_string();
  }
  return out + ")";
}

bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.value == b.value && a.name == b.name && a.args == b.args;
}

Formula Formula::constant(bool b) {
  Formula f;
  f.kind = Kind::Bool;
  f.truth = b;
  return f;
}

Formula Formula::atom(Term lhs, RelOp op, Term rhs) {
  Formula f;
  f.kind = Kind::Atom;
  f.rel = op;
  f.terms = {std::move(lhs), std::move(rhs)};
  return f;
}

Formula Formula::binary(Formula lhs, LogicOp op, Formula rhs) {
  Formula f;
  f.kind = Kind::Binary;
  f.logic = op;
  f.kids.push_back(std::move(lhs));
  f.kids.push_back(std::move(rhs));
  return f;
}

Formula Formula::negation(Formula body) {
  Formula f;
  f.kind = Kind::Not;
  f.kids.push_back(std::move(body));
  return f;
}

Formula Formula::conjunction(std::vector<Formula> parts) {
  if (parts.empty()) return constant(true);
  Formula acc = std::move(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) {
    acc = binary(std::move(acc), LogicOp::And, std::move(parts[i]));
  }
  return acc;
}

bool Formula::is_ground() const {
  return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.is_ground(); }) &&
         std::all_of(kids.begin(), kids.end(), [](const Formula& k) { return k.is_ground(); });
}

namespace {

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const Term& a : t.args) n += term_size(a);
  return n;
}

}  // namespace

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const Term& t : terms) n += term_size(t);
  for (const Formula& k : kids) n += k.size();
  return n;
}

std::string Formula::to_string() const {
  auto wrap = [](const Formula& f) {
    return f.kind == Kind::Binary ? "(" + f.to_string() + ")" : f.to_string();
  };
  switch (kind) {
    case Kind::Bool: return truth ? "true" : "false";
    case Kind::Atom:
      return terms[0].to_string() + " " + std::string(op_symbol(rel)) + " " + terms[1].to_string();
    case Kind::Binary:
      return wrap(kids[0]) + " " + std::string(op_symbol(logic)) + " " + wrap(kids[1]);
    case Kind::Not: {
      const Formula& b = kids[0];
      return b.kind == Kind::Bool ? "!" + b.to_string() : "!(" + b.to_string() + ")";
    }
  }
  return "?";
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Formula::Kind::Bool: return a.truth == b.truth;
    case Formula::Kind::Atom: return a.rel == b.rel && a.terms == b.terms;
    case Formula::Kind::Binary: return a.logic == b.logic && a.kids == b.kids;
    case Formula::Kind::Not: return a.kids == b.kids;
  }
  return false;
}

std::string Property::to_string() const {
  std::string out = "forall ";
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) out += ", ";
    out += vars[i].name + ":" + std::string(tag_name(vars[i].sort));
  }
  return out + ". " + body.to_string();
}

const FunDecl* RelationalSpec::find_fun(std::string_view name) const {
  for (const FunDecl& f : funs) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::optional<Tag> parse_sort(std::string_view name) {
  for (Tag t : {Tag::Bool, Tag::Int, Tag::Char, Tag::Str, Tag::Bytes, Tag::IntArray,
                Tag::CharArray}) {
    if (tag_name(t) == name) return t;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

// Checks applied while parsing spec-file formulas; absent for free parsing.
struct Scope {
  const RelationalSpec* spec = nullptr;
  const std::vector<Binding>* vars = nullptr;  // null: ground only
};

class FormulaParser {
 public:
  FormulaParser(detail::TokenCursor& cur, std::optional<Scope> scope)
      : cur_(cur), scope_(scope) {}

  Formula formula() { return iff(); }

  Term term() {
    const detail::Token at = cur_.peek();
    if (cur_.is_punct("-") && cur_.peek(1).kind != detail::TokKind::Int) {
      cur_.next();
      return checked_apply(at, "neg", {term()});
    }
    if (auto lit = cur_.accept_literal()) return Term::constant(std::move(*lit));
    if (cur_.peek().kind != detail::TokKind::Ident) cur_.fail("expected a term");
    std::string name = cur_.next().text;
    if (!cur_.accept_punct("(")) return checked_var(at, std::move(name));
    std::vector<Term> args;
    if (!cur_.is_punct(")")) {
      do {
        args.push_back(term());
      } while (cur_.accept_punct(","));
    }
    cur_.expect_punct(")");
    return checked_apply(at, std::move(name), std::move(args));
  }

 private:
  Formula iff() {
    Formula lhs = implies();
    while (cur_.accept_punct("<=>")) lhs = Formula::binary(std::move(lhs), LogicOp::Iff, implies());
    return lhs;
  }

  Formula implies() {
    Formula lhs = disjunction();
    if (cur_.accept_punct("=>")) return Formula::binary(std::move(lhs), LogicOp::Implies, implies());
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (cur_.accept_punct("||")) lhs = Formula::binary(std::move(lhs), LogicOp::Or, conjunction());
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = unary();
    while (cur_.accept_punct("&&")) lhs = Formula::binary(std::move(lhs), LogicOp::And, unary());
    return lhs;
  }

  Formula unary() {
    if (cur_.accept_punct("!")) return Formula::negation(unary());
    if (cur_.accept_punct("(")) {
      Formula f = formula();
      cur_.expect_punct(")");
      return f;
    }
    if ((cur_.is_ident("true") || cur_.is_ident("false")) && !rel_at(1)) {
      return Formula::constant(cur_.next().text == "true");
    }
    Term lhs = term();
    auto op = rel_op();
    if (!op) cur_.fail("expected a relation (==, !=, <, <=, >, >=)");
    return Formula::atom(std::move(lhs), *op, term());
  }

  bool rel_at(std::size_t ahead) const {
    for (const char* p : {"==", "!=", "<", "<=", ">", ">="}) {
      if (cur_.is_punct(p, ahead)) return true;
    }
    return false;
  }

  std::optional<RelOp> rel_op() {
    static const std::pair<const char*, RelOp> kOps[] = {
        {"==", RelOp::Eq}, {"!=", RelOp::Ne}, {"<=", RelOp::Le},
        {">=", RelOp::Ge}, {"<", RelOp::Lt},  {">", RelOp::Gt}};
    for (const auto& [p, op] : kOps) {
      if (cur_.accept_punct(p)) return op;
    }
    return std::nullopt;
  }

  static std::string where(const detail::Token& at) {
    return std::to_string(at.line) + ":" + std::to_string(at.column) + ": ";
  }

  Term checked_var(const detail::Token& at, std::string name) {
    if (scope_) {
      bool bound = scope_->vars &&
                   std::any_of(scope_->vars->begin(), scope_->vars->end(),
                               [&](const Binding& b) { return b.name == name; });
      if (!bound) {
        throw UnknownSymbol(where(at) + (scope_->vars ? "unbound variable '"
                                                      : "examples must be ground; found '") +
                            name + "'");
      }
    }
    return Term::var(std::move(name));
  }

  Term checked_apply(const detail::Token& at, std::string name, std::vector<Term> args) {
    if (scope_) {
      std::size_t arity;
      if (const FunDecl* f = scope_->spec->find_fun(name)) {
        arity = f->params.size();
      } else if (const InterpretedFn* fn = find_interpreted(name)) {
        arity = fn->arity;
      } else {
        throw UnknownSymbol(where(at) + "unknown function '" + name + "'");
      }
      if (arity != args.size()) {
        throw ArityMismatch(where(at) + "'" + name + "' expects " + std::to_string(arity) +
                            " arguments, got " + std::to_string(args.size()));
      }
    }
    return Term::apply(std::move(name), std::move(args));
  }

  detail::TokenCursor& cur_;
  std::optional<Scope> scope_;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Tag expect_sort(detail::TokenCursor& cur) {
  const detail::Token at = cur.peek();
  std::string name = cur.expect_ident();
  auto t = parse_sort(name);
  if (!t) cur.fail_at(at, "unknown sort '" + name + "'");
  return *t;
}

}  // namespace

Formula parse_formula(std::string_view text) {
  detail::TokenCursor cur(detail::tokenize(text));
  FormulaParser p(cur, std::nullopt);
  Formula f = p.formula();
  if (!cur.at_end()) cur.fail("trailing input after formula");
  return f;
}

RelationalSpec parse_spec(std::string_view text, const std::filesystem::path& base_dir) {
  detail::TokenCursor cur(detail::tokenize(text));
  if (cur.at_end()) throw EmptySpec();
  RelationalSpec spec;
  while (!cur.at_end()) {
    const detail::Token at = cur.peek();
    std::string kw = cur.expect_ident();
    if (kw == "fun") {
      FunDecl f;
      const detail::Token name_at = cur.peek();
      f.name = cur.expect_ident();
      if (spec.find_fun(f.name) || find_interpreted(f.name)) {
        cur.fail_at(name_at, "'" + f.name + "' is already defined");
      }
      if (f.name.find('#') != std::string::npos) cur.fail_at(name_at, "'#' is reserved");
      cur.expect_punct(":");
      do {
        f.params.push_back(expect_sort(cur));
      } while (cur.accept_punct(","));
      cur.expect_punct("->");
      f.result = expect_sort(cur);
      if (!cur.is_ident("grammar")) cur.fail("expected 'grammar'");
      cur.next();
      if (cur.peek().kind != detail::TokKind::Str) cur.fail("expected a quoted grammar path");
      std::filesystem::path g = cur.next().literal.as_str();
      f.grammar = g.is_relative() && !base_dir.empty() ? base_dir / g : g;
      spec.funs.push_back(std::move(f));
    } else if (kw == "example") {
      FormulaParser p(cur, Scope{&spec, nullptr});
      spec.examples.push_back(p.formula());
    } else if (kw == "property") {
      if (!cur.is_ident("forall")) cur.fail("expected 'forall'");
      cur.next();
      Property prop;
      std::size_t unsorted = 0;
      do {
        prop.vars.push_back({cur.expect_ident(), Tag::Str});
        ++unsorted;
        if (cur.accept_punct(":")) {
          Tag t = expect_sort(cur);
          for (std::size_t i = prop.vars.size() - unsorted; i < prop.vars.size(); ++i) {
            prop.vars[i].sort = t;
          }
          unsorted = 0;
        }
      } while (cur.accept_punct(","));
      if (unsorted) cur.fail("variable without a sort");
      cur.expect_punct(".");
      FormulaParser p(cur, Scope{&spec, &prop.vars});
      prop.body = p.formula();
      spec.properties.push_back(std::move(prop));
    } else {
      cur.fail_at(at, "expected 'fun', 'example' or 'property'");
    }
    cur.expect_punct(";");
  }
  return spec;
}

RelationalSpec load_spec(const std::filesystem::path& path) {
  return parse_spec(read_file(path), path.parent_path());
}

// ---------------------------------------------------------------------------
// Occurrences and relaxation

void OccurrenceMap::add(const std::string& fn, const std::string& occ) {
  auto it = inv_.find(occ);
  if (it != inv_.end()) {
    if (it->second != fn) throw Error("occurrence '" + occ + "' already belongs to " + it->second);
    return;
  }
  inv_.emplace(occ, fn);
  fwd_[fn].push_back(occ);
}

const std::vector<std::string>& OccurrenceMap::occurrences(std::string_view fn) const {
  static const std::vector<std::string> kNone;
  auto it = fwd_.find(fn);
  return it == fwd_.end() ? kNone : it->second;
}

std::optional<std::string> OccurrenceMap::original(std::string_view occ) const {
  auto it = inv_.find(occ);
  if (it == inv_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> OccurrenceMap::functions() const {
  std::vector<std::string> out;
  for (const auto& [f, occs] : fwd_) out.push_back(f);
  return out;
}

OccurrenceMap merge(const OccurrenceMap& a, const OccurrenceMap& b) {
  OccurrenceMap out = a;
  for (const auto& [f, occs] : b.fwd_) {
    for (const std::string& o : occs) out.add(f, o);
  }
  return out;
}

std::string erase_occurrence(std::string_view symbol) {
  return std::string(symbol.substr(0, symbol.find('#')));
}

namespace {

class Relaxer {
 public:
  explicit Relaxer(const std::vector<std::string>& targets)
      : targets_(targets.begin(), targets.end()) {}

  std::pair<Term, OccurrenceMap> term(const Term& t) {
    if (t.kind != Term::Kind::Apply) return {t, {}};
    OccurrenceMap m;
    std::string name = t.name;
    if (targets_.contains(t.name)) {
      name = t.name + "#" + std::to_string(++counter_[t.name]);
      m.add(t.name, name);
    }
    std::vector<Term> args;
    for (const Term& a : t.args) {
      auto [ra, ma] = term(a);
      args.push_back(std::move(ra));
      m = merge(m, ma);
    }
    return {Term::apply(std::move(name), std::move(args)), std::move(m)};
  }

  std::pair<Formula, OccurrenceMap> formula(const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::Bool:
        return {f, {}};
      case Formula::Kind::Atom: {
        auto [l, ml] = term(f.terms[0]);
        auto [r, mr] = term(f.terms[1]);
        return {Formula::atom(std::move(l), f.rel, std::move(r)), merge(ml, mr)};
      }
      case Formula::Kind::Binary: {
        auto [l, ml] = formula(f.kids[0]);
        auto [r, mr] = formula(f.kids[1]);
        return {Formula::binary(std::move(l), f.logic, std::move(r)), merge(ml, mr)};
      }
      case Formula::Kind::Not: {
        auto [b, mb] = formula(f.kids[0]);
        return {Formula::negation(std::move(b)), std::move(mb)};
      }
    }
    return {f, {}};
  }

 private:
  std::set<std::string, std::less<>> targets_;
  std::map<std::string, int, std::less<>> counter_;
};

Term erase_term(const Term& t) {
  Term out = t;
  if (out.kind == Term::Kind::Apply) out.name = erase_occurrence(out.name);
  for (Term& a : out.args) a = erase_term(a);
  return out;
}

}  // namespace

Relaxed relax(const Formula& phi, const std::vector<std::string>& targets) {
  Relaxer r(targets);
  auto [f, m] = r.formula(phi);
  return {std::move(f), std::move(m)};
}

Formula erase_occurrences(const Formula& phi) {
  Formula out = phi;
  for (Term& t : out.terms) t = erase_term(t);
  for (Formula& k : out.kids) k = erase_occurrences(k);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

Value evaluate_term(const Term& t, const Interpretation& interp) {
  switch (t.kind) {
    case Term::Kind::Const: return t.value;
    case Term::Kind::Var: throw Error("cannot evaluate free variable '" + t.name + "'");
    case Term::Kind::Apply: break;
  }
  std::vector<Value> args;
  args.reserve(t.args.size());
  for (const Term& a : t.args) args.push_back(evaluate_term(a, interp));
  if (auto it = interp.find(t.name); it != interp.end()) return eval(it->second, args);
  if (const InterpretedFn* fn = find_interpreted(t.name)) {
    if (fn->arity != args.size()) return Value::error("arity");
    return fn->apply(args);
  }
  throw UnknownSymbol("no interpretation for '" + t.name + "'");
}

bool evaluate_ground(const Formula& phi, const Interpretation& interp) {
  switch (phi.kind) {
    case Formula::Kind::Bool: return phi.truth;
    case Formula::Kind::Atom:
      return apply_rel(phi.rel, evaluate_term(phi.terms[0], interp),
                       evaluate_term(phi.terms[1], interp));
    case Formula::Kind::Binary:
      return apply_logic(phi.logic, evaluate_ground(phi.kids[0], interp),
                         evaluate_ground(phi.kids[1], interp));
    case Formula::Kind::Not: return !evaluate_ground(phi.kids[0], interp);
  }
  return false;
}

Term instantiate(const Term& t, const Valuation& env) {
  if (t.kind == Term::Kind::Var) {
    auto it = env.find(t.name);
    if (it == env.end()) throw Error("no value for variable '" + t.name + "'");
    return Term::constant(it->second);
  }
  Term out = t;
  for (Term& a : out.args) a = instantiate(a, env);
  return out;
}

Formula instantiate(const Formula& phi, const Valuation& env) {
  Formula out = phi;
  for (Term& t : out.terms) t = instantiate(t, env);
  for (Formula& k : out.kids) k = instantiate(k, env);
  return out;
}

}  // namespace relsynth

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

#include "relsynth/dsl.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexer.hpp"
#include "relsynth/errors.hpp"
#include "semantics.hpp"

namespace relsynth {
namespace {

const std::vector<Constructor>& registry() {
  static const std::vector<Constructor> kAll = [] {
    std::vector<Constructor> out;
    detail::add_arith_semantics(out);
    detail::add_codec_semantics(out);
    detail::add_comparator_semantics(out);
    return out;
  }();
  return kAll;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

const Constructor* find_constructor(std::string_view name, std::size_t arity) {
  for (const Constructor& c : registry()) {
    if (c.name == name && c.arity == arity) return &c;
  }
  return nullptr;
}

bool constructor_name_known(std::string_view name) {
  return std::any_of(registry().begin(), registry().end(),
                     [&](const Constructor& c) { return c.name == name; });
}

Value apply_constructor(const Constructor& c, Args args) {
  for (const Value* v : args) {
    if (v->is_err()) return *v;
  }
  return c.apply(args);
}

// ---------------------------------------------------------------------------
// Grammar

const std::string& Grammar::symbol_name(SymbolId s) const {
  return is_param(s) ? params_[param_index(s)] : nonterminals_[s];
}

std::optional<SymbolId> Grammar::find_symbol(std::string_view name) const {
  for (std::size_t i = 0; i < nonterminals_.size(); ++i) {
    if (nonterminals_[i] == name) return static_cast<SymbolId>(i);
  }
  if (auto p = find_param(name)) return param_symbol(*p);
  return std::nullopt;
}

std::optional<std::size_t> Grammar::find_param(std::string_view name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

// A right-hand-side alternative before symbol resolution.
struct RawAlt {
  enum class Kind { Ctor, Ref, Literal } kind;
  std::string name;
  std::vector<std::string> args;
  Value literal;
  detail::Token at;
};

struct RawProduction {
  std::string lhs;
  RawAlt alt;
};

}  // namespace

Grammar parse_grammar(std::string_view text, std::string name) {
  detail::TokenCursor cur(detail::tokenize(text, /*keep_newlines=*/true));
  std::vector<std::string> params;
  std::optional<std::string> start;
  std::optional<detail::Token> start_tok;
  std::vector<RawProduction> raw;
  std::vector<std::string> lhs_order;

  auto end_of_line = [&] {
    if (cur.peek().kind == detail::TokKind::Newline) {
      cur.next();
    } else if (!cur.at_end()) {
      cur.fail("expected end of line");
    }
  };

  while (!cur.at_end()) {
    if (cur.peek().kind == detail::TokKind::Newline) {
      cur.next();
      continue;
    }
    if (cur.is_ident("params") && cur.peek(1).kind == detail::TokKind::Ident) {
      cur.next();
      do {
        params.push_back(cur.expect_ident());
      } while (cur.accept_punct(","));
      end_of_line();
      continue;
    }
    if (cur.is_ident("start") && cur.peek(1).kind == detail::TokKind::Ident) {
      cur.next();
      start_tok = cur.peek();
      start = cur.expect_ident();
      end_of_line();
      continue;
    }
    std::string lhs = cur.expect_ident();
    cur.expect_punct("->");
    if (std::find(lhs_order.begin(), lhs_order.end(), lhs) == lhs_order.end()) {
      lhs_order.push_back(lhs);
    }
    do {
      while (cur.peek().kind == detail::TokKind::Newline) cur.next();
      RawAlt alt;
      alt.at = cur.peek();
      if (auto lit = cur.accept_literal()) {
        alt.kind = RawAlt::Kind::Literal;
        alt.literal = std::move(*lit);
      } else {
        alt.name = cur.expect_ident();
        if (cur.accept_punct("(")) {
          alt.kind = RawAlt::Kind::Ctor;
          if (!cur.is_punct(")")) {
            do {
              alt.args.push_back(cur.expect_ident());
            } while (cur.accept_punct(","));
          }
          cur.expect_punct(")");
        } else {
          alt.kind = RawAlt::Kind::Ref;
        }
      }
      raw.push_back({lhs, std::move(alt)});
      // A line starting with '|' continues the previous production.
      std::size_t ahead = 0;
      while (cur.peek(ahead).kind == detail::TokKind::Newline) ++ahead;
      if (ahead > 0 && cur.is_punct("|", ahead)) {
        while (ahead-- > 0) cur.next();
      }
    } while (cur.accept_punct("|"));
    end_of_line();
  }

  if (lhs_order.empty()) throw GrammarError(name + ": grammar has no productions");

  Grammar g;
  g.name_ = std::move(name);
  g.nonterminals_ = lhs_order;
  for (const std::string& p : params) {
    if (std::find(lhs_order.begin(), lhs_order.end(), p) != lhs_order.end()) {
      throw GrammarError(g.name_ + ": parameter '" + p + "' is also a nonterminal");
    }
    if (std::count(params.begin(), params.end(), p) > 1) {
      throw GrammarError(g.name_ + ": duplicate parameter '" + p + "'");
    }
  }
  g.params_ = params;
  if (start) {
    auto s = g.find_symbol(*start);
    if (!s || g.is_param(*s)) {
      throw GrammarError(g.name_ + ": start symbol '" + *start + "' is not a nonterminal");
    }
    g.start_ = *s;
  }

  auto resolve = [&](const std::string& sym, const detail::Token& at) {
    auto s = g.find_symbol(sym);
    if (!s) {
      throw GrammarError(g.name_ + ":" + std::to_string(at.line) + ": undefined symbol '" + sym +
                         "'");
    }
    return *s;
  };

  for (RawProduction& rp : raw) {
    Production p;
    p.lhs = *g.find_symbol(rp.lhs);
    switch (rp.alt.kind) {
      case RawAlt::Kind::Literal:
        p.kind = Production::Kind::Literal;
        p.literal = std::move(rp.alt.literal);
        break;
      case RawAlt::Kind::Ref:
        p.kind = Production::Kind::Chain;
        p.rhs.push_back(resolve(rp.alt.name, rp.alt.at));
        break;
      case RawAlt::Kind::Ctor: {
        const Constructor* c = find_constructor(rp.alt.name, rp.alt.args.size());
        if (!c) {
          std::string where = g.name_ + ":" + std::to_string(rp.alt.at.line) + ": ";
          if (constructor_name_known(rp.alt.name)) {
            throw ArityMismatch(where + "'" + rp.alt.name + "' does not take " +
                                std::to_string(rp.alt.args.size()) + " arguments");
          }
          throw UnknownConstructor(where + "unknown constructor '" + rp.alt.name + "'");
        }
        p.kind = Production::Kind::Ctor;
        p.ctor = c;
        for (const std::string& a : rp.alt.args) p.rhs.push_back(resolve(a, rp.alt.at));
        break;
      }
    }
    g.productions_.push_back(std::move(p));
  }

  g.by_lhs_.assign(g.num_nonterminals(), {});
  for (std::size_t i = 0; i < g.productions_.size(); ++i) {
    g.by_lhs_[g.productions_[i].lhs].push_back(i);
  }

  std::vector<bool> seen(g.num_symbols(), false);
  std::vector<SymbolId> work = {g.start_};
  seen[g.start_] = true;
  while (!work.empty()) {
    SymbolId s = work.back();
    work.pop_back();
    if (g.is_param(s)) continue;
    for (std::size_t pi : g.by_lhs_[s]) {
      for (SymbolId r : g.productions_[pi].rhs) {
        if (!seen[r]) {
          seen[r] = true;
          work.push_back(r);
        }
      }
    }
  }
  for (SymbolId s = 0; s < g.num_nonterminals(); ++s) {
    if (!seen[s]) {
      throw GrammarError(g.name_ + ": nonterminal '" + g.nonterminals_[s] +
                         "' is unreachable from the start symbol");
    }
  }
  return g;
}

Grammar load_grammar(const std::filesystem::path& path) {
  return parse_grammar(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Program

Program Program::make_ctor(const Constructor& c, std::vector<Program> kids) {
  Program p;
  p.kind = Kind::Ctor;
  p.label = c.name;
  p.ctor = &c;
  p.children = std::move(kids);
  return p;
}

Program Program::make_opaque(std::string label, std::vector<Program> kids) {
  Program p;
  p.kind = Kind::Ctor;
  p.label = std::move(label);
  p.children = std::move(kids);
  return p;
}

Program Program::make_param(std::string name, std::size_t index) {
  Program p;
  p.kind = Kind::Param;
  p.label = std::move(name);
  p.param = index;
  return p;
}

Program Program::make_literal(Value v) {
  Program p;
  p.kind = Kind::Literal;
  p.label = v.to_literal();
  p.literal = std::move(v);
  return p;
}

std::size_t Program::size() const {
  std::size_t n = 1;
  for (const Program& c : children) n += c.size();
  return n;
}

std::size_t Program::depth() const {
  if (kind != Kind::Ctor) return 0;
  std::size_t d = 0;
  for (const Program& c : children) d = std::max(d, c.depth());
  return d + 1;
}

std::string Program::node_label() const { return label; }

std::string Program::to_string() const {
  if (kind != Kind::Ctor || (children.empty() && !ctor)) return label;
  std::string out = label + "(";
  for (std::size_t i = 0; i < children.size(); ++i) {
    if (i) out += ",";
    out += children[i].to_string();
  }
  return out + ")";
}

bool operator==(const Program& a, const Program& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Program& a, const Program& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.label <=> b.label; c != 0) return c;
  if (a.kind == Program::Kind::Literal) {
    if (auto c = a.literal <=> b.literal; c != 0) return c;
  }
  if (a.kind == Program::Kind::Param) {
    if (auto c = a.param <=> b.param; c != 0) return c;
  }
  return std::lexicographical_compare_three_way(a.children.begin(), a.children.end(),
                                                b.children.begin(), b.children.end());
}

Value eval(const Program& p, std::span<const Value> args) {
  switch (p.kind) {
    case Program::Kind::Literal:
      return p.literal;
    case Program::Kind::Param:
      if (p.param >= args.size()) return Value::error("arity");
      return args[p.param];
    case Program::Kind::Ctor:
      break;
  }
  if (!p.ctor) return Value::error("opaque");
  std::vector<Value> vals;
  vals.reserve(p.children.size());
  for (const Program& c : p.children) {
    vals.push_back(eval(c, args));
    if (vals.back().is_err()) return vals.back();
  }
  std::vector<const Value*> ptrs;
  ptrs.reserve(vals.size());
  for (const Value& v : vals) ptrs.push_back(&v);
  return p.ctor->apply(ptrs);
}

namespace {

Program parse_program_term(detail::TokenCursor& cur, const Grammar& g) {
  if (auto lit = cur.accept_literal()) return Program::make_literal(std::move(*lit));
  const detail::Token at = cur.peek();
  std::string name = cur.expect_ident();
  if (!cur.accept_punct("(")) {
    auto idx = g.find_param(name);
    if (!idx) throw UnknownSymbol(std::to_string(at.line) + ":" + std::to_string(at.column) +
                                  ": '" + name + "' is not a parameter of " + g.name());
    return Program::make_param(name, *idx);
  }
  std::vector<Program> kids;
  if (!cur.is_punct(")")) {
    do {
      kids.push_back(parse_program_term(cur, g));
    } while (cur.accept_punct(","));
  }
  cur.expect_punct(")");
  const Constructor* c = find_constructor(name, kids.size());
  if (!c) {
    std::string where = std::to_string(at.line) + ":" + std::to_string(at.column) + ": ";
    if (constructor_name_known(name)) {
      throw ArityMismatch(where + "'" + name + "' does not take " + std::to_string(kids.size()) +
                          " arguments");
    }
    throw UnknownConstructor(where + "unknown constructor '" + name + "'");
  }
  return Program::make_ctor(*c, std::move(kids));
}

// Symbols from which `p` is derivable.
std::vector<bool> deriving_symbols(const Program& p, const Grammar& g) {
  std::vector<bool> d(g.num_symbols(), false);
  std::vector<std::vector<bool>> kids;
  for (const Program& c : p.children) kids.push_back(deriving_symbols(c, g));
  if (p.kind == Program::Kind::Param) {
    if (p.param < g.num_params() && g.param_name(p.param) == p.label) {
      d[g.param_symbol(p.param)] = true;
    }
  }
  for (const Production& pr : g.productions()) {
    switch (pr.kind) {
      case Production::Kind::Literal:
        if (p.kind == Program::Kind::Literal && pr.literal == p.literal) d[pr.lhs] = true;
        break;
      case Production::Kind::Ctor: {
        if (p.kind != Program::Kind::Ctor || pr.ctor != p.ctor) break;
        bool ok = pr.rhs.size() == kids.size();
        for (std::size_t i = 0; ok && i < kids.size(); ++i) ok = kids[i][pr.rhs[i]];
        if (ok) d[pr.lhs] = true;
        break;
      }
      case Production::Kind::Chain:
        break;
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const Production& pr : g.productions()) {
      if (pr.kind == Production::Kind::Chain && d[pr.rhs[0]] && !d[pr.lhs]) {
        d[pr.lhs] = true;
        changed = true;
      }
    }
  }
  return d;
}

}  // namespace

Program parse_program(std::string_view text, const Grammar& g) {
  detail::TokenCursor cur(detail::tokenize(text));
  Program p = parse_program_term(cur, g);
  if (!cur.at_end()) cur.fail("trailing input after program");
  return p;
}

bool conforms(const Program& p, const Grammar& g) { return deriving_symbols(p, g)[g.start()]; }

std::vector<Program> all_programs(const Grammar& g, std::size_t max_depth, std::size_t limit) {
  std::vector<std::set<Program>> by_sym(g.num_symbols());
  std::size_t total = 0;
  auto add = [&](SymbolId s, const Program& p) {
    if (by_sym[s].insert(p).second && ++total > limit) {
      throw CapacityExceeded("all_programs: more than " + std::to_string(limit) + " programs");
    }
  };
  auto close_chains = [&] {
    for (bool changed = true; changed;) {
      changed = false;
      for (const Production& pr : g.productions()) {
        if (pr.kind != Production::Kind::Chain) continue;
        for (const Program& p : std::vector<Program>(by_sym[pr.rhs[0]].begin(),
                                                     by_sym[pr.rhs[0]].end())) {
          if (!by_sym[pr.lhs].contains(p)) {
            add(pr.lhs, p);
            changed = true;
          }
        }
      }
    }
  };

  for (std::size_t i = 0; i < g.num_params(); ++i) {
    add(g.param_symbol(i), Program::make_param(g.param_name(i), i));
  }
  for (const Production& pr : g.productions()) {
    if (pr.kind == Production::Kind::Literal) add(pr.lhs, Program::make_literal(pr.literal));
  }
  close_chains();

  for (std::size_t layer = 1; layer <= max_depth; ++layer) {
    auto prev = by_sym;
    for (const Production& pr : g.productions()) {
      if (pr.kind != Production::Kind::Ctor) continue;
      std::vector<std::vector<Program>> pools;
      bool empty = false;
      for (SymbolId r : pr.rhs) {
        pools.emplace_back(prev[r].begin(), prev[r].end());
        empty |= pools.back().empty();
      }
      if (empty) continue;
      std::vector<std::size_t> idx(pools.size(), 0);
      while (true) {
        std::vector<Program> kids;
        for (std::size_t i = 0; i < pools.size(); ++i) kids.push_back(pools[i][idx[i]]);
        add(pr.lhs, Program::make_ctor(*pr.ctor, std::move(kids)));
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == pools[i].size()) idx[i++] = 0;
        if (i == idx.size()) break;
      }
    }
    close_chains();
  }
  return {by_sym[g.start()].begin(), by_sym[g.start()].end()};
}

// ---------------------------------------------------------------------------
// CostModel

CostModel CostModel::parse(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string("cost model: ") + e.what(), 1, e.byte);
  }
  if (!j.is_object()) throw SyntaxError("cost model must be a JSON object", 1, 1);
  CostModel m;
  for (const auto& [key, val] : j.items()) {
    if (!val.is_number()) throw SyntaxError("cost of '" + key + "' is not a number", 1, 1);
    double c = val.get<double>();
    if (c < 0) throw Error("cost of '" + key + "' is negative");
    if (key == "default") {
      m.default_cost_ = c;
    } else {
      m.costs_[key] = c;
    }
  }
  return m;
}

CostModel CostModel::load(const std::filesystem::path& path) { return parse(read_file(path)); }

void CostModel::set(std::string label, double c) {
  if (c < 0) throw Error("cost of '" + label + "' is negative");
  costs_[std::move(label)] = c;
}

double CostModel::of(std::string_view label) const {
  auto it = costs_.find(label);
  return it == costs_.end() ? default_cost_ : it->second;
}

double cost(const Program& p, const CostModel& m) {
  double c = m.of(p.node_label());
  for (const Program& k : p.children) c += cost(k, m);
  return c;
}

}  // namespace relsynth

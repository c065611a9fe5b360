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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include "relsynth/errors.hpp"
#include "relsynth/utf8.hpp"

namespace relsynth::cli {
namespace {

struct SynthFlags {
  std::optional<std::size_t> depth_bound;
  std::vector<std::string> function_depth;  // "f=N"
  std::optional<double> timeout;
  std::optional<std::string> val_alphabet;
  std::optional<std::size_t> val_len;
  std::optional<std::size_t> val_min_len;
  std::optional<std::int64_t> int_radius;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cost_model;
  std::optional<std::size_t> defer_limit;
  std::optional<std::size_t> max_states;
  std::optional<std::size_t> candidate_cap;
  std::optional<std::string> dump_hfta;
  bool trace = false;
  bool progress = false;
};

void add_validation_flags(CLI::App& app, SynthFlags& f) {
  app.add_option("--val-alphabet", f.val_alphabet, "Characters of generated test strings");
  app.add_option("--val-len", f.val_len, "Longest generated test string");
  app.add_option("--val-min-len", f.val_min_len, "Shortest generated test string");
  app.add_option("--int-radius", f.int_radius, "Int test inputs range over [-r, r]");
}

void add_synth_flags(CLI::App& app, SynthFlags& f) {
  app.add_option("--depth-bound", f.depth_bound, "Constructor layers per program");
  app.add_option("--function-depth", f.function_depth, "Per-function bound, as f=N")
      ->allow_extra_args(false);
  app.add_option("--timeout", f.timeout, "Seconds before giving up");
  add_validation_flags(app, f);
  app.add_option("--seed", f.seed, "Seed of the initial random candidate");
  app.add_option("--cost-model", f.cost_model, "JSON file of constructor costs");
  app.add_option("--defer-limit", f.defer_limit, "Defer operator automata above this many input tuples");
  app.add_option("--max-states", f.max_states, "Abort when one automaton grows past this");
  app.add_option("--candidate-cap", f.candidate_cap, "Distinct candidates tried per choice point");
  app.add_option("--dump-hfta", f.dump_hfta, "Append the automaton of every round as DOT");
  app.add_flag("--trace", f.trace, "Log search decisions to stderr");
  app.add_flag("--progress", f.progress, "Print one progress record per round to stderr");
}

// Later flags win field by field.
void overlay(SynthFlags& base, const SynthFlags& top) {
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(base.depth_bound, top.depth_bound);
  base.function_depth.insert(base.function_depth.end(), top.function_depth.begin(),
                             top.function_depth.end());
  take(base.timeout, top.timeout);
  take(base.val_alphabet, top.val_alphabet);
  take(base.val_len, top.val_len);
  take(base.val_min_len, top.val_min_len);
  take(base.int_radius, top.int_radius);
  take(base.seed, top.seed);
  take(base.cost_model, top.cost_model);
  take(base.defer_limit, top.defer_limit);
  take(base.max_states, top.max_states);
  take(base.candidate_cap, top.candidate_cap);
  take(base.dump_hfta, top.dump_hfta);
  base.trace |= top.trace;
  base.progress |= top.progress;
}

class UsageError : public Error {
 public:
  using Error::Error;
};

ValidationConfig validation_config(const SynthFlags& f) {
  ValidationConfig v;
  if (f.val_alphabet) {
    auto cps = utf8::decode(*f.val_alphabet);
    if (!cps || cps->empty()) throw UsageError("--val-alphabet must be nonempty UTF-8");
    v.alphabet = *cps;
  }
  if (f.val_len) v.max_length = *f.val_len;
  if (f.val_min_len) v.min_length = *f.val_min_len;
  if (f.int_radius) v.int_radius = *f.int_radius;
  return v;
}

void configure(SynthesisProblem& p, const SynthFlags& f, std::ostream& err) {
  SynthesisConfig& c = p.config;
  if (f.depth_bound) c.depth_bound = *f.depth_bound;
  for (const std::string& fd : f.function_depth) {
    auto eq = fd.find('=');
    if (eq == std::string::npos) throw UsageError("--function-depth expects f=N, got '" + fd + "'");
    std::size_t n = 0;
    try {
      n = std::stoul(fd.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--function-depth expects f=N, got '" + fd + "'");
    }
    c.function_depth.insert_or_assign(fd.substr(0, eq), n);
  }
  if (f.timeout) c.timeout = std::chrono::duration<double>(*f.timeout);
  c.validation = validation_config(f);
  if (f.seed) c.seed = *f.seed;
  if (f.cost_model) c.model = CostModel::load(*f.cost_model);
  if (f.defer_limit) c.defer_limit = *f.defer_limit;
  if (f.max_states) c.max_states = *f.max_states;
  if (f.candidate_cap) c.candidate_cap = *f.candidate_cap;
  if (f.trace) c.trace = [&err](const std::string& line) { err << "trace: " << line << '\n'; };
  if (f.progress) {
    c.progress = [&err](const ProgressRecord& r) {
      err << "progress iter=" << r.iteration << " atoms=" << r.formula_atoms
          << " nodes=" << r.hfta_nodes << " states=" << r.hfta_states << " find_s=" << std::fixed
          << std::setprecision(3) << r.find_seconds << std::defaultfloat
          << " cex=" << std::quoted(r.counterexample) << '\n';
    };
  }
  if (f.dump_hfta) {
    auto path = *f.dump_hfta;
    std::ofstream(path, std::ios::trunc);
    c.dump_hfta = [path](const Hfta& h) {
      std::ofstream out(path, std::ios::app);
      if (!out) throw IoError("cannot write " + path);
      out << h.to_dot();
    };
  }
}

int exit_code(SynthesisOutcome::Status s) {
  switch (s) {
    case SynthesisOutcome::Status::Solved: return kOk;
    case SynthesisOutcome::Status::Unsat: return kUnsat;
    case SynthesisOutcome::Status::Timeout: return kTimeout;
    case SynthesisOutcome::Status::Capacity: return kCapacity;
  }
  return kUnsat;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cmd_synth(const std::filesystem::path& spec, const SynthFlags& flags, std::ostream& out,
              std::ostream& err) {
  SynthesisProblem problem = load_problem(spec);
  configure(problem, flags, err);
  SynthesisOutcome o = synthesize(problem);
  err << status_name(o.status) << ": " << o.iterations << " iterations, " << std::fixed
      << std::setprecision(2) << o.total_seconds << " s total, " << o.synth_seconds
      << " s synthesis, " << o.peak_states << " peak states" << std::defaultfloat;
  if (!o.reason.empty()) err << " (" << o.reason << ")";
  err << '\n';
  if (o.programs) out << format_programs(*o.programs);
  return exit_code(o.status);
}

BenchRecord bench_one(const SuiteEntry& e, const SynthFlags& global, std::ostream& err) {
  BenchRecord r;
  r.name = e.name;
  SynthFlags flags = global;
  SynthFlags local;
  CLI::App app{"suite entry " + e.name};
  add_synth_flags(app, local);
  std::vector<std::string> args(e.flags.rbegin(), e.flags.rend());
  try {
    app.parse(args);
    overlay(flags, local);
    SynthesisProblem problem = load_problem(e.spec);
    configure(problem, flags, err);
    SynthesisOutcome o = synthesize(problem);
    r.solved = o.status == SynthesisOutcome::Status::Solved;
    r.iterations = o.iterations;
    r.total_seconds = o.total_seconds;
    r.synth_seconds = o.synth_seconds;
    r.peak_states = o.peak_states;
    err << e.name << ": " << status_name(o.status);
    if (!o.reason.empty()) err << " (" << o.reason << ")";
    err << '\n';
    if (o.programs) err << format_programs(*o.programs);
  } catch (const CLI::ParseError& ex) {
    err << e.name << ": bad flags: " << ex.what() << '\n';
  } catch (const Error& ex) {
    err << e.name << ": " << ex.what() << '\n';
  }
  return r;
}

int cmd_bench(const std::filesystem::path& suite, const SynthFlags& flags,
              const std::optional<std::string>& csv_path, std::ostream& out, std::ostream& err) {
  std::vector<SuiteEntry> entries = parse_suite(read_file(suite), suite.parent_path());
  std::ofstream file;
  if (csv_path) {
    file.open(*csv_path, std::ios::trunc);
    if (!file) throw IoError("cannot write " + *csv_path);
  }
  std::ostream& csv = csv_path ? static_cast<std::ostream&>(file) : out;
  csv << kCsvHeader << '\n';
  for (const SuiteEntry& e : entries) {
    csv << csv_row(bench_one(e, flags, err)) << '\n';
    csv.flush();
  }
  return kOk;
}

int cmd_check(const std::filesystem::path& spec, const std::vector<std::string>& program_files,
              const std::vector<std::string>& inline_programs, const SynthFlags& flags,
              std::ostream& out) {
  SynthesisProblem problem = load_problem(spec);
  Interpretation programs;
  auto absorb = [&](const Interpretation& more) {
    for (const auto& [f, p] : more) programs.insert_or_assign(f, p);
  };
  for (const std::string& path : program_files) {
    absorb(parse_programs(read_file(path), problem.grammars));
  }
  for (const std::string& line : inline_programs) absorb(parse_programs(line, problem.grammars));
  for (const std::string& f : problem.targets()) {
    if (!programs.contains(f)) throw UnknownSymbol("no program given for '" + f + "'");
  }
  auto cex = verify(programs, problem.spec, validation_config(flags));
  if (!cex) {
    out << "valid\n";
    return kOk;
  }
  out << "counterexample: " << cex->ground.to_string() << '\n';
  return kInvalid;
}

}  // namespace

std::string csv_row(const BenchRecord& r) {
  std::ostringstream s;
  s << r.name << ',' << (r.solved ? 1 : 0) << ',' << r.iterations << ',' << std::fixed
    << std::setprecision(3) << r.total_seconds << ',' << r.synth_seconds << ',' << r.peak_states;
  return s.str();
}

std::string format_programs(const Interpretation& programs) {
  std::string out;
  for (const auto& [f, p] : programs) out += f + " = " + p.to_string() + "\n";
  return out;
}

Interpretation parse_programs(std::string_view text, const GrammarMap& grammars) {
  Interpretation out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SyntaxError("expected 'name = program'", 0, 0);
    std::string name = line.substr(first, eq - first);
    name.erase(name.find_last_not_of(" \t") + 1);
    auto g = grammars.find(name);
    if (g == grammars.end()) throw UnknownSymbol("unknown function '" + name + "'");
    out.insert_or_assign(name, parse_program(line.substr(eq + 1), *g->second));
  }
  return out;
}

std::vector<SuiteEntry> parse_suite(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<SuiteEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> w{std::istream_iterator<std::string>(words),
                               std::istream_iterator<std::string>()};
    if (w.empty()) continue;
    if (w.size() < 2) throw SyntaxError("suite entry needs a name and a spec path", line_no, 1);
    std::filesystem::path spec = w[1];
    if (spec.is_relative()) spec = base_dir / spec;
    out.push_back({w[0], spec, {w.begin() + 2, w.end()}});
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"relsynth: synthesize programs from relational specifications"};
  app.require_subcommand(1);

  SynthFlags synth_flags;
  std::string synth_spec;
  CLI::App* synth = app.add_subcommand("synth", "Synthesize every function of a spec file");
  synth->add_option("spec", synth_spec, "Spec file")->required();
  add_synth_flags(*synth, synth_flags);

  SynthFlags bench_flags;
  std::string suite;
  std::optional<std::string> csv_path;
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark suite and print CSV");
  bench->add_option("suite", suite, "Suite file")->required();
  bench->add_option("--csv", csv_path, "Write the CSV here instead of stdout");
  add_synth_flags(*bench, bench_flags);

  SynthFlags check_flags;
  std::string check_spec;
  std::vector<std::string> program_files;
  std::vector<std::string> inline_programs;
  CLI::App* check = app.add_subcommand("check", "Test given programs against a spec");
  check->add_option("spec", check_spec, "Spec file")->required();
  check->add_option("programs", program_files, "Files of 'name = program' lines");
  check->add_option("-p,--program", inline_programs, "Inline 'name = program'");
  add_validation_flags(*check, check_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*synth) return cmd_synth(synth_spec, synth_flags, out, err);
    if (*bench) return cmd_bench(suite, bench_flags, csv_path, out, err);
    return cmd_check(check_spec, program_files, inline_programs, check_flags, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const CapacityExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kCapacity;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }
}

}  // namespace relsynth::cli

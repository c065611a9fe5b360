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

// The relsynth command line: synth, bench and check.

#ifndef RELSYNTH_TOOLS_CLI_HPP_
#define RELSYNTH_TOOLS_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "relsynth/cegis.hpp"

namespace relsynth::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalid = 1,  // check found a counterexample
  kParse = 2,
  kTimeout = 3,
  kCapacity = 4,
  kUnsat = 5,
  kIo = 10,
};

struct BenchRecord {
  std::string name;
  bool solved = false;
  std::size_t iterations = 0;
  double total_seconds = 0;
  double synth_seconds = 0;
  std::size_t peak_states = 0;
};

inline constexpr const char* kCsvHeader = "name,solved,iters,total_s,synth_s,peak_states";
std::string csv_row(const BenchRecord& r);

/// `name = program` lines, one per function.
std::string format_programs(const Interpretation& programs);
Interpretation parse_programs(std::string_view text, const GrammarMap& grammars);

struct SuiteEntry {
  std::string name;
  std::filesystem::path spec;
  std::vector<std::string> flags;
};

/// One benchmark per line: `name spec-path [flags...]`; '#' starts a comment.
/// Spec paths are relative to the suite file.
std::vector<SuiteEntry> parse_suite(std::string_view text, const std::filesystem::path& base_dir);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relsynth::cli

#endif  // RELSYNTH_TOOLS_CLI_HPP_

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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using namespace relsynth;
using relsynth::testing::source_dir;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string codec(const std::string& name) {
  return (source_dir() / "benchmarks/codec" / name).string();
}

std::filesystem::path scratch(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "relsynth_test_cli";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

const char* kBase64Programs =
    "encode = padToMultiple(enc64(reshape(encUTF8(codePoint(x)),6)),4,'=')\n"
    "decode = asUnicode(decUTF8(invReshape(dec64(removePad(x,'=')),6)))\n";

}  // namespace

TEST_CASE("check accepts the reference Base64 pair") {
  auto programs = scratch("base64.programs", kBase64Programs);
  Run r = run({"check", codec("base64.spec"), programs.string(), "--val-len", "3"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == "valid\n");
}

TEST_CASE("check rejects an encoder with the wrong pad character") {
  std::string text = kBase64Programs;
  text.replace(text.find("4,'='"), 5, "4,'0'");
  auto programs = scratch("base64_bad.programs", text);
  Run r = run({"check", codec("base64.spec"), programs.string()});
  CHECK(r.code == cli::kInvalid);
  CHECK(r.out.starts_with("counterexample: "));
}

TEST_CASE("inline programs and missing functions") {
  Run r = run({"check", codec("base16.spec"), "-p", "encode = enc16(reshape(encUTF8(codePoint(x)),4))",
               "-p", "decode = asUnicode(decUTF8(invReshape(dec16(x),4)))"});
  CHECK(r.code == cli::kOk);
  r = run({"check", codec("base16.spec"), "-p", "encode = enc16(reshape(encUTF8(codePoint(x)),4))"});
  CHECK(r.code == cli::kParse);
  r = run({"check", codec("base16.spec"), "-p", "encode = enc17(x)", "-p", "decode = dec16(x)"});
  CHECK(r.code == cli::kParse);
}

TEST_CASE("synth output round-trips through check") {
  Run s = run({"synth", codec("base16.spec"), "--depth-bound", "4"});
  REQUIRE(s.code == cli::kOk);
  CHECK(s.out ==
        "decode = asUnicode(decUTF8(invReshape(dec16(x),4)))\n"
        "encode = enc16(reshape(encUTF8(codePoint(x)),4))\n");
  auto programs = scratch("base16.programs", s.out);
  CHECK(run({"check", codec("base16.spec"), programs.string()}).code == cli::kOk);
}

TEST_CASE("exit codes") {
  CHECK(run({"synth", "/nonexistent/x.spec"}).code == cli::kIo);
  CHECK(run({"check", "/nonexistent/x.spec"}).code == cli::kIo);
  auto bad = scratch("bad.spec", "fun f : Int -> Int grammar \"nowhere.grammar\";\nexample f(;\n");
  CHECK(run({"synth", bad.string()}).code == cli::kParse);
  CHECK(run({"synth"}).code == cli::kParse);
  CHECK(run({"synth", codec("base16.spec"), "--depth-bound", "two"}).code == cli::kParse);
  CHECK(run({"synth", codec("base16.spec"), "--timeout", "0"}).code == cli::kTimeout);
  CHECK(run({"synth", codec("base16.spec"), "--max-states", "10"}).code == cli::kCapacity);

  auto g = scratch("inc.grammar", "params x\nstart E\nE -> inc(E) | x\n");
  auto unsat = scratch("unsat.spec", "fun f : Int -> Int grammar \"" + g.string() +
                                          "\";\nexample f(1) == 1;\nexample f(1) == 2;\n");
  CHECK(run({"synth", unsat.string(), "--depth-bound", "3"}).code == cli::kUnsat);
}

TEST_CASE("bench output") {
  auto empty = scratch("empty.suite", "# nothing here\n\n");
  Run r = run({"bench", empty.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == std::string(cli::kCsvHeader) + "\n");

  auto suite = scratch("small.suite",
                       "Base16 " + codec("base16.spec") + " --depth-bound 4\n"
                       "Missing /nonexistent/x.spec\n"
                       "UTF-16 " + codec("utf16.spec") + " --depth-bound 4  # two examples\n");
  r = run({"bench", suite.string(), "--seed", "3"});
  CHECK(r.code == cli::kOk);
  std::istringstream lines(r.out);
  std::string header, base16, missing, utf16;
  std::getline(lines, header);
  std::getline(lines, base16);
  std::getline(lines, missing);
  std::getline(lines, utf16);
  CHECK(header == "name,solved,iters,total_s,synth_s,peak_states");
  CHECK(base16.starts_with("Base16,1,"));
  CHECK(missing == "Missing,0,0,0.000,0.000,0");
  CHECK(utf16.starts_with("UTF-16,1,"));
}

TEST_CASE("suite parsing") {
  auto entries = cli::parse_suite("a x.spec --val-len 2\n# c\n  b /abs/y.spec\n", "/base");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].name == "a");
  CHECK(entries[0].spec == std::filesystem::path("/base/x.spec"));
  CHECK(entries[0].flags == std::vector<std::string>{"--val-len", "2"});
  CHECK(entries[1].spec == std::filesystem::path("/abs/y.spec"));
  CHECK_THROWS(cli::parse_suite("lonely\n", "/"));
}

TEST_CASE("CSV rows") {
  cli::BenchRecord r{"Base64", true, 5, 12.5, 10.25, 1234};
  CHECK(cli::csv_row(r) == "Base64,1,5,12.500,10.250,1234");
}

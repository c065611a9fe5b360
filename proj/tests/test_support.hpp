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

#ifndef RELSYNTH_TESTS_TEST_SUPPORT_HPP_
#define RELSYNTH_TESTS_TEST_SUPPORT_HPP_

#include <filesystem>
#include <string>

namespace relsynth::testing {

inline std::filesystem::path source_dir() { return RELSYNTH_SOURCE_DIR; }

inline std::filesystem::path grammar_path(const std::string& name) {
  return source_dir() / "benchmarks" / "grammars" / name;
}

}  // namespace relsynth::testing

#endif  // RELSYNTH_TESTS_TEST_SUPPORT_HPP_

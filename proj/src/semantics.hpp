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

#ifndef RELSYNTH_SRC_SEMANTICS_HPP_
#define RELSYNTH_SRC_SEMANTICS_HPP_

#include <vector>

#include "relsynth/dsl.hpp"

namespace relsynth::detail {

void add_arith_semantics(std::vector<Constructor>& out);
void add_codec_semantics(std::vector<Constructor>& out);
void add_comparator_semantics(std::vector<Constructor>& out);

inline Value type_error() { return Value::error("type"); }

}  // namespace relsynth::detail

#endif  // RELSYNTH_SRC_SEMANTICS_HPP_

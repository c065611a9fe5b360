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

// Minimal UTF-8 helpers. Strings inside Value are kept as UTF-8.

#ifndef RELSYNTH_UTF8_HPP_
#define RELSYNTH_UTF8_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace relsynth::utf8 {

bool is_scalar(char32_t cp);

/// Appends the encoding of `cp`; returns false for non-scalar values.
bool append(std::string& out, char32_t cp);

std::string encode(char32_t cp);

/// Strict decode; nullopt on malformed input (overlong, surrogates, ...).
std::optional<std::u32string> decode(std::string_view bytes);

/// Decode text known to be valid (produced by this library).
std::u32string decode_valid(std::string_view text);

std::string encode_all(std::u32string_view cps);

std::size_t length(std::string_view text);

}  // namespace relsynth::utf8

#endif  // RELSYNTH_UTF8_HPP_

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

// Building blocks for text encoders and decoders. Mappers translate small
// byte values to characters of an RFC 4648 / uuencode alphabet; the bit
// regrouping is done separately by reshape/invReshape.

#include <array>
#include <string_view>

#include "relsynth/utf8.hpp"
#include "semantics.hpp"

namespace relsynth::detail {
namespace {

constexpr std::string_view kBase16 = "0123456789ABCDEF";
constexpr std::string_view kBase32 = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";
constexpr std::string_view kBase32Hex = "0123456789ABCDEFGHIJKLMNOPQRSTUV";
constexpr std::string_view kBase64 =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
// XML name-token variant: '.' and '-' replace '+' and '/'.
constexpr std::string_view kBase64Xml =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789.-";

bool small_num(const Value& v, std::int64_t lo, std::int64_t hi) {
  return v.is(Tag::Int) && v.as_int() >= lo && v.as_int() <= hi;
}

// ---- code points and UTF encodings -------------------------------------

Value code_point(Args a) {
  if (!a[0]->is(Tag::Str)) return type_error();
  std::u32string cps = utf8::decode_valid(a[0]->as_str());
  return Value::int_array(std::vector<std::int64_t>(cps.begin(), cps.end()));
}

bool scalar(std::int64_t cp) {
  return cp >= 0 && cp <= 0x10FFFF && utf8::is_scalar(static_cast<char32_t>(cp));
}

Value enc_utf8(Args a) {
  if (!a[0]->is(Tag::IntArray)) return type_error();
  std::string out;
  for (std::int64_t cp : a[0]->as_int_array()) {
    if (!scalar(cp)) return Value::error("codepoint");
    utf8::append(out, static_cast<char32_t>(cp));
  }
  return Value::bytes(std::move(out));
}

void push_be16(std::string& out, std::uint32_t u) {
  out.push_back(static_cast<char>((u >> 8) & 0xFF));
  out.push_back(static_cast<char>(u & 0xFF));
}

Value enc_utf16(Args a) {
  if (!a[0]->is(Tag::IntArray)) return type_error();
  std::string out;
  for (std::int64_t cp : a[0]->as_int_array()) {
    if (!scalar(cp)) return Value::error("codepoint");
    auto u = static_cast<std::uint32_t>(cp);
    if (u < 0x10000) {
      push_be16(out, u);
    } else {
      u -= 0x10000;
      push_be16(out, 0xD800 + (u >> 10));
      push_be16(out, 0xDC00 + (u & 0x3FF));
    }
  }
  return Value::bytes(std::move(out));
}

Value enc_utf32(Args a) {
  if (!a[0]->is(Tag::IntArray)) return type_error();
  std::string out;
  for (std::int64_t cp : a[0]->as_int_array()) {
    if (!scalar(cp)) return Value::error("codepoint");
    auto u = static_cast<std::uint32_t>(cp);
    push_be16(out, u >> 16);
    push_be16(out, u & 0xFFFF);
  }
  return Value::bytes(std::move(out));
}

Value dec_utf8(Args a) {
  if (!a[0]->is(Tag::Bytes)) return type_error();
  auto cps = utf8::decode(a[0]->as_bytes());
  if (!cps) return Value::error("utf8");
  return Value::int_array(std::vector<std::int64_t>(cps->begin(), cps->end()));
}

Value dec_utf16(Args a) {
  if (!a[0]->is(Tag::Bytes)) return type_error();
  const std::string& b = a[0]->as_bytes();
  if (b.size() % 2 != 0) return Value::error("utf16");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < b.size(); i += 2) {
    std::uint32_t u = (static_cast<unsigned char>(b[i]) << 8) | static_cast<unsigned char>(b[i + 1]);
    if (u >= 0xD800 && u <= 0xDBFF) {
      if (i + 3 >= b.size()) return Value::error("utf16");
      std::uint32_t lo = (static_cast<unsigned char>(b[i + 2]) << 8) |
                         static_cast<unsigned char>(b[i + 3]);
      if (lo < 0xDC00 || lo > 0xDFFF) return Value::error("utf16");
      out.push_back(0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00));
      i += 2;
    } else if (u >= 0xDC00 && u <= 0xDFFF) {
      return Value::error("utf16");
    } else {
      out.push_back(u);
    }
  }
  return Value::int_array(std::move(out));
}

Value dec_utf32(Args a) {
  if (!a[0]->is(Tag::Bytes)) return type_error();
  const std::string& b = a[0]->as_bytes();
  if (b.size() % 4 != 0) return Value::error("utf32");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < b.size(); i += 4) {
    std::int64_t u = 0;
    for (std::size_t k = 0; k < 4; ++k) u = (u << 8) | static_cast<unsigned char>(b[i + k]);
    if (!scalar(u)) return Value::error("utf32");
    out.push_back(u);
  }
  return Value::int_array(std::move(out));
}

Value as_unicode(Args a) {
  if (!a[0]->is(Tag::IntArray)) return type_error();
  std::string out;
  for (std::int64_t cp : a[0]->as_int_array()) {
    if (!scalar(cp)) return Value::error("codepoint");
    utf8::append(out, static_cast<char32_t>(cp));
  }
  return Value::str(std::move(out));
}

// ---- bit regrouping ------------------------------------------------------

// Concatenates all 8-bit bytes and splits into `num`-bit groups; the last
// group is zero-filled on the right.
Value reshape(Args a) {
  if (!a[0]->is(Tag::Bytes) || !a[1]->is(Tag::Int)) return type_error();
  if (!small_num(*a[1], 1, 8)) return Value::error("range");
  const auto num = static_cast<unsigned>(a[1]->as_int());
  const std::string& in = a[0]->as_bytes();
  std::string out;
  std::uint32_t acc = 0;
  unsigned bits = 0;
  for (unsigned char byte : in) {
    acc = (acc << 8) | byte;
    bits += 8;
    while (bits >= num) {
      bits -= num;
      out.push_back(static_cast<char>((acc >> bits) & ((1u << num) - 1)));
    }
    acc &= (1u << bits) - 1;
  }
  if (bits > 0) out.push_back(static_cast<char>((acc << (num - bits)) & ((1u << num) - 1)));
  return Value::bytes(std::move(out));
}

// Takes the `num` low bits of every byte and regroups them into bytes;
// an incomplete trailing byte is dropped.
Value inv_reshape(Args a) {
  if (!a[0]->is(Tag::Bytes) || !a[1]->is(Tag::Int)) return type_error();
  if (!small_num(*a[1], 1, 8)) return Value::error("range");
  const auto num = static_cast<unsigned>(a[1]->as_int());
  std::string out;
  std::uint32_t acc = 0;
  unsigned bits = 0;
  for (unsigned char byte : a[0]->as_bytes()) {
    acc = (acc << num) | (byte & ((1u << num) - 1));
    bits += num;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((acc >> bits) & 0xFF));
      acc &= (1u << bits) - 1;
    }
  }
  return Value::bytes(std::move(out));
}

// ---- mappers ---------------------------------------------------------------

template <const std::string_view& Alphabet>
Value enc_map(Args a) {
  if (!a[0]->is(Tag::Bytes)) return type_error();
  std::string out;
  out.reserve(a[0]->as_bytes().size());
  for (unsigned char b : a[0]->as_bytes()) {
    if (b >= Alphabet.size()) return Value::error("alphabet");
    out.push_back(Alphabet[b]);
  }
  return Value::str(std::move(out));
}

template <const std::string_view& Alphabet>
Value dec_map(Args a) {
  if (!a[0]->is(Tag::Str)) return type_error();
  std::string out;
  out.reserve(a[0]->as_str().size());
  for (char c : a[0]->as_str()) {
    auto i = Alphabet.find(c);
    if (i == std::string_view::npos) return Value::error("alphabet");
    out.push_back(static_cast<char>(i));
  }
  return Value::bytes(std::move(out));
}

// uuencode: 0 is written as '`', other values as value + 32.
Value enc_uu(Args a) {
  if (!a[0]->is(Tag::Bytes)) return type_error();
  std::string out;
  for (unsigned char b : a[0]->as_bytes()) {
    if (b >= 64) return Value::error("alphabet");
    out.push_back(b == 0 ? '`' : static_cast<char>(b + 32));
  }
  return Value::str(std::move(out));
}

Value dec_uu(Args a) {
  if (!a[0]->is(Tag::Str)) return type_error();
  std::string out;
  for (char c : a[0]->as_str()) {
    if (c == '`' || c == ' ') {
      out.push_back(0);
    } else if (c > ' ' && c < '`') {
      out.push_back(static_cast<char>(c - 32));
    } else {
      return Value::error("alphabet");
    }
  }
  return Value::bytes(std::move(out));
}

// ---- text shaping ----------------------------------------------------------

Value pad_to_multiple(Args a) {
  if (!a[0]->is(Tag::Str) || !a[1]->is(Tag::Int) || !a[2]->is(Tag::Char)) return type_error();
  if (a[1]->as_int() < 1) return Value::error("range");
  std::string out = a[0]->as_str();
  auto len = static_cast<std::int64_t>(utf8::length(out));
  const std::int64_t num = a[1]->as_int();
  std::string pad = utf8::encode(a[2]->as_char());
  for (std::int64_t k = (num - len % num) % num; k > 0; --k) out += pad;
  return Value::str(std::move(out));
}

Value header(Args a) {
  if (!a[0]->is(Tag::Str)) return type_error();
  const std::string& s = a[0]->as_str();
  return Value::str(std::to_string(utf8::length(s)) + ":" + s);
}

Value remove_pad(Args a) {
  if (!a[0]->is(Tag::Str) || !a[1]->is(Tag::Char)) return type_error();
  std::u32string cps = utf8::decode_valid(a[0]->as_str());
  while (!cps.empty() && cps.back() == a[1]->as_char()) cps.pop_back();
  return Value::str(utf8::encode_all(cps));
}

Value substr_from(Args a) {
  if (!a[0]->is(Tag::Str) || !a[1]->is(Tag::Int)) return type_error();
  std::u32string cps = utf8::decode_valid(a[0]->as_str());
  std::int64_t from = a[1]->as_int();
  if (from < 0 || from > static_cast<std::int64_t>(cps.size())) return Value::error("substr");
  return Value::str(utf8::encode_all(std::u32string_view(cps).substr(static_cast<std::size_t>(from))));
}

}  // namespace

void add_codec_semantics(std::vector<Constructor>& out) {
  out.push_back({"codePoint", 1, code_point});
  out.push_back({"encUTF8", 1, enc_utf8});
  out.push_back({"encUTF16", 1, enc_utf16});
  out.push_back({"encUTF32", 1, enc_utf32});
  out.push_back({"reshape", 2, reshape});
  out.push_back({"enc16", 1, enc_map<kBase16>});
  out.push_back({"enc32", 1, enc_map<kBase32>});
  out.push_back({"enc32Hex", 1, enc_map<kBase32Hex>});
  out.push_back({"enc64", 1, enc_map<kBase64>});
  out.push_back({"enc64XML", 1, enc_map<kBase64Xml>});
  out.push_back({"encUU", 1, enc_uu});
  out.push_back({"padToMultiple", 3, pad_to_multiple});
  out.push_back({"header", 1, header});

  out.push_back({"asUnicode", 1, as_unicode});
  out.push_back({"decUTF8", 1, dec_utf8});
  out.push_back({"decUTF16", 1, dec_utf16});
  out.push_back({"decUTF32", 1, dec_utf32});
  out.push_back({"invReshape", 2, inv_reshape});
  out.push_back({"dec16", 1, dec_map<kBase16>});
  out.push_back({"dec32", 1, dec_map<kBase32>});
  out.push_back({"dec32Hex", 1, dec_map<kBase32Hex>});
  out.push_back({"dec64", 1, dec_map<kBase64>});
  out.push_back({"dec64XML", 1, dec_map<kBase64Xml>});
  out.push_back({"decUU", 1, dec_uu});
  out.push_back({"removePad", 2, remove_pad});
  out.push_back({"substr", 2, substr_from});
}

}  // namespace relsynth::detail

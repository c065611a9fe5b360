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

// Small integer/boolean toolkit used by toy grammars and tests.

#include "semantics.hpp"

namespace relsynth::detail {
namespace {

bool ints(Args a) {
  for (const Value* v : a) {
    if (!v->is(Tag::Int)) return false;
  }
  return true;
}

template <typename Op>
Value checked(Op op) {
  std::int64_t r = 0;
  return op(r) ? Value::error("overflow") : Value::integer(r);
}

Value plus(Args a) {
  if (!ints(a)) return type_error();
  return checked([&](std::int64_t& r) { return __builtin_add_overflow(a[0]->as_int(), a[1]->as_int(), &r); });
}

Value minus(Args a) {
  if (!ints(a)) return type_error();
  return checked([&](std::int64_t& r) { return __builtin_sub_overflow(a[0]->as_int(), a[1]->as_int(), &r); });
}

Value times(Args a) {
  if (!ints(a)) return type_error();
  return checked([&](std::int64_t& r) { return __builtin_mul_overflow(a[0]->as_int(), a[1]->as_int(), &r); });
}

Value inc(Args a) {
  if (!ints(a)) return type_error();
  return checked([&](std::int64_t& r) { return __builtin_add_overflow(a[0]->as_int(), std::int64_t{1}, &r); });
}

Value dbl(Args a) {
  if (!ints(a)) return type_error();
  return checked([&](std::int64_t& r) { return __builtin_mul_overflow(a[0]->as_int(), std::int64_t{2}, &r); });
}

Value logic_and(Args a) {
  if (!a[0]->is(Tag::Bool) || !a[1]->is(Tag::Bool)) return type_error();
  return Value::boolean(a[0]->as_bool() && a[1]->as_bool());
}

Value logic_or(Args a) {
  if (!a[0]->is(Tag::Bool) || !a[1]->is(Tag::Bool)) return type_error();
  return Value::boolean(a[0]->as_bool() || a[1]->as_bool());
}

Value logic_not(Args a) {
  if (!a[0]->is(Tag::Bool)) return type_error();
  return Value::boolean(!a[0]->as_bool());
}

}  // namespace

void add_arith_semantics(std::vector<Constructor>& out) {
  out.push_back({"plus", 2, plus});
  out.push_back({"minus", 2, minus});
  out.push_back({"times", 2, times});
  out.push_back({"inc", 1, inc});
  out.push_back({"dbl", 1, dbl});
  out.push_back({"and", 2, logic_and});
  out.push_back({"or", 2, logic_or});
  out.push_back({"not", 1, logic_not});
}

}  // namespace relsynth::detail

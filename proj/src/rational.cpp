// Copyright 2026 The lobmix Authors. All Rights Reserved.
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

#include "lobmix/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace lobmix {

namespace {

__extension__ typedef unsigned __int128 u128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational reduce(u128 num, u128 den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  const u128 g = num == 0 ? den : gcd128(num, den);
  num /= g;
  den /= g;
  constexpr u128 limit = static_cast<u128>(UINT64_MAX);
  if (num > limit || den > limit) throw std::overflow_error("Rational: 64-bit overflow");
  return Rational(static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den));
}

}  // namespace

Rational::Rational(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  const std::uint64_t g = num == 0 ? den : std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::str() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  const std::uint64_t g = std::gcd(a.den_, b.den_);
  const u128 lhs = static_cast<u128>(a.num_) * (b.den_ / g);
  const u128 rhs = static_cast<u128>(b.num_) * (a.den_ / g);
  if (lhs > ~static_cast<u128>(0) - rhs) throw std::overflow_error("Rational: 128-bit overflow");
  return reduce(lhs + rhs, static_cast<u128>(a.den_) * (b.den_ / g));
}

Rational operator*(const Rational& a, const Rational& b) {
  return reduce(static_cast<u128>(a.num_) * b.num_, static_cast<u128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
  return reduce(static_cast<u128>(a.num_) * b.den_, static_cast<u128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return static_cast<u128>(a.num_) * b.den_ <=> static_cast<u128>(b.num_) * a.den_;
}

}  // namespace lobmix

// Copyright 2026 The kmedkit Authors.
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

// Exact rational arithmetic helpers and an extended value with +infinity.

#ifndef KMEDKIT_RATIONAL_H_
#define KMEDKIT_RATIONAL_H_

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace kmedkit {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument on bad input.
Rational ParseRational(std::string_view text);

// Canonical "p/q" form; integers are written as "p/1".
std::string FormatRational(const Rational& value);

// p / q in canonical form. The two-argument mpq_class constructor does not
// reduce. Requires q != 0.
Rational Fraction(long p, long q);

Rational Pow(const Rational& base, unsigned long exponent);
Integer Ceil(const Rational& value);
Integer Floor(const Rational& value);
Rational PositivePart(const Rational& value);

// Approximate value for logging and phase estimates only.
double ToDouble(const Rational& value);

// A non-negative rational or +infinity. Used for d(j, S) before S is
// nonempty.
class ExtRational {
 public:
  ExtRational() : infinite_(true) {}
  ExtRational(const Rational& value) : infinite_(false), value_(value) {}

  static ExtRational Infinity() { return ExtRational(); }

  bool infinite() const { return infinite_; }
  const Rational& value() const { return value_; }

  bool operator<(const ExtRational& other) const;
  bool operator==(const ExtRational& other) const;
  bool operator<=(const ExtRational& other) const { return !(other < *this); }
  bool operator>(const ExtRational& other) const { return other < *this; }
  bool operator>=(const ExtRational& other) const { return !(*this < other); }
  bool operator!=(const ExtRational& other) const { return !(*this == other); }

  // Multiplication by a positive finite scalar.
  ExtRational Scaled(const Rational& factor) const;

 private:
  bool infinite_;
  Rational value_;
};

inline bool operator<(const Rational& a, const ExtRational& b) {
  return ExtRational(a) < b;
}
inline bool operator<=(const Rational& a, const ExtRational& b) {
  return ExtRational(a) <= b;
}
inline bool operator>=(const Rational& a, const ExtRational& b) {
  return ExtRational(a) >= b;
}

const ExtRational& Min(const ExtRational& a, const ExtRational& b);

}  // namespace kmedkit

#endif  // KMEDKIT_RATIONAL_H_

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

#include "kmedkit/rational.h"

#include <cctype>
#include <stdexcept>
#include <string>

namespace kmedkit {

namespace {

bool IsIntegerText(std::string_view text) {
  if (text.empty()) return false;
  size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) return false;
  for (size_t i = start; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  return true;
}

}  // namespace

Rational ParseRational(std::string_view text) {
  const size_t slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1")
                                      : text.substr(slash + 1);
  if (!IsIntegerText(num) || !IsIntegerText(den) || den[0] == '-' ||
      den[0] == '+') {
    throw std::invalid_argument("malformed rational: " + std::string(text));
  }
  Integer p(std::string(num[0] == '+' ? num.substr(1) : num));
  Integer q{std::string(den)};
  if (q == 0) {
    throw std::invalid_argument("zero denominator: " + std::string(text));
  }
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string FormatRational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational Fraction(long p, long q) {
  Rational out(p, q);
  out.canonicalize();
  return out;
}

Rational Pow(const Rational& base, unsigned long exponent) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer Ceil(const Rational& value) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

Integer Floor(const Rational& value) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return out;
}

Rational PositivePart(const Rational& value) {
  return sgn(value) > 0 ? value : Rational(0);
}

double ToDouble(const Rational& value) { return value.get_d(); }

bool ExtRational::operator<(const ExtRational& other) const {
  if (infinite_) return false;
  if (other.infinite_) return true;
  return value_ < other.value_;
}

bool ExtRational::operator==(const ExtRational& other) const {
  if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
  return value_ == other.value_;
}

ExtRational ExtRational::Scaled(const Rational& factor) const {
  if (infinite_) return *this;
  return ExtRational(Rational(value_ * factor));
}

const ExtRational& Min(const ExtRational& a, const ExtRational& b) {
  return b < a ? b : a;
}

}  // namespace kmedkit

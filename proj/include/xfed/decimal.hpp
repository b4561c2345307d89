// Copyright 2026 The xfed Authors
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

#ifndef XFED_DECIMAL_HPP
#define XFED_DECIMAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace xfed {

// Exact signed decimal: units * 10^-scale, scale >= 0. Canonical form has no
// trailing fractional zeros and no negative zero. Mantissa is 128-bit, so
// sums over desk-scale data never overflow (inputs are capped at 30 digits).
class Decimal {
 public:
  Decimal() : units_(0), scale_(0) {}
  Decimal(__int128 units, int scale);

  // Accepts [+-]?digits[.digits] with at least one digit overall and at most
  // 30 digits total. Returns nullopt otherwise.
  static std::optional<Decimal> parse(std::string_view text);

  // True when text parses and re-renders to exactly the same bytes; such
  // values are what the wire encoding marks as decimal-typed.
  static bool is_canonical(std::string_view text);

  std::string to_string() const;

  int compare(const Decimal& o) const;  // <0, 0, >0
  Decimal plus(const Decimal& o) const;

  // Exact quotient when it terminates within max_frac_digits fractional
  // digits, else rounded half-up at max_frac_digits. divisor must be nonzero.
  Decimal divided_by(const Decimal& o, int max_frac_digits = 12) const;

  bool is_zero() const { return units_ == 0; }
  __int128 units() const { return units_; }
  int scale() const { return scale_; }

  static Decimal from_int(long long v) { return Decimal(v, 0); }

 private:
  void normalize();

  __int128 units_;
  int scale_;
};

}  // namespace xfed

#endif  // XFED_DECIMAL_HPP

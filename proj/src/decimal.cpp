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

#include "xfed/decimal.hpp"

#include <stdexcept>

namespace xfed {

namespace {

__int128 pow10_128(int n) {
  __int128 v = 1;
  for (int i = 0; i < n; ++i) v *= 10;
  return v;
}

void append_u128(unsigned __int128 v, std::string& out) {
  char buf[48];
  int n = 0;
  do {
    buf[n++] = char('0' + int(v % 10));
    v /= 10;
  } while (v);
  while (n) out.push_back(buf[--n]);
}

}  // namespace

Decimal::Decimal(__int128 units, int scale) : units_(units), scale_(scale) {
  if (scale < 0) throw std::invalid_argument("decimal: negative scale");
  normalize();
}

void Decimal::normalize() {
  while (scale_ > 0 && units_ % 10 == 0) {
    units_ /= 10;
    --scale_;
  }
  if (units_ == 0) scale_ = 0;
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  __int128 units = 0;
  int digits = 0, scale = 0;
  bool seen_dot = false, seen_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    if (++digits > 30) return std::nullopt;
    units = units * 10 + (c - '0');
    if (seen_dot) ++scale;
  }
  if (!seen_digit) return std::nullopt;
  if (neg) units = -units;
  return Decimal(units, scale);
}

bool Decimal::is_canonical(std::string_view text) {
  auto d = parse(text);
  return d && d->to_string() == text;
}

std::string Decimal::to_string() const {
  std::string out;
  unsigned __int128 mag =
      units_ < 0 ? (unsigned __int128)(-(units_ + 1)) + 1 : (unsigned __int128)units_;
  if (units_ < 0) out.push_back('-');
  if (scale_ == 0) {
    append_u128(mag, out);
    return out;
  }
  std::string digits;
  append_u128(mag, digits);
  while ((int)digits.size() <= scale_) digits.insert(digits.begin(), '0');
  out += digits.substr(0, digits.size() - scale_);
  out.push_back('.');
  out += digits.substr(digits.size() - scale_);
  return out;
}

int Decimal::compare(const Decimal& o) const {
  int s = std::max(scale_, o.scale_);
  __int128 a = units_ * pow10_128(s - scale_);
  __int128 b = o.units_ * pow10_128(s - o.scale_);
  return a < b ? -1 : a > b ? 1 : 0;
}

Decimal Decimal::plus(const Decimal& o) const {
  int s = std::max(scale_, o.scale_);
  __int128 a = units_ * pow10_128(s - scale_);
  __int128 b = o.units_ * pow10_128(s - o.scale_);
  return Decimal(a + b, s);
}

Decimal Decimal::divided_by(const Decimal& o, int max_frac_digits) const {
  if (o.units_ == 0) throw std::invalid_argument("decimal: division by zero");
  // Long division on magnitudes, one decimal digit at a time.
  bool neg = (units_ < 0) != (o.units_ < 0);
  unsigned __int128 num =
      units_ < 0 ? (unsigned __int128)(-(units_ + 1)) + 1 : (unsigned __int128)units_;
  unsigned __int128 den =
      o.units_ < 0 ? (unsigned __int128)(-(o.units_ + 1)) + 1 : (unsigned __int128)o.units_;
  // Scale alignment: this/o = (num * 10^o.scale) / (den * 10^scale).
  for (int i = 0; i < o.scale_; ++i) num *= 10;
  for (int i = 0; i < scale_; ++i) den *= 10;

  __int128 q = (__int128)(num / den);
  unsigned __int128 rem = num % den;
  int frac = 0;
  __int128 result = q;
  while (rem != 0 && frac < max_frac_digits) {
    rem *= 10;
    result = result * 10 + (__int128)(rem / den);
    rem %= den;
    ++frac;
  }
  if (rem != 0) {
    // Round half-up on the digit past the cap.
    rem *= 10;
    if (rem / den >= 5) result += 1;
  }
  if (neg) result = -result;
  return Decimal(result, frac);
}

}  // namespace xfed

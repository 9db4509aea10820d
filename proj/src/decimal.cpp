// Copyright 2026 The Cellstore Authors
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

#include "cellstore/decimal.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>

#include "cellstore/error.hpp"

namespace cellstore {

namespace mp = boost::multiprecision;
using BigInt = mp::cpp_int;

namespace {

BigInt pow10(int n) {
  BigInt r = 1;
  static const BigInt ten = 10;
  for (int i = 0; i < n; ++i) r *= ten;
  return r;
}

int digit_count(BigInt v) {
  if (v < 0) v = -v;
  if (v == 0) return 1;
  return static_cast<int>(v.str().size());
}

__int128 to_i128(const BigInt& v) {
  // |v| < 10^34 is guaranteed by callers, which fits comfortably.
  const bool neg = v < 0;
  BigInt m = neg ? BigInt(-v) : v;
  auto lo = static_cast<std::uint64_t>(m & BigInt(0xFFFFFFFFFFFFFFFFULL));
  auto hi = static_cast<std::uint64_t>(m >> 64);
  auto u = (static_cast<unsigned __int128>(hi) << 64) | lo;
  auto r = static_cast<__int128>(u);
  return neg ? -r : r;
}

BigInt to_big(__int128 v) {
  const bool neg = v < 0;
  auto u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return neg ? BigInt(-r) : r;
}

}  // namespace

struct DecimalAccess {
  /// Rounds to kPrecision digits (half-to-even, `sticky` marks discarded
  /// non-zero digits below `coef`), strips trailing zeros, range-checks.
  static Decimal make(BigInt coef, long long exponent, bool sticky = false) {
    const bool neg = coef < 0;
    if (neg) coef = -coef;
    int nd = digit_count(coef);
    if (nd > Decimal::kPrecision) {
      const int drop = nd - Decimal::kPrecision;
      BigInt div = pow10(drop);
      BigInt q, r;
      mp::divide_qr(coef, div, q, r);
      BigInt twice = r * 2;
      bool round_up = false;
      if (twice > div) {
        round_up = true;
      } else if (twice == div) {
        round_up = sticky || (q & 1) != 0;
      }
      if (round_up) q += 1;
      coef = q;
      exponent += drop;
      if (digit_count(coef) > Decimal::kPrecision) {
        coef /= 10;
        exponent += 1;
      }
    }
    if (coef == 0) return Decimal();
    static const BigInt ten = 10;
    while (coef % ten == 0) {
      coef /= ten;
      ++exponent;
    }
    const long long adjusted = exponent + digit_count(coef) - 1;
    if (adjusted > Decimal::kMaxExponent) fail(ErrorCode::Overflow, "decimal overflow");
    if (adjusted < -Decimal::kMaxExponent) return Decimal();
    __int128 c = to_i128(coef);
    return Decimal(neg ? -c : c, static_cast<int>(exponent));
  }
};

Decimal::Decimal(std::int64_t value) {
  *this = DecimalAccess::make(BigInt(value), 0);
}

int Decimal::digits() const noexcept {
  unsigned __int128 u = coefficient_ < 0 ? static_cast<unsigned __int128>(-coefficient_)
                                         : static_cast<unsigned __int128>(coefficient_);
  int n = 1;
  while (u >= 10) {
    u /= 10;
    ++n;
  }
  return n;
}

std::optional<Decimal> Decimal::try_parse(std::string_view text) noexcept {
  try {
    return parse(text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

Decimal Decimal::parse(std::string_view text) {
  auto bad = [&]() -> Decimal {
    fail(ErrorCode::BadCanonicalForm, "not a decimal number: '" + std::string(text) + "'");
  };
  std::size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::string digits;
  long long exponent = 0;
  bool any = false;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits.push_back(text[i++]);
    any = true;
  }
  if (!any) return bad();
  if (i < text.size() && text[i] == '.') {
    ++i;
    bool fraction = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits.push_back(text[i++]);
      --exponent;
      fraction = true;
    }
    if (!fraction) return bad();
  }
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      eneg = text[i] == '-';
      ++i;
    }
    if (i == text.size()) return bad();
    long long e = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i++] - '0');
      if (e > 10LL * kMaxExponent) return bad();
    }
    exponent += eneg ? -e : e;
  }
  if (i != text.size()) return bad();
  // Leading zeros carry no information and would bloat the big integer.
  auto first = digits.find_first_not_of('0');
  if (first == std::string::npos) return Decimal();
  digits.erase(0, first);
  // Digits below the precision only matter for rounding.
  bool sticky = false;
  if (static_cast<int>(digits.size()) > kPrecision + 2) {
    const auto keep = static_cast<std::size_t>(kPrecision + 2);
    sticky = digits.find_first_not_of('0', keep) != std::string::npos;
    exponent += static_cast<long long>(digits.size() - keep);
    digits.resize(keep);
  }
  BigInt coef(digits);
  if (neg) coef = -coef;
  return DecimalAccess::make(coef, exponent, sticky);
}

std::string Decimal::to_string() const {
  if (coefficient_ == 0) return "0";
  std::string digits = to_big(coefficient_ < 0 ? -coefficient_ : coefficient_).str();
  std::string out = coefficient_ < 0 ? "-" : "";
  const int nd = static_cast<int>(digits.size());
  const int adjusted = exponent_ + nd - 1;
  if (adjusted > 60 || adjusted < -30) {
    out += digits[0];
    if (nd > 1) {
      out += '.';
      out += digits.substr(1);
    }
    out += 'E';
    out += adjusted < 0 ? '-' : '+';
    out += std::to_string(std::abs(adjusted));
    return out;
  }
  if (exponent_ >= 0) {
    out += digits;
    out.append(static_cast<std::size_t>(exponent_), '0');
  } else if (-exponent_ < nd) {
    out += digits.substr(0, static_cast<std::size_t>(nd + exponent_));
    out += '.';
    out += digits.substr(static_cast<std::size_t>(nd + exponent_));
  } else {
    out += "0.";
    out.append(static_cast<std::size_t>(-exponent_ - nd), '0');
    out += digits;
  }
  return out;
}

Decimal Decimal::abs() const noexcept {
  Decimal r = *this;
  if (r.coefficient_ < 0) r.coefficient_ = -r.coefficient_;
  return r;
}

Decimal Decimal::operator-() const noexcept {
  Decimal r = *this;
  r.coefficient_ = -r.coefficient_;
  return r;
}

namespace {

Decimal add_impl(const Decimal& a, const Decimal& b, bool subtract) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return subtract ? -b : b;
  const int ea = a.exponent();
  const int eb = b.exponent();
  const int lo = std::min(ea, eb);
  // Bound the alignment: when one operand is entirely below the other's
  // rounding position, it only contributes a sticky digit.
  const int adj_a = ea + a.digits() - 1;
  const int adj_b = eb + b.digits() - 1;
  const int top = std::max(adj_a, adj_b);
  const int floor = top - Decimal::kPrecision - 3;
  if (adj_a < floor || adj_b < floor) {
    const bool a_small = adj_a < floor;
    const Decimal& big = a_small ? b : a;
    const Decimal& small = a_small ? a : b;
    const int sign_small = (small.is_negative() ? -1 : 1) * ((subtract && !a_small) ? -1 : 1);
    const int sign_big = (subtract && a_small) ? -1 : 1;
    // Scale the big operand to floor and nudge by one unit in the direction
    // of the small operand, which rounds identically to the exact sum.
    BigInt coef = to_big(big.coefficient()) * pow10(big.exponent() - floor) * sign_big;
    coef = coef * 10 + sign_small;
    return DecimalAccess::make(coef, static_cast<long long>(floor) - 1);
  }
  BigInt ca = to_big(a.coefficient()) * pow10(ea - lo);
  BigInt cb = to_big(b.coefficient()) * pow10(eb - lo);
  return DecimalAccess::make(subtract ? BigInt(ca - cb) : BigInt(ca + cb), lo);
}

}  // namespace

Decimal operator+(const Decimal& a, const Decimal& b) { return add_impl(a, b, false); }
Decimal operator-(const Decimal& a, const Decimal& b) { return add_impl(a, b, true); }

Decimal operator*(const Decimal& a, const Decimal& b) {
  return DecimalAccess::make(to_big(a.coefficient_) * to_big(b.coefficient_),
                             static_cast<long long>(a.exponent_) + b.exponent_);
}

Decimal operator/(const Decimal& a, const Decimal& b) {
  if (b.is_zero()) fail(ErrorCode::DivisionByZero, "division by zero");
  if (a.is_zero()) return Decimal();
  const int scale = Decimal::kPrecision + b.digits() - a.digits() + 2;
  BigInt num = to_big(a.coefficient_);
  BigInt den = to_big(b.coefficient_);
  if (scale > 0) num *= pow10(scale);
  BigInt q, r;
  mp::divide_qr(num, den, q, r);
  const long long exponent = static_cast<long long>(a.exponent_) - b.exponent_ - std::max(scale, 0);
  return DecimalAccess::make(q, exponent, r != 0);
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) noexcept {
  const int sa = a.coefficient_ < 0 ? -1 : (a.coefficient_ > 0 ? 1 : 0);
  const int sb = b.coefficient_ < 0 ? -1 : (b.coefficient_ > 0 ? 1 : 0);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  const int adj_a = a.exponent_ + a.digits() - 1;
  const int adj_b = b.exponent_ + b.digits() - 1;
  if (adj_a != adj_b) return sa > 0 ? adj_a <=> adj_b : adj_b <=> adj_a;
  // Same magnitude order: aligning needs at most kPrecision digits.
  const int lo = std::min(a.exponent_, b.exponent_);
  BigInt ca = to_big(a.coefficient_) * pow10(a.exponent_ - lo);
  BigInt cb = to_big(b.coefficient_) * pow10(b.exponent_ - lo);
  if (ca < cb) return std::strong_ordering::less;
  if (ca > cb) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t Decimal::hash() const noexcept {
  auto u = static_cast<unsigned __int128>(coefficient_);
  std::size_t h = std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(u));
  h ^= std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(u >> 64)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<int>{}(exponent_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace cellstore

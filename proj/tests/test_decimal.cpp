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

#include <doctest.h>

#include <random>

#include "cellstore/decimal.hpp"
#include "cellstore/error.hpp"

using cellstore::Decimal;
using cellstore::ErrorCode;

TEST_CASE("decimal canonical text") {
  CHECK(Decimal::parse("4000000000").to_string() == "4000000000");
  CHECK(Decimal::parse("1.500").to_string() == "1.5");
  CHECK(Decimal::parse("-0.000").to_string() == "0");
  CHECK(Decimal::parse("+12e3").to_string() == "12000");
  CHECK(Decimal::parse("1.25E-2").to_string() == "0.0125");
  CHECK(Decimal::parse("1e70").to_string() == "1E+70");
  CHECK(Decimal::parse("123e-40").to_string() == "1.23E-38");
  CHECK(Decimal::parse("1.50") == Decimal::parse("1.5"));
  CHECK_FALSE(Decimal::try_parse("1.").has_value());
  CHECK_FALSE(Decimal::try_parse("abc").has_value());
  CHECK_FALSE(Decimal::try_parse("").has_value());
  CHECK_THROWS(Decimal::parse("1e999999"));
}

TEST_CASE("decimal arithmetic is exact") {
  CHECK(Decimal::parse("0.1") + Decimal::parse("0.2") == Decimal::parse("0.3"));
  CHECK(Decimal(3000000000) - Decimal(2000000000) == Decimal(1000000000));
  CHECK(Decimal::parse("1.5") * Decimal::parse("-2") == Decimal(-3));
  CHECK((Decimal(1) / Decimal(4)).to_string() == "0.25");
  CHECK((Decimal(2) / Decimal(3)).to_string() == "0.6666666666666666666666666666666667");
  try {
    (void)(Decimal(1) / Decimal(0));
    FAIL("expected DivisionByZero");
  } catch (const cellstore::Error& e) {
    CHECK(e.code() == ErrorCode::DivisionByZero);
  }
}

TEST_CASE("decimal addition matches integer oracle") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> d(-1'000'000'000'000LL, 1'000'000'000'000LL);
  for (int i = 0; i < 2000; ++i) {
    const auto a = d(rng), b = d(rng);
    CHECK(Decimal(a) + Decimal(b) == Decimal(a + b));
    CHECK((Decimal(a) <=> Decimal(b)) == (a <=> b));
    // Scaled by 10^-3 the same identities hold.
    const auto s = Decimal::parse("0.001");
    CHECK(Decimal(a) * s + Decimal(b) * s == Decimal(a + b) * s);
  }
}

TEST_CASE("decimal rounding is half even at 34 digits") {
  const auto big = Decimal::parse("1234567890123456789012345678901234");  // 34 digits
  CHECK((big + Decimal::parse("0.5")).to_string() == "1234567890123456789012345678901234");
  CHECK((big + Decimal::parse("1.5")).to_string() == "1234567890123456789012345678901236");
  CHECK((big + Decimal::parse("0.5000001")).to_string() == "1234567890123456789012345678901235");
}

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

#include "cellstore/aspect_value.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "cellstore/error.hpp"

namespace cellstore {

std::string_view to_string(ValueKind kind) noexcept {
  switch (kind) {
    case ValueKind::Text: return "text";
    case ValueKind::Number: return "number";
    case ValueKind::Date: return "date";
    case ValueKind::DateTime: return "dateTime";
    case ValueKind::Boolean: return "boolean";
  }
  return "text";
}

std::optional<ValueKind> parse_kind(std::string_view name) noexcept {
  if (name == "text" || name == "string") return ValueKind::Text;
  if (name == "number" || name == "decimal") return ValueKind::Number;
  if (name == "date") return ValueKind::Date;
  if (name == "dateTime" || name == "datetime") return ValueKind::DateTime;
  if (name == "boolean" || name == "bool") return ValueKind::Boolean;
  return std::nullopt;
}

namespace {

[[noreturn]] void bad_form(std::string_view what, std::string_view text) {
  fail(ErrorCode::BadCanonicalForm,
       "not a valid " + std::string(what) + ": '" + std::string(text) + "'");
}

bool read_fixed(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return ec == std::errc() && ptr == text.data() + pos + width;
}

std::int32_t days_from_ymd(std::string_view what, std::string_view text, int y, int m, int d) {
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad_form(what, text);
  return static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_date(std::int32_t days) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  Date d;
  d.days_ = days_from_ymd("date", "", year, static_cast<int>(month), static_cast<int>(day));
  return d;
}

Date Date::parse(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !read_fixed(text, 0, 4, y) ||
      !read_fixed(text, 5, 2, m) || !read_fixed(text, 8, 2, d)) {
    bad_form("date", text);
  }
  return from_days(days_from_ymd("date", text, y, m, d));
}

std::string Date::to_string() const { return format_date(days_); }

DateTime DateTime::parse(std::string_view text) {
  int hh = 0, mi = 0, ss = 0;
  if (text.size() < 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':' ||
      !read_fixed(text, 11, 2, hh) || !read_fixed(text, 14, 2, mi) || !read_fixed(text, 17, 2, ss) ||
      hh > 23 || mi > 59 || ss > 59) {
    bad_form("dateTime", text);
  }
  Date date;
  try {
    date = Date::parse(text.substr(0, 10));
  } catch (const Error&) {
    bad_form("dateTime", text);
  }
  std::size_t pos = 19;
  std::int64_t fraction = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (digits < 6) fraction = fraction * 10 + (text[pos] - '0');
      else if (text[pos] != '0') bad_form("dateTime", text);  // sub-microsecond precision
      ++digits;
      ++pos;
    }
    if (digits == 0) bad_form("dateTime", text);
    for (int i = digits; i < 6; ++i) fraction *= 10;
  }
  std::int64_t offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] == 'Z' && pos + 1 == text.size()) {
      ++pos;
    } else if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
      int oh = 0, om = 0;
      if (!read_fixed(text, pos + 1, 2, oh) || !read_fixed(text, pos + 4, 2, om) || oh > 23 || om > 59) {
        bad_form("dateTime", text);
      }
      offset_minutes = (text[pos] == '-' ? -1 : 1) * (oh * 60 + om);
      pos = text.size();
    } else {
      bad_form("dateTime", text);
    }
  }
  const std::int64_t seconds = static_cast<std::int64_t>(date.days()) * 86400 + hh * 3600 + mi * 60 + ss -
                               offset_minutes * 60;
  return from_micros(seconds * 1000000 + fraction);
}

std::string DateTime::to_string() const {
  std::int64_t secs = micros_ / 1000000;
  std::int64_t frac = micros_ % 1000000;
  if (frac < 0) {
    frac += 1000000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d", format_date(static_cast<std::int32_t>(days)).c_str(),
                static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  std::string out = buf;
  if (frac != 0) {
    char fb[8];
    std::snprintf(fb, sizeof fb, "%06d", static_cast<int>(frac));
    std::string f = fb;
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += '.' + f;
  }
  out += 'Z';
  return out;
}

AspectValue AspectValue::parse(ValueKind kind, std::string_view text) {
  switch (kind) {
    case ValueKind::Text: return AspectValue(std::string(text));
    case ValueKind::Number: return AspectValue(Decimal::parse(text));
    case ValueKind::Date: return AspectValue(Date::parse(text));
    case ValueKind::DateTime: return AspectValue(DateTime::parse(text));
    case ValueKind::Boolean:
      if (text == "true") return boolean(true);
      if (text == "false") return boolean(false);
      bad_form("boolean", text);
  }
  bad_form("value", text);
}

std::string AspectValue::canonical() const {
  switch (kind()) {
    case ValueKind::Text: return as_text();
    case ValueKind::Number: return as_number().to_string();
    case ValueKind::Date: return as_date().to_string();
    case ValueKind::DateTime: return as_datetime().to_string();
    case ValueKind::Boolean: return as_boolean() ? "true" : "false";
  }
  return {};
}

std::strong_ordering AspectValue::compare(const AspectValue& other) const {
  if (kind() != other.kind()) {
    fail(ErrorCode::KindMismatch, "cannot compare " + std::string(to_string(kind())) + " with " +
                                      std::string(to_string(other.kind())));
  }
  switch (kind()) {
    case ValueKind::Text: return as_text().compare(other.as_text()) <=> 0;
    case ValueKind::Number: return as_number() <=> other.as_number();
    case ValueKind::Date: return as_date() <=> other.as_date();
    case ValueKind::DateTime: return as_datetime() <=> other.as_datetime();
    case ValueKind::Boolean: return as_boolean() <=> other.as_boolean();
  }
  return std::strong_ordering::equal;
}

std::size_t AspectValue::hash() const noexcept {
  std::size_t h = 0;
  switch (kind()) {
    case ValueKind::Text: h = std::hash<std::string>{}(as_text()); break;
    case ValueKind::Number: h = as_number().hash(); break;
    case ValueKind::Date: h = std::hash<std::int32_t>{}(as_date().days()); break;
    case ValueKind::DateTime: h = std::hash<std::int64_t>{}(as_datetime().micros()); break;
    case ValueKind::Boolean: h = as_boolean() ? 1 : 2; break;
  }
  return h * 31 + static_cast<std::size_t>(kind());
}

}  // namespace cellstore

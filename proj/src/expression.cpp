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

#include "cellstore/expression.hpp"

#include <algorithm>
#include <cctype>

#include "cellstore/error.hpp"

namespace cellstore {

struct Expression::Node {
  enum class Op { Literal, Name, Neg, Add, Sub, Mul, Div } op;
  Decimal literal;
  std::string name;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  std::shared_ptr<const Node> parse_all(std::vector<std::string>& names) {
    names_ = &names;
    auto n = sum();
    skip_space();
    if (pos_ != s_.size()) error("unexpected input");
    return n;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::BadRule, "expression column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  // Returns the binary operator at the cursor (consuming it) or nullopt.
  std::optional<Op> take_op(bool multiplicative) {
    skip_space();
    auto starts = [&](std::string_view tok) { return s_.substr(pos_, tok.size()) == tok; };
    struct Tok {
      std::string_view text;
      Op op;
      bool mul;
    };
    static constexpr Tok toks[] = {
        {"+", Op::Add, false}, {"-", Op::Sub, false}, {"\xE2\x88\x92", Op::Sub, false},
        {"*", Op::Mul, true},  {"/", Op::Div, true},  {"\xC3\x97", Op::Mul, true}, {"\xC3\xB7", Op::Div, true},
    };
    for (const auto& t : toks) {
      if (t.mul == multiplicative && starts(t.text)) {
        pos_ += t.text.size();
        return t.op;
      }
    }
    return std::nullopt;
  }

  std::shared_ptr<const Node> sum() {
    auto lhs = product();
    while (auto op = take_op(false)) lhs = binary(*op, lhs, product());
    return lhs;
  }

  std::shared_ptr<const Node> product() {
    auto lhs = unary();
    while (auto op = take_op(true)) lhs = binary(*op, lhs, unary());
    return lhs;
  }

  std::shared_ptr<const Node> unary() {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '+') {
      ++pos_;
      return unary();
    }
    if (pos_ < s_.size() && s_[pos_] == '-') {
      ++pos_;
      return negate(unary());
    }
    if (s_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      return negate(unary());
    }
    return primary();
  }

  std::shared_ptr<const Node> primary() {
    skip_space();
    if (pos_ >= s_.size()) error("expression ends early");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = sum();
      skip_space();
      if (pos_ >= s_.size() || s_[pos_] != ')') error("missing ')'");
      ++pos_;
      return n;
    }
    if (c == '[') {
      const auto end = s_.find(']', pos_);
      if (end == std::string_view::npos) error("missing ']'");
      std::string name(s_.substr(pos_ + 1, end - pos_ - 1));
      if (name.empty()) error("empty name");
      pos_ = end + 1;
      return named(std::move(name));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.')) ++end;
      if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
        std::size_t e = end + 1;
        if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) ++e;
        if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
          end = e;
          while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
        }
      }
      auto d = Decimal::try_parse(s_.substr(pos_, end - pos_));
      if (!d) error("bad number");
      pos_ = end;
      auto n = std::make_shared<Node>();
      n->op = Op::Literal;
      n->literal = *d;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_' || s_[end] == '.' ||
                                 s_[end] == ':')) {
        ++end;
      }
      std::string name(s_.substr(pos_, end - pos_));
      pos_ = end;
      return named(std::move(name));
    }
    error("unexpected character");
  }

  std::shared_ptr<const Node> named(std::string name) {
    if (std::find(names_->begin(), names_->end(), name) == names_->end()) names_->push_back(name);
    auto n = std::make_shared<Node>();
    n->op = Op::Name;
    n->name = std::move(name);
    return n;
  }

  static std::shared_ptr<const Node> negate(std::shared_ptr<const Node> x) {
    auto n = std::make_shared<Node>();
    n->op = Op::Neg;
    n->lhs = std::move(x);
    return n;
  }

  static std::shared_ptr<const Node> binary(Op op, std::shared_ptr<const Node> a, std::shared_ptr<const Node> b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<std::string>* names_ = nullptr;
};

std::optional<Decimal> eval(const Node& n, const std::function<std::optional<Decimal>(const std::string&)>& lookup) {
  switch (n.op) {
    case Op::Literal: return n.literal;
    case Op::Name: return lookup(n.name);
    case Op::Neg: {
      auto x = eval(*n.lhs, lookup);
      if (!x) return std::nullopt;
      return -*x;
    }
    default: break;
  }
  auto a = eval(*n.lhs, lookup);
  if (!a) return std::nullopt;
  auto b = eval(*n.rhs, lookup);
  if (!b) return std::nullopt;
  switch (n.op) {
    case Op::Add: return *a + *b;
    case Op::Sub: return *a - *b;
    case Op::Mul: return *a * *b;
    case Op::Div:
      if (b->is_zero()) return std::nullopt;
      return *a / *b;
    default: return std::nullopt;
  }
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  e.root_ = Parser(text).parse_all(e.names_);
  return e;
}

std::optional<Decimal> Expression::evaluate(
    const std::function<std::optional<Decimal>(const std::string&)>& lookup) const {
  if (!root_) return std::nullopt;
  return eval(*root_, lookup);
}

}  // namespace cellstore

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

#pragma once

// Business rules over a set of cells (usually a hypercube result).
//
// A rule derives target values from input cells slice by slice, where a
// slice is a group of cells agreeing on every dimension except the ones the
// rule varies (Concept for a roll-up, Period for a roll-forward, ...).
// Impute mode adds the derived cells that are missing; Validate mode
// compares derived values against reported ones.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellstore/cell.hpp"
#include "cellstore/expression.hpp"
#include "cellstore/json_io.hpp"

namespace cellstore {

enum class RuleMode { Validate, Impute };
enum class RuleKind { RollUp, CompoundFact, RollForward, Adjustment, Variance, Computation, Grid };

std::string_view to_string(RuleMode mode) noexcept;
std::string_view to_string(RuleKind kind) noexcept;

/// Parent -> weighted children over one dimension.
///
/// `{"dimension": "Concept", "nodes": [{"value": "Assets", "children":
/// [{"value": "Equity", "weight": 1}, ...]}], "abstract": [...]}`.
struct Hierarchy {
  struct Child {
    AspectValue value;
    Decimal weight{1};
    friend bool operator==(const Child&, const Child&) = default;
  };
  struct Node {
    AspectValue value;
    std::vector<Child> children;
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::string dimension = std::string(kConceptDimension);
  std::vector<Node> nodes;
  std::vector<AspectValue> abstract_members;

  bool is_abstract(const AspectValue& v) const;
  /// Members in depth-first declaration order (roots first).
  std::vector<AspectValue> ordered_members() const;

  /// Throws BadHierarchy on cycles or a node listed twice.
  static Hierarchy from_json(const Json& doc);
  Json to_json() const;
  void validate() const;

  friend bool operator==(const Hierarchy&, const Hierarchy&) = default;
};

enum class Aggregate { Sum, Count, Min, Max, Avg };

/// Coordinates a derived cell must match to be kept: dimension -> allowed
/// values.
using TargetPattern = std::vector<std::pair<std::string, std::vector<AspectValue>>>;

struct Rule {
  std::string id;
  RuleKind kind = RuleKind::RollUp;
  RuleMode mode = RuleMode::Validate;
  Decimal tolerance{0};
  TargetPattern target;
  std::string concept_dimension = std::string(kConceptDimension);

  // RollUp / CompoundFact
  std::optional<Hierarchy> hierarchy;
  Aggregate aggregate = Aggregate::Sum;

  // RollForward
  AspectValue stock_concept;
  AspectValue flow_concept;
  std::string period_dimension = "Period";

  // Adjustment
  AspectValue base_concept;
  AspectValue correction_concept;
  AspectValue adjusted_concept;
  std::string transaction_dimension;

  // Variance
  std::string scenario_dimension;
  AspectValue actual_member;
  AspectValue budget_member;
  AspectValue variance_member;
  bool budget_minus_actual = false;

  // Computation
  AspectValue computed_concept;
  std::optional<Expression> expression;

  // Grid: `first` runs in Impute mode, `second` in this rule's mode over the
  // input plus what `first` produced.
  std::shared_ptr<const Rule> first;
  std::shared_ptr<const Rule> second;

  /// Throws BadRule / BadHierarchy / MissingHierarchy / MissingScenarioMember.
  static Rule from_json(const Json& doc);
  Json to_json() const;

 private:
  Json source_;  // document the rule was parsed from, echoed by to_json
};

enum class CheckStatus { Pass, Fail, Inapplicable };
std::string_view to_string(CheckStatus status) noexcept;

struct Check {
  std::string rule_id;
  CheckStatus status = CheckStatus::Inapplicable;
  Aspects target;
  std::optional<Decimal> computed;
  std::optional<Decimal> reported;
  std::string formula;
  std::vector<CellKey> inputs;
  std::string message;

  Json to_json() const;
};

struct Conflict {
  CellKey key;
  std::string kept_rule;
  std::string dropped_rule;
  AspectValue kept;
  AspectValue dropped;
};

struct RuleOutput {
  /// Imputed cells that passed the target filter, each with an audit trail.
  std::vector<Cell> cells;
  /// Validate-mode results.
  std::vector<Check> checks;
  /// Grid sub-rule results kept for auditing, not part of `cells`.
  std::vector<Cell> intermediates;
};

/// Applies one rule to `cells` in its own mode. `computed_at` is stamped on
/// audit trails. Throws UnknownConceptReference, NonNumericInput,
/// AmbiguousPeriodChain.
RuleOutput apply_rule(const Rule& rule, std::span<const Cell> cells, std::uint64_t computed_at = 0);
RuleOutput apply_rule(const Rule& rule, RuleMode mode, std::span<const Cell> cells, std::uint64_t computed_at = 0);

struct RunOptions {
  std::uint64_t computed_at = 0;
  /// Let later impute rules see cells imputed by earlier ones.
  bool transitive = false;
};

struct RuleRun {
  /// Input plus imputed cells, sorted by canonical key.
  std::vector<Cell> cells;
  std::vector<Cell> imputed;
  std::vector<Check> checks;
  std::vector<Conflict> conflicts;
  std::vector<Cell> intermediates;

  std::size_t failures() const;
  Json to_json() const;
};

/// Impute rules first, in declaration order, then Validate rules over the
/// augmented set. Reported cells always win over imputed ones; when two
/// rules impute the same key the first wins and a Conflict is logged.
RuleRun run_rules(std::span<const Rule> rules, std::span<const Cell> cells, const RunOptions& options = {});

std::vector<Rule> rules_from_json(const Json& doc);

}  // namespace cellstore

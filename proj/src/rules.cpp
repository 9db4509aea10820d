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

#include "cellstore/rules.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "cellstore/error.hpp"

namespace cellstore {

std::string_view to_string(RuleMode mode) noexcept { return mode == RuleMode::Impute ? "impute" : "validate"; }

std::string_view to_string(RuleKind kind) noexcept {
  switch (kind) {
    case RuleKind::RollUp: return "rollup";
    case RuleKind::CompoundFact: return "compound";
    case RuleKind::RollForward: return "rollforward";
    case RuleKind::Adjustment: return "adjustment";
    case RuleKind::Variance: return "variance";
    case RuleKind::Computation: return "computation";
    case RuleKind::Grid: return "grid";
  }
  return "?";
}

std::string_view to_string(CheckStatus status) noexcept {
  switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inapplicable: return "inapplicable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Hierarchy

bool Hierarchy::is_abstract(const AspectValue& v) const {
  return std::find(abstract_members.begin(), abstract_members.end(), v) != abstract_members.end();
}

std::vector<AspectValue> Hierarchy::ordered_members() const {
  std::vector<AspectValue> out;
  std::unordered_set<AspectValue> seen;
  std::unordered_set<AspectValue> children;
  for (const auto& n : nodes) {
    for (const auto& c : n.children) children.insert(c.value);
  }
  auto node_of = [&](const AspectValue& v) -> const Node* {
    for (const auto& n : nodes) {
      if (n.value == v) return &n;
    }
    return nullptr;
  };
  std::function<void(const AspectValue&)> visit = [&](const AspectValue& v) {
    if (!seen.insert(v).second) return;
    out.push_back(v);
    if (const Node* n = node_of(v)) {
      for (const auto& c : n->children) visit(c.value);
    }
  };
  for (const auto& n : nodes) {
    if (!children.count(n.value)) visit(n.value);
  }
  for (const auto& n : nodes) visit(n.value);  // members reachable only through cycles
  return out;
}

void Hierarchy::validate() const {
  std::unordered_set<AspectValue> parents;
  for (const auto& n : nodes) {
    if (!parents.insert(n.value).second) fail(ErrorCode::BadHierarchy, "node '" + n.value.canonical() + "' listed twice");
    std::unordered_set<AspectValue> kids;
    for (const auto& c : n.children) {
      if (!kids.insert(c.value).second) {
        fail(ErrorCode::BadHierarchy, "'" + c.value.canonical() + "' is listed twice under '" + n.value.canonical() + "'");
      }
    }
  }
  // Cycle check by depth-first search with colors.
  std::unordered_map<AspectValue, int> color;
  std::function<void(const AspectValue&)> dfs = [&](const AspectValue& v) {
    color[v] = 1;
    for (const auto& n : nodes) {
      if (n.value != v) continue;
      for (const auto& c : n.children) {
        int col = color[c.value];
        if (col == 1) fail(ErrorCode::BadHierarchy, "cycle through '" + c.value.canonical() + "'");
        if (col == 0) dfs(c.value);
      }
    }
    color[v] = 2;
  };
  for (const auto& n : nodes) {
    if (color[n.value] == 0) dfs(n.value);
  }
}

Hierarchy Hierarchy::from_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::BadHierarchy, "hierarchy must be an object");
  Hierarchy h;
  if (doc.contains("dimension")) h.dimension = std::string(require_string(doc["dimension"], "hierarchy dimension"));
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) fail(ErrorCode::BadHierarchy, "hierarchy needs a nodes array");
  for (const auto& n : doc["nodes"]) {
    Node node;
    node.value = value_from_json(n.at("value"));
    if (n.contains("children")) {
      for (const auto& c : n["children"]) {
        Child child;
        if (c.is_object()) {
          child.value = value_from_json(c.at("value"));
          if (c.contains("weight")) child.weight = decimal_from_json(c["weight"]);
        } else {
          child.value = value_from_json(c);
        }
        node.children.push_back(std::move(child));
      }
    }
    h.nodes.push_back(std::move(node));
  }
  if (doc.contains("abstract")) {
    for (const auto& a : doc["abstract"]) h.abstract_members.push_back(value_from_json(a));
  }
  h.validate();
  return h;
}

Json Hierarchy::to_json() const {
  Json nodes_json = Json::array();
  for (const auto& n : nodes) {
    Json kids = Json::array();
    for (const auto& c : n.children) kids.push_back(Json{{"value", value_to_json(c.value)}, {"weight", decimal_json(c.weight)}});
    nodes_json.push_back(Json{{"value", value_to_json(n.value)}, {"children", std::move(kids)}});
  }
  Json doc{{"dimension", dimension}, {"nodes", std::move(nodes_json)}};
  if (!abstract_members.empty()) {
    Json a = Json::array();
    for (const auto& v : abstract_members) a.push_back(value_to_json(v));
    doc["abstract"] = std::move(a);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Rule documents

namespace {

AspectValue required_value(const Json& doc, const char* member) {
  if (!doc.contains(member)) fail(ErrorCode::BadRule, std::string("rule needs \"") + member + "\"");
  return value_from_json(doc[member]);
}

std::string required_name(const Json& doc, const char* member) {
  if (!doc.contains(member)) fail(ErrorCode::BadRule, std::string("rule needs \"") + member + "\"");
  return std::string(require_string(doc[member], member));
}

const std::map<std::string, RuleKind>& kinds() {
  static const std::map<std::string, RuleKind> k{{"rollup", RuleKind::RollUp},       {"compound", RuleKind::CompoundFact},
                                                 {"rollforward", RuleKind::RollForward}, {"adjustment", RuleKind::Adjustment},
                                                 {"variance", RuleKind::Variance},   {"computation", RuleKind::Computation},
                                                 {"grid", RuleKind::Grid}};
  return k;
}

}  // namespace

Rule Rule::from_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::BadRule, "rule must be an object");
  Rule r;
  r.source_ = doc;
  r.id = required_name(doc, "id");
  const auto kind = required_name(doc, "kind");
  auto k = kinds().find(kind);
  if (k == kinds().end()) fail(ErrorCode::BadRule, "unknown rule kind '" + kind + "'");
  r.kind = k->second;
  if (doc.contains("mode")) {
    const auto mode = std::string(require_string(doc["mode"], "mode"));
    if (mode == "impute") r.mode = RuleMode::Impute;
    else if (mode == "validate") r.mode = RuleMode::Validate;
    else fail(ErrorCode::BadRule, "unknown rule mode '" + mode + "'");
  }
  if (doc.contains("tolerance")) {
    r.tolerance = decimal_from_json(doc["tolerance"]);
    if (r.tolerance.is_negative()) fail(ErrorCode::BadRule, "tolerance must not be negative");
  }
  if (doc.contains("target")) {
    if (!doc["target"].is_object()) fail(ErrorCode::BadRule, "target must be an object");
    for (auto it = doc["target"].begin(); it != doc["target"].end(); ++it) {
      std::vector<AspectValue> allowed;
      if (it.value().is_array()) {
        for (const auto& v : it.value()) allowed.push_back(value_from_json(v));
      } else {
        allowed.push_back(value_from_json(it.value()));
      }
      r.target.emplace_back(it.key(), std::move(allowed));
    }
  }
  if (doc.contains("conceptDimension")) r.concept_dimension = required_name(doc, "conceptDimension");

  std::set<std::string> allowed{"id", "kind", "mode", "tolerance", "target", "conceptDimension", "description"};
  switch (r.kind) {
    case RuleKind::RollUp:
    case RuleKind::CompoundFact: {
      allowed.insert({"hierarchy", "aggregate"});
      if (!doc.contains("hierarchy")) fail(ErrorCode::MissingHierarchy, "rule '" + r.id + "' needs a hierarchy");
      r.hierarchy = Hierarchy::from_json(doc["hierarchy"]);
      if (doc.contains("aggregate")) {
        static const std::map<std::string, Aggregate> aggs{{"sum", Aggregate::Sum}, {"count", Aggregate::Count},
                                                           {"min", Aggregate::Min}, {"max", Aggregate::Max},
                                                           {"avg", Aggregate::Avg}};
        auto a = aggs.find(std::string(require_string(doc["aggregate"], "aggregate")));
        if (a == aggs.end()) fail(ErrorCode::BadRule, "unknown aggregate");
        r.aggregate = a->second;
      }
      break;
    }
    case RuleKind::RollForward:
      allowed.insert({"stockConcept", "flowConcept", "periodDimension"});
      r.stock_concept = required_value(doc, "stockConcept");
      r.flow_concept = required_value(doc, "flowConcept");
      if (doc.contains("periodDimension")) r.period_dimension = required_name(doc, "periodDimension");
      break;
    case RuleKind::Adjustment:
      allowed.insert({"concept", "correctionConcept", "adjustedConcept", "transactionDimension"});
      r.base_concept = required_value(doc, "concept");
      r.correction_concept = required_value(doc, "correctionConcept");
      r.adjusted_concept = required_value(doc, "adjustedConcept");
      r.transaction_dimension = doc.contains("transactionDimension") ? required_name(doc, "transactionDimension")
                                                                     : std::string("Transaction");
      break;
    case RuleKind::Variance: {
      allowed.insert({"scenarioDimension", "actual", "budget", "variance", "sign"});
      r.scenario_dimension = required_name(doc, "scenarioDimension");
      for (const char* m : {"actual", "budget", "variance"}) {
        if (!doc.contains(m)) fail(ErrorCode::MissingScenarioMember, "variance rule '" + r.id + "' needs \"" + m + "\"");
      }
      r.actual_member = value_from_json(doc["actual"]);
      r.budget_member = value_from_json(doc["budget"]);
      r.variance_member = value_from_json(doc["variance"]);
      if (doc.contains("sign")) {
        const auto sign = std::string(require_string(doc["sign"], "sign"));
        if (sign == "budget-actual") r.budget_minus_actual = true;
        else if (sign != "actual-budget") fail(ErrorCode::BadRule, "sign must be actual-budget or budget-actual");
      }
      break;
    }
    case RuleKind::Computation:
      allowed.insert({"concept", "expression"});
      r.computed_concept = required_value(doc, "concept");
      r.expression = Expression::parse(required_name(doc, "expression"));
      break;
    case RuleKind::Grid:
      allowed.insert({"first", "second"});
      if (!doc.contains("first") || !doc.contains("second")) fail(ErrorCode::BadRule, "grid rule needs first and second");
      r.first = std::make_shared<Rule>(Rule::from_json(doc["first"]));
      r.second = std::make_shared<Rule>(Rule::from_json(doc["second"]));
      break;
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!allowed.count(it.key())) fail(ErrorCode::BadRule, "unknown member '" + it.key() + "' in rule '" + r.id + "'");
  }
  return r;
}

Json Rule::to_json() const {
  if (!source_.is_null()) return source_;
  Json doc{{"id", id}, {"kind", to_string(kind)}, {"mode", to_string(mode)}, {"tolerance", decimal_json(tolerance)}};
  if (hierarchy) doc["hierarchy"] = hierarchy->to_json();
  if (expression) {
    doc["concept"] = value_to_json(computed_concept);
    doc["expression"] = expression->text();
  }
  return doc;
}

std::vector<Rule> rules_from_json(const Json& doc) {
  const Json& list = doc.is_object() && doc.contains("rules") ? doc["rules"] : doc;
  if (!list.is_array()) fail(ErrorCode::BadRule, "expected an array of rules");
  std::vector<Rule> out;
  std::set<std::string> ids;
  for (const auto& r : list) {
    out.push_back(Rule::from_json(r));
    if (!ids.insert(out.back().id).second) fail(ErrorCode::BadRule, "rule id '" + out.back().id + "' used twice");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivation

namespace {

struct Derivation {
  Aspects target;
  std::optional<Decimal> value;
  std::vector<const Cell*> inputs;
  std::string formula;
  std::string reason;  // why `value` is missing
};

struct Slice {
  Aspects base;
  std::vector<const Cell*> cells;

  const Cell* find(const std::string& dim, const AspectValue& v) const {
    for (const Cell* c : cells) {
      auto it = c->aspects.find(dim);
      if (it != c->aspects.end() && it->second == v) return c;
    }
    return nullptr;
  }
};

// Unambiguous encoding of an aspect map, including maps without a Concept.
std::string slice_key(const Aspects& aspects) {
  std::string out;
  for (const auto& [name, v] : aspects) {
    const auto canonical = v.canonical();
    out += std::to_string(name.size()) + ':' + name + static_cast<char>('0' + static_cast<int>(v.kind())) +
           std::to_string(canonical.size()) + ':' + canonical;
  }
  return out;
}

std::vector<Slice> slices(std::span<const Cell> cells, const std::vector<std::string>& varying) {
  std::map<std::string, Slice> by_key;
  for (const auto& c : cells) {
    Aspects base;
    for (const auto& [name, v] : c.aspects) {
      if (std::find(varying.begin(), varying.end(), name) == varying.end()) base.emplace(name, v);
    }
    auto& s = by_key[slice_key(base)];
    if (s.cells.empty()) s.base = std::move(base);
    s.cells.push_back(&c);
  }
  std::vector<Slice> out;
  out.reserve(by_key.size());
  for (auto& [k, s] : by_key) out.push_back(std::move(s));
  return out;
}

Decimal number_of(const Cell& c) {
  if (c.value.kind() != ValueKind::Number) {
    fail(ErrorCode::NonNumericInput, "cell " + c.key().display() + " has non-numeric value '" + c.value.canonical() + "'");
  }
  return c.value.as_number();
}

Aspects with(const Aspects& base, const std::string& dim, const AspectValue& v) {
  Aspects a = base;
  a.insert_or_assign(dim, v);
  return a;
}

std::string signed_term(const Decimal& weight, const std::string& name, bool first) {
  std::string out;
  Decimal w = weight;
  if (w.is_negative()) {
    out = first ? "-" : " - ";
    w = -w;
  } else if (!first) {
    out = " + ";
  }
  if (w != Decimal(1)) out += w.to_string() + " * ";
  return out + name;
}

// Hierarchy over any dimension: parent = aggregate(children).
std::vector<Derivation> derive_rollup(const Rule& rule, RuleMode mode, std::span<const Cell> cells) {
  const Hierarchy& h = *rule.hierarchy;
  std::vector<Derivation> out;
  for (const auto& slice : slices(cells, {h.dimension})) {
    for (const auto& node : h.nodes) {
      if (h.is_abstract(node.value) || node.children.empty()) continue;
      Derivation d;
      d.target = with(slice.base, h.dimension, node.value);
      std::vector<std::pair<const Hierarchy::Child*, const Cell*>> present;
      std::vector<std::string> missing;
      std::string formula = node.value.canonical() + " = ";
      bool first = true;
      for (const auto& child : node.children) {
        if (h.is_abstract(child.value)) continue;
        formula += rule.aggregate == Aggregate::Sum ? signed_term(child.weight, child.value.canonical(), first)
                                                    : (first ? "" : ", ") + child.value.canonical();
        first = false;
        if (const Cell* c = slice.find(h.dimension, child.value)) present.emplace_back(&child, c);
        else missing.push_back(child.value.canonical());
      }
      switch (rule.aggregate) {
        case Aggregate::Sum: break;
        case Aggregate::Count: formula = node.value.canonical() + " = count(" + formula.substr(formula.find('=') + 2) + ")"; break;
        case Aggregate::Min: formula = node.value.canonical() + " = min(" + formula.substr(formula.find('=') + 2) + ")"; break;
        case Aggregate::Max: formula = node.value.canonical() + " = max(" + formula.substr(formula.find('=') + 2) + ")"; break;
        case Aggregate::Avg: formula = node.value.canonical() + " = avg(" + formula.substr(formula.find('=') + 2) + ")"; break;
      }
      d.formula = std::move(formula);
      if (present.empty()) {
        if (mode == RuleMode::Impute) continue;
        d.reason = "no children reported";
        out.push_back(std::move(d));
        continue;
      }
      if (mode == RuleMode::Validate && !missing.empty()) {
        d.reason = "missing child " + missing.front();
        for (const auto& [child, c] : present) d.inputs.push_back(c);
        out.push_back(std::move(d));
        continue;
      }
      Decimal acc(0);
      std::optional<Decimal> best;
      for (const auto& [child, c] : present) {
        d.inputs.push_back(c);
        const Decimal v = number_of(*c);
        switch (rule.aggregate) {
          case Aggregate::Sum: acc += child->weight * v; break;
          case Aggregate::Avg: acc += v; break;
          case Aggregate::Count: acc += Decimal(1); break;
          case Aggregate::Min: best = best ? std::min(*best, v) : v; break;
          case Aggregate::Max: best = best ? std::max(*best, v) : v; break;
        }
      }
      if (rule.aggregate == Aggregate::Min || rule.aggregate == Aggregate::Max) d.value = *best;
      else if (rule.aggregate == Aggregate::Avg) d.value = acc / Decimal(static_cast<std::int64_t>(present.size()));
      else d.value = acc;
      out.push_back(std::move(d));
    }
  }
  return out;
}

struct Duration {
  Date from, to;
};

std::optional<Duration> parse_duration(const AspectValue& v) {
  if (v.kind() != ValueKind::Text) return std::nullopt;
  const auto& s = v.as_text();
  const auto slash = s.find('/');
  if (slash == std::string::npos) return std::nullopt;
  try {
    return Duration{Date::parse(std::string_view(s).substr(0, slash)), Date::parse(std::string_view(s).substr(slash + 1))};
  } catch (const Error&) {
    return std::nullopt;
  }
}

AspectValue duration_value(Date from, Date to) { return AspectValue(from.to_string() + "/" + to.to_string()); }

std::vector<Derivation> derive_rollforward(const Rule& rule, RuleMode mode, std::span<const Cell> cells) {
  const std::string& cdim = rule.concept_dimension;
  const std::string& pdim = rule.period_dimension;
  const std::string stock = rule.stock_concept.canonical();
  const std::string flow = rule.flow_concept.canonical();
  std::vector<Derivation> out;
  for (const auto& slice : slices(cells, {cdim, pdim})) {
    std::map<std::int32_t, const Cell*> stocks;
    std::vector<std::pair<Duration, const Cell*>> flows;
    for (const Cell* c : slice.cells) {
      const auto* concept_value = c->find(cdim);
      const auto* period = c->find(pdim);
      if (!concept_value || !period) continue;
      if (*concept_value == rule.stock_concept && period->kind() == ValueKind::Date) {
        stocks.emplace(period->as_date().days(), c);
      } else if (*concept_value == rule.flow_concept) {
        if (auto d = parse_duration(*period)) flows.emplace_back(*d, c);
      }
    }
    std::map<std::int32_t, Date> flow_start_by_end;
    for (const auto& [d, c] : flows) {
      auto [it, inserted] = flow_start_by_end.emplace(d.to.days(), d.from);
      if (!inserted && it->second.days() != d.from.days()) {
        fail(ErrorCode::AmbiguousPeriodChain, "several " + flow + " periods end on " + d.to.to_string() + " in " +
                                                  (slice.base.empty() ? std::string("slice") : slice_key(slice.base)));
      }
    }
    auto stock_at = [&](Date d) -> const Cell* {
      auto it = stocks.find(d.days());
      return it == stocks.end() ? nullptr : it->second;
    };
    for (const auto& [dur, fc] : flows) {
      const Cell* s0 = stock_at(dur.from);
      const Cell* s1 = stock_at(dur.to);
      Derivation end;
      end.target = with(with(slice.base, cdim, rule.stock_concept), pdim, AspectValue(dur.to));
      end.formula = stock + "@" + dur.to.to_string() + " = " + stock + "@" + dur.from.to_string() + " + " + flow + "@" +
                    dur.from.to_string() + "/" + dur.to.to_string();
      if (s0) {
        end.inputs = {s0, fc};
        end.value = number_of(*s0) + number_of(*fc);
      } else {
        end.inputs = {fc};
        end.reason = "no opening " + stock;
      }
      out.push_back(std::move(end));
      if (mode == RuleMode::Impute && s1 && !s0) {
        Derivation start;
        start.target = with(with(slice.base, cdim, rule.stock_concept), pdim, AspectValue(dur.from));
        start.formula = stock + "@" + dur.from.to_string() + " = " + stock + "@" + dur.to.to_string() + " - " + flow +
                        "@" + dur.from.to_string() + "/" + dur.to.to_string();
        start.inputs = {s1, fc};
        start.value = number_of(*s1) - number_of(*fc);
        out.push_back(std::move(start));
      }
    }
    if (mode == RuleMode::Impute) {
      // Flow between consecutive stocks that no reported flow covers.
      for (auto it = stocks.begin(); it != stocks.end(); ++it) {
        auto next = std::next(it);
        if (next == stocks.end()) break;
        if (flow_start_by_end.count(next->first)) continue;
        const Date from = Date::from_days(it->first);
        const Date to = Date::from_days(next->first);
        Derivation d;
        d.target = with(with(slice.base, cdim, rule.flow_concept), pdim, duration_value(from, to));
        d.formula = flow + "@" + from.to_string() + "/" + to.to_string() + " = " + stock + "@" + to.to_string() + " - " +
                    stock + "@" + from.to_string();
        d.inputs = {next->second, it->second};
        d.value = number_of(*next->second) - number_of(*it->second);
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

std::vector<Derivation> derive_adjustment(const Rule& rule, RuleMode mode, std::span<const Cell> cells) {
  const std::string& cdim = rule.concept_dimension;
  const std::string& tdim = rule.transaction_dimension;
  std::vector<Derivation> out;
  const std::string base_name = rule.base_concept.canonical();
  const std::string corr_name = rule.correction_concept.canonical();
  const std::string adj_name = rule.adjusted_concept.canonical();
  for (const auto& slice : slices(cells, {cdim, tdim})) {
    const Cell* base = nullptr;
    const Cell* adjusted = nullptr;
    std::vector<const Cell*> corrections;
    for (const Cell* c : slice.cells) {
      const auto* cv = c->find(cdim);
      if (!cv) continue;
      const bool has_tx = c->find(tdim) != nullptr;
      if (*cv == rule.base_concept && !has_tx) base = c;
      else if (*cv == rule.adjusted_concept && !has_tx) adjusted = c;
      else if (*cv == rule.correction_concept) corrections.push_back(c);
    }
    if (!base && !adjusted && corrections.empty()) continue;
    Decimal total(0);
    for (const Cell* c : corrections) total += number_of(*c);
    Derivation d;
    d.target = with(slice.base, cdim, rule.adjusted_concept);
    d.formula = adj_name + " = " + base_name + " + sum(" + corr_name + " over " + tdim + ")";
    d.inputs = corrections;
    if (base) {
      d.inputs.insert(d.inputs.begin(), base);
      d.value = number_of(*base) + total;
    } else {
      d.reason = "no " + base_name;
    }
    out.push_back(std::move(d));
    if (mode == RuleMode::Impute && !base && adjusted) {
      Derivation back;
      back.target = with(slice.base, cdim, rule.base_concept);
      back.formula = base_name + " = " + adj_name + " - sum(" + corr_name + " over " + tdim + ")";
      back.inputs = corrections;
      back.inputs.insert(back.inputs.begin(), adjusted);
      back.value = number_of(*adjusted) - total;
      out.push_back(std::move(back));
    }
  }
  return out;
}

std::vector<Derivation> derive_variance(const Rule& rule, RuleMode mode, std::span<const Cell> cells) {
  const std::string& sdim = rule.scenario_dimension;
  const auto a_name = rule.actual_member.canonical();
  const auto b_name = rule.budget_member.canonical();
  const auto v_name = rule.variance_member.canonical();
  std::vector<Derivation> out;
  for (const auto& slice : slices(cells, {sdim})) {
    const Cell* a = slice.find(sdim, rule.actual_member);
    const Cell* b = slice.find(sdim, rule.budget_member);
    const Cell* v = slice.find(sdim, rule.variance_member);
    if (!a && !b && !v) continue;
    // variance = sign * (actual - budget)
    const bool flip = rule.budget_minus_actual;
    Derivation d;
    d.target = with(slice.base, sdim, rule.variance_member);
    d.formula = flip ? v_name + " = " + b_name + " - " + a_name : v_name + " = " + a_name + " - " + b_name;
    if (a && b) {
      d.inputs = {a, b};
      const Decimal diff = number_of(*a) - number_of(*b);
      d.value = flip ? -diff : diff;
    } else {
      d.reason = a ? "no " + b_name : "no " + a_name;
      if (a) d.inputs.push_back(a);
      if (b) d.inputs.push_back(b);
    }
    out.push_back(std::move(d));
    if (mode != RuleMode::Impute || !v) continue;
    if (a && !b) {
      Derivation x;
      x.target = with(slice.base, sdim, rule.budget_member);
      x.formula = flip ? b_name + " = " + a_name + " + " + v_name : b_name + " = " + a_name + " - " + v_name;
      x.inputs = {a, v};
      x.value = flip ? number_of(*a) + number_of(*v) : number_of(*a) - number_of(*v);
      out.push_back(std::move(x));
    } else if (b && !a) {
      Derivation x;
      x.target = with(slice.base, sdim, rule.actual_member);
      x.formula = flip ? a_name + " = " + b_name + " - " + v_name : a_name + " = " + b_name + " + " + v_name;
      x.inputs = {b, v};
      x.value = flip ? number_of(*b) - number_of(*v) : number_of(*b) + number_of(*v);
      out.push_back(std::move(x));
    }
  }
  return out;
}

std::vector<Derivation> derive_computation(const Rule& rule, RuleMode, std::span<const Cell> cells) {
  const std::string& cdim = rule.concept_dimension;
  const Expression& expr = *rule.expression;
  std::unordered_set<std::string> known;
  for (const auto& c : cells) {
    if (const auto* v = c.find(cdim)) known.insert(v->canonical());
  }
  for (const auto& n : expr.names()) {
    if (!known.count(n)) {
      fail(ErrorCode::UnknownConceptReference, "rule '" + rule.id + "' refers to '" + n + "', which no input cell has");
    }
  }
  std::vector<Derivation> out;
  const std::string formula = rule.computed_concept.canonical() + " = " + expr.text();
  for (const auto& slice : slices(cells, {cdim})) {
    std::unordered_map<std::string, const Cell*> by_name;
    for (const Cell* c : slice.cells) {
      if (const auto* v = c->find(cdim)) by_name.emplace(v->canonical(), c);
    }
    Derivation d;
    d.target = with(slice.base, cdim, rule.computed_concept);
    d.formula = formula;
    std::string missing;
    for (const auto& n : expr.names()) {
      auto it = by_name.find(n);
      if (it == by_name.end()) {
        if (missing.empty()) missing = n;
      } else {
        d.inputs.push_back(it->second);
      }
    }
    if (d.inputs.empty()) continue;  // slice unrelated to this rule
    if (!missing.empty()) {
      d.reason = "no " + missing;
    } else {
      d.value = expr.evaluate([&](const std::string& n) -> std::optional<Decimal> { return number_of(*by_name.at(n)); });
      if (!d.value) d.reason = "division by zero";
    }
    out.push_back(std::move(d));
  }
  return out;
}

bool target_matches(const TargetPattern& pattern, const Aspects& target) {
  for (const auto& [dim, allowed] : pattern) {
    auto it = target.find(dim);
    if (it == target.end()) return false;
    if (std::find(allowed.begin(), allowed.end(), it->second) == allowed.end()) return false;
  }
  return true;
}

std::vector<std::string> common_injected(const std::vector<const Cell*>& inputs, const Aspects& target) {
  if (inputs.empty()) return {};
  std::vector<std::string> out;
  for (const auto& dim : inputs.front()->injected) {
    if (!target.count(dim)) continue;
    bool all = std::all_of(inputs.begin(), inputs.end(), [&](const Cell* c) { return c->is_injected(dim); });
    if (all) out.push_back(dim);
  }
  return out;
}

}  // namespace

RuleOutput apply_rule(const Rule& rule, std::span<const Cell> cells, std::uint64_t computed_at) {
  return apply_rule(rule, rule.mode, cells, computed_at);
}

RuleOutput apply_rule(const Rule& rule, RuleMode mode, std::span<const Cell> cells, std::uint64_t computed_at) {
  RuleOutput result;
  if (rule.kind == RuleKind::Grid) {
    RuleOutput a = apply_rule(*rule.first, RuleMode::Impute, cells, computed_at);
    std::vector<Cell> combined(cells.begin(), cells.end());
    combined.insert(combined.end(), a.cells.begin(), a.cells.end());
    RuleOutput b = apply_rule(*rule.second, mode, combined, computed_at);
    result.intermediates = std::move(a.cells);
    result.intermediates.insert(result.intermediates.end(), a.intermediates.begin(), a.intermediates.end());
    result.intermediates.insert(result.intermediates.end(), b.intermediates.begin(), b.intermediates.end());
    for (auto& c : b.cells) {
      if (!target_matches(rule.target, c.aspects)) continue;
      c.audit->rule_id = rule.id + "/" + c.audit->rule_id;
      result.cells.push_back(std::move(c));
    }
    for (auto& ch : b.checks) {
      if (!target_matches(rule.target, ch.target)) continue;
      ch.rule_id = rule.id + "/" + ch.rule_id;
      result.checks.push_back(std::move(ch));
    }
    return result;
  }

  std::vector<Derivation> derivations;
  switch (rule.kind) {
    case RuleKind::RollUp:
    case RuleKind::CompoundFact: derivations = derive_rollup(rule, mode, cells); break;
    case RuleKind::RollForward: derivations = derive_rollforward(rule, mode, cells); break;
    case RuleKind::Adjustment: derivations = derive_adjustment(rule, mode, cells); break;
    case RuleKind::Variance: derivations = derive_variance(rule, mode, cells); break;
    case RuleKind::Computation: derivations = derive_computation(rule, mode, cells); break;
    case RuleKind::Grid: break;
  }

  std::unordered_map<std::string, const Cell*> reported;
  for (const auto& c : cells) reported.emplace(c.key().bytes(), &c);
  std::unordered_set<std::string> emitted;

  for (auto& d : derivations) {
    if (!target_matches(rule.target, d.target)) continue;
    const CellKey key = canonical_key(d.target);
    auto rep = reported.find(key.bytes());
    std::vector<CellKey> input_keys;
    for (const Cell* c : d.inputs) input_keys.push_back(c->key());
    std::sort(input_keys.begin(), input_keys.end());
    if (mode == RuleMode::Impute) {
      if (rep != reported.end() || !d.value || !emitted.insert(key.bytes()).second) continue;
      Cell c;
      c.aspects = d.target;
      c.value = *d.value;
      c.source = "rule:" + rule.id;
      c.injected = common_injected(d.inputs, d.target);
      c.audit = AuditTrail{rule.id, std::move(input_keys), d.formula, computed_at};
      result.cells.push_back(std::move(c));
    } else {
      if (rep == reported.end()) continue;
      Check ch;
      ch.rule_id = rule.id;
      ch.target = d.target;
      ch.formula = d.formula;
      ch.inputs = std::move(input_keys);
      ch.computed = d.value;
      if (rep->second->value.kind() == ValueKind::Number) ch.reported = rep->second->value.as_number();
      if (!d.value) {
        ch.status = CheckStatus::Inapplicable;
        ch.message = d.reason;
      } else if (!ch.reported) {
        ch.status = CheckStatus::Inapplicable;
        ch.message = "reported value is not a number";
      } else {
        const Decimal diff = (*ch.reported - *d.value).abs();
        ch.status = diff <= rule.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
        if (ch.status == CheckStatus::Fail) ch.message = "off by " + diff.to_string();
      }
      result.checks.push_back(std::move(ch));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Orchestration

std::size_t RuleRun::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::Fail; }));
}

Json Check::to_json() const {
  Json doc{{"rule", rule_id}, {"status", to_string(status)}, {"target", aspects_to_json(target)}};
  if (computed) doc["computed"] = decimal_json(*computed);
  if (reported) doc["reported"] = decimal_json(*reported);
  doc["formula"] = formula;
  Json in = Json::array();
  for (const auto& k : inputs) in.push_back(k.display());
  doc["inputs"] = std::move(in);
  if (!message.empty()) doc["message"] = message;
  return doc;
}

Json RuleRun::to_json() const {
  Json imputed_json = Json::array();
  for (const auto& c : imputed) imputed_json.push_back(cell_to_json(c));
  Json checks_json = Json::array();
  for (const auto& c : checks) checks_json.push_back(c.to_json());
  Json conflicts_json = Json::array();
  for (const auto& c : conflicts) {
    conflicts_json.push_back(Json{{"key", c.key.display()},
                                  {"keptRule", c.kept_rule},
                                  {"droppedRule", c.dropped_rule},
                                  {"kept", value_to_json(c.kept)},
                                  {"dropped", value_to_json(c.dropped)}});
  }
  return Json{{"imputed", std::move(imputed_json)},
              {"checks", std::move(checks_json)},
              {"conflicts", std::move(conflicts_json)},
              {"failures", failures()}};
}

RuleRun run_rules(std::span<const Rule> rules, std::span<const Cell> cells, const RunOptions& options) {
  RuleRun run;
  run.cells.assign(cells.begin(), cells.end());
  std::unordered_set<std::string> reported;
  for (const auto& c : cells) reported.insert(c.key().bytes());
  std::unordered_map<std::string, std::pair<std::size_t, std::string>> imputed_at;  // key -> (index, rule)

  for (const auto& rule : rules) {
    if (rule.mode != RuleMode::Impute) continue;
    RuleOutput out = options.transitive ? apply_rule(rule, std::span<const Cell>(run.cells), options.computed_at)
                                        : apply_rule(rule, cells, options.computed_at);
    run.intermediates.insert(run.intermediates.end(), out.intermediates.begin(), out.intermediates.end());
    for (auto& c : out.cells) {
      const CellKey key = c.key();
      if (reported.count(key.bytes())) continue;
      auto prior = imputed_at.find(key.bytes());
      if (prior != imputed_at.end()) {
        const Cell& kept = run.imputed[prior->second.first];
        if (kept.value != c.value) run.conflicts.push_back({key, prior->second.second, rule.id, kept.value, c.value});
        continue;
      }
      imputed_at.emplace(key.bytes(), std::make_pair(run.imputed.size(), rule.id));
      run.imputed.push_back(c);
      run.cells.push_back(std::move(c));
    }
  }
  for (const auto& rule : rules) {
    if (rule.mode != RuleMode::Validate) continue;
    RuleOutput out = apply_rule(rule, std::span<const Cell>(run.cells), options.computed_at);
    run.intermediates.insert(run.intermediates.end(), out.intermediates.begin(), out.intermediates.end());
    run.checks.insert(run.checks.end(), out.checks.begin(), out.checks.end());
  }
  std::vector<std::pair<CellKey, std::size_t>> order;
  order.reserve(run.cells.size());
  for (std::size_t i = 0; i < run.cells.size(); ++i) order.emplace_back(run.cells[i].key(), i);
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Cell> sorted;
  sorted.reserve(run.cells.size());
  for (const auto& [k, i] : order) sorted.push_back(std::move(run.cells[i]));
  run.cells = std::move(sorted);
  return run;
}

}  // namespace cellstore

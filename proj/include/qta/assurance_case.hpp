#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qta/beta_logic.hpp"
#include "qta/errors.hpp"

namespace qta {

enum class Classification { Controlled, Uncontrolled };

inline constexpr std::string_view to_string(Classification c) {
  return c == Classification::Controlled ? "controlled" : "uncontrolled";
}

inline std::optional<Classification> parse_classification(std::string_view text) {
  if (text == "controlled") return Classification::Controlled;
  if (text == "uncontrolled") return Classification::Uncontrolled;
  return std::nullopt;
}

struct FixedPrior {
  BetaParams prior;
  friend bool operator==(const FixedPrior&, const FixedPrior&) = default;
};

struct CounterBacked {
  std::string counter_id;
  friend bool operator==(const CounterBacked&, const CounterBacked&) = default;
};

struct TrackerBacked {
  std::string tracker_id;
  friend bool operator==(const TrackerBacked&, const TrackerBacked&) = default;
};

/// Where a node's Beta PDF comes from: a fixed prior in the document, a trial
/// ledger counter, or a frozen completeness assessment.
using EvidenceSource = std::variant<FixedPrior, CounterBacked, TrackerBacked>;

struct HypothesisNode {
  std::string id;
  std::string statement;
  Classification classification = Classification::Controlled;
  /// Declared evidence wiring. Inert while the node is Uncontrolled; the
  /// reduction source never contributes a factor to the strength product.
  std::optional<EvidenceSource> evidence;

  friend bool operator==(const HypothesisNode&, const HypothesisNode&) = default;
};

/// Display-only grouping of leaf nodes (a parenthesized sub-conjunction).
/// Groups never take part in evaluation; their members do, directly.
struct DisplayGroup {
  std::string id;
  std::string statement;
  std::vector<std::string> members;

  friend bool operator==(const DisplayGroup&, const DisplayGroup&) = default;
};

struct ReductionReport {
  double strength = 0.0;             // mean of the root conjunction
  double confidence_variance = 0.0;  // its variance
  std::vector<std::string> uncontrolled_ids;
  std::map<std::string, Moments> per_node_moments;
  std::uint64_t evaluated_at = 0;  // event-log position of the evaluation
};

/// An assurance case structured as a process reduction: hypothesis leaves,
/// one root conjunction over the Controlled leaves, and the Uncontrolled
/// leaves as the reduction source. Immutable; reclassify returns a new case.
class AssuranceCase {
public:
  static AssuranceCase create(std::string root_id, std::string root_statement,
                              std::vector<HypothesisNode> nodes,
                              std::vector<DisplayGroup> groups = {}) {
    AssuranceCase c;
    c.root_id_ = std::move(root_id);
    c.root_statement_ = std::move(root_statement);
    c.nodes_ = std::move(nodes);
    c.groups_ = std::move(groups);

    if (c.root_id_.empty())
      throw SchemaError("root.id", "must not be empty");
    std::set<std::string_view> ids{c.root_id_};
    for (const HypothesisNode& n : c.nodes_) {
      if (n.id.empty()) throw SchemaError("nodes", "node id must not be empty");
      if (!ids.insert(n.id).second)
        throw DuplicateIdError("duplicate node id '" + n.id + "'");
    }
    for (const DisplayGroup& g : c.groups_) {
      if (!ids.insert(g.id).second)
        throw DuplicateIdError("duplicate node id '" + g.id + "'");
      for (const std::string& m : g.members)
        if (!c.find(m))
          throw DanglingReferenceError("group '" + g.id + "' references unknown node '" + m + "'");
    }
    bool any_uncontrolled = false;
    for (const HypothesisNode& n : c.nodes_)
      any_uncontrolled |= n.classification == Classification::Uncontrolled;
    if (!any_uncontrolled)
      throw NoReductionSourceError("a process reduction needs at least one uncontrolled node");

    c.rebuild_conjunction();
    return c;
  }

  const std::string& root_id() const noexcept { return root_id_; }
  const std::string& root_statement() const noexcept { return root_statement_; }
  const std::vector<HypothesisNode>& nodes() const noexcept { return nodes_; }
  const std::vector<DisplayGroup>& groups() const noexcept { return groups_; }

  /// Ids of the Controlled nodes in document order: the root variable.
  const std::vector<std::string>& conjunction() const noexcept { return conjunction_; }

  const HypothesisNode* find(std::string_view node_id) const noexcept {
    for (const HypothesisNode& n : nodes_)
      if (n.id == node_id) return &n;
    return nullptr;
  }

  /// Moves a node between Controlled and Uncontrolled and recomputes the
  /// conjunction. The node keeps its declared evidence wiring, so the
  /// operation round-trips. Refuses to empty the conjunction.
  AssuranceCase reclassify(std::string_view node_id, Classification to) const {
    AssuranceCase next(*this);
    HypothesisNode* node = nullptr;
    for (HypothesisNode& n : next.nodes_)
      if (n.id == node_id) node = &n;
    if (!node)
      throw DanglingReferenceError("unknown node '" + std::string(node_id) + "'");
    if (node->classification == to) return next;
    if (to == Classification::Uncontrolled && conjunction_.size() == 1 &&
        conjunction_.front() == node->id)
      throw LastControlledNodeError("reclassifying '" + node->id +
                                    "' would leave the conjunction empty");
    node->classification = to;
    next.rebuild_conjunction();
    return next;
  }

  friend bool operator==(const AssuranceCase&, const AssuranceCase&) = default;

private:
  AssuranceCase() = default;

  void rebuild_conjunction() {
    conjunction_.clear();
    for (const HypothesisNode& n : nodes_)
      if (n.classification == Classification::Controlled) conjunction_.push_back(n.id);
  }

  std::string root_id_;
  std::string root_statement_;
  std::vector<HypothesisNode> nodes_;
  std::vector<DisplayGroup> groups_;
  std::vector<std::string> conjunction_;
};

using EvidenceResolver = std::function<BetaParams(const std::string& node_id)>;

/// Evaluates the root conjunction against the resolver: strength is its mean,
/// confidence its variance. A Controlled node that resolves to Beta(0,0) is
/// reported as InsufficientEvidence rather than silently skipped.
inline ReductionReport evaluate_strength(const AssuranceCase& c,
                                         const EvidenceResolver& resolve,
                                         std::uint64_t evaluated_at = 0) {
  ReductionReport report;
  report.evaluated_at = evaluated_at;
  std::vector<Moments> factors;
  factors.reserve(c.conjunction().size());
  for (const std::string& id : c.conjunction()) {
    const BetaParams params = resolve(id);
    if (params.no_evidence()) throw InsufficientEvidenceError(id);
    const Moments m = moments_of(params);
    factors.push_back(m);
    report.per_node_moments.emplace(id, m);
  }
  const Moments root = fold_and(factors);
  report.strength = root.mean;
  report.confidence_variance = root.variance;
  for (const HypothesisNode& n : c.nodes())
    if (n.classification == Classification::Uncontrolled)
      report.uncontrolled_ids.push_back(n.id);
  return report;
}

}  // namespace qta

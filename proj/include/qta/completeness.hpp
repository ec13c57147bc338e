#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "qta/beta_logic.hpp"
#include "qta/errors.hpp"

namespace qta {

/// One ground-truth undefined-behavior instance. `triggers` is the set of
/// test inputs that make the sanitizer detect it; empty means no input does.
struct UBInstance {
  std::string ub_id;
  std::set<std::string> triggers;

  friend bool operator==(const UBInstance&, const UBInstance&) = default;
};

struct Unit {
  std::string unit_id;
  std::vector<UBInstance> ub_instances;
  /// Tests this unit can meaningfully run on; nullopt means all of them.
  std::optional<std::set<std::string>> meaningful_tests;

  bool meaningful(const std::string& test) const {
    return !meaningful_tests || meaningful_tests->count(test) > 0;
  }

  friend bool operator==(const Unit&, const Unit&) = default;
};

/// An undefined behavior reached by running the subset R of units together.
/// When it is also detectable through unit testing alone, integration steps
/// must not take credit for it; a unit-level twin instance (same ub_id in a
/// unit of R) carries it instead.
struct IntegrationUB {
  std::set<std::string> unit_ids;  // the subset R
  UBInstance instance;
  bool detectable_by_unit_testing_alone = false;

  friend bool operator==(const IntegrationUB&, const IntegrationUB&) = default;
};

/// The tuple (Units, Tests, BetaPDF) the update function acts on, keyed by a
/// project identifier. Immutable snapshot; every operation returns new state.
struct SystemState {
  std::string project_id;
  std::vector<Unit> units;
  std::set<std::string> tests;
  BetaParams beta;  // prior, then running posterior, for the sanitizer
  std::vector<IntegrationUB> integration_ubs;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

enum class HCase {
  UnitDetectedExistingTest,
  UnitDetectedNewTest,
  UnitUndetectable,
  IntegDetectedExistingTest,
  IntegDetectedNewTest,
  IntegUndetectable,
  Identity,
};

inline constexpr std::string_view to_string(HCase c) {
  switch (c) {
    case HCase::UnitDetectedExistingTest: return "unit-detected-existing-test";
    case HCase::UnitDetectedNewTest: return "unit-detected-new-test";
    case HCase::UnitUndetectable: return "unit-undetectable";
    case HCase::IntegDetectedExistingTest: return "integration-detected-existing-test";
    case HCase::IntegDetectedNewTest: return "integration-detected-new-test";
    case HCase::IntegUndetectable: return "integration-undetectable";
    default: return "identity";
  }
}

struct HStepOutcome {
  SystemState new_state;
  HCase case_fired = HCase::Identity;
  std::optional<std::string> removed_ub;
};

/// Instances that count toward convergence: all unit-level instances plus
/// integration entries not carried by a unit-level twin.
inline std::size_t countable_ub_instances(const SystemState& s) {
  std::size_t count = 0;
  for (const Unit& u : s.units) count += u.ub_instances.size();
  for (const IntegrationUB& e : s.integration_ubs)
    if (!e.detectable_by_unit_testing_alone) ++count;
  return count;
}

namespace detail {

/// A trigger in Tests that the unit actually runs on, if any.
inline const std::string* trigger_in_tests(const Unit& u, const UBInstance& ub,
                                           const std::set<std::string>& tests) {
  for (const std::string& t : ub.triggers)
    if (tests.count(t) > 0 && u.meaningful(t)) return &t;
  return nullptr;
}

/// Smallest trigger the unit can run on; null means undetectable.
inline const std::string* first_effective_trigger(const Unit& u, const UBInstance& ub) {
  for (const std::string& t : ub.triggers)
    if (u.meaningful(t)) return &t;
  return nullptr;
}

inline const std::string* trigger_in_tests(const IntegrationUB& e,
                                           const std::set<std::string>& tests) {
  for (const std::string& t : e.instance.triggers)
    if (tests.count(t) > 0) return &t;
  return nullptr;
}

/// Drops flagged integration entries whose last unit-level twin is gone:
/// the fix that removed the twin removed the behavior everywhere.
inline void drop_orphaned_twins(SystemState& s) {
  std::erase_if(s.integration_ubs, [&s](const IntegrationUB& e) {
    if (!e.detectable_by_unit_testing_alone) return false;
    for (const Unit& u : s.units) {
      if (e.unit_ids.count(u.unit_id) == 0) continue;
      for (const UBInstance& ub : u.ub_instances)
        if (ub.ub_id == e.instance.ub_id) return false;
    }
    return true;
  });
}

inline SystemState remove_unit_instance(const SystemState& s, std::size_t unit_index,
                                        std::size_t ub_index) {
  SystemState next = s;
  std::vector<UBInstance>& ubs = next.units[unit_index].ub_instances;
  ubs.erase(ubs.begin() + static_cast<std::ptrdiff_t>(ub_index));
  drop_orphaned_twins(next);
  return next;
}

template <typename Match>
std::optional<std::pair<std::size_t, std::size_t>> best_unit_match(const SystemState& s,
                                                                   Match&& match) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t ui = 0; ui < s.units.size(); ++ui) {
    const Unit& u = s.units[ui];
    for (std::size_t bi = 0; bi < u.ub_instances.size(); ++bi) {
      if (!match(u, u.ub_instances[bi])) continue;
      if (!best) {
        best = {ui, bi};
        continue;
      }
      const Unit& bu = s.units[best->first];
      const UBInstance& bb = bu.ub_instances[best->second];
      if (std::tie(u.unit_id, u.ub_instances[bi].ub_id) < std::tie(bu.unit_id, bb.ub_id))
        best = {ui, bi};
    }
  }
  return best;
}

inline bool integ_key_less(const IntegrationUB& a, const IntegrationUB& b) {
  return std::tie(a.instance.ub_id, a.unit_ids) < std::tie(b.instance.ub_id, b.unit_ids);
}

template <typename Match>
std::optional<std::size_t> best_integ_match(const SystemState& s, Match&& match) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < s.integration_ubs.size(); ++i) {
    const IntegrationUB& e = s.integration_ubs[i];
    if (e.detectable_by_unit_testing_alone || !match(e)) continue;
    if (!best || integ_key_less(e, s.integration_ubs[*best])) best = i;
  }
  return best;
}

}  // namespace detail

/// One application of the update function. Cases are tried in a fixed
/// priority order - unit before integration, detections before undetectable
/// failures, lowest (unit_id, ub_id) first - so traces are reproducible.
/// Total: when nothing matches, the state maps to itself.
inline HStepOutcome step(const SystemState& s) {
  using namespace detail;

  // Unit testing, detection on an existing test: success, instance fixed.
  if (auto hit = best_unit_match(s, [&s](const Unit& u, const UBInstance& ub) {
        return trigger_in_tests(u, ub, s.tests) != nullptr;
      })) {
    const std::string removed = s.units[hit->first].ub_instances[hit->second].ub_id;
    SystemState next = remove_unit_instance(s, hit->first, hit->second);
    next.beta = BetaParams(s.beta.alpha + 1.0, s.beta.beta);
    return {std::move(next), HCase::UnitDetectedExistingTest, removed};
  }

  // Unit testing, detection needing a new test: success, test joins Tests.
  if (auto hit = best_unit_match(s, [](const Unit& u, const UBInstance& ub) {
        return first_effective_trigger(u, ub) != nullptr;
      })) {
    const Unit& u = s.units[hit->first];
    const UBInstance& ub = u.ub_instances[hit->second];
    const std::string test = *first_effective_trigger(u, ub);
    SystemState next = remove_unit_instance(s, hit->first, hit->second);
    next.tests.insert(test);
    next.beta = BetaParams(s.beta.alpha + 1.0, s.beta.beta);
    return {std::move(next), HCase::UnitDetectedNewTest, ub.ub_id};
  }

  // Unit testing, no input detects the behavior: failure.
  if (auto hit = best_unit_match(
          s, [](const Unit&, const UBInstance&) { return true; })) {
    const std::string removed = s.units[hit->first].ub_instances[hit->second].ub_id;
    SystemState next = remove_unit_instance(s, hit->first, hit->second);
    next.beta = BetaParams(s.beta.alpha, s.beta.beta + 1.0);
    return {std::move(next), HCase::UnitUndetectable, removed};
  }

  // Integration testing, only for behaviors unit testing cannot reach.
  if (auto hit = best_integ_match(s, [&s](const IntegrationUB& e) {
        return trigger_in_tests(e, s.tests) != nullptr;
      })) {
    SystemState next = s;
    const std::string removed = next.integration_ubs[*hit].instance.ub_id;
    next.integration_ubs.erase(next.integration_ubs.begin() + static_cast<std::ptrdiff_t>(*hit));
    next.beta = BetaParams(s.beta.alpha + 1.0, s.beta.beta);
    return {std::move(next), HCase::IntegDetectedExistingTest, removed};
  }

  if (auto hit = best_integ_match(s, [](const IntegrationUB& e) {
        return !e.instance.triggers.empty();
      })) {
    SystemState next = s;
    const IntegrationUB& e = next.integration_ubs[*hit];
    const std::string removed = e.instance.ub_id;
    next.tests.insert(*e.instance.triggers.begin());
    next.integration_ubs.erase(next.integration_ubs.begin() + static_cast<std::ptrdiff_t>(*hit));
    next.beta = BetaParams(s.beta.alpha + 1.0, s.beta.beta);
    return {std::move(next), HCase::IntegDetectedNewTest, removed};
  }

  if (auto hit = best_integ_match(s, [](const IntegrationUB&) { return true; })) {
    SystemState next = s;
    const std::string removed = next.integration_ubs[*hit].instance.ub_id;
    next.integration_ubs.erase(next.integration_ubs.begin() + static_cast<std::ptrdiff_t>(*hit));
    next.beta = BetaParams(s.beta.alpha, s.beta.beta + 1.0);
    return {std::move(next), HCase::IntegUndetectable, removed};
  }

  return {s, HCase::Identity, std::nullopt};
}

struct FixedPointResult {
  SystemState state;
  std::vector<HStepOutcome> trace;   // includes the terminal Identity outcome
  std::vector<std::size_t> ub_counts;  // instance count of x0, x1, ...
};

/// Iterates x_{n+1} = step(x_n) until Identity. Each non-identity step must
/// strictly decrease the instance count (it removes exactly one instance);
/// the count sequence travels with the NonConvergence diagnostic so the
/// strict-decrease condition can be audited. max_iter of 0 derives the bound
/// from the initial instance count, which suffices for well-formed scenarios.
inline FixedPointResult fixed_point(const SystemState& initial, std::size_t max_iter = 0) {
  FixedPointResult result;
  result.state = initial;
  result.ub_counts.push_back(countable_ub_instances(initial));
  if (max_iter == 0) max_iter = result.ub_counts.front() + 1;

  for (std::size_t i = 0; i < max_iter; ++i) {
    HStepOutcome outcome = step(result.state);
    const bool done = outcome.case_fired == HCase::Identity;
    result.state = outcome.new_state;
    result.trace.push_back(std::move(outcome));
    if (done) return result;
    const std::size_t count = countable_ub_instances(result.state);
    if (count >= result.ub_counts.back()) {
      result.ub_counts.push_back(count);
      throw NonConvergenceError("undefined-behavior instance count did not strictly decrease",
                                result.ub_counts);
    }
    result.ub_counts.push_back(count);
  }
  throw NonConvergenceError("no fixed point within " + std::to_string(max_iter) + " steps",
                            result.ub_counts);
}

/// A completeness assessment pinned at a fixed point. Later clean sanitizer
/// runs are valid against it only for test sets containing `tests`.
struct FrozenAssessment {
  std::string project_id;
  BetaParams beta;
  double no_ub_probability = 0.0;  // posterior mean at the fixed point
  std::set<std::string> tests;

  friend bool operator==(const FrozenAssessment&, const FrozenAssessment&) = default;
};

inline FrozenAssessment freeze(const SystemState& s) {
  if (step(s).case_fired != HCase::Identity)
    throw NotAFixedPointError("freeze requires a fixed point of the update function");
  return {s.project_id, s.beta, moments_of(s.beta).mean, s.tests};
}

inline bool valid_for_tests(const FrozenAssessment& frozen, const std::set<std::string>& tests) {
  return std::includes(tests.begin(), tests.end(), frozen.tests.begin(), frozen.tests.end());
}

namespace detail {

inline std::set<std::string> detectable_keys(const SystemState& s) {
  std::set<std::string> keys;
  for (const Unit& u : s.units)
    for (const UBInstance& ub : u.ub_instances)
      if (first_effective_trigger(u, ub)) keys.insert(u.unit_id + "/" + ub.ub_id);
  for (const IntegrationUB& e : s.integration_ubs)
    if (!e.detectable_by_unit_testing_alone && !e.instance.triggers.empty())
      keys.insert("integration/" + e.instance.ub_id);
  return keys;
}

}  // namespace detail

/// Models adapting the sanitizer's instrumentation so a previously
/// undetectable behavior gains a detecting input. The input joins the UB's
/// trigger set, the shared Tests set, and the owning unit's meaningful set;
/// every previously detectable behavior must stay detectable.
inline SystemState adapt_instrumentation(const SystemState& s, const std::string& ub_id,
                                         const std::string& new_trigger) {
  const std::set<std::string> before = detail::detectable_keys(s);

  SystemState next = s;
  UBInstance* target = nullptr;
  Unit* owner = nullptr;
  for (Unit& u : next.units)
    for (UBInstance& ub : u.ub_instances)
      if (ub.ub_id == ub_id) {
        if (target) throw InvalidAdaptationError("ub_id '" + ub_id + "' is ambiguous");
        target = &ub;
        owner = &u;
      }
  for (IntegrationUB& e : next.integration_ubs) {
    if (e.detectable_by_unit_testing_alone || e.instance.ub_id != ub_id) continue;
    if (target) throw InvalidAdaptationError("ub_id '" + ub_id + "' is ambiguous");
    target = &e.instance;
  }
  if (!target)
    throw InvalidAdaptationError("unknown ub_id '" + ub_id + "'");
  if (!target->triggers.empty())
    throw InvalidAdaptationError("'" + ub_id + "' is already detectable");

  target->triggers.insert(new_trigger);
  next.tests.insert(new_trigger);
  if (owner && owner->meaningful_tests) owner->meaningful_tests->insert(new_trigger);

  const std::set<std::string> after = detail::detectable_keys(next);
  if (!std::includes(after.begin(), after.end(), before.begin(), before.end()))
    throw MonotonicityViolationError("adaptation lost a previously detectable behavior");
  return next;
}

}  // namespace qta

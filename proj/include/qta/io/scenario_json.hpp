#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>

#include "qta/completeness.hpp"
#include "qta/io/json_util.hpp"

namespace qta::io {

// Scenario schema:
//   {
//     "project": <id>,
//     "prior": {"alpha", "beta"},          // alpha + beta > 0
//     "tests": [<test id>, ...],
//     "units": [{"id", "ubs": [{"id", "triggers": [...]}, ...],
//                "meaningful_tests": [...]?}, ...],
//     "integration_ubs": [{"units": [...], "ub": {"id", "triggers"},
//                          "detectable_by_unit_testing_alone": bool}, ...]?
//   }
// An integration UB flagged detectable_by_unit_testing_alone must have a
// unit-level twin (same ub id in one of its units), which carries the credit.

namespace detail {

inline UBInstance ub_from_json(const json& j, const std::string& path) {
  reject_unknown_keys(j, std::initializer_list<const char*>{"id", "triggers"}, path);
  UBInstance ub;
  ub.ub_id = string_field(j, "id", path);
  for (const json& t : array_field(j, "triggers", path)) {
    if (!t.is_string()) throw SchemaError(path + ".triggers", "expected strings");
    ub.triggers.insert(t.get<std::string>());
  }
  return ub;
}

}  // namespace detail

inline SystemState scenario_from_json(const json& doc) {
  using namespace detail;
  reject_unknown_keys(
      doc,
      std::initializer_list<const char*>{"project", "prior", "tests", "units", "integration_ubs"},
      "$");

  SystemState state;
  state.project_id = string_field(doc, "project", "$");
  if (state.project_id.empty()) throw SchemaError("$.project", "must not be empty");

  const json& prior = member(doc, "prior", "$");
  reject_unknown_keys(prior, std::initializer_list<const char*>{"alpha", "beta"}, "$.prior");
  const double alpha = number_field(prior, "alpha", "$.prior");
  const double beta = number_field(prior, "beta", "$.prior");
  if (alpha < 0.0 || beta < 0.0 || alpha + beta <= 0.0)
    throw SchemaError("$.prior", "a proper prior (alpha + beta > 0) is required");
  state.beta = BetaParams(alpha, beta);

  for (const json& t : array_field(doc, "tests", "$")) {
    if (!t.is_string()) throw SchemaError("$.tests", "expected strings");
    state.tests.insert(t.get<std::string>());
  }

  std::set<std::string> unit_ids;
  const json& units = array_field(doc, "units", "$");
  for (std::size_t i = 0; i < units.size(); ++i) {
    const std::string path = "$.units[" + std::to_string(i) + "]";
    const json& ju = units[i];
    if (!ju.is_object()) throw SchemaError(path, "expected an object");
    reject_unknown_keys(ju, std::initializer_list<const char*>{"id", "ubs", "meaningful_tests"},
                        path);
    Unit unit;
    unit.unit_id = string_field(ju, "id", path);
    if (!unit_ids.insert(unit.unit_id).second)
      throw DuplicateIdError("duplicate unit id '" + unit.unit_id + "'");
    std::set<std::string> ub_ids;
    const json& ubs = array_field(ju, "ubs", path);
    for (std::size_t b = 0; b < ubs.size(); ++b) {
      UBInstance ub = ub_from_json(ubs[b], path + ".ubs[" + std::to_string(b) + "]");
      if (!ub_ids.insert(ub.ub_id).second)
        throw DuplicateIdError("duplicate ub id '" + ub.ub_id + "' in unit '" + unit.unit_id +
                               "'");
      unit.ub_instances.push_back(std::move(ub));
    }
    if (ju.contains("meaningful_tests")) {
      unit.meaningful_tests.emplace();
      for (const json& t : array_field(ju, "meaningful_tests", path)) {
        if (!t.is_string()) throw SchemaError(path + ".meaningful_tests", "expected strings");
        unit.meaningful_tests->insert(t.get<std::string>());
      }
    }
    state.units.push_back(std::move(unit));
  }

  if (doc.contains("integration_ubs")) {
    const json& entries = array_field(doc, "integration_ubs", "$");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string path = "$.integration_ubs[" + std::to_string(i) + "]";
      const json& je = entries[i];
      if (!je.is_object()) throw SchemaError(path, "expected an object");
      reject_unknown_keys(
          je,
          std::initializer_list<const char*>{"units", "ub", "detectable_by_unit_testing_alone"},
          path);
      IntegrationUB entry;
      for (const json& u : array_field(je, "units", path)) {
        if (!u.is_string()) throw SchemaError(path + ".units", "expected strings");
        const std::string id = u.get<std::string>();
        if (unit_ids.count(id) == 0)
          throw DanglingReferenceError("integration entry references unknown unit '" + id + "'");
        entry.unit_ids.insert(id);
      }
      if (entry.unit_ids.empty()) throw SchemaError(path + ".units", "must not be empty");
      entry.instance = ub_from_json(member(je, "ub", path), path + ".ub");
      entry.detectable_by_unit_testing_alone =
          bool_field(je, "detectable_by_unit_testing_alone", path);

      if (entry.detectable_by_unit_testing_alone) {
        bool twin = false;
        for (const Unit& u : state.units) {
          if (entry.unit_ids.count(u.unit_id) == 0) continue;
          for (const UBInstance& ub : u.ub_instances) twin |= ub.ub_id == entry.instance.ub_id;
        }
        if (!twin)
          throw SchemaError(path,
                            "detectable_by_unit_testing_alone requires a unit-level instance "
                            "with the same ub id in one of its units");
      }
      state.integration_ubs.push_back(std::move(entry));
    }
  }

  return state;
}

inline SystemState load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

/// Trace export: one JSON line per update step, terminal identity included.
inline void write_trace(std::ostream& out, const FixedPointResult& result) {
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const HStepOutcome& outcome = result.trace[i];
    json entry{{"step", i + 1},
               {"case", to_string(outcome.case_fired)},
               {"alpha", outcome.new_state.beta.alpha},
               {"beta", outcome.new_state.beta.beta},
               {"ub_count", countable_ub_instances(outcome.new_state)}};
    entry["removed_ub"] = outcome.removed_ub ? json(*outcome.removed_ub) : json(nullptr);
    out << entry.dump() << '\n';
  }
}

inline json frozen_to_json(const FrozenAssessment& frozen) {
  return json{{"project", frozen.project_id},
              {"beta", {{"alpha", frozen.beta.alpha}, {"beta", frozen.beta.beta}}},
              {"no_ub_probability", frozen.no_ub_probability},
              {"tests", frozen.tests}};
}

inline FrozenAssessment frozen_from_json(const json& doc) {
  using namespace detail;
  reject_unknown_keys(
      doc, std::initializer_list<const char*>{"project", "beta", "no_ub_probability", "tests"},
      "$");
  FrozenAssessment frozen;
  frozen.project_id = string_field(doc, "project", "$");
  const json& beta = member(doc, "beta", "$");
  frozen.beta = BetaParams(number_field(beta, "alpha", "$.beta"),
                           number_field(beta, "beta", "$.beta"));
  frozen.no_ub_probability = number_field(doc, "no_ub_probability", "$");
  for (const json& t : array_field(doc, "tests", "$")) {
    if (!t.is_string()) throw SchemaError("$.tests", "expected strings");
    frozen.tests.insert(t.get<std::string>());
  }
  return frozen;
}

inline FrozenAssessment load_frozen_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open frozen assessment: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return frozen_from_json(doc);
}

}  // namespace qta::io

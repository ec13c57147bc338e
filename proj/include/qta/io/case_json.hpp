#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "qta/assurance_case.hpp"
#include "qta/io/json_util.hpp"

namespace qta::io {

// Case document schema:
//   {
//     "root": {"id": ..., "statement": ...},
//     "nodes": [
//       {"id", "statement", "classification": "controlled"|"uncontrolled",
//        "evidence": {"prior": {"alpha", "beta"}}
//                  | {"counter": <id>} | {"tracker": <id>}
//                  | {"no_evidence": true}}            // controlled only
//       | {"id", "statement", "members": [<id>, ...]}  // display grouping
//     ]
//   }
// Uncontrolled nodes must not declare evidence; controlled nodes must.

namespace detail {

inline EvidenceSource evidence_from_json(const json& ev, const std::string& path) {
  if (!ev.is_object() || ev.size() != 1)
    throw SchemaError(path, "expected exactly one of prior, counter, tracker, no_evidence");
  if (ev.contains("prior")) {
    const json& p = ev["prior"];
    const std::string ppath = path + ".prior";
    reject_unknown_keys(p, std::initializer_list<const char*>{"alpha", "beta"}, ppath);
    const double alpha = number_field(p, "alpha", ppath);
    const double beta = number_field(p, "beta", ppath);
    if (alpha < 0.0 || beta < 0.0)
      throw SchemaError(ppath, "shape parameters must be nonnegative");
    if (alpha + beta <= 0.0)
      throw SchemaError(ppath, "prior carries no evidence; declare {\"no_evidence\": true}");
    return FixedPrior{BetaParams(alpha, beta)};
  }
  if (ev.contains("counter")) {
    if (!ev["counter"].is_string())
      throw SchemaError(path + ".counter", "expected a string");
    return CounterBacked{ev["counter"].get<std::string>()};
  }
  if (ev.contains("tracker")) {
    if (!ev["tracker"].is_string())
      throw SchemaError(path + ".tracker", "expected a string");
    return TrackerBacked{ev["tracker"].get<std::string>()};
  }
  if (ev.contains("no_evidence")) {
    if (!ev["no_evidence"].is_boolean() || !ev["no_evidence"].get<bool>())
      throw SchemaError(path + ".no_evidence", "must be true when present");
    return FixedPrior{BetaParams()};  // the explicit Beta(0,0) marker
  }
  throw SchemaError(path, "expected one of prior, counter, tracker, no_evidence");
}

}  // namespace detail

inline AssuranceCase case_from_json(const json& doc) {
  using namespace detail;
  reject_unknown_keys(doc, std::initializer_list<const char*>{"root", "nodes"}, "$");

  const json& root = member(doc, "root", "$");
  reject_unknown_keys(root, std::initializer_list<const char*>{"id", "statement"}, "$.root");
  std::string root_id = string_field(root, "id", "$.root");
  std::string root_statement = string_field(root, "statement", "$.root");

  std::vector<HypothesisNode> nodes;
  std::vector<DisplayGroup> groups;
  const json& node_array = array_field(doc, "nodes", "$");
  for (std::size_t i = 0; i < node_array.size(); ++i) {
    const json& n = node_array[i];
    const std::string path = "$.nodes[" + std::to_string(i) + "]";
    if (!n.is_object()) throw SchemaError(path, "expected an object");
    reject_unknown_keys(
        n, std::initializer_list<const char*>{"id", "statement", "classification", "evidence",
                                              "members"},
        path);
    std::string id = string_field(n, "id", path);
    std::string statement = string_field(n, "statement", path);

    if (n.contains("members")) {
      if (n.contains("classification") || n.contains("evidence"))
        throw SchemaError(path, "a grouping node carries neither classification nor evidence");
      DisplayGroup g{std::move(id), std::move(statement), {}};
      for (const json& m : array_field(n, "members", path)) {
        if (!m.is_string()) throw SchemaError(path + ".members", "expected strings");
        g.members.push_back(m.get<std::string>());
      }
      groups.push_back(std::move(g));
      continue;
    }

    const std::string cls_text = string_field(n, "classification", path);
    const auto cls = parse_classification(cls_text);
    if (!cls)
      throw SchemaError(path + ".classification",
                        "expected \"controlled\" or \"uncontrolled\"");
    HypothesisNode node{std::move(id), std::move(statement), *cls, std::nullopt};
    if (*cls == Classification::Uncontrolled) {
      if (n.contains("evidence"))
        throw SchemaError(path + ".evidence",
                          "uncontrolled nodes carry no evidence; they are the reduction source");
    } else {
      if (!n.contains("evidence"))
        throw SchemaError(path + ".evidence", "controlled nodes require an evidence source");
      node.evidence = evidence_from_json(n["evidence"], path + ".evidence");
    }
    nodes.push_back(std::move(node));
  }

  return AssuranceCase::create(std::move(root_id), std::move(root_statement), std::move(nodes),
                               std::move(groups));
}

inline AssuranceCase load_case_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open case document: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return case_from_json(doc);
}

}  // namespace qta::io

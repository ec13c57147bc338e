#pragma once

#include <algorithm>
#include <initializer_list>
#include <istream>
#include <string>
#include <vector>

#include "qta/io/json_util.hpp"
#include "qta/trial_ledger.hpp"

namespace qta::io {

// Event log: JSON lines, one TrialEvent per line, canonical key order (the
// serializer sorts keys), so export -> replay -> export is byte-identical.
// Facts carry only the fields the stage can produce: the sanitizer fact on
// sanitize stages, signing facts on code-signing stages.

inline json event_to_json(const TrialEvent& e) {
  json facts = json::object();
  if (stage_sanitizes(e.stage))
    facts["sanitizer_rejected_source"] = e.facts.sanitizer_rejected_source;
  if (stage_signs_code(e.stage)) {
    facts["alice_signed"] = e.facts.alice_signed;
    facts["signer_authenticated_as_alice"] = e.facts.signer_authenticated_as_alice;
    facts["impostor_authenticated"] = e.facts.impostor_authenticated;
    facts["q_signed_with_private_key"] = e.facts.q_signed_with_private_key;
    facts["alice_issued_keypair"] = e.facts.alice_issued_keypair;
    facts["private_key_known_only_to_alice"] = e.facts.private_key_known_only_to_alice;
  }
  return json{{"facts", std::move(facts)},
              {"input_id", e.input_id},
              {"opt_level", to_string(e.opt_level)},
              {"sequence", e.sequence},
              {"stage", to_string(e.stage)}};
}

inline std::string format_event_line(const TrialEvent& e) { return event_to_json(e).dump(); }

inline TrialEvent event_from_json(const json& j) {
  using namespace detail;
  reject_unknown_keys(
      j, std::initializer_list<const char*>{"facts", "input_id", "opt_level", "sequence", "stage"},
      "event");

  TrialEvent e;
  const auto stage = parse_stage(string_field(j, "stage", "event"));
  if (!stage) throw MalformedEventError("unknown stage");
  e.stage = *stage;
  const auto level = parse_opt_level(string_field(j, "opt_level", "event"));
  if (!level) throw MalformedEventError("unknown opt_level");
  e.opt_level = *level;
  e.input_id = string_field(j, "input_id", "event");
  const json& seq = member(j, "sequence", "event");
  if (!seq.is_number_unsigned())
    throw MalformedEventError("sequence must be a nonnegative integer");
  e.sequence = seq.get<std::uint64_t>();

  const json& facts = member(j, "facts", "event");
  if (!facts.is_object()) throw MalformedEventError("facts must be an object");
  std::vector<const char*> allowed;
  if (stage_sanitizes(e.stage)) allowed.push_back("sanitizer_rejected_source");
  if (stage_signs_code(e.stage)) {
    allowed.insert(allowed.end(),
                   {"alice_signed", "signer_authenticated_as_alice", "impostor_authenticated",
                    "q_signed_with_private_key", "alice_issued_keypair",
                    "private_key_known_only_to_alice"});
  }
  for (const auto& [key, value] : facts.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&key](const char* k) { return key == k; }))
      throw MalformedEventError("fact '" + key + "' is not valid for stage '" +
                                std::string(to_string(e.stage)) + "'");
  }
  for (const char* key : allowed)
    if (!facts.contains(key))
      throw MalformedEventError("missing fact '" + std::string(key) + "'");

  const auto fact = [&facts](const char* key) {
    if (!facts.contains(key)) return false;
    if (!facts[key].is_boolean()) throw MalformedEventError("facts must be booleans");
    return facts[key].get<bool>();
  };
  e.facts.sanitizer_rejected_source = fact("sanitizer_rejected_source");
  e.facts.alice_signed = fact("alice_signed");
  e.facts.signer_authenticated_as_alice = fact("signer_authenticated_as_alice");
  e.facts.impostor_authenticated = fact("impostor_authenticated");
  e.facts.q_signed_with_private_key = fact("q_signed_with_private_key");
  e.facts.alice_issued_keypair = fact("alice_issued_keypair");
  e.facts.private_key_known_only_to_alice = fact("private_key_known_only_to_alice");

  validate_event(e);
  return e;
}

/// Rebuilds a ledger from an exported log. Deterministic: identical bytes in,
/// identical counters out. Any bad line is reported with its number.
inline TrialLedger replay_log(std::istream& in) {
  TrialLedger ledger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ledger.record(event_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw CorruptLogError(line_no, e.what());
    }
  }
  return ledger;
}

inline std::string export_log(const TrialLedger& ledger) {
  std::string out;
  for (const LogEntry& entry : ledger.log()) {
    out += format_event_line(entry.event);
    out += '\n';
  }
  return out;
}

}  // namespace qta::io

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qta/beta_logic.hpp"
#include "qta/errors.hpp"

namespace qta {

/// The four toolchain stages. Sanitizing and signing depend on compilation,
/// so neither is a stage on its own.
enum class Stage { Compile, CompileSanitize, CompileCodeSign, CompileSanitizeCodeSign };

enum class OptLevel { O0, O123 };

inline constexpr bool stage_signs_code(Stage s) {
  return s == Stage::CompileCodeSign || s == Stage::CompileSanitizeCodeSign;
}

inline constexpr bool stage_sanitizes(Stage s) {
  return s == Stage::CompileSanitize || s == Stage::CompileSanitizeCodeSign;
}

inline constexpr std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Compile: return "compile";
    case Stage::CompileSanitize: return "compile-sanitize";
    case Stage::CompileCodeSign: return "compile-code-sign";
    default: return "compile-sanitize-code-sign";
  }
}

inline std::optional<Stage> parse_stage(std::string_view text) {
  if (text == "compile") return Stage::Compile;
  if (text == "compile-sanitize") return Stage::CompileSanitize;
  if (text == "compile-code-sign") return Stage::CompileCodeSign;
  if (text == "compile-sanitize-code-sign") return Stage::CompileSanitizeCodeSign;
  return std::nullopt;
}

inline constexpr std::string_view to_string(OptLevel l) {
  return l == OptLevel::O0 ? "o0" : "o123";
}

inline std::optional<OptLevel> parse_opt_level(std::string_view text) {
  if (text == "o0") return OptLevel::O0;
  if (text == "o123") return OptLevel::O123;
  return std::nullopt;
}

/// Facts observed at one trial, supplied by the operator or simulator; the
/// ledger does not adjudicate them. Signing facts are valid only on events of
/// code-signing stages; the sanitizer fact only on sanitize stages.
struct TrialFacts {
  bool alice_signed = false;
  bool sanitizer_rejected_source = false;  // reject = nothing was detected
  bool signer_authenticated_as_alice = false;
  bool impostor_authenticated = false;
  bool q_signed_with_private_key = false;
  bool alice_issued_keypair = false;
  bool private_key_known_only_to_alice = false;

  friend bool operator==(const TrialFacts&, const TrialFacts&) = default;
};

/// One toolchain trial. Identity is (stage, input_id, opt_level): running a
/// stage twice on the same input is not a second trial.
struct TrialEvent {
  Stage stage = Stage::Compile;
  std::string input_id;  // content digest of the source fileset
  OptLevel opt_level = OptLevel::O0;
  TrialFacts facts;
  std::uint64_t sequence = 0;

  friend bool operator==(const TrialEvent&, const TrialEvent&) = default;
};

inline void validate_event(const TrialEvent& e) {
  if (e.input_id.empty())
    throw MalformedEventError("input_id must not be empty");
  const TrialFacts& f = e.facts;
  if (f.signer_authenticated_as_alice && f.impostor_authenticated)
    throw MalformedEventError(
        "signer_authenticated_as_alice and impostor_authenticated are mutually exclusive");
  if (!stage_signs_code(e.stage) &&
      (f.alice_signed || f.signer_authenticated_as_alice || f.impostor_authenticated ||
       f.q_signed_with_private_key || f.alice_issued_keypair ||
       f.private_key_known_only_to_alice))
    throw MalformedEventError("signing facts are only valid on code-signing stages");
  if (!stage_sanitizes(e.stage) && f.sanitizer_rejected_source)
    throw MalformedEventError("sanitizer_rejected_source is only valid on sanitize stages");
}

struct CounterPair {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;

  BetaParams to_params() const {
    return BetaParams(static_cast<double>(alpha), static_cast<double>(beta));
  }

  friend bool operator==(const CounterPair&, const CounterPair&) = default;
};

/// Evidence counters over the non-duplicate trials of one optimization level.
/// All four counters are defined over the n code-signing trials.
struct CounterSet {
  CounterPair s1, s3, p1, p3;
  std::uint64_t total_trials = 0;      // m: distinct trials over all stages
  std::uint64_t code_sign_trials = 0;  // n: distinct code-signing trials

  friend bool operator==(const CounterSet&, const CounterSet&) = default;
};

struct LogEntry {
  TrialEvent event;
  bool duplicate = false;  // derived at record time, never stored in the log
};

/// Append-only trial accounting. Duplicates stay in the log for audit but
/// never move a counter. Single-writer: appends are serialized by the caller.
class TrialLedger {
public:
  struct RecordResult {
    bool duplicate = false;
    std::uint64_t sequence = 0;
  };

  RecordResult record(TrialEvent event) {
    validate_event(event);
    if (!log_.empty() && event.sequence <= log_.back().event.sequence)
      throw SequenceRegressionError(
          "event sequence " + std::to_string(event.sequence) +
          " does not advance past " + std::to_string(log_.back().event.sequence));
    const bool duplicate =
        !seen_.insert(TrialKey{event.stage, event.input_id, event.opt_level}).second;
    const std::uint64_t sequence = event.sequence;
    log_.push_back(LogEntry{std::move(event), duplicate});
    return {duplicate, sequence};
  }

  CounterSet counters(OptLevel level) const {
    CounterSet c;
    for (const LogEntry& entry : log_) {
      if (entry.duplicate || entry.event.opt_level != level) continue;
      ++c.total_trials;
      if (!stage_signs_code(entry.event.stage)) continue;
      ++c.code_sign_trials;
      const TrialFacts& f = entry.event.facts;
      if (f.alice_signed && f.sanitizer_rejected_source) ++c.s1.alpha;
      if (f.alice_signed && !f.sanitizer_rejected_source) ++c.s1.beta;
      if (f.signer_authenticated_as_alice && f.q_signed_with_private_key) ++c.s3.alpha;
      if (f.impostor_authenticated && f.q_signed_with_private_key) ++c.s3.beta;
      if (f.alice_issued_keypair) ++c.p1.alpha;
      if (f.alice_issued_keypair && f.private_key_known_only_to_alice) ++c.p3.alpha;
      if (f.alice_issued_keypair && !f.private_key_known_only_to_alice) ++c.p3.beta;
    }
    c.p1.beta = c.code_sign_trials - c.p1.alpha;  // beta_p1 = n - alpha_p1
    return c;
  }

  /// Beta PDF for one of the counter-backed hypotheses. Beta(0,0) signals
  /// "no evidence yet"; the caller decides what that means.
  BetaParams resolve(std::string_view node_id, OptLevel level) const {
    const CounterSet c = counters(level);
    if (node_id == "s1") return c.s1.to_params();
    if (node_id == "s3") return c.s3.to_params();
    if (node_id == "p1") return c.p1.to_params();
    if (node_id == "p3") return c.p3.to_params();
    throw UnknownCounterError("no counter is defined for '" + std::string(node_id) + "'");
  }

  const std::vector<LogEntry>& log() const noexcept { return log_; }

  std::uint64_t next_sequence() const noexcept {
    return log_.empty() ? 1 : log_.back().event.sequence + 1;
  }

  static TrialLedger from_events(std::span<const TrialEvent> events) {
    TrialLedger ledger;
    for (const TrialEvent& e : events) ledger.record(e);
    return ledger;
  }

private:
  using TrialKey = std::tuple<Stage, std::string, OptLevel>;

  std::vector<LogEntry> log_;
  std::set<TrialKey> seen_;
};

}  // namespace qta

#pragma once

#include <cstdint>
#include <stdexcept>

#include "qta/beta_logic.hpp"
#include "qta/errors.hpp"

namespace qta {

/// Binomial evidence: y successes out of n trials.
struct Evidence {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  Evidence() = default;

  Evidence(std::uint64_t successes_, std::uint64_t trials_)
      : successes(successes_), trials(trials_) {
    if (successes > trials)
      throw std::invalid_argument("Evidence: successes must not exceed trials");
  }

  friend Evidence operator+(const Evidence& a, const Evidence& b) {
    return Evidence(a.successes + b.successes, a.trials + b.trials);
  }

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

/// Conjugate posterior for a Binomial likelihood: Beta(a + y, b + n - y).
inline BetaParams posterior(const BetaParams& prior, const Evidence& e) {
  return BetaParams(prior.alpha + static_cast<double>(e.successes),
                    prior.beta + static_cast<double>(e.trials - e.successes));
}

enum class Verdict { Accepted, Rejected };

enum class GroundTruth { HasUB, NoUB, Unknown };

/// One sanitizer run on one source program, paired with what a (possibly
/// pending) manual inspection established about the program.
struct SanitizerObservation {
  Verdict verdict = Verdict::Rejected;
  GroundTruth ground_truth = GroundTruth::Unknown;
};

enum class SanitizerRule {
  Success,         // accepted: the behavior exists (soundness) and was found
  Failure,         // rejected code that has an undefined behavior
  NotInformative,  // rejected clean code: a sound tool cannot do otherwise
  Uninspected,     // rejected, ground truth unknown: recorded, not applied
};

struct SanitizerUpdate {
  BetaParams posterior;
  SanitizerRule rule = SanitizerRule::Uninspected;
};

/// The three completeness update rules. An accept proves the behavior exists
/// under the soundness assumption, so Accepted with ground truth NoUB is a
/// contradiction and throws. Rejections with unknown ground truth are left
/// unapplied so a later inspection can replay them.
inline SanitizerUpdate sanitizer_update(const BetaParams& prior,
                                        const SanitizerObservation& obs) {
  if (obs.verdict == Verdict::Accepted) {
    if (obs.ground_truth == GroundTruth::NoUB)
      throw SoundnessViolationError(
          "sanitizer accepted code with no undefined behavior");
    return {BetaParams(prior.alpha + 1.0, prior.beta), SanitizerRule::Success};
  }
  switch (obs.ground_truth) {
    case GroundTruth::HasUB:
      return {BetaParams(prior.alpha, prior.beta + 1.0), SanitizerRule::Failure};
    case GroundTruth::NoUB:
      return {prior, SanitizerRule::NotInformative};
    default:
      return {prior, SanitizerRule::Uninspected};
  }
}

}  // namespace qta

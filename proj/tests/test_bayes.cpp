#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qta/bayes.hpp"

using namespace qta;

TEST_CASE("posterior adds evidence to the shape parameters") {
  CHECK(posterior(BetaParams(19, 43), Evidence(1, 1)) == BetaParams(20, 43));
  CHECK(posterior(BetaParams(2, 7), Evidence(0, 0)) == BetaParams(2, 7));
  CHECK(posterior(BetaParams(2, 2), Evidence(3, 10)) == BetaParams(5, 9));
}

TEST_CASE("posterior mean matches a grid-normalized Bayes computation") {
  const BetaParams post = posterior(BetaParams(2, 2), Evidence(3, 10));
  const double mean = moments_of(post).mean;
  CHECK(mean == Approx(5.0 / 14.0).margin(1e-15));
  CHECK(std::abs(mean - oracle::grid_posterior_mean(2, 2, 3, 10)) < 1e-4);

  // a couple more shapes against the same brute-force route
  CHECK(std::abs(moments_of(posterior(BetaParams(19, 43), Evidence(4, 9))).mean -
                 oracle::grid_posterior_mean(19, 43, 4, 9)) < 1e-4);
  CHECK(std::abs(moments_of(posterior(BetaParams(3, 2), Evidence(5, 9))).mean -
                 oracle::grid_posterior_mean(3, 2, 5, 9)) < 1e-4);
}

TEST_CASE("evidence validates and adds componentwise") {
  CHECK_THROWS_AS(Evidence(3, 2), std::invalid_argument);
  CHECK(Evidence(1, 2) + Evidence(3, 4) == Evidence(4, 6));
}

TEST_CASE("posterior is additive over evidence") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::uint64_t> trials(0, 50);
  std::uniform_int_distribution<std::uint64_t> half_step(0, 40);
  for (int i = 0; i < 300; ++i) {
    // dyadic priors keep every addition exact
    const BetaParams prior(static_cast<double>(half_step(rng)) / 2.0 + 0.5,
                           static_cast<double>(half_step(rng)) / 2.0 + 0.5);
    const std::uint64_t n1 = trials(rng), n2 = trials(rng);
    const Evidence e1(std::uniform_int_distribution<std::uint64_t>(0, n1)(rng), n1);
    const Evidence e2(std::uniform_int_distribution<std::uint64_t>(0, n2)(rng), n2);
    CHECK(posterior(posterior(prior, e1), e2) == posterior(prior, e1 + e2));
  }
}

TEST_CASE("posterior mean converges to the empirical rate") {
  const BetaParams post = posterior(BetaParams(2, 2), Evidence(3000, 10000));
  CHECK(std::abs(moments_of(post).mean - 0.3) < 1e-2);
}

TEST_CASE("sanitizer update implements the three rules") {
  const BetaParams prior(19, 43);

  const auto accepted = sanitizer_update(prior, {Verdict::Accepted, GroundTruth::HasUB});
  CHECK(accepted.posterior == BetaParams(20, 43));
  CHECK(accepted.rule == SanitizerRule::Success);

  const auto missed = sanitizer_update(prior, {Verdict::Rejected, GroundTruth::HasUB});
  CHECK(missed.posterior == BetaParams(19, 44));
  CHECK(missed.rule == SanitizerRule::Failure);

  const auto clean = sanitizer_update(prior, {Verdict::Rejected, GroundTruth::NoUB});
  CHECK(clean.posterior == prior);
  CHECK(clean.rule == SanitizerRule::NotInformative);

  SECTION("rejections with unknown ground truth are recorded, not applied") {
    const auto pending = sanitizer_update(prior, {Verdict::Rejected, GroundTruth::Unknown});
    CHECK(pending.posterior == prior);
    CHECK(pending.rule == SanitizerRule::Uninspected);
  }

  SECTION("an accept of clean code contradicts soundness") {
    CHECK_THROWS_AS(sanitizer_update(prior, {Verdict::Accepted, GroundTruth::NoUB}),
                    SoundnessViolationError);
  }

  SECTION("an accept proves the behavior exists even before inspection") {
    const auto early = sanitizer_update(prior, {Verdict::Accepted, GroundTruth::Unknown});
    CHECK(early.posterior == BetaParams(20, 43));
    CHECK(early.rule == SanitizerRule::Success);
  }
}

#pragma once

// Test-only oracles. Each recomputes its answer from first principles so it
// stays independent of the library code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qta/completeness.hpp"

namespace oracle {

inline double beta_sample(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;     // unbiased
  double se_mean = 0.0;      // standard error of the sample mean
  double se_variance = 0.0;  // large-N standard error of the sample variance
};

inline SampleStats stats(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;

  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;

  SampleStats s;
  s.mean = mean;
  s.variance = m2 * n / (n - 1.0);
  s.se_mean = std::sqrt(m2 / n);
  s.se_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return s;
}

/// Empirical mean/variance of the elementwise product of independent
/// Beta(a1,b1) and Beta(a2,b2) samples.
inline SampleStats product_stats(std::uint64_t seed, double a1, double b1, double a2, double b2,
                                 std::size_t n) {
  std::mt19937_64 rng(seed);
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i)
    prod[i] = beta_sample(rng, a1, b1) * beta_sample(rng, a2, b2);
  return stats(prod);
}

/// Brute-force posterior mean of a Beta(alpha,beta) prior under a Binomial
/// likelihood, normalized over a uniform grid on [0,1]. Assumes shapes >= 1.
inline double grid_posterior_mean(double alpha, double beta, std::uint64_t y, std::uint64_t n,
                                  double step = 1e-3) {
  long double num = 0.0L, den = 0.0L;
  const long double ea = alpha - 1.0L + static_cast<long double>(y);
  const long double eb = beta - 1.0L + static_cast<long double>(n - y);
  const std::size_t points = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
  for (std::size_t i = 0; i < points; ++i) {
    const long double pi = static_cast<long double>(i) * static_cast<long double>(step);
    const long double w = std::pow(pi, ea) * std::pow(1.0L - pi, eb);
    num += pi * w;
    den += w;
  }
  return static_cast<double>(num / den);
}

/// Ground-truth instance counting for update-function scenarios: how many
/// instances a full test cycle must remove via detection vs. undetectable
/// failure. Flagged integration entries ride on their unit-level twins.
struct UBCounts {
  std::size_t detectable = 0;
  std::size_t undetectable = 0;
};

inline UBCounts count_ubs(const qta::SystemState& s) {
  UBCounts c;
  for (const qta::Unit& u : s.units) {
    for (const qta::UBInstance& ub : u.ub_instances) {
      bool detectable = false;
      for (const std::string& t : ub.triggers)
        detectable |= !u.meaningful_tests || u.meaningful_tests->count(t) > 0;
      detectable ? ++c.detectable : ++c.undetectable;
    }
  }
  for (const qta::IntegrationUB& e : s.integration_ubs) {
    if (e.detectable_by_unit_testing_alone) continue;
    e.instance.triggers.empty() ? ++c.undetectable : ++c.detectable;
  }
  return c;
}

/// Random desk-scale scenario for conservation/property suites.
inline qta::SystemState random_scenario(std::mt19937_64& rng, std::size_t max_ubs) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> unit_count(1, 4);
  std::uniform_int_distribution<std::size_t> trigger_count(0, 2);
  std::uniform_int_distribution<int> test_pick(0, 9);
  std::uniform_real_distribution<double> shape(1.0, 40.0);

  qta::SystemState s;
  s.project_id = "random";
  s.beta = qta::BetaParams(std::floor(shape(rng)), std::floor(shape(rng)));

  const std::size_t n_units = unit_count(rng);
  std::size_t ubs_left = max_ubs;
  int next_ub = 0;
  for (std::size_t i = 0; i < n_units; ++i) {
    qta::Unit u;
    u.unit_id = "u" + std::to_string(i);
    std::uniform_int_distribution<std::size_t> per_unit(0, std::min<std::size_t>(3, ubs_left));
    const std::size_t n_ubs = per_unit(rng);
    for (std::size_t b = 0; b < n_ubs; ++b) {
      qta::UBInstance ub;
      ub.ub_id = "b" + std::to_string(next_ub++);
      const std::size_t n_triggers = trigger_count(rng);
      for (std::size_t t = 0; t < n_triggers; ++t)
        ub.triggers.insert("t" + std::to_string(test_pick(rng)));
      u.ub_instances.push_back(std::move(ub));
    }
    ubs_left -= n_ubs;
    s.units.push_back(std::move(u));
  }

  // some initial tests
  const std::size_t n_tests = static_cast<std::size_t>(test_pick(rng)) / 2;
  for (std::size_t i = 0; i < n_tests; ++i) s.tests.insert("t" + std::to_string(test_pick(rng)));

  // integration-only behaviors
  std::uniform_int_distribution<std::size_t> integ_count(0, std::min<std::size_t>(2, ubs_left));
  const std::size_t n_integ = integ_count(rng);
  for (std::size_t i = 0; i < n_integ; ++i) {
    qta::IntegrationUB e;
    e.unit_ids.insert(s.units[rng() % s.units.size()].unit_id);
    e.instance.ub_id = "x" + std::to_string(next_ub++);
    const std::size_t n_triggers = trigger_count(rng);
    for (std::size_t t = 0; t < n_triggers; ++t)
      e.instance.triggers.insert("t" + std::to_string(test_pick(rng)));
    e.detectable_by_unit_testing_alone = false;
    s.integration_ubs.push_back(std::move(e));
  }

  // occasionally a flagged entry twinned with an existing unit instance
  if (coin(rng)) {
    for (const qta::Unit& u : s.units) {
      if (u.ub_instances.empty()) continue;
      qta::IntegrationUB e;
      e.unit_ids.insert(u.unit_id);
      e.instance.ub_id = u.ub_instances.front().ub_id;
      e.instance.triggers.insert("t" + std::to_string(test_pick(rng)));
      e.detectable_by_unit_testing_alone = true;
      s.integration_ubs.push_back(std::move(e));
      break;
    }
  }

  return s;
}

}  // namespace oracle

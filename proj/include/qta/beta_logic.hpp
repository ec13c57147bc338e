#pragma once

#include <cmath>
#include <initializer_list>
#include <ostream>
#include <span>

#include "qta/errors.hpp"

namespace qta {

/// Hyperparameter pair (alpha, beta) naming one Beta PDF. This is the unit of
/// evidence state: alpha counts successes in shape space, beta failures.
///
/// Beta(0,0) is constructible as an explicit "no evidence yet" marker (ledger
/// counters before any trial); every moment operation rejects it.
struct BetaParams {
  double alpha = 0.0;
  double beta = 0.0;

  BetaParams() = default;

  BetaParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0)
      throw std::invalid_argument("BetaParams: shapes must be finite and nonnegative");
  }

  bool no_evidence() const noexcept { return alpha == 0.0 && beta == 0.0; }

  friend bool operator==(const BetaParams&, const BetaParams&) = default;

  friend std::ostream& operator<<(std::ostream& os, const BetaParams& p) {
    return os << "Beta(" << p.alpha << "," << p.beta << ")";
  }
};

/// (mean, variance) of a [0,1]-valued random variable. Logical evaluation over
/// independent Beta variables happens entirely in this representation.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;

  /// Composition of exact product moments can land on the feasibility bound
  /// and overshoot it by rounding; the bound check tolerates this much.
  static constexpr double kFeasibilitySlack = 1e-12;

  Moments() = default;

  Moments(double mean_, double variance_) : mean(mean_), variance(variance_) {
    if (!std::isfinite(mean) || mean < 0.0 || mean > 1.0)
      throw std::invalid_argument("Moments: mean must lie in [0,1]");
    if (!std::isfinite(variance) || variance < 0.0 ||
        variance > mean * (1.0 - mean) + kFeasibilitySlack)
      throw std::invalid_argument("Moments: variance must lie in [0, mean*(1-mean)]");
  }

  friend bool operator==(const Moments&, const Moments&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Moments& m) {
    return os << "(mean=" << m.mean << ", var=" << m.variance << ")";
  }
};

/// Moments of the multiplicative identity Beta(1,0): certainly true.
inline Moments certainly_true() { return Moments(1.0, 0.0); }

/// Moments of the additive identity Beta(0,1): certainly false.
inline Moments certainly_false() { return Moments(0.0, 0.0); }

/// mean = a/(a+b), variance = ab/((a+b)^2 (a+b+1)).
/// Throws NoEvidenceError for Beta(0,0), whose moments are undefined.
inline Moments moments_of(const BetaParams& p) {
  if (p.no_evidence())
    throw NoEvidenceError("moments are undefined for Beta(0,0)");
  const double s = p.alpha + p.beta;
  const double mean = p.alpha / s;
  const double variance = p.alpha * p.beta / (s * s * (s + 1.0));
  return Moments(mean, variance);
}

/// Conjunction of independent variables, represented by their product:
///   E[XY]  = E[X] E[Y]
///   var XY = var X var Y + var Y E[X]^2 + var X E[Y]^2
/// Exact only under independence, which the caller asserts.
inline Moments logic_and(const Moments& x, const Moments& y) {
  const double mean = x.mean * y.mean;
  const double variance =
      x.variance * y.variance + y.variance * x.mean * x.mean + x.variance * y.mean * y.mean;
  return Moments(mean, variance);
}

/// Negation 1 - X: E flips, variance is unchanged.
inline Moments logic_not(const Moments& x) {
  return Moments(1.0 - x.mean, x.variance);
}

/// Disjunction, by definition the De Morgan expansion of logic_and/logic_not.
inline Moments logic_or(const Moments& x, const Moments& y) {
  return logic_not(logic_and(logic_not(x), logic_not(y)));
}

/// Left fold of logic_and over a nonempty collection of mutually independent
/// variables; independence makes the result independent of fold order.
inline Moments fold_and(std::span<const Moments> factors) {
  if (factors.empty())
    throw EmptyConjunctionError("fold_and over an empty collection");
  Moments acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = logic_and(acc, factors[i]);
  return acc;
}

inline Moments fold_and(std::initializer_list<Moments> factors) {
  return fold_and(std::span<const Moments>(factors.begin(), factors.size()));
}

/// Inversion of moments_of:
///   alpha = mu^2 (1-mu) / var - mu,  beta = mu (1-mu)^2 / var - (1-mu)
/// Zero variance names the identities: (1,0) -> Beta(1,0), (0,0) -> Beta(0,1).
/// Every other zero-variance mean, and any variance at or above mu(1-mu),
/// names no Beta PDF and is rejected rather than nudged.
inline BetaParams params_from_moments(const Moments& m) {
  if (m.variance == 0.0) {
    if (m.mean == 1.0) return BetaParams(1.0, 0.0);
    if (m.mean == 0.0) return BetaParams(0.0, 1.0);
    throw InfeasibleMomentsError("zero variance with mean strictly inside (0,1)");
  }
  const double mu = m.mean;
  const double alpha = mu * mu * (1.0 - mu) / m.variance - mu;
  const double beta = mu * (1.0 - mu) * (1.0 - mu) / m.variance - (1.0 - mu);
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw InfeasibleMomentsError("variance at or above mean*(1-mean) names no Beta PDF");
  return BetaParams(alpha, beta);
}

}  // namespace qta

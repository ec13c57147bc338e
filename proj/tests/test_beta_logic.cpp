#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qta/beta_logic.hpp"

using namespace qta;

namespace {

Moments random_moments(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mean_dist(0.0, 1.0);
  const double mean = mean_dist(rng);
  std::uniform_real_distribution<double> var_dist(0.0, mean * (1.0 - mean));
  return Moments(mean, var_dist(rng));
}

}  // namespace

TEST_CASE("moments_of matches the closed forms") {
  const Moments s2 = moments_of(BetaParams(19, 43));
  CHECK(s2.mean == Approx(19.0 / 62.0).margin(1e-15));
  CHECK(s2.variance == Approx(817.0 / 242172.0).margin(1e-15));

  const Moments uniform = moments_of(BetaParams(1, 1));
  CHECK(uniform.mean == 0.5);
  CHECK(uniform.variance == Approx(1.0 / 12.0).margin(1e-16));

  CHECK(moments_of(BetaParams(1, 0)) == Moments(1.0, 0.0));
  CHECK(moments_of(BetaParams(0, 1)) == Moments(0.0, 0.0));
}

TEST_CASE("moments_of rejects the no-evidence marker") {
  CHECK(BetaParams().no_evidence());
  CHECK_THROWS_AS(moments_of(BetaParams()), NoEvidenceError);
}

TEST_CASE("construction validates invariants") {
  CHECK_THROWS_AS(BetaParams(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(Moments(1.2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Moments(0.5, 0.3), std::invalid_argument);  // above mean*(1-mean)
  CHECK_THROWS_AS(Moments(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("Monte-Carlo agreement for Beta(19,43) moments") {
  std::mt19937_64 rng(7101);
  std::vector<double> xs(200000);
  for (double& x : xs) x = oracle::beta_sample(rng, 19, 43);
  const auto s = oracle::stats(xs);
  const Moments m = moments_of(BetaParams(19, 43));
  CHECK(std::abs(m.mean - s.mean) <= 3.0 * s.se_mean);
  CHECK(std::abs(m.variance - s.variance) <= 3.0 * s.se_variance);
}

TEST_CASE("conjunction is the exact product of moments") {
  const Moments half(0.5, 0.05);
  const Moments prod = logic_and(half, half);
  CHECK(prod.mean == 0.25);
  CHECK(prod.variance == Approx(0.0275).margin(1e-16));

  SECTION("multiplicative identity") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const Moments x = random_moments(rng);
      CHECK(logic_and(certainly_true(), x) == x);
      CHECK(logic_and(x, certainly_true()) == x);
    }
  }

  SECTION("annihilator") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 200; ++i) {
      const Moments x = random_moments(rng);
      CHECK(logic_and(moments_of(BetaParams(0, 1)), x) == Moments(0.0, 0.0));
    }
  }

  SECTION("commutativity and associativity within 1e-12") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
      const Moments x = random_moments(rng);
      const Moments y = random_moments(rng);
      const Moments z = random_moments(rng);
      const Moments xy = logic_and(x, y);
      const Moments yx = logic_and(y, x);
      CHECK(xy.mean == Approx(yx.mean).margin(1e-12));
      CHECK(xy.variance == Approx(yx.variance).margin(1e-12));
      const Moments a = logic_and(logic_and(x, y), z);
      const Moments b = logic_and(x, logic_and(y, z));
      CHECK(a.mean == Approx(b.mean).margin(1e-12));
      CHECK(a.variance == Approx(b.variance).margin(1e-12));
    }
  }
}

TEST_CASE("conjunction agrees with Monte-Carlo product sampling") {
  std::mt19937_64 param_rng(4001);
  std::uniform_real_distribution<double> shape(0.5, 50.0);
  for (int pair = 0; pair < 4; ++pair) {
    const double a1 = shape(param_rng), b1 = shape(param_rng);
    const double a2 = shape(param_rng), b2 = shape(param_rng);
    const auto s = oracle::product_stats(9000 + pair, a1, b1, a2, b2, 200000);
    const Moments m = logic_and(moments_of(BetaParams(a1, b1)), moments_of(BetaParams(a2, b2)));
    INFO("pair " << pair << ": Beta(" << a1 << "," << b1 << ") * Beta(" << a2 << "," << b2 << ")");
    CHECK(std::abs(m.mean - s.mean) <= 3.0 * s.se_mean);
    CHECK(std::abs(m.variance - s.variance) <= 3.0 * s.se_variance);
  }
}

TEST_CASE("negation flips the mean and keeps the variance") {
  const Moments s2 = moments_of(BetaParams(19, 43));
  const Moments neg = logic_not(s2);
  CHECK(neg.mean == Approx(43.0 / 62.0).margin(1e-15));
  CHECK(neg.variance == s2.variance);

  CHECK(logic_not(Moments(1.0, 0.0)) == Moments(0.0, 0.0));
  CHECK(logic_not(Moments(0.5, 1.0 / 12.0)) == Moments(0.5, 1.0 / 12.0));

  SECTION("involution") {
    const Moments high = moments_of(BetaParams(43, 19));
    CHECK(logic_not(logic_not(high)) == high);
    // means below 0.5 can re-round 1 - m; the result stays within one ulp
    const Moments twice = logic_not(logic_not(s2));
    CHECK(std::abs(twice.mean - s2.mean) <= std::ldexp(1.0, -53));
    CHECK(twice.variance == s2.variance);
    // exact for means in [0.5, 1], where 1 - m is computed without rounding
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> mean_dist(0.5, 1.0);
    for (int i = 0; i < 200; ++i) {
      const double mean = mean_dist(rng);
      const Moments x(mean, 0.1 * mean * (1.0 - mean));
      CHECK(logic_not(logic_not(x)) == x);
    }
    // negation's image is stable under double negation for any mean
    std::uniform_real_distribution<double> any_mean(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const Moments x(any_mean(rng), 0.0);
      const Moments n = logic_not(x);
      CHECK(logic_not(logic_not(n)) == n);
    }
  }
}

TEST_CASE("disjunction is the De Morgan expansion, bit for bit") {
  const Moments half(0.5, 0.05);
  const Moments any = logic_or(half, half);
  CHECK(any.mean == 0.75);
  CHECK(any.variance == Approx(0.0275).margin(1e-16));

  std::mt19937_64 rng(15);
  for (int i = 0; i < 200; ++i) {
    const Moments x = random_moments(rng);
    const Moments y = random_moments(rng);
    CHECK(logic_or(x, y) == logic_not(logic_and(logic_not(x), logic_not(y))));
  }

  // identities: true absorbs, false is neutral (exact on the stable range)
  CHECK(logic_or(Moments(1.0, 0.0), half) == Moments(1.0, 0.0));
  const Moments high(0.75, 0.01);
  CHECK(logic_or(high, certainly_false()) == high);
  CHECK(logic_or(certainly_false(), high) == high);
}

TEST_CASE("feasibility closure of the algebra") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 500; ++i) {
    const Moments x = random_moments(rng);
    const Moments y = random_moments(rng);
    for (const Moments& r : {logic_and(x, y), logic_or(x, y), logic_not(x)}) {
      CHECK(r.variance <= r.mean * (1.0 - r.mean) + 1e-12);
      CHECK(r.variance >= 0.0);
    }
  }
}

TEST_CASE("params_from_moments inverts moments_of") {
  CHECK(params_from_moments(Moments(0.5, 1.0 / 12.0)) == BetaParams(1, 1));
  CHECK(params_from_moments(Moments(1.0, 0.0)) == BetaParams(1, 0));
  CHECK(params_from_moments(Moments(0.0, 0.0)) == BetaParams(0, 1));

  const BetaParams s2 = params_from_moments(moments_of(BetaParams(19, 43)));
  CHECK(s2.alpha == Approx(19.0).epsilon(1e-9));
  CHECK(s2.beta == Approx(43.0).epsilon(1e-9));

  SECTION("round trip over random shapes") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> shape(0.5, 50.0);
    for (int i = 0; i < 200; ++i) {
      const BetaParams p(shape(rng), shape(rng));
      const BetaParams q = params_from_moments(moments_of(p));
      CHECK(q.alpha == Approx(p.alpha).epsilon(1e-9));
      CHECK(q.beta == Approx(p.beta).epsilon(1e-9));
    }
  }

  SECTION("infeasible pairs are rejected, not nudged") {
    CHECK_THROWS_AS(params_from_moments(Moments(0.5, 0.0)), InfeasibleMomentsError);
    CHECK_THROWS_AS(params_from_moments(Moments(0.5, 0.25)), InfeasibleMomentsError);
  }
}

TEST_CASE("fold_and composes the root conjunction") {
  const Moments s2 = moments_of(BetaParams(19, 43));
  CHECK(fold_and({s2}) == s2);

  const Moments t = certainly_true();
  const Moments y(0.9, 0.008);
  CHECK(fold_and({t, t, y}) == y);

  const Moments root = fold_and({t, s2, t, t, t});
  CHECK(root == s2);

  CHECK_THROWS_AS(fold_and(std::span<const Moments>{}), EmptyConjunctionError);

  SECTION("order independence within 1e-12") {
    std::mt19937_64 rng(18);
    std::vector<Moments> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(random_moments(rng));
    const Moments forward = fold_and(xs);
    std::vector<Moments> reversed(xs.rbegin(), xs.rend());
    const Moments backward = fold_and(reversed);
    CHECK(forward.mean == Approx(backward.mean).margin(1e-12));
    CHECK(forward.variance == Approx(backward.variance).margin(1e-12));
  }
}

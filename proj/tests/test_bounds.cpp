#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qmfnet/bounds.hpp"
#include "qmfnet/polar.hpp"
#include "qmfnet/rng.hpp"

using namespace qmf;

TEST_SUITE("bounds") {

TEST_CASE("select_params: infeasible rate at small c_bar") {
  const SchemeParams p = select_params(20.0, 2);
  CHECK(p.r_i == doctest::Approx(20.0 - 32.0 - 1.0));
  CHECK(!p.feasible);
  CHECK(p.overall_rate == 0.0);
  CHECK(p.ell == 3 + 9);  // ceil(2 log2 20) = 9
  CHECK(p.h_check_ok);
}

TEST_CASE("select_params: feasible arithmetic at c_bar 50, n 3") {
  const SchemeParams p = select_params(50.0, 3);
  CHECK(p.r_i == doctest::Approx(1.0));
  CHECK(p.feasible);
  CHECK(p.ell == 3 + 12);  // ceil(2 log2 50) = 12
  CHECK(p.p_i_bound == doctest::Approx(std::pow(2.0, -13.0)));
  CHECK(p.r_o == doctest::Approx(1.0 - entropy(std::pow(2.0, -12.0))).epsilon(1e-12));
  CHECK(p.overall_rate == doctest::Approx(p.r_i * p.r_o));
  CHECK(p.overall_rate >= 50.0 - 16.0 * 3.0 - 2.0);
  CHECK(p.h_check_ok);
}

TEST_CASE("select_params: boundary c_bar 16 still satisfies the entropy check") {
  const SchemeParams p = select_params(16.0, 2);
  CHECK(p.ell == 11);
  CHECK(entropy(2.0 * p.p_i_bound) <= 1.0 / 16.0);
  CHECK(p.h_check_ok);
}

TEST_CASE("parameter grid: entropy check and the overall-rate gap") {
  for (int c_bar = 17; c_bar <= 200; ++c_bar) {
    for (int n : {2, 3, 4, 6, 10}) {
      const SchemeParams p = select_params(c_bar, n);
      CHECK(entropy(2.0 * p.p_i_bound) <= 1.0 / c_bar);
      CHECK(p.feasible == (c_bar > 16 * n + 1));
      if (p.feasible) CHECK(p.overall_rate >= c_bar - 16.0 * n - 2.0);
    }
  }
}

TEST_CASE("lemma1 bound: worked scalar example") {
  // |h| = 1, one receive antenna, sigma^2 = 2, ell = 4:
  // exponent/ell = log2(2) - (1/2) log2 e = 0.27865, bound = 2^-1.1146.
  const double lg = containment_log2_bound({1.0}, 1, 2.0, 4);
  CHECK(lg == doctest::Approx(-4.0 * (1.0 - 0.5 * std::log2(std::exp(1.0)))).epsilon(1e-12));
  CHECK(std::pow(2.0, lg) == doctest::Approx(0.462).epsilon(2e-3));
}

TEST_CASE("lemma1 bound: zero channel is vacuous, large sigma removes the penalty") {
  CHECK(containment_log2_bound({0.0}, 1, 2.0, 4) >= 0.0);  // vacuous, flagged by sign
  const double lg = containment_log2_bound({1.0}, 1, 1e12, 3);
  CHECK(lg == doctest::Approx(-3.0).epsilon(1e-6));  // -> -ell * I
}

TEST_CASE("lemma1 empirical: scalar case stays below the analytic bound") {
  GaussianStream s(derive_seed(5, "lemma1"));
  const double est = containment_empirical({{{1.0, 0.0}}}, {{{0.0, 0.0}}}, 2.0, 1, 200000, s);
  // Exact value: P(|x|^2 <= 2) with |x|^2 ~ Exp(mean 2) = 1 - e^-1.
  CHECK(est == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(0.01));
  const double bound = std::pow(2.0, containment_log2_bound({1.0}, 1, 2.0, 1));
  CHECK(est <= bound);
}

TEST_CASE("lemma1 empirical: impossible shift gives zero, trivial case gives one") {
  GaussianStream s(derive_seed(6, "lemma1"));
  const double est0 =
      containment_empirical({{{1.0, 0.0}}}, {{{1e9, 0.0}}}, 2.0, 1, 10000, s);
  CHECK(est0 == 0.0);
  const double est1 = containment_empirical({{{0.0, 0.0}}}, {{{0.0, 0.0}}}, 2.0, 1, 1000, s);
  CHECK(est1 == 1.0);
}

TEST_CASE("p_omega bound arithmetic") {
  CHECK(p_omega_log2_bound(50.0, 3, 9) == doctest::Approx(-9.0 * 41.0));
  CHECK(p_omega_log2_bound(9.0, 3, 7) == doctest::Approx(0.0));  // vacuous boundary
  CHECK(p_omega_log2_bound(50.0, 3, 0) == doctest::Approx(0.0));
}

TEST_CASE("indistinguishability bound arithmetic") {
  SchemeParams p = select_params(120.0, 3);  // feasible: r_i = 71
  REQUIRE(p.feasible);
  CHECK(indistinguishability_log2_bound(p) ==
        doctest::Approx(-static_cast<double>(p.ell)));
  CHECK(indistinguishability_log2_bound(p.c_bar, p.n_nodes, p.ell, p.r_i - 1.0) ==
        doctest::Approx(-2.0 * static_cast<double>(p.ell)));
  CHECK(indistinguishability_log2_bound(p.c_bar, p.n_nodes, p.ell, p.r_i + 1.0) ==
        doctest::Approx(0.0));
}

TEST_CASE("chernoff bound value, limit, and domain") {
  CHECK(chernoff_bound(1000, 0.01) == doctest::Approx(std::exp(-3.0)));
  CHECK(chernoff_bound(1000, 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_AS(chernoff_bound(10, 0.5), QOutOfRange);
  CHECK_THROWS_AS(chernoff_bound(10, 0.0), QOutOfRange);
}

TEST_CASE("chernoff inequality grid") {
  for (int i = 1; i < 10000; ++i) {
    const double q = 0.5 * i / 10000.0;
    const double lhs = (1.0 - 2.0 * q) * std::log((1.0 - q) / (1.0 - 2.0 * q)) -
                       2.0 * q * std::numbers::ln2;
    CHECK(lhs <= -0.3 * q + 1e-15);
  }
}

TEST_CASE("chernoff Monte Carlo: empirical tail below the bound") {
  SplitMix64 gen(31);
  const int trials = 100000, k = 1000;
  const double q = 0.01;
  int over = 0;
  for (int t = 0; t < trials; ++t) {
    int sum = 0;
    for (int i = 0; i < k; ++i) sum += gen.next_unit() < q;
    if (sum >= 2.0 * k * q) ++over;
  }
  const double frac = static_cast<double>(over) / trials;
  const double se = std::sqrt(frac * (1.0 - frac) / trials) + 1e-9;
  CHECK(frac <= chernoff_bound(k, q) + 3.0 * se);
}

TEST_CASE("inner error budget") {
  const InnerErrorBudget b8 = inner_error_budget(8, 4);
  CHECK(b8.total == doctest::Approx(4.0 / 256.0));
  CHECK(b8.clip == doctest::Approx(4.0 * std::pow(2.0, -16.0)));
  CHECK(b8.clip <= std::pow(2.0, -8.0));
  CHECK(b8.outside_q <= std::pow(2.0, -8.0));

  CHECK_THROWS_AS(inner_error_budget(2, 4), BlockLengthTooSmall);

  const InnerErrorBudget b3 = inner_error_budget(3, 4);
  CHECK(b3.clip == doctest::Approx(std::pow(2.0, -6.0) * 4.0));
  CHECK(b3.clip <= std::pow(2.0, -3.0));
  CHECK(b3.total == doctest::Approx(4.0 * std::pow(2.0, -3.0)));
}

}  // TEST_SUITE bounds

#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "qmfnet/quantize.hpp"
#include "qmfnet/rng.hpp"

using namespace qmf;

TEST_SUITE("quantize") {

TEST_CASE("rounding per component, halves away from zero") {
  CHECK(round_complex({0.4, -0.6}) == GaussianInt{0, -1});
  CHECK(round_complex({0.0, 0.0}) == GaussianInt{0, 0});
  CHECK(round_complex({1.5, 0.0}) == GaussianInt{2, 0});
  CHECK(round_complex({-1.5, -0.5}) == GaussianInt{-2, -1});
  CHECK(round_complex({2.5, 0.5}) == GaussianInt{3, 1});
}

TEST_CASE("quantized noise examples") {
  CHECK(quantized_noise({{1.4, 0}}, {{1.4, 0}}).at(0) == GaussianInt{0, 0});
  CHECK(quantized_noise({{2.3, 0}}, {{1.4, 0}}).at(0) == GaussianInt{1, 0});
  CHECK(quantized_noise({{-0.9, 0}}, {{0.3, 0}}).at(0) == GaussianInt{-1, 0});
  CHECK_THROWS_AS(quantized_noise(ComplexBlock(2), ComplexBlock(3)), LengthMismatch);
}

TEST_CASE("residue examples and range property") {
  CHECK(residue({1.4, 0}, {1.4, 0}) == GaussianInt{1, 0});
  CHECK(residue({1.0, 0}, {2.0, 0}) == GaussianInt{0, 0});
  CHECK(residue({-0.4, 0}, {-0.4, 0}) == GaussianInt{-1, 0});

  GaussianStream s(derive_seed(11, "residue"));
  for (int i = 0; i < 100000; ++i) {
    const auto z1 = s.next_complex(2.0);
    const auto z2 = s.next_complex(2.0);
    const GaussianInt r = residue(z1, z2);
    CHECK(std::abs(r.re) <= 1);
    CHECK(std::abs(r.im) <= 1);
  }
}

TEST_CASE("bin probabilities match the quadrature oracle") {
  CHECK(bin_probability(0, 1.0) == doctest::Approx(0.38292).epsilon(1e-4));
  CHECK(bin_probability(1, 1.0) == doctest::Approx(0.24173).epsilon(1e-4));
  CHECK(bin_probability(3, 1.0) == doctest::Approx(0.00598).epsilon(1e-3));
  for (long i : {0L, 1L, 2L, 3L, 5L}) {
    for (double sigma : {1.0, 1.0 / std::sqrt(2.0)}) {
      CHECK(bin_probability(i, sigma) ==
            doctest::Approx(testutil::bin_probability_quadrature(i, sigma)).epsilon(1e-9));
    }
  }
}

TEST_CASE("exact Z_1 at sigma 1 has exactly 29 tuples") {
  auto bundle = NoiseSetBundle::build_exact(1, 1.0);
  CHECK(bundle.z_size() == 29);
  // All |a|,|b| <= 2, plus the four axial spikes at 3.
  std::set<std::pair<int, int>> got;
  for (const auto& t : bundle.z_tuples()) got.insert({t.at(0).re, t.at(0).im});
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) CHECK(got.count({a, b}) == 1);
  CHECK(got.count({3, 0}) == 1);
  CHECK(got.count({-3, 0}) == 1);
  CHECK(got.count({0, 3}) == 1);
  CHECK(got.count({0, -3}) == 1);
  CHECK(!got.count({3, 1}));  // c3 * c1 < 2^-9
}

TEST_CASE("all-zero tuple is always in Z_ell") {
  for (std::size_t ell : {1u, 2u, 3u}) {
    auto bundle = NoiseSetBundle::build_exact(ell, 1.0);
    CHECK(bundle.z_contains(GaussianIntTuple(ell)));
  }
}

TEST_CASE("Z_ell size and minimum probability invariants") {
  for (std::size_t ell : {1u, 2u}) {
    for (double sigma : {1.0, 1.0 / std::sqrt(2.0)}) {
      auto bundle = NoiseSetBundle::build_exact(ell, sigma);
      CHECK(static_cast<double>(bundle.z_size()) <= std::pow(2.0, 9.0 * ell));
      for (const auto& t : bundle.z_tuples()) {
        double lg = 0.0;
        for (std::size_t i = 0; i < ell; ++i) {
          lg += log2_bin_probability(t.at(i).re, sigma);
          lg += log2_bin_probability(t.at(i).im, sigma);
        }
        CHECK(lg >= bundle.log2_threshold());
      }
    }
  }
}

TEST_CASE("coupon collector sample counts") {
  CHECK(coupon_collector_samples(1) == 3549);  // ceil(10 * 512 * ln 2)
  CHECK(coupon_collector_samples(2) == 3634088);
}

TEST_CASE("sampled construction is a subset and usually equals the exact set") {
  auto exact = NoiseSetBundle::build_exact(1, 1.0);
  int equal = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    GaussianStream s(derive_seed(seed, "zl-sample"));
    auto sampled = NoiseSetBundle::build_sampled(1, 1.0, s);
    CHECK(sampled.sample_count() == 3549);
    for (const auto& t : sampled.z_tuples()) CHECK(exact.z_contains(t));
    if (sampled.z_size() == exact.z_size()) ++equal;
  }
  // The miss probability bound is 2^-ell = 1/2; observed is far better.
  CHECK(equal >= seeds / 2);
}

TEST_CASE("q membership examples at ell 1") {
  auto bundle = NoiseSetBundle::build_exact(1, 1.0);
  GaussianIntTuple zero(1);
  CHECK(bundle.q_contains(zero));
  GaussianIntTuple t(1);
  t.set(0, {4, 0});
  CHECK(bundle.q_contains(t));  // (3,0) in Z_1, shift (1,0)
  t.set(0, {9, 9});
  CHECK(!bundle.q_contains(t));
  t.set(0, {4, 2});
  CHECK(!bundle.q_contains(t));  // would need (3,1)-ish parents outside Z_1
}

TEST_CASE("q enumeration is distinct, starts at zero, and matches membership") {
  auto bundle = NoiseSetBundle::build_exact(1, 1.0);
  const auto& q = bundle.q_enumeration();
  CHECK(q.front() == GaussianIntTuple(1));
  std::set<std::pair<int, int>> distinct;
  for (const auto& t : q) {
    distinct.insert({t.at(0).re, t.at(0).im});
    CHECK(bundle.q_contains(t));
  }
  CHECK(distinct.size() == q.size());
  CHECK(static_cast<double>(q.size()) <=
        static_cast<double>(bundle.r_cardinality()) * bundle.z_size());
}

TEST_CASE("decomposition: quantized noise equals rounded noise plus a residue") {
  GaussianStream s(derive_seed(3, "decomp"));
  for (int i = 0; i < 20000; ++i) {
    ComplexBlock clean{s.next_complex(1.5)};
    ComplexBlock noise{s.next_complex(1.0)};
    ComplexBlock received{clean[0] + noise[0]};
    const GaussianIntTuple q = quantized_noise(received, clean);
    const GaussianInt z = round_complex(noise[0]);
    CHECK(std::abs(q.at(0).re - z.re) <= 1);
    CHECK(std::abs(q.at(0).im - z.im) <= 1);
  }
}

TEST_CASE("tail probability estimates") {
  auto bundle = NoiseSetBundle::build_exact(1, 1.0);
  GaussianStream s(derive_seed(17, "tail"));
  auto est = tail_probability_zl(bundle, 100000, s);
  CHECK(est.estimate <= 0.25);  // bound 2^-2
  CHECK(est.estimate > 0.0);    // sanity: the tail is not empty at ell=1

  // When the set covers everything that can realistically round (tiny
  // sigma leaves only the zero tuple, which absorbs all the mass), the
  // estimate is zero.
  auto tight = NoiseSetBundle::build_exact(1, 0.05);
  GaussianStream s2(derive_seed(18, "tail"));
  auto est2 = tail_probability_zl(tight, 100000, s2);
  CHECK(est2.misses == 0);
  CHECK(est2.estimate == 0.0);
}

TEST_CASE("moment bound at k=0.6 stays below 2.9") {
  auto mb = quantized_moment_bound(0.6, 1.0);
  CHECK(mb.truncated_sum == doctest::Approx(2.80889).epsilon(1e-4));
  CHECK(mb.remainder_bound < 1e-12);
  CHECK(mb.total() <= 2.9);
}

TEST_CASE("enumeration guard throws SetTooLarge") {
  CHECK_THROWS_AS(NoiseSetBundle::build_exact(3, 1.0, 1000), SetTooLarge);
  CHECK_THROWS_AS([] {
    GaussianStream s(1);
    return NoiseSetBundle::build_sampled(3, 1.0, s);
  }(), SetTooLarge);
}

}  // TEST_SUITE quantize

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "qmfnet/channel.hpp"
#include "qmfnet/rng.hpp"

namespace qmf {

struct LengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SetTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gaussian integer (integer real and imaginary parts).
struct GaussianInt {
  std::int32_t re = 0;
  std::int32_t im = 0;
  friend bool operator==(const GaussianInt&, const GaussianInt&) = default;
};

// Length-ell tuple of Gaussian integers, packed one 64-bit word per entry
// so tuples hash and compare cheaply.
class GaussianIntTuple {
 public:
  GaussianIntTuple() = default;
  explicit GaussianIntTuple(std::size_t len) : packed_(len, pack({0, 0})) {}
  explicit GaussianIntTuple(const std::vector<GaussianInt>& entries);

  std::size_t size() const { return packed_.size(); }
  GaussianInt at(std::size_t i) const { return unpack(packed_[i]); }
  void set(std::size_t i, GaussianInt g) { packed_[i] = pack(g); }

  const std::vector<std::uint64_t>& packed() const { return packed_; }

  friend bool operator==(const GaussianIntTuple&, const GaussianIntTuple&) = default;
  friend bool operator<(const GaussianIntTuple& a, const GaussianIntTuple& b);

  static std::uint64_t pack(GaussianInt g) {
    return (std::uint64_t(std::uint32_t(g.re)) << 32) | std::uint64_t(std::uint32_t(g.im));
  }
  static GaussianInt unpack(std::uint64_t w) {
    return {std::int32_t(std::uint32_t(w >> 32)), std::int32_t(std::uint32_t(w))};
  }

 private:
  std::vector<std::uint64_t> packed_;
};

struct TupleHash {
  std::size_t operator()(const GaussianIntTuple& t) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ t.size();
    for (std::uint64_t w : t.packed()) h = mix64(h ^ (w + 0x9E3779B97F4A7C15ULL + (h << 6)));
    return static_cast<std::size_t>(h);
  }
};

// Rounding to the nearest integer, halves away from zero (the tie rule is a
// measure-zero event for continuous inputs but must be deterministic).
std::int32_t round_away(double x);
GaussianInt round_complex(std::complex<double> w);
GaussianIntTuple round_block(const ComplexBlock& block);

// Quantized noise of a received block against the clean superposition:
// componentwise [received] - [clean].
GaussianIntTuple quantized_noise(const ComplexBlock& received, const ComplexBlock& clean);

// Rounding residue R = [z1+z2] - [z1] - [z2]; both components in {-1,0,1}.
GaussianInt residue(std::complex<double> z1, std::complex<double> z2);

// Probability that a real N(0, sigma^2) sample rounds to the integer i.
double bin_probability(std::int64_t i, double sigma);
double log2_bin_probability(std::int64_t i, double sigma);

enum class ZlConstruction { deterministic, sampled };

// The candidate-noise bookkeeping: the set Z_ell of rounded-noise tuples
// with probability >= 2^(-9 ell), the implicit residue set R_ell of the
// 9^ell unit shifts, and membership in the Minkowski sum Q_ell.
class NoiseSetBundle {
 public:
  std::size_t ell() const { return ell_; }
  double sigma() const { return sigma_; }
  double log2_threshold() const { return -9.0 * static_cast<double>(ell_); }
  ZlConstruction construction() const { return construction_; }
  std::uint64_t sample_count() const { return sample_count_; }

  const std::vector<GaussianIntTuple>& z_tuples() const { return z_sorted_; }
  std::size_t z_size() const { return z_sorted_.size(); }
  std::uint64_t r_cardinality() const;  // 9^ell

  bool z_contains(const GaussianIntTuple& t) const { return z_set_.contains(t); }

  // Membership in Q_ell = Z_ell + R_ell: true iff some unit shift of t lands
  // in Z_ell.  Tests the 9^ell shifted candidates against the hash index.
  bool q_contains(const GaussianIntTuple& t) const;

  // Distinct elements of Q_ell, all-zero tuple first, then by decreasing
  // parent-tuple probability.  Materialized lazily; guarded.
  const std::vector<GaussianIntTuple>& q_enumeration() const;

  // Largest absolute real/imaginary component over Z_ell, plus 1 for the
  // unit shift: every member of Q_ell fits inside this box.
  std::int32_t q_component_bound() const { return z_component_bound_ + 1; }

  static NoiseSetBundle build_exact(std::size_t ell, double sigma,
                                    std::uint64_t enumeration_guard = 10'000'000);
  static NoiseSetBundle build_sampled(std::size_t ell, double sigma, GaussianStream& stream);

 private:
  NoiseSetBundle() = default;
  void index_tuples();

  std::size_t ell_ = 0;
  double sigma_ = 1.0;
  ZlConstruction construction_ = ZlConstruction::deterministic;
  std::uint64_t sample_count_ = 0;
  std::vector<GaussianIntTuple> z_sorted_;  // by decreasing probability, then lexicographic
  std::unordered_set<GaussianIntTuple, TupleHash> z_set_;
  std::int32_t z_component_bound_ = 0;
  mutable std::vector<GaussianIntTuple> q_enum_;  // lazy
};

// Coupon-collector sample count r = ceil((10/9) (1/Q) ln(1/Q)) with Q = 2^(-9 ell).
std::uint64_t coupon_collector_samples(std::size_t ell);

struct TailEstimate {
  double estimate = 0.0;
  double upper99 = 0.0;  // one-sided 99% binomial upper confidence bound
  std::uint64_t misses = 0;
  std::uint64_t trials = 0;
};

// Monte Carlo estimate of P(rounded Gaussian ell-tuple outside Z_ell).
TailEstimate tail_probability_zl(const NoiseSetBundle& bundle, std::uint64_t trials,
                                 GaussianStream& stream);

struct MomentBound {
  double truncated_sum = 0.0;   // sum over |i| <= truncation of c_i^(1-k)
  double remainder_bound = 0.0; // analytic bound on the truncated tail
  double total() const { return truncated_sum + remainder_bound; }
};

// E[p^-k([z_R])] = sum_i c_i^(1-k) for a real N(0, sigma^2) component,
// truncated at |i| <= truncation with the Gaussian-tail remainder bound.
MomentBound quantized_moment_bound(double k, double sigma, std::int64_t truncation = 30);

}  // namespace qmf

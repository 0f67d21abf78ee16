#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace qmf {

// Deterministic 64-bit generator (SplitMix64, Stafford mix13 finalizer).
// The whole simulator derives its randomness from this generator so that a
// master seed reproduces every stream bit-for-bit across runs.  Gaussian
// samples come from Box-Muller on top of the raw 64-bit output; they are
// identical across runs on the same platform and identical across platforms
// up to libm rounding of log/cos/sqrt.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Stafford mix13; used both by SplitMix64 and by the seed-derivation below.
std::uint64_t mix64(std::uint64_t z);

// FNV-1a over the bytes of a tag string, for purpose-tagged substreams.
std::uint64_t hash_tag(std::string_view tag);

// Substream derivation rule: a derived seed is
//   fold(fold(master, hash_tag(tag)), word_1), word_2, ...)
// with fold(h, w) = mix64(h ^ (mix64(w) + 0x9E3779B97F4A7C15 + (h << 6) + (h >> 2))).
// Words are purpose-specific indices (frame, node, chunk, message, ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> words = {});
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          const std::vector<std::uint64_t>& words);

// Stream of standard normals / circularly-symmetric complex Gaussians.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  // N(0, 1) via Box-Muller; generates pairs, caches the second sample.
  double next_normal();

  // Complex sample with independent N(0, comp_std^2) real and imaginary parts.
  std::complex<double> next_complex(double comp_std) {
    return {comp_std * next_normal(), comp_std * next_normal()};
  }

  std::uint64_t next_u64() { return gen_.next_u64(); }
  double next_unit() { return gen_.next_unit(); }
  std::uint64_t next_below(std::uint64_t bound) { return gen_.next_below(bound); }

 private:
  SplitMix64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qmf

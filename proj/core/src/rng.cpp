#include "qmfnet/rng.hpp"

#include <cmath>
#include <numbers>

namespace qmf {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace {
std::uint64_t fold(std::uint64_t h, std::uint64_t w) {
  return mix64(h ^ (mix64(w) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2)));
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = fold(master, hash_tag(tag));
  for (std::uint64_t w : words) h = fold(h, w);
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          const std::vector<std::uint64_t>& words) {
  std::uint64_t h = fold(master, hash_tag(tag));
  for (std::uint64_t w : words) h = fold(h, w);
  return h;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double GaussianStream::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = gen_.next_unit_open();
  const double u2 = gen_.next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

}  // namespace qmf

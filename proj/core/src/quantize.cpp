#include "qmfnet/quantize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace qmf {

GaussianIntTuple::GaussianIntTuple(const std::vector<GaussianInt>& entries) {
  packed_.reserve(entries.size());
  for (GaussianInt g : entries) packed_.push_back(pack(g));
}

bool operator<(const GaussianIntTuple& a, const GaussianIntTuple& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const GaussianInt x = a.at(i), y = b.at(i);
    if (x.re != y.re) return x.re < y.re;
    if (x.im != y.im) return x.im < y.im;
  }
  return a.size() < b.size();
}

std::int32_t round_away(double x) {
  return static_cast<std::int32_t>(std::lround(x));
}

GaussianInt round_complex(std::complex<double> w) {
  return {round_away(w.real()), round_away(w.imag())};
}

GaussianIntTuple round_block(const ComplexBlock& block) {
  GaussianIntTuple t(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) t.set(i, round_complex(block[i]));
  return t;
}

GaussianIntTuple quantized_noise(const ComplexBlock& received, const ComplexBlock& clean) {
  if (received.size() != clean.size())
    throw LengthMismatch("quantized_noise: received and clean blocks differ in length");
  GaussianIntTuple t(received.size());
  for (std::size_t i = 0; i < received.size(); ++i) {
    const GaussianInt r = round_complex(received[i]);
    const GaussianInt c = round_complex(clean[i]);
    t.set(i, {r.re - c.re, r.im - c.im});
  }
  return t;
}

GaussianInt residue(std::complex<double> z1, std::complex<double> z2) {
  const GaussianInt sum = round_complex(z1 + z2);
  const GaussianInt a = round_complex(z1);
  const GaussianInt b = round_complex(z2);
  return {sum.re - a.re - b.re, sum.im - a.im - b.im};
}

namespace {
double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
}  // namespace

double bin_probability(std::int64_t i, double sigma) {
  const double lo = (static_cast<double>(i) - 0.5) / sigma;
  const double hi = (static_cast<double>(i) + 0.5) / sigma;
  return std_normal_cdf(hi) - std_normal_cdf(lo);
}

double log2_bin_probability(std::int64_t i, double sigma) {
  const double p = bin_probability(i, sigma);
  return p > 0.0 ? std::log2(p) : -std::numeric_limits<double>::infinity();
}

std::uint64_t NoiseSetBundle::r_cardinality() const {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < ell_; ++i) r *= 9;
  return r;
}

bool NoiseSetBundle::q_contains(const GaussianIntTuple& t) const {
  if (t.size() != ell_) throw LengthMismatch("q_contains: tuple length != ell");
  // Walk the 9^ell unit shifts in odometer order.
  GaussianIntTuple probe = t;
  std::vector<int> digit(2 * ell_, -1);  // shift per real component in {-1,0,1}
  auto apply = [&](void) {
    for (std::size_t i = 0; i < ell_; ++i) {
      const GaussianInt g = t.at(i);
      probe.set(i, {g.re - digit[2 * i], g.im - digit[2 * i + 1]});
    }
  };
  while (true) {
    apply();
    if (z_set_.contains(probe)) return true;
    std::size_t pos = 0;
    while (pos < digit.size() && digit[pos] == 1) digit[pos++] = -1;
    if (pos == digit.size()) return false;
    ++digit[pos];
  }
}

const std::vector<GaussianIntTuple>& NoiseSetBundle::q_enumeration() const {
  if (!q_enum_.empty() || z_sorted_.empty()) return q_enum_;
  const std::uint64_t projected = r_cardinality() * z_sorted_.size();
  if (projected > 40'000'000ULL)
    throw SetTooLarge("Q_ell enumeration would exceed the materialization guard");

  std::unordered_set<GaussianIntTuple, TupleHash> seen;
  seen.reserve(projected / 4);
  std::vector<GaussianIntTuple> out;
  // Z tuples are sorted by decreasing probability and the zero shift comes
  // first, so the all-zero tuple leads the enumeration.
  std::vector<std::array<int, 2>> shifts;
  shifts.reserve(9);
  for (int re : {0, -1, 1})
    for (int im : {0, -1, 1}) shifts.push_back({re, im});

  std::vector<std::size_t> shift_index(ell_, 0);
  for (const GaussianIntTuple& z : z_sorted_) {
    std::fill(shift_index.begin(), shift_index.end(), 0);
    while (true) {
      GaussianIntTuple cand = z;
      for (std::size_t i = 0; i < ell_; ++i) {
        const GaussianInt g = z.at(i);
        cand.set(i, {g.re + shifts[shift_index[i]][0], g.im + shifts[shift_index[i]][1]});
      }
      if (seen.insert(cand).second) out.push_back(cand);
      std::size_t pos = 0;
      while (pos < ell_ && shift_index[pos] == 8) shift_index[pos++] = 0;
      if (pos == ell_) break;
      ++shift_index[pos];
    }
  }
  q_enum_ = std::move(out);
  return q_enum_;
}

void NoiseSetBundle::index_tuples() {
  // Sort by decreasing probability (ties lexicographic) so enumerations are
  // deterministic and most-probable-first.
  std::vector<std::pair<double, GaussianIntTuple>> keyed;
  keyed.reserve(z_sorted_.size());
  for (auto& t : z_sorted_) {
    double lg = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const GaussianInt g = t.at(i);
      lg += log2_bin_probability(g.re, sigma_) + log2_bin_probability(g.im, sigma_);
    }
    keyed.emplace_back(lg, std::move(t));
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  z_sorted_.clear();
  z_sorted_.reserve(keyed.size());
  z_set_.reserve(keyed.size() * 2);
  z_component_bound_ = 0;
  for (auto& [lg, t] : keyed) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const GaussianInt g = t.at(i);
      z_component_bound_ = std::max({z_component_bound_, std::abs(g.re), std::abs(g.im)});
    }
    z_set_.insert(t);
    z_sorted_.push_back(std::move(t));
  }
}

NoiseSetBundle NoiseSetBundle::build_exact(std::size_t ell, double sigma,
                                           std::uint64_t enumeration_guard) {
  NoiseSetBundle b;
  b.ell_ = ell;
  b.sigma_ = sigma;
  b.construction_ = ZlConstruction::deterministic;

  const double threshold = -9.0 * static_cast<double>(ell);

  // Per-integer log2 bin probabilities; |i| can never exceed the point where
  // even paired with all-zero entries the budget is blown.
  std::vector<double> log_c{log2_bin_probability(0, sigma)};
  const double best = log_c[0];
  for (std::int64_t i = 1;; ++i) {
    const double lg = log2_bin_probability(i, sigma);
    if (lg + (2.0 * ell - 1.0) * best < threshold) break;
    log_c.push_back(lg);
  }

  const std::size_t slots = 2 * ell;
  std::vector<std::int32_t> current(slots, 0);
  std::vector<GaussianIntTuple> found;

  // Depth-first over the 2*ell real components with a best-case budget prune.
  auto dfs = [&](auto&& self, std::size_t slot, double acc) -> void {
    if (slot == slots) {
      GaussianIntTuple t(ell);
      for (std::size_t i = 0; i < ell; ++i) t.set(i, {current[2 * i], current[2 * i + 1]});
      found.push_back(std::move(t));
      if (found.size() > enumeration_guard)
        throw SetTooLarge("Z_ell enumeration guard exceeded");
      return;
    }
    const double slack = (static_cast<double>(slots - slot) - 1.0) * best;
    for (std::size_t mag = 0; mag < log_c.size(); ++mag) {
      if (acc + log_c[mag] + slack < threshold) continue;
      current[slot] = static_cast<std::int32_t>(mag);
      self(self, slot + 1, acc + log_c[mag]);
      if (mag != 0) {
        current[slot] = -static_cast<std::int32_t>(mag);
        self(self, slot + 1, acc + log_c[mag]);
      }
    }
  };
  dfs(dfs, 0, 0.0);

  b.z_sorted_ = std::move(found);
  b.index_tuples();
  return b;
}

std::uint64_t coupon_collector_samples(std::size_t ell) {
  const double q_log = 9.0 * static_cast<double>(ell) * std::numbers::ln2;  // ln(1/Q)
  const double inv_q = std::pow(2.0, 9.0 * static_cast<double>(ell));
  return static_cast<std::uint64_t>(std::ceil((10.0 / 9.0) * inv_q * q_log));
}

NoiseSetBundle NoiseSetBundle::build_sampled(std::size_t ell, double sigma,
                                             GaussianStream& stream) {
  if (ell > 2) throw SetTooLarge("sampled construction guarded at ell <= 2");
  NoiseSetBundle b;
  b.ell_ = ell;
  b.sigma_ = sigma;
  b.construction_ = ZlConstruction::sampled;
  b.sample_count_ = coupon_collector_samples(ell);

  const double threshold = -9.0 * static_cast<double>(ell);
  std::unordered_set<GaussianIntTuple, TupleHash> kept;
  for (std::uint64_t s = 0; s < b.sample_count_; ++s) {
    GaussianIntTuple t(ell);
    for (std::size_t i = 0; i < ell; ++i) t.set(i, round_complex(stream.next_complex(sigma)));
    if (kept.contains(t)) continue;
    // Membership re-checked analytically, so the sampled set is always a
    // subset of the exact Z_ell.
    double lg = 0.0;
    for (std::size_t i = 0; i < ell; ++i) {
      const GaussianInt g = t.at(i);
      lg += log2_bin_probability(g.re, sigma) + log2_bin_probability(g.im, sigma);
    }
    if (lg >= threshold) kept.insert(std::move(t));
  }
  b.z_sorted_.assign(kept.begin(), kept.end());
  b.index_tuples();
  return b;
}

TailEstimate tail_probability_zl(const NoiseSetBundle& bundle, std::uint64_t trials,
                                 GaussianStream& stream) {
  TailEstimate est;
  est.trials = trials;
  GaussianIntTuple t(bundle.ell());
  for (std::uint64_t i = 0; i < trials; ++i) {
    for (std::size_t j = 0; j < bundle.ell(); ++j)
      t.set(j, round_complex(stream.next_complex(bundle.sigma())));
    if (!bundle.z_contains(t)) ++est.misses;
  }
  est.estimate = static_cast<double>(est.misses) / static_cast<double>(trials);
  // One-sided normal-approximation upper bound, z_0.99 = 2.3263; the +1 in
  // the numerator keeps the bound meaningful at zero observed misses.
  const double p_hat = (static_cast<double>(est.misses) + 1.0) / (static_cast<double>(trials) + 2.0);
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
  est.upper99 = p_hat + 2.3263 * se;
  return est;
}

MomentBound quantized_moment_bound(double k, double sigma, std::int64_t truncation) {
  MomentBound mb;
  const double expo = 1.0 - k;
  mb.truncated_sum = std::pow(bin_probability(0, sigma), expo);
  for (std::int64_t i = 1; i <= truncation; ++i)
    mb.truncated_sum += 2.0 * std::pow(bin_probability(i, sigma), expo);
  // Gaussian tail bound c_j <= exp(-j^2/2) / j * (1/sqrt(2 pi) - sqrt(2/(9 pi)))
  // for the standard normal; for general sigma substitute j -> j/sigma.  The
  // summands are dominated by a geometric series with ratio exp(-expo/(2 sigma^2)).
  const double coeff = 1.0 / std::sqrt(2.0 * std::numbers::pi) - std::sqrt(2.0 / (9.0 * std::numbers::pi));
  const std::int64_t j0 = truncation + 1;
  const double x0 = static_cast<double>(j0) / sigma;
  const double first = std::pow(std::exp(-x0 * x0 / 2.0) / x0 * coeff, expo);
  const double ratio = std::exp(-expo * x0 / sigma);
  mb.remainder_bound = (ratio < 1.0) ? 2.0 * first / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  return mb;
}

}  // namespace qmf

#include "qmfnet/polar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

namespace qmf {

double entropy(double x) {
  if (x < 0.0 || x > 1.0) throw OutOfRange("entropy argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

PolarCode::PolarCode(std::size_t n, double design_crossover, std::size_t info_count)
    : n_(n), design_crossover_(design_crossover), info_count_(info_count) {
  if (n == 0 || !std::has_single_bit(n)) throw InvalidLength("block length must be a power of two");
  if (info_count > n) throw InvalidLength("info_count exceeds block length");
  if (!(design_crossover > 0.0 && design_crossover < 0.5))
    throw OutOfRange("design crossover must lie in (0, 1/2)");

  // Bhattacharyya evolution, interleaved doubling: position bits read
  // MSB-first give the transform sequence, so child 2i is the minus branch
  // and child 2i+1 the plus branch of parent i.
  z_.assign(1, 2.0 * std::sqrt(design_crossover * (1.0 - design_crossover)));
  while (z_.size() < n) {
    std::vector<double> next(z_.size() * 2);
    for (std::size_t i = 0; i < z_.size(); ++i) {
      const double z = z_[i];
      next[2 * i] = 2.0 * z - z * z;
      next[2 * i + 1] = z * z;
    }
    z_ = std::move(next);
  }

  // Smallest-Z positions carry information; on ties the lower index is
  // frozen first (equivalently the higher index wins the info slot).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (z_[a] != z_[b]) return z_[a] < z_[b];
    return a > b;
  });
  frozen_.assign(n, 1);
  info_positions_.assign(order.begin(), order.begin() + info_count);
  std::sort(info_positions_.begin(), info_positions_.end());
  for (std::size_t pos : info_positions_) frozen_[pos] = 0;
}

PolarCode construct_polar(std::size_t n, double design_crossover, double rate) {
  const auto k = static_cast<std::size_t>(
      std::ceil(rate * static_cast<double>(n) - 1e-12));
  return PolarCode(n, design_crossover, std::min(k, n));
}

BitVector PolarCode::encode(const BitVector& message) const {
  if (message.size() != info_count_)
    throw BitLengthMismatch("message length != info bit count");
  BitVector x(n_, 0);
  for (std::size_t i = 0; i < info_count_; ++i) x[info_positions_[i]] = message[i] & 1;
  for (std::size_t len = 2; len <= n_; len *= 2) {
    const std::size_t h = len / 2;
    for (std::size_t block = 0; block < n_; block += len)
      for (std::size_t i = 0; i < h; ++i) x[block + i] ^= x[block + h + i];
  }
  return x;
}

namespace {

// Exact boxplus in the log-likelihood domain, numerically stable.
double llr_check(double a, double b) {
  const double sign = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
  const double m = std::min(std::abs(a), std::abs(b));
  return sign * m + std::log1p(std::exp(-std::abs(a + b))) -
         std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

struct PolarCode::Workspace {
  // One LLR / codeword scratch row per recursion depth.
  std::vector<std::vector<double>> llr;
  std::vector<std::vector<std::uint8_t>> code;
  std::vector<std::vector<std::uint8_t>> left;
};

void PolarCode::decode_recurse(Workspace& ws, std::size_t depth, std::size_t offset,
                               std::size_t len, BitVector& u_hat) const {
  if (len == 1) {
    const std::uint8_t bit = frozen_[offset] ? 0 : (ws.llr[depth][0] < 0.0 ? 1 : 0);
    u_hat[offset] = bit;
    ws.code[depth][0] = bit;
    return;
  }
  const std::size_t h = len / 2;
  auto& llr = ws.llr[depth];
  for (std::size_t i = 0; i < h; ++i)
    ws.llr[depth + 1][i] = llr_check(llr[i], llr[i + h]);
  decode_recurse(ws, depth + 1, offset, h, u_hat);
  auto& cl = ws.left[depth];
  std::copy_n(ws.code[depth + 1].begin(), h, cl.begin());
  for (std::size_t i = 0; i < h; ++i)
    ws.llr[depth + 1][i] = llr[i + h] + (cl[i] ? -llr[i] : llr[i]);
  decode_recurse(ws, depth + 1, offset + h, h, u_hat);
  for (std::size_t i = 0; i < h; ++i) {
    ws.code[depth][i] = cl[i] ^ ws.code[depth + 1][i];
    ws.code[depth][i + h] = ws.code[depth + 1][i];
  }
}

std::string PolarCode::describe() const {
  nlohmann::json j;
  j["n"] = n_;
  j["design_crossover"] = design_crossover_;
  j["frozen"] = nlohmann::json::array();
  for (std::size_t i = 0; i < n_; ++i)
    if (frozen_[i]) j["frozen"].push_back(i);
  return j.dump();
}

PolarCode PolarCode::from_description(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidLength(std::string("bad code description: ") + e.what());
  }
  const auto n = j.at("n").get<std::size_t>();
  const auto p = j.at("design_crossover").get<double>();
  std::set<std::size_t> frozen;
  for (const auto& v : j.at("frozen")) frozen.insert(v.get<std::size_t>());
  for (std::size_t pos : frozen)
    if (pos >= n) throw InvalidLength("frozen position out of range");
  PolarCode code(n, p, n - frozen.size());
  // The stored frozen set overrides the constructed one so that serialized
  // codes survive construction-rule changes.
  code.frozen_.assign(n, 0);
  for (std::size_t pos : frozen) code.frozen_[pos] = 1;
  code.info_positions_.clear();
  for (std::size_t i = 0; i < n; ++i)
    if (!code.frozen_[i]) code.info_positions_.push_back(i);
  code.info_count_ = code.info_positions_.size();
  return code;
}

BitVector PolarCode::decode(const BitVector& received) const {
  if (received.size() != n_) throw BitLengthMismatch("received length != block length");
  const double llr0 = std::log((1.0 - design_crossover_) / design_crossover_);

  // Scratch reused across calls on the same thread; decode stays
  // re-entrant across threads and allocation-free in steady state.
  thread_local Workspace ws;
  thread_local std::size_t ws_n = 0;
  if (ws_n != n_) {
    const auto depth_count = static_cast<std::size_t>(std::bit_width(n_));
    ws.llr.assign(depth_count, {});
    ws.code.assign(depth_count, {});
    ws.left.assign(depth_count, {});
    for (std::size_t d = 0; d < depth_count; ++d) {
      const std::size_t len = n_ >> d;
      ws.llr[d].resize(len);
      ws.code[d].resize(len);
      ws.left[d].resize(std::max<std::size_t>(len / 2, 1));
    }
    ws_n = n_;
  }
  for (std::size_t i = 0; i < n_; ++i) ws.llr[0][i] = received[i] ? -llr0 : llr0;

  BitVector u_hat(n_, 0);
  decode_recurse(ws, 0, 0, n_, u_hat);

  BitVector message(info_count_);
  for (std::size_t i = 0; i < info_count_; ++i) message[i] = u_hat[info_positions_[i]];
  return message;
}

}  // namespace qmf

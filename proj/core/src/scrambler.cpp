#include "qmfnet/scrambler.hpp"

#include <numeric>

namespace qmf {

ScramblerState::ScramblerState(std::size_t length, std::uint64_t master_seed) {
  forward_.resize(length);
  std::iota(forward_.begin(), forward_.end(), std::size_t{0});
  SplitMix64 perm_stream(derive_seed(master_seed, "perm"));
  for (std::size_t i = length; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(perm_stream.next_below(i));
    std::swap(forward_[i - 1], forward_[j]);
  }
  inverse_.resize(length);
  for (std::size_t j = 0; j < length; ++j) inverse_[forward_[j]] = j;

  SplitMix64 mask_stream(derive_seed(master_seed, "mask"));
  mask_.resize(length);
  for (std::size_t i = 0; i < length; ++i)
    mask_[i] = static_cast<std::uint8_t>(mask_stream.next_u64() & 1);
}

ScramblerState::ScramblerState(std::vector<std::size_t> permutation, BitVector mask)
    : forward_(std::move(permutation)), mask_(std::move(mask)) {
  if (mask_.size() != forward_.size())
    throw BitLengthMismatch("mask length differs from permutation length");
  inverse_.assign(forward_.size(), forward_.size());
  for (std::size_t j = 0; j < forward_.size(); ++j) {
    if (forward_[j] >= forward_.size() || inverse_[forward_[j]] != forward_.size())
      throw BitLengthMismatch("permutation is not a bijection");
    inverse_[forward_[j]] = j;
  }
}

BitVector ScramblerState::scramble(const BitVector& bits) const {
  if (bits.size() != length()) throw BitLengthMismatch("scramble: length mismatch");
  BitVector out(length());
  for (std::size_t j = 0; j < length(); ++j)
    out[forward_[j]] = bits[j];
  for (std::size_t i = 0; i < length(); ++i) out[i] ^= mask_[i];
  return out;
}

BitVector ScramblerState::descramble(const BitVector& bits) const {
  if (bits.size() != length()) throw BitLengthMismatch("descramble: length mismatch");
  BitVector out(length());
  for (std::size_t i = 0; i < length(); ++i)
    out[inverse_[i]] = bits[i] ^ mask_[i];
  return out;
}

}  // namespace qmf

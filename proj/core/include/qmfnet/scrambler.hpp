#pragma once

#include <cstdint>
#include <vector>

#include "qmfnet/polar.hpp"
#include "qmfnet/rng.hpp"

namespace qmf {

// Public-randomness scrambler between the outer and inner codes: a uniform
// permutation (Fisher-Yates from the "perm" substream) followed by an XOR
// mask (from the "mask" substream).  Encoder order is permute-then-mask;
// the sink inverts with unmask-then-unpermute.
class ScramblerState {
 public:
  ScramblerState(std::size_t length, std::uint64_t master_seed);

  // Explicit state; verifies the permutation is a bijection.
  ScramblerState(std::vector<std::size_t> permutation, BitVector mask);

  std::size_t length() const { return forward_.size(); }

  // out[i] = bits[perm^-1(i)] xor mask[i]
  BitVector scramble(const BitVector& bits) const;
  // exact inverse of scramble
  BitVector descramble(const BitVector& bits) const;

  // Destination of position j under the permutation.
  std::size_t permuted_index(std::size_t j) const { return forward_[j]; }
  const BitVector& mask() const { return mask_; }

 private:
  std::vector<std::size_t> forward_;   // j -> perm(j)
  std::vector<std::size_t> inverse_;   // perm(j) -> j
  BitVector mask_;
};

}  // namespace qmf

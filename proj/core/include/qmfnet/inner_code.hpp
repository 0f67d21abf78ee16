#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qmfnet/channel.hpp"
#include "qmfnet/network.hpp"
#include "qmfnet/quantize.hpp"
#include "qmfnet/rng.hpp"

namespace qmf {

struct MessageOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Clipping alphabet {-s_i..s_i} for a receiving node: m_i bounds the clean
// signal (a 2^-2ell quantile of the in-edge superposition), delta_i is the
// noise slack ceil(sqrt(2 ell ln 2)), s_i = m_i + delta_i.
struct RelayAlphabet {
  int node = -1;
  std::int32_t m_i = 0;
  std::int32_t delta_i = 0;
  std::int32_t s_i = 0;
};

std::int32_t noise_slack_delta(std::size_t ell);

// One alphabet per node with in-edges (relays and the sink); the source
// transmits only and gets none.  codebook_comp_std is the per-component
// std of the unit-power random codebooks.
std::map<int, RelayAlphabet> compute_alphabets(const LayeredNetwork& net, std::size_t ell,
                                               double codebook_comp_std);

// Per-chunk realization of the random inner code.  The source codebook and
// every relay mapping are keyed pseudorandom functions derived from
// (master seed, chunk index, node); encoder, relays and the sink decoder
// all reproduce identical blocks from the shared keys.
class InnerCodeInstance {
 public:
  InnerCodeInstance(const LayeredNetwork& net, std::size_t ell, double rate_bits,
                    std::uint64_t master_seed, std::uint64_t chunk_index,
                    double codebook_comp_std,
                    std::optional<std::map<int, RelayAlphabet>> alphabet_override = {});

  std::size_t ell() const { return ell_; }
  double rate_bits() const { return rate_bits_; }
  std::uint64_t chunk_index() const { return chunk_; }
  std::size_t message_bits() const { return message_bits_; }
  std::uint64_t message_space() const { return std::uint64_t{1} << message_bits_; }
  double codebook_comp_std() const { return codebook_comp_std_; }
  const std::map<int, RelayAlphabet>& alphabets() const { return alphabets_; }

  // Source codebook f_{S,k}: message index -> pseudo-i.i.d. CN(0,1) block.
  ComplexBlock encode_message(std::uint64_t u) const;

  // Quantize-map-and-forward at a relay: round, clamp to the alphabet
  // (flagging if anything exceeded it), then map the clamped tuple through
  // the relay's keyed random function.
  struct ForwardResult {
    ComplexBlock block;
    bool clipped = false;
  };
  ForwardResult relay_forward(int node, const ComplexBlock& received) const;

  GaussianIntTuple clamp_to_alphabet(int node, const GaussianIntTuple& t,
                                     bool* clipped = nullptr) const;

  // Deterministic map behind relay_forward; exposed for the decoder.
  ComplexBlock relay_map(int node, const GaussianIntTuple& clamped) const;

 private:
  const LayeredNetwork* net_;
  std::size_t ell_;
  double rate_bits_;
  std::uint64_t chunk_;
  std::size_t message_bits_;
  double codebook_comp_std_;
  std::uint64_t codebook_key_;
  std::map<int, std::uint64_t> relay_keys_;
  std::map<int, RelayAlphabet> alphabets_;
};

enum class ChunkOutcome {
  decoded,          // exactly one message has an accepting branch
  ambiguous,        // two or more
  no_candidate,     // none
  clip_declared,    // failure attributed to a clipping event (accounting)
  noise_outside_q,  // failure attributed to a realized noise outside Q_ell
};

// Ground truth handed to the decoder for instrumentation only; the search
// itself never reads it.
struct ChunkGenie {
  std::uint64_t true_message = 0;
  bool any_clip = false;
  bool noise_in_q = true;  // realized quantized noise at every receiver lies in Q_ell
};

struct ChunkDecodeResult {
  ChunkOutcome outcome = ChunkOutcome::no_candidate;
  std::uint64_t message = 0;  // decoded message; first accepting one if ambiguous
  bool any_accepting = false;
  std::uint64_t accepting_messages = 0;
  std::uint64_t hypotheses_examined = 0;
  // Instrumentation (meaningful when a genie was supplied):
  bool true_message_accepted = false;
  bool completeness_violated = false;  // no clip, all noise in Q, yet true message rejected
};

// Exhaustive inner decoder: for every message, forward-simulates the relay
// layers over every candidate quantized-noise hypothesis in Q_ell per relay
// and accepts a branch when the rounded sink observation minus the rounded
// predicted superposition lies in Q_ell.  The sink noise hypothesis is
// resolved by that membership test instead of enumeration.
ChunkDecodeResult decode_chunk(const InnerCodeInstance& inst, const LayeredNetwork& net,
                               const NoiseSetBundle& bundle, const ComplexBlock& observation,
                               const ChunkGenie* genie = nullptr);

// Upper bound 2^ceil(r ell) * |Q_ell|^(#relays) on examined hypotheses.
double hypothesis_ceiling(const InnerCodeInstance& inst, const LayeredNetwork& net,
                          const NoiseSetBundle& bundle);

}  // namespace qmf

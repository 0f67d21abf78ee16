#include "qmfnet/channel.hpp"

#include <cmath>

namespace qmf {

SigmaConvention SigmaConvention::total_unit() { return {1.0 / std::sqrt(2.0)}; }

ComplexBlock sample_noise_block(std::size_t len, GaussianStream& stream,
                                double comp_std) {
  ComplexBlock block(len);
  for (auto& z : block) z = stream.next_complex(comp_std);
  return block;
}

std::map<int, ComplexBlock> propagate_layer(const LayeredNetwork& net, int layer,
                                            const std::map<int, ComplexBlock>& transmits,
                                            GaussianStream& noise, double noise_comp_std) {
  const auto& senders = net.nodes_at_layer(layer);
  if (transmits.size() != senders.size())
    throw LayerMismatch("transmit map does not match layer membership");
  std::size_t block_len = 0;
  for (int v : senders) {
    auto it = transmits.find(v);
    if (it == transmits.end())
      throw LayerMismatch("missing transmit block for node " + net.name(v));
    if (block_len == 0) block_len = it->second.size();
    if (it->second.size() != block_len)
      throw LayerMismatch("transmit blocks differ in length");
  }

  std::map<int, ComplexBlock> received;
  for (int v : net.nodes_at_layer(layer + 1)) {
    ComplexBlock y(block_len, {0.0, 0.0});
    for (const auto& e : net.in_edges(v)) {
      const ComplexBlock& x = transmits.at(e.from);
      for (std::size_t t = 0; t < block_len; ++t) y[t] += e.gain * x[t];
    }
    if (noise_comp_std != 0.0) {
      for (std::size_t t = 0; t < block_len; ++t)
        y[t] += noise.next_complex(noise_comp_std);
    }
    received.emplace(v, std::move(y));
  }
  return received;
}

}  // namespace qmf

#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "qmfnet/network.hpp"
#include "qmfnet/rng.hpp"

namespace qmf {

struct LayerMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One inner-code block of complex amplitudes.
using ComplexBlock = std::vector<std::complex<double>>;

// Receiver-noise convention.  CN(0,1) in the channel model means total
// variance 1, i.e. 1/sqrt(2) per real component.  The quantized-noise
// arithmetic (bin probabilities, candidate sets) is usually written for a
// per-component variance of 1, so the per-component std is an explicit
// parameter everywhere instead of a baked-in constant.
struct SigmaConvention {
  double noise_comp_std = 1.0;

  static SigmaConvention per_component_unit() { return {1.0}; }  // E|z|^2 = 2
  static SigmaConvention total_unit();                            // E|z|^2 = 1
};

// i.i.d. complex Gaussian block with independent N(0, comp_std^2) real and
// imaginary parts per sample.
ComplexBlock sample_noise_block(std::size_t len, GaussianStream& stream,
                                double comp_std);

// Propagates one layer transition of the network: for every receiver at
// `layer`+1, y_t = sum_{j in-edges} h_j x_{j,t} + z_t with fresh noise from
// `noise` (scaled by comp_std per real component).  `transmits` must cover
// exactly the nodes at `layer`.
std::map<int, ComplexBlock> propagate_layer(const LayeredNetwork& net, int layer,
                                            const std::map<int, ComplexBlock>& transmits,
                                            GaussianStream& noise, double noise_comp_std);

}  // namespace qmf

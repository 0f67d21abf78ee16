#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmf {

struct OutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidLength : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BitLengthMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using BitVector = std::vector<std::uint8_t>;

// Binary entropy in bits; endpoints return 0 by continuity.
double entropy(double x);

// Polar code over the 2x2 kernel in natural bit order (no bit-reversal).
// Frozen bits are fixed to zero.  Construction tracks Bhattacharyya
// parameters: Z0 = 2 sqrt(p (1-p)), minus branch Z- = 2Z - Z^2 (first half),
// plus branch Z+ = Z^2 (second half); the info_count positions with the
// smallest Z carry information, ties going to the higher index.
class PolarCode {
 public:
  // n must be a power of two; 0 < design_crossover < 1/2; info_count <= n.
  PolarCode(std::size_t n, double design_crossover, std::size_t info_count);

  std::size_t block_length() const { return n_; }
  std::size_t info_count() const { return info_count_; }
  double rate() const { return static_cast<double>(info_count_) / static_cast<double>(n_); }
  double design_crossover() const { return design_crossover_; }

  bool is_frozen(std::size_t pos) const { return frozen_[pos] != 0; }
  const std::vector<std::size_t>& info_positions() const { return info_positions_; }
  const std::vector<double>& bhattacharyya() const { return z_; }

  // message (info_count bits) -> codeword (n bits): info bits placed at the
  // informational positions, zeros elsewhere, then the butterfly transform.
  BitVector encode(const BitVector& message) const;

  // Successive cancellation over BSC(design_crossover); returns the info
  // bits.  Likelihood ties decide toward 0.
  BitVector decode(const BitVector& received) const;

  // JSON round trip of (n, design crossover, frozen set) so encoder and
  // decoder instances can be reconstructed elsewhere.
  std::string describe() const;
  static PolarCode from_description(const std::string& json);

 private:
  struct Workspace;
  void decode_recurse(Workspace& ws, std::size_t depth, std::size_t offset,
                      std::size_t len, BitVector& u_hat) const;

  std::size_t n_ = 0;
  double design_crossover_ = 0.0;
  std::size_t info_count_ = 0;
  std::vector<std::uint8_t> frozen_;
  std::vector<std::size_t> info_positions_;
  std::vector<double> z_;
};

// Convenience: info_count = ceil(rate * n).
PolarCode construct_polar(std::size_t n, double design_crossover, double rate);

}  // namespace qmf

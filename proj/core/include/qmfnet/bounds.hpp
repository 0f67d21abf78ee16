#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qmfnet/polar.hpp"
#include "qmfnet/rng.hpp"

namespace qmf {

struct QOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BlockLengthTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scheme parameters derived from the cut-set value c_bar and network size.
struct SchemeParams {
  double c_bar = 0.0;
  int n_nodes = 0;
  std::size_t ell = 0;        // inner block length
  double r_i = 0.0;           // inner rate, c_bar - 16 n - 1 (bits/symbol)
  double p_i_bound = 0.0;     // 4 * 2^-ell
  double r_o = 0.0;           // 1 - h(2 p_i_bound)
  double overall_rate = 0.0;  // r_i * r_o when feasible, else 0
  bool feasible = false;      // r_i > 0
  bool h_check_ok = false;    // h(2 p_i_bound) <= 1 / c_bar
};

// Selects the inner block length as the smallest ell (of the form
// 3 + ceil(2 log2 c_bar)) whose pessimistic inner-error bound satisfies
// h(2 * 4 * 2^-ell) <= 1 / c_bar, then fills in the rate arithmetic.
SchemeParams select_params(double c_bar, int n_nodes);

// log2 of the indistinguishability bound for one cut transition:
// -ell * (sum_i log2(1 + s_i^2) - (n_rx / sigma_sq) * log2 e).
// A value >= 0 is vacuous (the caller should treat the bound as 1).
double containment_log2_bound(const std::vector<double>& singular_values, int n_rx,
                         double sigma_sq, std::size_t ell);

// Monte Carlo estimate of P(for all t <= ell: ||H x_t + r_t||_inf <= sqrt 2)
// with x_t i.i.d. CN(0, sigma_sq I).  Entries of the complex matrix are in
// row-major order; r_t are the per-column shift vectors.
double containment_empirical(const std::vector<std::vector<std::complex<double>>>& h_rows,
                        const std::vector<std::vector<std::complex<double>>>& shifts,
                        double sigma_sq, std::size_t ell, std::uint64_t trials,
                        GaussianStream& stream);

// log2 P_{Omega,a,b} <= -ell (c_bar - 3 n).
double p_omega_log2_bound(double c_bar, int n_nodes, std::size_t ell);

// log2 P(u -> u') <= -ell (c_bar - 16 n - r_i); equals -ell at the
// prescribed inner rate.
double indistinguishability_log2_bound(const SchemeParams& params);
double indistinguishability_log2_bound(double c_bar, int n_nodes, std::size_t ell,
                                       double r_i);

// exp(-0.3 K q); requires 0 < q < 1/2.
double chernoff_bound(std::uint64_t k_chunks, double q);

// The four inner-code failure events and their bounds at block length ell:
// clipping, candidate-set construction failure, noise outside the candidate
// set, and decoder confusion.  Requires 2^ell > n_nodes.
struct InnerErrorBudget {
  double clip = 0.0;
  double construction = 0.0;
  double outside_q = 0.0;
  double confusion = 0.0;
  double total = 0.0;
};
InnerErrorBudget inner_error_budget(std::size_t ell, int n_nodes);

}  // namespace qmf

#include "qmfnet/bounds.hpp"

#include <cmath>
#include <numbers>

namespace qmf {

SchemeParams select_params(double c_bar, int n_nodes) {
  SchemeParams p;
  p.c_bar = c_bar;
  p.n_nodes = n_nodes;

  // 2 P_I <= 8 * 2^-ell <= 1/c_bar^2 guarantees h(2 P_I) <= 1/c_bar for
  // c_bar > 16, which gives ell = 3 + ceil(2 log2 c_bar).
  double raw = 3.0 + std::ceil(2.0 * std::log2(std::max(c_bar, 1.0)) - 1e-12);
  p.ell = static_cast<std::size_t>(std::max(4.0, raw));
  p.p_i_bound = 4.0 * std::pow(2.0, -static_cast<double>(p.ell));
  p.r_o = 1.0 - entropy(2.0 * p.p_i_bound);
  p.h_check_ok = entropy(2.0 * p.p_i_bound) <= 1.0 / c_bar;

  p.r_i = c_bar - 16.0 * n_nodes - 1.0;
  p.feasible = p.r_i > 0.0;
  p.overall_rate = p.feasible ? p.r_i * p.r_o : 0.0;
  return p;
}

double containment_log2_bound(const std::vector<double>& singular_values, int n_rx,
                         double sigma_sq, std::size_t ell) {
  if (sigma_sq <= 0.0) throw QOutOfRange("lemma1 bound needs sigma_sq > 0");
  double info = 0.0;
  for (double s : singular_values) info += std::log2(1.0 + s * s);
  const double penalty = static_cast<double>(n_rx) / sigma_sq * std::numbers::log2e;
  return -static_cast<double>(ell) * (info - penalty);
}

double containment_empirical(const std::vector<std::vector<std::complex<double>>>& h_rows,
                        const std::vector<std::vector<std::complex<double>>>& shifts,
                        double sigma_sq, std::size_t ell, std::uint64_t trials,
                        GaussianStream& stream) {
  const std::size_t n = h_rows.size();
  const std::size_t m = n ? h_rows.front().size() : 0;
  if (shifts.size() != ell) throw BitLengthMismatch("one shift vector per column required");
  for (const auto& r : shifts)
    if (r.size() != n) throw BitLengthMismatch("shift vector dimension mismatch");

  const double comp_std = std::sqrt(sigma_sq / 2.0);
  const double limit_sq = 2.0;
  std::uint64_t hits = 0;
  std::vector<std::complex<double>> x(m);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    bool all_ok = true;
    for (std::size_t t = 0; t < ell && all_ok; ++t) {
      for (auto& xi : x) xi = stream.next_complex(comp_std);
      for (std::size_t row = 0; row < n; ++row) {
        std::complex<double> acc = shifts[t][row];
        for (std::size_t col = 0; col < m; ++col) acc += h_rows[row][col] * x[col];
        if (std::norm(acc) > limit_sq) {
          all_ok = false;
          break;
        }
      }
    }
    if (all_ok) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double p_omega_log2_bound(double c_bar, int n_nodes, std::size_t ell) {
  return -static_cast<double>(ell) * (c_bar - 3.0 * n_nodes);
}

double indistinguishability_log2_bound(double c_bar, int n_nodes, std::size_t ell,
                                       double r_i) {
  return -static_cast<double>(ell) * (c_bar - 16.0 * n_nodes - r_i);
}

double indistinguishability_log2_bound(const SchemeParams& params) {
  return indistinguishability_log2_bound(params.c_bar, params.n_nodes, params.ell,
                                         params.r_i);
}

double chernoff_bound(std::uint64_t k_chunks, double q) {
  if (!(q > 0.0 && q < 0.5)) throw QOutOfRange("chernoff bound requires 0 < q < 1/2");
  return std::exp(-0.3 * static_cast<double>(k_chunks) * q);
}

InnerErrorBudget inner_error_budget(std::size_t ell, int n_nodes) {
  // The per-node clip and outside-Q events are each 2^-2ell |N|, which stays
  // below 2^-ell only for 2^ell > |N| (strictly).
  if (ell >= 63 || (std::uint64_t{1} << ell) <= static_cast<std::uint64_t>(n_nodes))
    throw BlockLengthTooSmall("inner error budget requires ell > log2(n_nodes)");
  InnerErrorBudget b;
  const double per = std::pow(2.0, -static_cast<double>(ell));
  b.clip = std::pow(2.0, -2.0 * static_cast<double>(ell)) * n_nodes;
  b.construction = per;
  b.outside_q = std::pow(2.0, -2.0 * static_cast<double>(ell)) * n_nodes;
  b.confusion = per;
  b.total = 4.0 * per;
  return b;
}

}  // namespace qmf

#pragma once

// Shared fixtures and independent oracles for the test suites.  The oracles
// deliberately avoid the library code paths they are used to check.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qmfnet/network.hpp"

namespace testutil {

inline std::string line_network_json(double h_sa, double h_ad) {
  std::string s = R"({"nodes":[{"id":"S","layer":1},{"id":"A","layer":2},{"id":"D","layer":3}],)";
  s += R"("edges":[{"from":"S","to":"A","re":)" + std::to_string(h_sa) + R"(,"im":0.0},)";
  s += R"({"from":"A","to":"D","re":)" + std::to_string(h_ad) + R"(,"im":0.0}],)";
  s += R"("source":"S","sink":"D"})";
  return s;
}

inline std::string diamond_network_json(double gain) {
  const std::string g = std::to_string(gain);
  std::string s =
      R"({"nodes":[{"id":"S","layer":1},{"id":"A","layer":2},{"id":"B","layer":2},{"id":"D","layer":3}],)";
  s += R"("edges":[{"from":"S","to":"A","re":)" + g + R"(},)";
  s += R"({"from":"S","to":"B","re":)" + g + R"(},)";
  s += R"({"from":"A","to":"D","re":)" + g + R"(},)";
  s += R"({"from":"B","to":"D","re":)" + g + R"(}],)";
  s += R"("source":"S","sink":"D"})";
  return s;
}

inline std::string single_edge_json(double re, double im) {
  std::string s = R"({"nodes":[{"id":"S","layer":1},{"id":"D","layer":2}],)";
  s += R"("edges":[{"from":"S","to":"D","re":)" + std::to_string(re) + R"(,"im":)" +
       std::to_string(im) + R"(}],"source":"S","sink":"D"})";
  return s;
}

// Composite Simpson quadrature of the standard normal density over
// [i-1/2, i+1/2] scaled by sigma; an oracle for bin_probability.
inline double bin_probability_quadrature(long i, double sigma, int panels = 4000) {
  const double lo = (static_cast<double>(i) - 0.5) / sigma;
  const double hi = (static_cast<double>(i) + 0.5) / sigma;
  const double h = (hi - lo) / panels;
  auto density = [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  };
  double sum = density(lo) + density(hi);
  for (int k = 1; k < panels; ++k) sum += density(lo + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Laplace-expansion determinant for small complex matrices; an oracle for
// the Cholesky-based log-det inside the cut-set calculator.
inline std::complex<double> det_laplace(std::vector<std::vector<std::complex<double>>> m) {
  const std::size_t n = m.size();
  if (n == 0) return {1.0, 0.0};
  if (n == 1) return m[0][0];
  std::complex<double> acc{0.0, 0.0};
  double sign = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<std::vector<std::complex<double>>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<std::complex<double>> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != col) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    acc += sign * m[0][col] * det_laplace(minor);
    sign = -sign;
  }
  return acc;
}

// log2 det(I + H H*) via the Laplace determinant; rows = receivers.
inline double log2_det_capacity_oracle(
    const std::vector<std::vector<std::complex<double>>>& h) {
  const std::size_t n = h.size();
  if (n == 0 || h[0].empty()) return 0.0;
  std::vector<std::vector<std::complex<double>>> gram(
      n, std::vector<std::complex<double>>(n, {0.0, 0.0}));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < h[0].size(); ++k)
        gram[i][j] += h[i][k] * std::conj(h[j][k]);
      if (i == j) gram[i][j] += 1.0;
    }
  return std::log2(det_laplace(gram).real());
}

}  // namespace testutil

// Reference implementations used only by tests. Written with plain loops
// over dense tables so they share no code path with the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Table = std::vector<std::vector<double>>;  // [node][tap]

// Plain diffusion LMS, ATC form: adapt with dense C over all nodes, then
// combine with dense A. c[l][k], a[l][k] as in the library.
inline Table atc_dlms(const Table& w, const Table& u, const std::vector<double>& d, const Table& a,
                      const Table& c, double mu) {
  const std::size_t n = w.size(), m = w[0].size();
  Table phi(n, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> acc(m, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      if (c[l][k] == 0.0) continue;
      double pred = 0.0;
      for (std::size_t j = 0; j < m; ++j) pred += u[l][j] * w[k][j];
      const double e = d[l] - pred;
      for (std::size_t j = 0; j < m; ++j) acc[j] += c[l][k] * e * u[l][j];
    }
    for (std::size_t j = 0; j < m; ++j) phi[k][j] = w[k][j] + mu * acc[j];
  }
  Table out(n, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      if (a[l][k] == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out[k][j] += a[l][k] * phi[l][j];
    }
  return out;
}

// Plain diffusion LMS, CTA form.
inline Table cta_dlms(const Table& w, const Table& u, const std::vector<double>& d, const Table& a,
                      const Table& c, double mu) {
  const std::size_t n = w.size(), m = w[0].size();
  Table phi(n, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      if (a[l][k] == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) phi[k][j] += a[l][k] * w[l][j];
    }
  Table out(n, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> acc(m, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      if (c[l][k] == 0.0) continue;
      double pred = 0.0;
      for (std::size_t j = 0; j < m; ++j) pred += u[l][j] * phi[k][j];
      const double e = d[l] - pred;
      for (std::size_t j = 0; j < m; ++j) acc[j] += c[l][k] * e * u[l][j];
    }
    for (std::size_t j = 0; j < m; ++j) out[k][j] = phi[k][j] + mu * acc[j];
  }
  return out;
}

// Single-filter leaky LMS step: w <- (1 - mu*gamma) w + mu u^T (d - u w).
inline std::vector<double> leaky_lms(const std::vector<double>& w, const std::vector<double>& u, double d,
                                     double mu, double gamma) {
  double pred = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) pred += u[j] * w[j];
  const double e = d - pred;
  std::vector<double> out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = (1.0 - mu * gamma) * w[j] + mu * e * u[j];
  return out;
}

// Breadth-first reachability over a dense adjacency.
inline bool connected(const std::vector<std::vector<bool>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto k = stack.back();
    stack.pop_back();
    for (std::size_t l = 0; l < adj.size(); ++l)
      if (adj[k][l] && !seen[l]) {
        seen[l] = true;
        ++count;
        stack.push_back(l);
      }
  }
  return count == adj.size();
}

// |H(e^{j omega})| of an FIR by direct summation.
inline double fir_magnitude(const std::vector<double>& taps, double omega) {
  std::complex<double> h{0.0, 0.0};
  for (std::size_t n = 0; n < taps.size(); ++n) h += taps[n] * std::polar(1.0, -omega * static_cast<double>(n));
  return std::abs(h);
}

}  // namespace oracle

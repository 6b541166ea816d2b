// Communication graphs and diffusion combination weights.
//
// Nodes are 0-based in memory. The edge-list file format and the CLI use
// 1-based node numbers.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dlms {

/// Undirected graph with self-inclusive neighborhoods.
///
/// Every neighborhood contains its own node, lists only valid node indices,
/// and is sorted ascending. Links are symmetric. Construction enforces all
/// of this and throws std::invalid_argument otherwise.
class Topology {
 public:
  explicit Topology(std::vector<std::vector<int>> neighbors);

  /// Builds from undirected 0-based edges; self-loops are implied.
  static Topology from_edges(int n, std::span<const std::pair<int, int>> edges);

  int size() const { return static_cast<int>(neighbors_.size()); }
  std::span<const int> neighbors(int k) const { return neighbors_.at(k); }
  /// n_k = |N_k|, self included.
  int degree(int k) const { return static_cast<int>(neighbors_.at(k).size()); }
  bool linked(int k, int l) const;
  bool connected() const;

  /// Undirected edges (k < l), self-loops excluded, 0-based.
  std::vector<std::pair<int, int>> edges() const;

  bool operator==(const Topology&) const = default;

 private:
  std::vector<std::vector<int>> neighbors_;
};

/// Node k links k±1..k±half_width (mod n). Requires 2*half_width < n.
Topology build_ring_lattice(int n, int half_width);

/// Nodes uniform in the unit square, linked when within `radius`. A
/// disconnected draw grows the radius by 10% until the graph connects; the
/// node positions are drawn once and kept.
Topology build_random_geometric(int n, double radius, std::uint64_t seed);

/// Edge-list text: first line "N", then one "k l" line per undirected edge
/// (1-based). Blank lines and '#' comments are skipped on read.
void write_edge_list(std::ostream& out, const Topology& topo);
Topology read_edge_list(std::istream& in);

/// Combination (A) and measurement-sharing (C) tables. Column k holds the
/// weights node k places on its neighbors: a(l, k) weighs node l's estimate,
/// c(l, k) weighs node l's data.
template <typename Scalar>
struct CombinationWeights {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix a;
  Matrix c;

  int size() const { return static_cast<int>(a.cols()); }
};

/// a(l,k) = c(l,k) = 1/n_k on N_k.
template <typename Scalar = double>
CombinationWeights<Scalar> uniform_weights(const Topology& topo) {
  const int n = topo.size();
  CombinationWeights<Scalar> w{CombinationWeights<Scalar>::Matrix::Zero(n, n),
                               CombinationWeights<Scalar>::Matrix::Zero(n, n)};
  for (int k = 0; k < n; ++k) {
    const Scalar share = Scalar(1) / Scalar(topo.degree(k));
    for (int l : topo.neighbors(k)) {
      w.a(l, k) = share;
      w.c(l, k) = share;
    }
  }
  return w;
}

/// Identity tables: every node runs stand-alone.
template <typename Scalar = double>
CombinationWeights<Scalar> non_cooperative_weights(int n) {
  if (n < 1) throw std::invalid_argument("non_cooperative_weights: n must be >= 1");
  using Matrix = typename CombinationWeights<Scalar>::Matrix;
  return {Matrix::Identity(n, n), Matrix::Identity(n, n)};
}

namespace detail {

template <typename Derived>
std::string check_table(const Eigen::MatrixBase<Derived>& t, const Topology& topo,
                        const char* name, double tol) {
  const int n = topo.size();
  if (t.rows() != n || t.cols() != n) return std::string(name) + ": shape mismatch";
  for (int k = 0; k < n; ++k) {
    double sum = 0.0;
    for (int l = 0; l < n; ++l) {
      const double v = static_cast<double>(t(l, k));
      if (!(v >= 0.0)) return std::string(name) + ": negative or non-finite entry";
      if (v != 0.0 && !topo.linked(k, l))
        return std::string(name) + ": weight outside neighborhood of node " + std::to_string(k + 1);
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      return std::string(name) + ": column " + std::to_string(k + 1) + " does not sum to 1";
  }
  return {};
}

}  // namespace detail

/// Empty string when both tables are nonnegative, column-stochastic within
/// `tol`, and supported on the neighborhoods; otherwise the first violation.
template <typename Scalar>
std::string weight_violation(const CombinationWeights<Scalar>& w, const Topology& topo,
                             double tol = 1e-12) {
  if (auto msg = detail::check_table(w.a, topo, "A", tol); !msg.empty()) return msg;
  return detail::check_table(w.c, topo, "C", tol);
}

}  // namespace dlms

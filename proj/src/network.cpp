#include "dlms/network.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace dlms {

Topology::Topology(std::vector<std::vector<int>> neighbors) : neighbors_(std::move(neighbors)) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("topology: at least one node required");
  for (int k = 0; k < n; ++k) {
    auto& nk = neighbors_[k];
    std::sort(nk.begin(), nk.end());
    nk.erase(std::unique(nk.begin(), nk.end()), nk.end());
    if (!std::binary_search(nk.begin(), nk.end(), k))
      throw std::invalid_argument("topology: node " + std::to_string(k + 1) +
                                  " missing from its own neighborhood");
    if (nk.front() < 0 || nk.back() >= n)
      throw std::invalid_argument("topology: neighbor index out of range at node " +
                                  std::to_string(k + 1));
  }
  for (int k = 0; k < n; ++k)
    for (int l : neighbors_[k])
      if (!linked(l, k))
        throw std::invalid_argument("topology: link " + std::to_string(k + 1) + "-" +
                                    std::to_string(l + 1) + " is not symmetric");
}

Topology Topology::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  if (n < 1) throw std::invalid_argument("topology: at least one node required");
  std::vector<std::vector<int>> nb(n);
  for (int k = 0; k < n; ++k) nb[k].push_back(k);
  for (auto [k, l] : edges) {
    if (k < 0 || l < 0 || k >= n || l >= n)
      throw std::invalid_argument("topology: edge endpoint out of range");
    nb[k].push_back(l);
    nb[l].push_back(k);
  }
  return Topology(std::move(nb));
}

bool Topology::linked(int k, int l) const {
  const auto& nk = neighbors_.at(k);
  return std::binary_search(nk.begin(), nk.end(), l);
}

bool Topology::connected() const {
  std::vector<char> seen(neighbors_.size(), 0);
  std::vector<int> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (int l : neighbors_[queue[head]])
      if (!seen[l]) {
        seen[l] = 1;
        queue.push_back(l);
      }
  return queue.size() == neighbors_.size();
}

std::vector<std::pair<int, int>> Topology::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < size(); ++k)
    for (int l : neighbors_[k])
      if (l > k) out.emplace_back(k, l);
  return out;
}

Topology build_ring_lattice(int n, int half_width) {
  if (n < 1) throw std::invalid_argument("ring lattice: n must be >= 1");
  if (half_width < 0 || 2 * half_width >= n)
    throw std::invalid_argument("ring lattice: half_width must satisfy 0 <= 2*half_width < n");
  std::vector<std::vector<int>> nb(n);
  for (int k = 0; k < n; ++k)
    for (int off = -half_width; off <= half_width; ++off) nb[k].push_back(((k + off) % n + n) % n);
  return Topology(std::move(nb));
}

Topology build_random_geometric(int n, double radius, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random geometric: n must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("random geometric: radius must be > 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixX2d pos(n, 2);
  for (int k = 0; k < n; ++k) {
    pos(k, 0) = unit(rng);
    pos(k, 1) = unit(rng);
  }

  for (;;) {
    std::vector<std::vector<int>> nb(n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        if ((pos.row(k) - pos.row(l)).norm() <= radius) nb[k].push_back(l);
    Topology topo(std::move(nb));
    if (topo.connected()) return topo;
    radius *= 1.1;
  }
}

void write_edge_list(std::ostream& out, const Topology& topo) {
  out << topo.size() << '\n';
  for (auto [k, l] : topo.edges()) out << (k + 1) << ' ' << (l + 1) << '\n';
}

Topology read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string extra;
    if (n < 0) {
      if (!(ss >> n) || (ss >> extra) || n < 1)
        throw std::invalid_argument("edge list line " + std::to_string(lineno) +
                                    ": expected positive node count");
      continue;
    }
    int k = 0, l = 0;
    if (!(ss >> k >> l) || (ss >> extra))
      throw std::invalid_argument("edge list line " + std::to_string(lineno) +
                                  ": expected \"k l\"");
    if (k < 1 || l < 1 || k > n || l > n)
      throw std::invalid_argument("edge list line " + std::to_string(lineno) +
                                  ": node out of range");
    edges.emplace_back(k - 1, l - 1);
  }
  if (n < 0) throw std::invalid_argument("edge list: missing node count");
  return Topology::from_edges(n, edges);
}

}  // namespace dlms

// Diffusion LMS and diffusion leaky LMS, adapt-then-combine (ATC) and
// combine-then-adapt (CTA), as synchronous rounds over a network.
//
// Adaptation at node k shares neighbor data through C:
//
//   psi = (1 - mu*gamma) x_k + mu * sum_{l in N_k} c(l,k) u_l^T (d_l - u_l x_k)
//
// and combination fuses neighbor estimates through A:
//
//   y_k = sum_{l in N_k} a(l,k) z_l
//
// ATC adapts from the previous estimates w and then combines the
// intermediates phi; CTA combines w into phi first and then adapts from phi.
// gamma = 0 gives plain diffusion LMS.
#pragma once

#include "dlms/network.hpp"
#include "dlms/signal.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace dlms {

enum class Ordering { atc, cta };

template <typename Scalar>
struct AlgorithmSpec {
  Ordering ordering = Ordering::atc;
  Scalar mu = Scalar(0.08);
  Scalar gamma = Scalar(0);

  bool leaky() const { return gamma != Scalar(0); }
  bool operator==(const AlgorithmSpec&) const = default;
};

/// Per-node estimates, one row per node.
template <typename Scalar>
struct NodeState {
  using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Table w;
  Table phi;

  int nodes() const { return static_cast<int>(w.rows()); }
  int order() const { return static_cast<int>(w.cols()); }
};

template <typename Scalar = double>
NodeState<Scalar> init_state(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("init_state: n and m must be >= 1");
  using Table = typename NodeState<Scalar>::Table;
  return {Table::Zero(n, m), Table::Zero(n, m)};
}

namespace detail {

template <typename Scalar>
void check_shapes(const NodeState<Scalar>& s, const SampleFrame<Scalar>& f,
                  const CombinationWeights<Scalar>& wts, const Topology& topo,
                  const AlgorithmSpec<Scalar>& spec) {
  const int n = s.nodes();
  if (topo.size() != n || wts.size() != n || f.nodes() != n || f.d.size() != n)
    throw std::invalid_argument("diffusion step: node counts disagree");
  if (f.order() != s.order() || s.phi.rows() != n || s.phi.cols() != s.order())
    throw std::invalid_argument("diffusion step: filter orders disagree");
  if (!(spec.mu >= Scalar(0)) || !(spec.gamma >= Scalar(0)))
    throw std::invalid_argument("diffusion step: mu and gamma must be >= 0");
}

/// Adapted estimate for node k starting from `base`. Neighbors are visited
/// in ascending index order, so results are bit-reproducible.
template <typename Scalar, typename Row>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> adapt_node(int k, const Eigen::MatrixBase<Row>& base,
                                                    const SampleFrame<Scalar>& f,
                                                    const AlgorithmSpec<Scalar>& spec,
                                                    const CombinationWeights<Scalar>& wts,
                                                    const Topology& topo) {
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> innovation =
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(base.cols());
  for (int l : topo.neighbors(k)) {
    const Scalar c = wts.c(l, k);
    if (c == Scalar(0)) continue;
    const Scalar e = f.d(l) - f.u.row(l).dot(base);
    innovation += (c * e) * f.u.row(l);
  }
  return (Scalar(1) - spec.mu * spec.gamma) * base + spec.mu * innovation;
}

/// A-weighted average of rows of `table` over N_k.
template <typename Scalar, typename TableT>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> combine_node(int k, const Eigen::MatrixBase<TableT>& table,
                                                      const CombinationWeights<Scalar>& wts,
                                                      const Topology& topo) {
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(table.cols());
  for (int l : topo.neighbors(k)) {
    const Scalar a = wts.a(l, k);
    if (a == Scalar(0)) continue;
    out += a * table.row(l);
  }
  return out;
}

}  // namespace detail

/// One ATC round: every node adapts from round i-1 estimates, then every
/// node combines the fresh intermediates.
template <typename Scalar>
NodeState<Scalar> atc_step(const NodeState<Scalar>& state, const SampleFrame<Scalar>& frame,
                           const AlgorithmSpec<Scalar>& spec, const CombinationWeights<Scalar>& weights,
                           const Topology& topo) {
  detail::check_shapes(state, frame, weights, topo, spec);
  NodeState<Scalar> next = state;
  for (int k = 0; k < state.nodes(); ++k)
    next.phi.row(k) = detail::adapt_node(k, state.w.row(k), frame, spec, weights, topo);
  for (int k = 0; k < state.nodes(); ++k)
    next.w.row(k) = detail::combine_node(k, next.phi, weights, topo);
  return next;
}

/// One CTA round: every node combines round i-1 estimates into phi, then
/// adapts from its own phi.
template <typename Scalar>
NodeState<Scalar> cta_step(const NodeState<Scalar>& state, const SampleFrame<Scalar>& frame,
                           const AlgorithmSpec<Scalar>& spec, const CombinationWeights<Scalar>& weights,
                           const Topology& topo) {
  detail::check_shapes(state, frame, weights, topo, spec);
  NodeState<Scalar> next = state;
  for (int k = 0; k < state.nodes(); ++k)
    next.phi.row(k) = detail::combine_node(k, state.w, weights, topo);
  for (int k = 0; k < state.nodes(); ++k)
    next.w.row(k) = detail::adapt_node(k, next.phi.row(k), frame, spec, weights, topo);
  return next;
}

template <typename Scalar>
NodeState<Scalar> diffusion_step(const NodeState<Scalar>& state, const SampleFrame<Scalar>& frame,
                                 const AlgorithmSpec<Scalar>& spec,
                                 const CombinationWeights<Scalar>& weights, const Topology& topo) {
  return spec.ordering == Ordering::atc ? atc_step(state, frame, spec, weights, topo)
                                        : cta_step(state, frame, spec, weights, topo);
}

template <typename Scalar>
SampleFrame<Scalar> frame_cast(const Frame& f) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return f;
  } else {
    return {f.u.template cast<Scalar>(), f.d.template cast<Scalar>(), f.noise.template cast<Scalar>()};
  }
}

/// Runs `horizon` rounds from zero state, calling observe(round, state, frame)
/// after each round (rounds count from 1). Returning false from the observer
/// stops the run early. Throws std::runtime_error if the source runs dry.
template <typename Scalar, FrameSource Source, typename Observer>
NodeState<Scalar> drive(const Topology& topo, const CombinationWeights<Scalar>& weights,
                        const AlgorithmSpec<Scalar>& spec, Source& source, int m, int horizon,
                        Observer&& observe) {
  NodeState<Scalar> state = init_state<Scalar>(topo.size(), m);
  for (int i = 1; i <= horizon; ++i) {
    auto raw = source.next();
    if (!raw)
      throw std::runtime_error("source exhausted after " + std::to_string(i - 1) + " of " +
                               std::to_string(horizon) + " rounds");
    const SampleFrame<Scalar> frame = frame_cast<Scalar>(*raw);
    state = diffusion_step(state, frame, spec, weights, topo);
    if (!observe(i, std::as_const(state), frame)) break;
  }
  return state;
}

template <typename Scalar>
struct FilterRun {
  /// snapshots[0] is the initial table, snapshots[i] the estimates after round i.
  std::vector<typename NodeState<Scalar>::Table> snapshots;
  /// First round that produced a non-finite estimate, if any.
  std::optional<int> first_nonfinite_round;
};

template <typename Scalar, FrameSource Source>
FilterRun<Scalar> run_filter(const Topology& topo, const CombinationWeights<Scalar>& weights,
                             const AlgorithmSpec<Scalar>& spec, Source& source, int m, int horizon) {
  if (horizon < 0) throw std::invalid_argument("run_filter: horizon must be >= 0");
  FilterRun<Scalar> run;
  run.snapshots.reserve(static_cast<std::size_t>(horizon) + 1);
  run.snapshots.push_back(init_state<Scalar>(topo.size(), m).w);
  drive(topo, weights, spec, source, m, horizon,
        [&](int i, const NodeState<Scalar>& s, const SampleFrame<Scalar>&) {
          if (!run.first_nonfinite_round && !s.w.allFinite()) run.first_nonfinite_round = i;
          run.snapshots.push_back(s.w);
          return true;
        });
  return run;
}

}  // namespace dlms

// Network MSD, steady-state and divergence detection, and the single-node
// theory oracles (leaky fixed point, mean-stability step bound).
#pragma once

#include "dlms/filters.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dlms {

/// Returned by network_msd_db when every node sits exactly on w_o.
inline constexpr double kZeroDeviationDb = -std::numeric_limits<double>::infinity();

/// (1/N) sum_l |w_l - w_o|^2, rows of `w_table` being the node estimates.
template <typename TableT, typename VecT>
typename TableT::Scalar network_msd(const Eigen::MatrixBase<TableT>& w_table,
                                    const Eigen::MatrixBase<VecT>& w_o) {
  using Scalar = typename TableT::Scalar;
  if (w_table.cols() != w_o.size()) throw std::invalid_argument("network_msd: order mismatch");
  Scalar sum(0);
  for (Eigen::Index l = 0; l < w_table.rows(); ++l)
    sum += (w_table.row(l).transpose() - w_o).squaredNorm();
  return sum / Scalar(w_table.rows());
}

/// 10 log10 of network_msd; kZeroDeviationDb for zero deviation.
template <typename TableT, typename VecT>
typename TableT::Scalar network_msd_db(const Eigen::MatrixBase<TableT>& w_table,
                                       const Eigen::MatrixBase<VecT>& w_o) {
  using Scalar = typename TableT::Scalar;
  const Scalar msd = network_msd(w_table, w_o);
  if (msd == Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
  return Scalar(10) * std::log10(msd);
}

/// Minimizer of E|d - u w|^2 + gamma |w|^2: (R + gamma I)^{-1} R w_o.
/// Throws std::domain_error when R + gamma I is singular.
template <typename MatT, typename VecT>
Eigen::Matrix<typename MatT::Scalar, Eigen::Dynamic, 1> leaky_fixed_point(
    const Eigen::MatrixBase<MatT>& r, typename MatT::Scalar gamma, const Eigen::MatrixBase<VecT>& w_o) {
  using Scalar = typename MatT::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (r.rows() != r.cols() || r.rows() != w_o.size())
    throw std::invalid_argument("leaky_fixed_point: shape mismatch");
  if (!(gamma >= Scalar(0))) throw std::invalid_argument("leaky_fixed_point: gamma must be >= 0");
  const Mat regularized = r + gamma * Mat::Identity(r.rows(), r.cols());
  Eigen::FullPivLU<Mat> lu(regularized);
  if (!lu.isInvertible()) throw std::domain_error("leaky_fixed_point: R + gamma I is singular");
  return lu.solve(r * w_o);
}

/// Mean-stability bound 2 / (gamma + lambda_max(R)) for white regressors,
/// R = sigma_u_sq I of size m.
template <typename Scalar>
Scalar step_size_upper_bound(Scalar sigma_u_sq, int m, Scalar gamma) {
  if (!(sigma_u_sq > Scalar(0))) throw std::invalid_argument("step_size_upper_bound: sigma^2 must be > 0");
  if (m < 1) throw std::invalid_argument("step_size_upper_bound: m must be >= 1");
  if (!(gamma >= Scalar(0))) throw std::invalid_argument("step_size_upper_bound: gamma must be >= 0");
  return Scalar(2) / (gamma + sigma_u_sq);
}

inline constexpr double kDefaultDivergenceThreshold = 1e6;

struct DivergenceReport {
  bool diverged = false;
  int node = -1;                 // first offending node (0-based)
  std::optional<int> iteration;  // set by DivergenceMonitor
};

/// Flags the first node whose estimate has a non-finite entry or a max-norm
/// above `threshold`.
template <typename Scalar>
DivergenceReport detect_divergence(const NodeState<Scalar>& state,
                                   double threshold = kDefaultDivergenceThreshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("detect_divergence: threshold must be > 0");
  for (int k = 0; k < state.nodes(); ++k) {
    const auto row = state.w.row(k);
    if (!row.allFinite() || static_cast<double>(row.cwiseAbs().maxCoeff()) > threshold)
      return {true, k, std::nullopt};
  }
  return {};
}

/// Tracks the first round at which a run diverged.
class DivergenceMonitor {
 public:
  explicit DivergenceMonitor(double threshold = kDefaultDivergenceThreshold) : threshold_(threshold) {}

  /// Returns true while the run is still healthy.
  template <typename Scalar>
  bool observe(int iteration, const NodeState<Scalar>& state) {
    if (report_.diverged) return false;
    auto r = detect_divergence(state, threshold_);
    if (r.diverged) {
      r.iteration = iteration;
      report_ = r;
    }
    return !report_.diverged;
  }

  const DivergenceReport& report() const { return report_; }

 private:
  double threshold_;
  DivergenceReport report_;
};

/// Ensemble learning curve. per_iteration_db[i] is the network MSD after
/// round i+1, averaged in the linear domain over the non-divergent trials.
struct MsdTrace {
  std::vector<double> per_iteration_db;
  std::vector<std::vector<double>> per_node_db;  // [node][iteration]
  int trials = 0;
  int divergent_trials = 0;

  int length() const { return static_cast<int>(per_iteration_db.size()); }
};

/// Mean of the last `window` dB values of the trace.
inline double steady_state_msd(const std::vector<double>& trace_db, int window) {
  if (window < 1) throw std::invalid_argument("steady_state_msd: window must be >= 1");
  if (window > static_cast<int>(trace_db.size()))
    throw std::invalid_argument("steady_state_msd: window longer than trace");
  return std::accumulate(trace_db.end() - window, trace_db.end(), 0.0) / window;
}

inline double steady_state_msd(const MsdTrace& trace, int window) {
  return steady_state_msd(trace.per_iteration_db, window);
}

}  // namespace dlms

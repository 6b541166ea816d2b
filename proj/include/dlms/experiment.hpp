// Ensemble experiments: seeded multi-trial learning curves, parameter
// sweeps, and single-run waveform denoising.
#pragma once

#include "dlms/analysis.hpp"
#include "dlms/filters.hpp"
#include "dlms/network.hpp"
#include "dlms/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dlms {

enum class TopologyKind { random_geometric, ring_lattice, edge_list };
enum class WeightRule { uniform, non_cooperative };

struct TopologySpec {
  TopologyKind kind = TopologyKind::random_geometric;
  int nodes = 20;
  double radius = 0.35;
  int half_width = 2;
  std::optional<std::uint64_t> seed;  // defaults to the base seed
  std::filesystem::path edge_list;

  bool operator==(const TopologySpec&) const = default;
};

/// One algorithm in an experiment. mu and gamma fall back to the
/// experiment-wide values; non-leaky entries always run with gamma = 0.
struct AlgorithmEntry {
  std::string label;
  Ordering ordering = Ordering::atc;
  bool leaky = false;
  std::optional<double> mu;
  std::optional<double> gamma;

  bool operator==(const AlgorithmEntry&) const = default;
};

/// ATC/CTA x {plain, leaky}.
std::vector<AlgorithmEntry> default_algorithms();

struct ExperimentConfig {
  TopologySpec topology;
  WeightRule weights = WeightRule::uniform;

  double mu = 0.08;
  double gamma = 0.002;
  std::vector<AlgorithmEntry> algorithms = default_algorithms();

  int order = 5;
  std::optional<std::vector<double>> coefficients;  // defaults to the moving average

  SourceKind source = SourceKind::white_gaussian;
  std::optional<std::vector<double>> variances;  // defaults to a seeded draw
  double variance_min = 0.1;
  double variance_max = 1.0;
  std::optional<std::uint64_t> variance_seed;  // defaults to the base seed
  std::filesystem::path samples;               // empty: synthetic speech
  int synthetic_length = 8000;
  double scale_exponent = 1.0;

  double snr_db = 0.0;
  std::optional<double> noise_variance;

  int horizon = 1000;
  int trials = 50;
  std::uint64_t base_seed = 1;
  int steady_window = 200;
  double divergence_threshold = kDefaultDivergenceThreshold;
  std::string denoise_algorithm = "atc_leaky";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Fills every defaulted optional (seeds, variances, coefficients) so the
/// result reproduces the same experiment without relying on defaults.
ExperimentConfig resolve(ExperimentConfig cfg);

/// Everything a run needs, built from a config.
struct Scenario {
  Topology topology;
  CombinationWeights<double> weights;
  Eigen::VectorXd w_o;
  SourceSpec source;
  NoiseSpec noise;
  std::vector<std::string> labels;
  std::vector<AlgorithmSpec<double>> algorithms;
  std::optional<int> sample_rate;  // WAV input only
};

/// Loads samples, builds the graph and weights. Throws std::runtime_error on
/// source I/O problems and std::invalid_argument on inconsistent settings.
Scenario build_scenario(const ExperimentConfig& cfg);

/// The frames trial `trial` feeds to every algorithm.
std::vector<Frame> trial_frames(const Scenario& sc, std::uint64_t seed, int horizon);

/// Called for each (label, trial, round, frame) an algorithm consumes.
using FrameTap = std::function<void(const std::string&, int, int, const Frame&)>;

struct EnsembleResult {
  std::vector<std::string> labels;
  std::map<std::string, MsdTrace> traces;
  std::map<std::string, std::string> failures;  // labels whose trials all diverged

  bool ok(const std::string& label) const { return traces.count(label) != 0; }
};

/// Trial t draws its data from seed base_seed + t; every algorithm in a trial
/// consumes the same frames. Divergent trials are dropped from the average
/// and counted.
EnsembleResult run_ensemble(const ExperimentConfig& cfg, const FrameTap& tap = {});

enum class SweepParam { mu, gamma };

struct SweepResult {
  SweepParam param = SweepParam::mu;
  std::vector<double> grid;
  std::vector<std::string> labels;
  /// steady-state dB per grid point; nullopt marks a divergent point.
  std::map<std::string, std::vector<std::optional<double>>> steady_db;
};

/// One ensemble per grid value, the value replacing mu (or gamma) for every
/// algorithm. A point where any trial diverged is reported as divergent.
SweepResult sweep(const ExperimentConfig& cfg, SweepParam param, const std::vector<double>& grid);

inline SweepResult sweep_step_size(const ExperimentConfig& cfg, const std::vector<double>& grid) {
  return sweep(cfg, SweepParam::mu, grid);
}
inline SweepResult sweep_leakage(const ExperimentConfig& cfg, const std::vector<double>& grid) {
  return sweep(cfg, SweepParam::gamma, grid);
}

struct DenoiseResult {
  std::vector<double> noisy;     // d_k(i)
  std::vector<double> filtered;  // u_{k,i} w_{k,i}
  std::vector<double> residual;  // d_k(i) - u_{k,i} w_{k,i}
  std::vector<double> clean;     // u_{k,i} w_o
  std::optional<int> sample_rate;
  std::string algorithm;
};

/// Single run of cfg.denoise_algorithm over the whole delay-line sequence,
/// recording node `node` (0-based) output.
DenoiseResult denoise_speech(const ExperimentConfig& cfg, int node);

/// 10 log10(sum clean^2 / sum (x - clean)^2) over samples [from, end).
double snr_db_against(const std::vector<double>& clean, const std::vector<double>& x, std::size_t from);

}  // namespace dlms

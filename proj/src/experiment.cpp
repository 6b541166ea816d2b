#include "dlms/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dlms {

std::vector<AlgorithmEntry> default_algorithms() {
  return {
      {"atc_dlms", Ordering::atc, false, std::nullopt, std::nullopt},
      {"cta_dlms", Ordering::cta, false, std::nullopt, std::nullopt},
      {"atc_leaky", Ordering::atc, true, std::nullopt, std::nullopt},
      {"cta_leaky", Ordering::cta, true, std::nullopt, std::nullopt},
  };
}

namespace {

Topology build_topology(const TopologySpec& spec, std::uint64_t base_seed) {
  switch (spec.kind) {
    case TopologyKind::ring_lattice:
      return build_ring_lattice(spec.nodes, spec.half_width);
    case TopologyKind::edge_list: {
      std::ifstream in(spec.edge_list);
      if (!in) throw std::runtime_error("cannot open edge list " + spec.edge_list.string());
      return read_edge_list(in);
    }
    case TopologyKind::random_geometric:
      break;
  }
  return build_random_geometric(spec.nodes, spec.radius, spec.seed.value_or(base_seed));
}

double to_db(double linear) {
  return linear == 0.0 ? kZeroDeviationDb : 10.0 * std::log10(linear);
}

}  // namespace

ExperimentConfig resolve(ExperimentConfig cfg) {
  if (!cfg.topology.seed) cfg.topology.seed = cfg.base_seed;
  if (!cfg.variance_seed) cfg.variance_seed = cfg.base_seed;
  if (!cfg.coefficients) {
    const Eigen::VectorXd w = default_lowpass_system(cfg.order);
    cfg.coefficients = std::vector<double>(w.data(), w.data() + w.size());
  }
  if (!cfg.variances) {
    int n = cfg.topology.nodes;
    if (cfg.topology.kind == TopologyKind::edge_list) n = build_topology(cfg.topology, cfg.base_seed).size();
    const Eigen::VectorXd v = default_variances(n, cfg.variance_min, cfg.variance_max, *cfg.variance_seed);
    cfg.variances = std::vector<double>(v.data(), v.data() + v.size());
  }
  return cfg;
}

Scenario build_scenario(const ExperimentConfig& raw) {
  const ExperimentConfig cfg = resolve(raw);
  Topology topo = build_topology(cfg.topology, cfg.base_seed);
  const int n = topo.size();

  CombinationWeights<double> weights =
      cfg.weights == WeightRule::uniform ? uniform_weights(topo) : non_cooperative_weights(n);

  Eigen::VectorXd w_o = Eigen::Map<const Eigen::VectorXd>(cfg.coefficients->data(),
                                                          static_cast<Eigen::Index>(cfg.coefficients->size()));
  if (static_cast<int>(cfg.variances->size()) != n)
    throw std::invalid_argument("source: expected " + std::to_string(n) + " variances, got " +
                                std::to_string(cfg.variances->size()));

  SourceSpec source;
  source.kind = cfg.source;
  source.variances = Eigen::Map<const Eigen::VectorXd>(cfg.variances->data(), n);
  source.scale_exponent = cfg.scale_exponent;

  std::optional<int> rate;
  if (cfg.source == SourceKind::delay_line) {
    if (cfg.samples.empty()) {
      source.samples = std::make_shared<const std::vector<double>>(
          synthetic_speech(cfg.synthetic_length, cfg.base_seed));
    } else {
      SampleData data = load_samples(cfg.samples);
      rate = data.sample_rate;
      source.samples = std::make_shared<const std::vector<double>>(std::move(data.samples));
    }
  }

  NoiseSpec noise;
  noise.snr_db = {cfg.snr_db};
  noise.variance = cfg.noise_variance;

  Scenario sc{std::move(topo), std::move(weights), std::move(w_o), std::move(source), std::move(noise), {}, {}, rate};
  for (const auto& a : cfg.algorithms) {
    sc.labels.push_back(a.label);
    sc.algorithms.push_back({a.ordering, a.mu.value_or(cfg.mu), a.leaky ? a.gamma.value_or(cfg.gamma) : 0.0});
  }
  return sc;
}

std::vector<Frame> trial_frames(const Scenario& sc, std::uint64_t seed, int horizon) {
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(horizon));
  auto pull = [&](auto& src) {
    for (int i = 0; i < horizon; ++i) {
      auto f = src.next();
      if (!f)
        throw std::runtime_error("source provides " + std::to_string(i) + " samples, horizon is " +
                                 std::to_string(horizon));
      frames.push_back(std::move(*f));
    }
  };
  if (sc.source.kind == SourceKind::white_gaussian) {
    GaussianSource src(sc.source, sc.w_o, sc.noise, seed, horizon);
    pull(src);
  } else {
    DelayLineSource src(sc.source, sc.w_o, sc.noise, seed);
    pull(src);
  }
  return frames;
}

EnsembleResult run_ensemble(const ExperimentConfig& cfg, const FrameTap& tap) {
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.algorithms.empty()) throw std::invalid_argument("no algorithms configured");

  const Scenario sc = build_scenario(cfg);
  const int n = sc.topology.size();
  const int m = static_cast<int>(sc.w_o.size());
  const int horizon = cfg.horizon;
  const std::size_t algs = sc.algorithms.size();

  // Linear-domain sums over surviving trials, accumulated in trial order.
  std::vector<Eigen::VectorXd> net_sum(algs, Eigen::VectorXd::Zero(horizon));
  std::vector<Eigen::MatrixXd> node_sum(algs, Eigen::MatrixXd::Zero(n, horizon));
  std::vector<int> survivors(algs, 0);
  std::vector<int> diverged(algs, 0);

  Eigen::VectorXd net(horizon);
  Eigen::MatrixXd per_node(n, horizon);
  for (int t = 0; t < cfg.trials; ++t) {
    const std::vector<Frame> frames = trial_frames(sc, cfg.base_seed + static_cast<std::uint64_t>(t), horizon);
    for (std::size_t a = 0; a < algs; ++a) {
      DivergenceMonitor monitor(cfg.divergence_threshold);
      FrameReplay replay(frames);
      drive(sc.topology, sc.weights, sc.algorithms[a], replay, m, horizon,
            [&](int i, const NodeState<double>& s, const Frame& f) {
              if (tap) tap(sc.labels[a], t, i, f);
              if (!monitor.observe(i, s)) return false;
              for (int k = 0; k < n; ++k) per_node(k, i - 1) = (s.w.row(k).transpose() - sc.w_o).squaredNorm();
              net(i - 1) = per_node.col(i - 1).sum() / n;
              return true;
            });
      if (monitor.report().diverged) {
        ++diverged[a];
        continue;
      }
      net_sum[a] += net;
      node_sum[a] += per_node;
      ++survivors[a];
    }
  }

  EnsembleResult result;
  result.labels = sc.labels;
  for (std::size_t a = 0; a < algs; ++a) {
    const auto& label = sc.labels[a];
    if (survivors[a] == 0) {
      result.failures[label] = "all " + std::to_string(cfg.trials) + " trials diverged";
      continue;
    }
    MsdTrace trace;
    trace.trials = cfg.trials;
    trace.divergent_trials = diverged[a];
    trace.per_iteration_db.resize(static_cast<std::size_t>(horizon));
    trace.per_node_db.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(horizon)));
    for (int i = 0; i < horizon; ++i) {
      trace.per_iteration_db[i] = to_db(net_sum[a](i) / survivors[a]);
      for (int k = 0; k < n; ++k) trace.per_node_db[k][i] = to_db(node_sum[a](k, i) / survivors[a]);
    }
    result.traces.emplace(label, std::move(trace));
  }
  return result;
}

SweepResult sweep(const ExperimentConfig& cfg, SweepParam param, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  SweepResult out;
  out.param = param;
  out.grid = grid;
  const int window = std::min(cfg.steady_window, cfg.horizon);
  for (double value : grid) {
    ExperimentConfig point = cfg;
    for (auto& a : point.algorithms) {
      if (param == SweepParam::mu)
        a.mu.reset();
      else
        a.gamma.reset();
    }
    (param == SweepParam::mu ? point.mu : point.gamma) = value;
    const EnsembleResult r = run_ensemble(point);
    out.labels = r.labels;
    for (const auto& label : r.labels) {
      auto& column = out.steady_db[label];
      const auto it = r.traces.find(label);
      if (it == r.traces.end() || it->second.divergent_trials > 0)
        column.push_back(std::nullopt);
      else
        column.push_back(steady_state_msd(it->second, window));
    }
  }
  return out;
}

DenoiseResult denoise_speech(const ExperimentConfig& cfg, int node) {
  if (cfg.source != SourceKind::delay_line) throw std::invalid_argument("denoise needs a delay_line source");
  const Scenario sc = build_scenario(cfg);
  if (node < 0 || node >= sc.topology.size())
    throw std::out_of_range("node " + std::to_string(node + 1) + " outside 1.." +
                            std::to_string(sc.topology.size()));
  std::size_t a = 0;
  while (a < sc.labels.size() && sc.labels[a] != cfg.denoise_algorithm) ++a;
  if (a == sc.labels.size()) throw std::invalid_argument("no algorithm labelled " + cfg.denoise_algorithm);

  DelayLineSource src(sc.source, sc.w_o, sc.noise, cfg.base_seed);
  const int length = src.length();

  DenoiseResult out;
  out.sample_rate = sc.sample_rate;
  out.algorithm = sc.labels[a];
  for (auto* v : {&out.noisy, &out.filtered, &out.residual, &out.clean}) v->reserve(static_cast<std::size_t>(length));

  drive(sc.topology, sc.weights, sc.algorithms[a], src, static_cast<int>(sc.w_o.size()), length,
        [&](int, const NodeState<double>& s, const Frame& f) {
          const double y = f.u.row(node).dot(s.w.row(node));
          out.noisy.push_back(f.d(node));
          out.filtered.push_back(y);
          out.residual.push_back(f.d(node) - y);
          out.clean.push_back(f.u.row(node).dot(sc.w_o));
          return true;
        });
  return out;
}

double snr_db_against(const std::vector<double>& clean, const std::vector<double>& x, std::size_t from) {
  if (clean.size() != x.size()) throw std::invalid_argument("snr: length mismatch");
  double signal = 0.0, error = 0.0;
  for (std::size_t i = from; i < x.size(); ++i) {
    signal += clean[i] * clean[i];
    error += (x[i] - clean[i]) * (x[i] - clean[i]);
  }
  if (error == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / error);
}

}  // namespace dlms

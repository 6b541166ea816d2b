#include "dlms/commands.hpp"

#include "dlms/config.hpp"

#include <json.hpp>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dlms {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad grid value '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos || !std::isfinite(v))
      throw std::invalid_argument("bad grid value '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

void write_trace_csv(std::ostream& out, const MsdTrace& trace) {
  out << "iteration,msd_db\n";
  for (std::size_t i = 0; i < trace.per_iteration_db.size(); ++i)
    out << (i + 1) << ',' << format_number(trace.per_iteration_db[i]) << '\n';
}

void write_comparison_csv(std::ostream& out, const EnsembleResult& result) {
  std::vector<const MsdTrace*> cols;
  out << "iteration";
  for (const auto& label : result.labels)
    if (auto it = result.traces.find(label); it != result.traces.end()) {
      out << ',' << label;
      cols.push_back(&it->second);
    }
  out << '\n';
  const std::size_t len = cols.empty() ? 0 : cols.front()->per_iteration_db.size();
  for (std::size_t i = 0; i < len; ++i) {
    out << (i + 1);
    for (const auto* t : cols) out << ',' << format_number(t->per_iteration_db[i]);
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const std::string& label) {
  const auto& column = sweep.steady_db.at(label);
  out << "param,steady_state_db\n";
  for (std::size_t i = 0; i < sweep.grid.size(); ++i)
    out << format_number(sweep.grid[i]) << ',' << (column[i] ? format_number(*column[i]) : "divergent") << '\n';
}

void write_denoise_csv(std::ostream& out, const DenoiseResult& r) {
  out << "t,noisy,filtered,residual\n";
  for (std::size_t i = 0; i < r.noisy.size(); ++i)
    out << i << ',' << format_number(r.noisy[i]) << ',' << format_number(r.filtered[i]) << ','
        << format_number(r.residual[i]) << '\n';
}

namespace {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a command writes, held until the run has succeeded.
class Outputs {
 public:
  std::ostream& text(const std::string& name) {
    names_.push_back(name);
    return texts_.emplace_back();
  }
  void wav(const std::string& name, std::vector<double> samples, int rate) {
    names_.push_back(name);
    wavs_.push_back({name, std::move(samples), rate});
  }
  const std::vector<std::string>& names() const { return names_; }

  void commit(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFailure("cannot create " + dir.string() + ": " + ec.message());
    std::size_t t = 0;
    for (const auto& name : names_) {
      if (auto w = std::find_if(wavs_.begin(), wavs_.end(), [&](const Wav& x) { return x.name == name; });
          w != wavs_.end()) {
        try {
          write_wav16(dir / name, w->samples, w->rate);
        } catch (const std::exception& e) {
          throw IoFailure(e.what());
        }
        continue;
      }
      std::ofstream f(dir / name, std::ios::binary);
      f << texts_[t++].str();
      if (!f) throw IoFailure("cannot write " + (dir / name).string());
    }
  }

 private:
  struct Wav {
    std::string name;
    std::vector<double> samples;
    int rate;
  };
  std::vector<std::string> names_;
  std::deque<std::ostringstream> texts_;
  std::vector<Wav> wavs_;
};

ExperimentConfig load(const fs::path& path, std::optional<std::uint64_t> seed) {
  if (!fs::exists(path)) throw IoFailure("no such config file: " + path.string());
  ExperimentConfig cfg = parse_config_file(path);
  if (seed) cfg.base_seed = *seed;
  return resolve(cfg);
}

void write_manifest(Outputs& outputs, const char* command, const ExperimentConfig& cfg, nlohmann::json extra) {
  std::vector<std::string> files = outputs.names();
  files.push_back("manifest.json");
  nlohmann::json m = {
      {"artifact", "dlms"},
      {"version", kVersion},
      {"command", command},
      {"base_seed", cfg.base_seed},
      {"config", emit_config(cfg)},
      {"outputs", files},
  };
  for (auto& [k, v] : extra.items()) m[k] = v;
  outputs.text("manifest.json") << m.dump(2) << '\n';
}

// Maps exceptions to exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    // source/sample loading failures
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

int cmd_run(const fs::path& config, const fs::path& out_dir, std::optional<std::uint64_t> seed,
            std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(config, seed);
    const EnsembleResult result = run_ensemble(cfg);

    Outputs outputs;
    nlohmann::json divergent = nlohmann::json::object();
    for (const auto& label : result.labels) {
      if (auto it = result.traces.find(label); it != result.traces.end()) {
        write_trace_csv(outputs.text("msd_" + label + ".csv"), it->second);
        divergent[label] = it->second.divergent_trials;
      } else {
        divergent[label] = cfg.trials;
      }
    }
    write_comparison_csv(outputs.text("msd_comparison.csv"), result);
    write_manifest(outputs, "run", cfg, {{"divergent_trials", divergent}});
    outputs.commit(out_dir);

    for (const auto& [label, why] : result.failures) err << "error: algorithm " << label << ": " << why << '\n';
    return result.failures.empty() ? kExitOk : kExitDivergence;
  });
}

int cmd_sweep(const fs::path& config, SweepParam param, const std::vector<double>& grid, const fs::path& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& err) {
  return guarded(err, [&] {
    if (grid.empty()) throw std::invalid_argument("usage: sweep needs a nonempty --grid");
    const ExperimentConfig cfg = load(config, seed);
    const SweepResult result = sweep(cfg, param, grid);
    const std::string name = param == SweepParam::mu ? "mu" : "gamma";

    Outputs outputs;
    for (const auto& label : result.labels)
      write_sweep_csv(outputs.text("sweep_" + name + "_" + label + ".csv"), result, label);
    write_manifest(outputs, "sweep", cfg, {{"param", name}, {"grid", grid}});
    outputs.commit(out_dir);
    return kExitOk;
  });
}

int cmd_denoise(const fs::path& config, int node, const fs::path& out_dir, std::optional<std::uint64_t> seed,
                std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(config, seed);
    const DenoiseResult r = denoise_speech(cfg, node - 1);

    Outputs outputs;
    const std::string stem = "denoise_node" + std::to_string(node);
    write_denoise_csv(outputs.text(stem + ".csv"), r);
    if (r.sample_rate) {
      outputs.wav(stem + "_noisy.wav", r.noisy, *r.sample_rate);
      outputs.wav(stem + "_filtered.wav", r.filtered, *r.sample_rate);
      outputs.wav(stem + "_residual.wav", r.residual, *r.sample_rate);
    }
    write_manifest(outputs, "denoise", cfg, {{"node", node}, {"algorithm", r.algorithm}});
    outputs.commit(out_dir);
    return kExitOk;
  });
}

int cmd_validate(const fs::path& config, std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig cfg = load(config, seed);
    out << emit_config(cfg);
    return kExitOk;
  });
}

}  // namespace dlms

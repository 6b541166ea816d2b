#include "dlms/signal.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dlms {

Eigen::VectorXd default_lowpass_system(int m) {
  if (m < 1) throw std::invalid_argument("filter order must be >= 1");
  return Eigen::VectorXd::Constant(m, 1.0 / m);
}

double noise_variance_for_snr(double signal_power, double snr_db) {
  if (!(signal_power > 0.0)) throw std::invalid_argument("signal power must be > 0");
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

Eigen::VectorXd default_variances(int n, double lo, double hi, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("variance range must satisfy 0 < lo <= hi");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(lo, hi);
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v(k) = draw(rng);
  if (n == 20) v(13) = 0.35;
  return v;
}

namespace {

void check_variances(const Eigen::VectorXd& v) {
  if (v.size() < 1) throw std::invalid_argument("source: no per-node variances");
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("source: variances must be > 0");
}

void check_system(const Eigen::VectorXd& w_o) {
  if (w_o.size() < 1 || !w_o.allFinite()) throw std::invalid_argument("unknown system must be finite, M >= 1");
}

// powers(k) is the noiseless measurement power at node k.
Eigen::VectorXd resolve_noise(const NoiseSpec& noise, const Eigen::VectorXd& powers) {
  const auto n = powers.size();
  if (noise.variance) {
    if (!(*noise.variance >= 0.0)) throw std::invalid_argument("noise variance must be >= 0");
    return Eigen::VectorXd::Constant(n, *noise.variance);
  }
  if (noise.snr_db.size() != 1 && static_cast<Eigen::Index>(noise.snr_db.size()) != n)
    throw std::invalid_argument("noise: snr_db needs one entry or one per node");
  Eigen::VectorXd out(n);
  for (Eigen::Index k = 0; k < n; ++k)
    out(k) = noise_variance_for_snr(powers(k), noise.snr_for(static_cast<int>(k)));
  return out;
}

}  // namespace

GaussianSource::GaussianSource(const SourceSpec& spec, Eigen::VectorXd w_o, const NoiseSpec& noise,
                               std::uint64_t seed, int horizon)
    : w_o_(std::move(w_o)), rng_(seed), horizon_(horizon) {
  if (spec.kind != SourceKind::white_gaussian)
    throw std::invalid_argument("GaussianSource needs a white_gaussian spec");
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  check_variances(spec.variances);
  check_system(w_o_);
  sigma_u_ = spec.variances.cwiseSqrt();
  noise_var_ = resolve_noise(noise, spec.variances * w_o_.squaredNorm());
}

std::optional<Frame> GaussianSource::next() {
  if (emitted_ >= horizon_) return std::nullopt;
  ++emitted_;
  const auto n = sigma_u_.size();
  const auto m = w_o_.size();
  Frame f{decltype(Frame::u)(n, m), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < m; ++j) f.u(k, j) = sigma_u_(k) * normal_(rng_);
    const double v = std::sqrt(noise_var_(k)) * normal_(rng_);
    const double clean = f.u.row(k).dot(w_o_);
    f.d(k) = clean + v;
    // the noise actually carried by d, so d - u w_o == noise holds exactly
    f.noise(k) = f.d(k) - clean;
  }
  return f;
}

DelayLineSource::DelayLineSource(const SourceSpec& spec, Eigen::VectorXd w_o, const NoiseSpec& noise,
                                 std::uint64_t seed)
    : samples_(spec.samples), w_o_(std::move(w_o)), rng_(seed) {
  if (spec.kind != SourceKind::delay_line)
    throw std::invalid_argument("DelayLineSource needs a delay_line spec");
  if (!samples_ || samples_->empty()) throw std::invalid_argument("delay line: empty sample source");
  check_variances(spec.variances);
  check_system(w_o_);
  if (samples_->size() < static_cast<std::size_t>(w_o_.size()))
    throw std::invalid_argument("delay line: sample source shorter than filter order");

  scale_ = spec.variances.array().pow(spec.scale_exponent).matrix();

  // Noiseless output of w_o driven by the unscaled sequence.
  const auto& s = *samples_;
  const auto m = w_o_.size();
  double power = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double y = 0.0;
    for (Eigen::Index j = 0; j < m && static_cast<std::size_t>(j) <= i; ++j) y += w_o_(j) * s[i - j];
    power += y * y;
  }
  power /= static_cast<double>(s.size());
  noise_var_ = resolve_noise(noise, scale_.array().square().matrix() * power);
}

std::optional<Frame> DelayLineSource::next() {
  if (emitted_ >= length()) return std::nullopt;
  const int i = emitted_++;
  const auto n = scale_.size();
  const auto m = w_o_.size();
  const auto& s = *samples_;
  Frame f{decltype(Frame::u)(n, m), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < m; ++j) f.u(k, j) = i - j >= 0 ? scale_(k) * s[i - j] : 0.0;
    const double v = std::sqrt(noise_var_(k)) * normal_(rng_);
    const double clean = f.u.row(k).dot(w_o_);
    f.d(k) = clean + v;
    f.noise(k) = f.d(k) - clean;
  }
  return f;
}

std::vector<double> synthetic_speech(int length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("synthetic speech: length must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> s(static_cast<std::size_t>(length), 0.0);
  double ar = 0.0;
  for (auto& x : s) {
    ar = 0.9 * ar + 0.02 * normal(rng);
    x = ar;
  }

  int pos = static_cast<int>(unit(rng) * 200.0);
  while (pos < length) {
    const int burst = 300 + static_cast<int>(unit(rng) * 700.0);
    const double amp = 0.4 + 0.6 * unit(rng);
    // two partials per burst, a rough vowel
    const double f0 = 0.01 + 0.03 * unit(rng);
    const double f1 = 0.05 + 0.1 * unit(rng);
    const double ph0 = 2.0 * std::numbers::pi * unit(rng);
    const double ph1 = 2.0 * std::numbers::pi * unit(rng);
    for (int t = 0; t < burst && pos + t < length; ++t) {
      const double env = std::sin(std::numbers::pi * (t + 0.5) / burst);
      const double tone = std::sin(2.0 * std::numbers::pi * f0 * t + ph0) +
                          0.5 * std::sin(2.0 * std::numbers::pi * f1 * t + ph1);
      s[static_cast<std::size_t>(pos + t)] += amp * env * env * tone;
    }
    pos += burst + 50 + static_cast<int>(unit(rng) * 250.0);
  }

  double peak = 0.0;
  for (double x : s) peak = std::max(peak, std::abs(x));
  if (peak > 0.0)
    for (auto& x : s) x /= peak;
  return s;
}

namespace {

bool has_riff_magic(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string(magic, 4) == "RIFF";
}

SampleData load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  SampleData out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double v = 0.0;
    std::string extra;
    if (!(ss >> v) || (ss >> extra) || !std::isfinite(v))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not a sample value");
    out.samples.push_back(v);
  }
  return out;
}

}  // namespace

SampleData load_samples(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("no such file: " + path.string());
  return has_riff_magic(path) ? read_wav16(path) : load_text(path);
}

}  // namespace dlms

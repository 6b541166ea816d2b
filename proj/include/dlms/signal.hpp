// Data generation under the linear measurement model d_k(i) = u_{k,i} w_o + v_k(i).
#pragma once

#include <Eigen/Dense>

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace dlms {

/// One synchronous instant across the network. Row k of `u` is node k's
/// regressor; `noise` holds the additive draw so d - u*w_o == noise exactly.
template <typename Scalar>
struct SampleFrame {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> noise;

  int nodes() const { return static_cast<int>(u.rows()); }
  int order() const { return static_cast<int>(u.cols()); }
};

using Frame = SampleFrame<double>;

/// Anything that hands out frames until exhausted.
template <typename S>
concept FrameSource = requires(S s) {
  { s.next() } -> std::same_as<std::optional<Frame>>;
};

/// Length-m moving average: unit DC gain, lowpass.
Eigen::VectorXd default_lowpass_system(int m);

/// signal_power / 10^(snr_db/10). Throws std::invalid_argument unless
/// signal_power > 0. snr_db = +inf yields 0 (noiseless).
double noise_variance_for_snr(double signal_power, double snr_db);

/// Per-node regressor variances drawn uniformly from [lo, hi]. For a
/// 20-node network node 14 is pinned to 0.35.
Eigen::VectorXd default_variances(int n, double lo, double hi, std::uint64_t seed);

enum class SourceKind { white_gaussian, delay_line };

struct SourceSpec {
  SourceKind kind = SourceKind::white_gaussian;
  Eigen::VectorXd variances;  // sigma^2_{u,k}, one per node
  std::shared_ptr<const std::vector<double>> samples;  // delay_line only
  // Delay-line regressors are scaled by variance^scale_exponent; 1 is the
  // literal variance multiplier, 0.5 the standard-deviation one.
  double scale_exponent = 1.0;
};

struct NoiseSpec {
  /// Per-node SNR in dB; a single entry applies to every node.
  std::vector<double> snr_db{0.0};
  /// Fixed per-node noise variance, bypassing SNR calibration. 0 = noiseless.
  std::optional<double> variance;

  static NoiseSpec fixed(double v) { return NoiseSpec{{}, v}; }
  double snr_for(int k) const { return snr_db.size() == 1 ? snr_db.front() : snr_db.at(k); }
};

/// White Gaussian regressors with covariance sigma^2_{u,k} I, fresh each
/// instant, plus Gaussian noise calibrated per node to the requested SNR
/// (signal power sigma^2_{u,k} * |w_o|^2).
class GaussianSource {
 public:
  GaussianSource(const SourceSpec& spec, Eigen::VectorXd w_o, const NoiseSpec& noise,
                 std::uint64_t seed, int horizon);

  std::optional<Frame> next();
  const Eigen::VectorXd& noise_variances() const { return noise_var_; }

 private:
  Eigen::VectorXd sigma_u_;
  Eigen::VectorXd w_o_;
  Eigen::VectorXd noise_var_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  int horizon_;
  int emitted_ = 0;
};

/// Tapped delay line over a shared sample sequence: node k's regressor at i
/// is scale_k * [s(i), s(i-1), ..., s(i-M+1)] with zero pre-history. Noise is
/// calibrated to the empirical power of u_k(i) w_o over the whole sequence.
class DelayLineSource {
 public:
  DelayLineSource(const SourceSpec& spec, Eigen::VectorXd w_o, const NoiseSpec& noise,
                  std::uint64_t seed);

  std::optional<Frame> next();
  int length() const { return static_cast<int>(samples_->size()); }
  const Eigen::VectorXd& noise_variances() const { return noise_var_; }

 private:
  std::shared_ptr<const std::vector<double>> samples_;
  Eigen::VectorXd scale_;
  Eigen::VectorXd w_o_;
  Eigen::VectorXd noise_var_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  int emitted_ = 0;
};

/// Replays a stored frame sequence.
class FrameReplay {
 public:
  explicit FrameReplay(const std::vector<Frame>& frames) : frames_(&frames) {}
  std::optional<Frame> next() {
    if (pos_ >= frames_->size()) return std::nullopt;
    return (*frames_)[pos_++];
  }

 private:
  const std::vector<Frame>* frames_;
  std::size_t pos_ = 0;
};

/// Seeded speech stand-in: amplitude-modulated tone bursts separated by
/// pauses, over low-level AR(1) background noise. Peak magnitude is 1.
std::vector<double> synthetic_speech(int length, std::uint64_t seed);

struct SampleData {
  std::vector<double> samples;
  std::optional<int> sample_rate;  // set for WAV input
};

/// Reads 16-bit PCM mono WAV (scaled by 1/32768) or plain text with one
/// sample per line ('#' comments skipped). Throws std::runtime_error.
SampleData load_samples(const std::filesystem::path& path);

/// WAV reader behind load_samples. Rejects anything but PCM (format 1),
/// 16-bit, mono.
SampleData read_wav16(const std::filesystem::path& path);

/// 16-bit PCM mono WAV; samples are clipped to [-1, 1).
void write_wav16(const std::filesystem::path& path, const std::vector<double>& samples,
                 int sample_rate);

}  // namespace dlms

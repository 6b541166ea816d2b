#include "dlms/signal.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

using namespace dlms;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dlms_test_signal";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Minimal WAV with the given fmt fields and 16-bit payload.
std::vector<unsigned char> wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint16_t bits,
                                     const std::vector<std::int16_t>& data) {
  std::vector<unsigned char> b;
  auto put = [&](std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) b.push_back(static_cast<unsigned char>(v >> (8 * i)));
  };
  auto tag = [&](const char* s) { b.insert(b.end(), s, s + 4); };
  tag("RIFF");
  put(static_cast<std::uint32_t>(36 + 2 * data.size()), 4);
  tag("WAVE");
  tag("fmt ");
  put(16, 4);
  put(format, 2);
  put(channels, 2);
  put(8000, 4);
  put(8000u * channels * bits / 8, 4);
  put(static_cast<std::uint32_t>(channels * bits / 8), 2);
  put(bits, 2);
  tag("data");
  put(static_cast<std::uint32_t>(2 * data.size()), 4);
  for (auto s : data) put(static_cast<std::uint16_t>(s), 2);
  return b;
}

SourceSpec gaussian_spec(Eigen::VectorXd variances) {
  SourceSpec s;
  s.kind = SourceKind::white_gaussian;
  s.variances = std::move(variances);
  return s;
}

SourceSpec delay_spec(std::vector<double> samples, Eigen::VectorXd variances, double exponent = 1.0) {
  SourceSpec s;
  s.kind = SourceKind::delay_line;
  s.variances = std::move(variances);
  s.samples = std::make_shared<const std::vector<double>>(std::move(samples));
  s.scale_exponent = exponent;
  return s;
}

}  // namespace

TEST_CASE("default lowpass system") {
  CHECK(default_lowpass_system(1)(0) == 1.0);
  const Eigen::VectorXd w = default_lowpass_system(5);
  REQUIRE(w.size() == 5);
  for (double x : w) CHECK(x == 0.2);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-15));

  const std::vector<double> taps(w.data(), w.data() + 5);
  CHECK(oracle::fir_magnitude(taps, 0.0) == doctest::Approx(1.0));
  CHECK(oracle::fir_magnitude(taps, 0.8 * std::numbers::pi) < oracle::fir_magnitude(taps, 0.2 * std::numbers::pi));
  CHECK_THROWS_AS(default_lowpass_system(0), std::invalid_argument);
}

TEST_CASE("noise variance for SNR") {
  CHECK(noise_variance_for_snr(1.0, 0.0) == 1.0);
  CHECK(noise_variance_for_snr(1.0, 10.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(noise_variance_for_snr(0.35 * 0.2, 0.0) == doctest::Approx(0.07).epsilon(1e-15));
  CHECK(noise_variance_for_snr(2.0, INFINITY) == 0.0);
  CHECK_THROWS_AS(noise_variance_for_snr(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(noise_variance_for_snr(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("default variances: seeded, in range, node 14 pinned for 20 nodes") {
  const Eigen::VectorXd v = default_variances(20, 0.1, 1.0, 7);
  CHECK(v(13) == 0.35);
  for (double x : v) {
    CHECK(x >= 0.1);
    CHECK(x <= 1.0);
  }
  CHECK(v == default_variances(20, 0.1, 1.0, 7));
  CHECK_FALSE(v == default_variances(20, 0.1, 1.0, 8));
  CHECK(default_variances(5, 0.1, 1.0, 7).size() == 5);
}

TEST_CASE("gaussian source: noiseless frames satisfy the model exactly") {
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  GaussianSource src(gaussian_spec(Eigen::VectorXd::Constant(3, 0.5)), w_o, NoiseSpec::fixed(0.0), 11, 50);
  int frames = 0;
  while (auto f = src.next()) {
    ++frames;
    for (int k = 0; k < 3; ++k) CHECK(f->d(k) - f->u.row(k).dot(w_o) == 0.0);
  }
  CHECK(frames == 50);
}

TEST_CASE("gaussian source: d - u w_o equals the stored noise exactly") {
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  GaussianSource src(gaussian_spec(Eigen::Vector3d(0.2, 0.6, 1.0)), w_o, NoiseSpec{}, 3, 200);
  while (auto f = src.next())
    for (int k = 0; k < 3; ++k) CHECK(f->d(k) - f->u.row(k).dot(w_o) == f->noise(k));
}

TEST_CASE("gaussian source: sample covariance and SNR over 1e5 frames") {
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  const Eigen::Vector2d var(0.35, 0.9);
  const double snr_db = 3.0;
  NoiseSpec noise;
  noise.snr_db = {snr_db};
  GaussianSource src(gaussian_spec(var), w_o, noise, 2024, 100000);

  std::array<Eigen::MatrixXd, 2> cov{Eigen::MatrixXd::Zero(5, 5), Eigen::MatrixXd::Zero(5, 5)};
  std::array<double, 2> sig{0, 0}, nse{0, 0};
  int count = 0;
  while (auto f = src.next()) {
    ++count;
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd u = f->u.row(k).transpose();
      cov[k] += u * u.transpose();
      const double clean = u.dot(w_o);
      sig[k] += clean * clean;
      nse[k] += f->noise(k) * f->noise(k);
    }
  }
  for (int k = 0; k < 2; ++k) {
    const Eigen::MatrixXd target = var(k) * Eigen::MatrixXd::Identity(5, 5);
    const double rel = (cov[k] / count - target).norm() / target.norm();
    CHECK(rel < 0.05);
    CHECK(std::abs(10.0 * std::log10(sig[k] / nse[k]) - snr_db) < 0.2);
  }
}

TEST_CASE("gaussian source: same seed gives identical streams") {
  const Eigen::VectorXd w_o = default_lowpass_system(4);
  const auto spec = gaussian_spec(Eigen::VectorXd::Constant(4, 0.7));
  GaussianSource a(spec, w_o, NoiseSpec{}, 99, 100), b(spec, w_o, NoiseSpec{}, 99, 100), c(spec, w_o, NoiseSpec{}, 98, 100);
  bool differs = false;
  while (auto fa = a.next()) {
    auto fb = b.next();
    auto fc = c.next();
    CHECK(fa->u == fb->u);
    CHECK(fa->d == fb->d);
    differs = differs || fa->u != fc->u;
  }
  CHECK(differs);
}

TEST_CASE("gaussian source: noiseless and noisy share the regressor stream") {
  const Eigen::VectorXd w_o = default_lowpass_system(3);
  const auto spec = gaussian_spec(Eigen::VectorXd::Constant(2, 0.7));
  GaussianSource quiet(spec, w_o, NoiseSpec::fixed(0.0), 5, 20), loud(spec, w_o, NoiseSpec{}, 5, 20);
  while (auto q = quiet.next()) CHECK(q->u == loud.next()->u);
}

TEST_CASE("gaussian source rejects bad specs") {
  const Eigen::VectorXd w_o = default_lowpass_system(3);
  CHECK_THROWS_AS(GaussianSource(gaussian_spec(Eigen::Vector2d(0.5, 0.0)), w_o, NoiseSpec{}, 1, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(GaussianSource(delay_spec({1.0, 2.0, 3.0}, Eigen::Vector2d(1, 1)), w_o, NoiseSpec{}, 1, 5),
                  std::invalid_argument);
  NoiseSpec wrong;
  wrong.snr_db = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(GaussianSource(gaussian_spec(Eigen::Vector2d(0.5, 0.5)), w_o, wrong, 1, 5), std::invalid_argument);
}

TEST_CASE("delay line: constant input through the moving average gives unit output") {
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  DelayLineSource src(delay_spec(std::vector<double>(20, 1.0), Eigen::VectorXd::Ones(2)), w_o,
                      NoiseSpec::fixed(0.0), 1);
  int i = 0;
  while (auto f = src.next()) {
    if (i >= 4)
      for (int k = 0; k < 2; ++k) CHECK(f->d(k) == doctest::Approx(1.0).epsilon(1e-15));
    ++i;
  }
  CHECK(i == 20);
}

TEST_CASE("delay line: unit impulse traces out the scaled impulse response") {
  Eigen::VectorXd w_o(4);
  w_o << 0.4, 0.3, 0.2, 0.1;
  std::vector<double> s(10, 0.0);
  s[0] = 1.0;
  const Eigen::Vector2d var(0.35, 0.8);
  DelayLineSource src(delay_spec(s, var), w_o, NoiseSpec::fixed(0.0), 1);
  for (int i = 0; i < 10; ++i) {
    const auto f = src.next();
    for (int k = 0; k < 2; ++k) {
      const double expected = i < 4 ? var(k) * w_o(i) : 0.0;
      CHECK(f->d(k) == doctest::Approx(expected).epsilon(1e-15));
    }
  }
}

TEST_CASE("delay line: zero input leaves only noise") {
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  DelayLineSource src(delay_spec(std::vector<double>(30, 0.0), Eigen::VectorXd::Constant(3, 0.5)), w_o,
                      NoiseSpec::fixed(0.01), 4);
  while (auto f = src.next()) {
    CHECK(f->u.isZero(0.0));
    CHECK(f->d == f->noise);
  }
  // SNR calibration is impossible without signal power
  CHECK_THROWS_AS(DelayLineSource(delay_spec(std::vector<double>(30, 0.0), Eigen::VectorXd::Constant(3, 0.5)),
                                  w_o, NoiseSpec{}, 4),
                  std::invalid_argument);
}

TEST_CASE("delay line: shift property and scaling") {
  const auto speech = synthetic_speech(400, 3);
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  const Eigen::Vector2d var(0.35, 0.9);
  DelayLineSource lit(delay_spec(speech, var), w_o, NoiseSpec{}, 8);
  DelayLineSource std_scaled(delay_spec(speech, var, 0.5), w_o, NoiseSpec{}, 8);
  std::optional<Frame> prev;
  int i = 0;
  while (auto f = lit.next()) {
    const auto g = std_scaled.next();
    for (int k = 0; k < 2; ++k) {
      CHECK(f->u(k, 0) == var(k) * speech[i]);
      CHECK(g->u(k, 0) == doctest::Approx(std::sqrt(var(k)) * speech[i]));
      if (prev) CHECK(f->u.row(k).tail(4) == prev->u.row(k).head(4));
    }
    prev = f;
    ++i;
  }
}

TEST_CASE("delay line: SNR calibrated to the empirical signal power") {
  const auto speech = synthetic_speech(20000, 12);
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  DelayLineSource src(delay_spec(speech, Eigen::Vector2d(0.35, 1.0)), w_o, NoiseSpec{}, 2);
  double sig = 0.0, nse = 0.0;
  while (auto f = src.next()) {
    const double clean = f->d(0) - f->noise(0);
    sig += clean * clean;
    nse += f->noise(0) * f->noise(0);
  }
  CHECK(std::abs(10.0 * std::log10(sig / nse)) < 0.2);
}

TEST_CASE("delay line rejects empty or too-short sources") {
  const Eigen::VectorXd w_o = default_lowpass_system(5);
  CHECK_THROWS_AS(DelayLineSource(delay_spec({}, Eigen::VectorXd::Ones(1)), w_o, NoiseSpec{}, 1), std::invalid_argument);
  CHECK_THROWS_AS(DelayLineSource(delay_spec({1, 2, 3}, Eigen::VectorXd::Ones(1)), w_o, NoiseSpec{}, 1),
                  std::invalid_argument);
}

TEST_CASE("synthetic speech is seeded, bounded and has pauses") {
  const auto s = synthetic_speech(8000, 1);
  CHECK(s == synthetic_speech(8000, 1));
  CHECK(s != synthetic_speech(8000, 2));
  double peak = 0.0;
  for (double x : s) peak = std::max(peak, std::abs(x));
  CHECK(peak == doctest::Approx(1.0));
  // short-time energy varies by well over an order of magnitude
  double lo = 1e9, hi = 0.0;
  for (std::size_t b = 0; b + 200 <= s.size(); b += 200) {
    double e = 0.0;
    for (std::size_t i = b; i < b + 200; ++i) e += s[i] * s[i];
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  CHECK(hi > 30.0 * lo);
}

TEST_CASE("load_samples: text files") {
  const auto p = scratch("two.txt");
  std::ofstream(p) << "0.5\n-0.5\n";
  CHECK(load_samples(p).samples == std::vector<double>{0.5, -0.5});
  CHECK_FALSE(load_samples(p).sample_rate.has_value());

  const auto q = scratch("comments.txt");
  std::ofstream(q) << "# header\n1.25\n\n  # indented comment\n-3\n";
  CHECK(load_samples(q).samples == std::vector<double>{1.25, -3.0});

  const auto bad = scratch("bad.txt");
  std::ofstream(bad) << "0.5\nhello\n";
  CHECK_THROWS_AS(load_samples(bad), std::runtime_error);
  CHECK_THROWS_AS(load_samples(scratch("missing.txt")), std::runtime_error);
}

TEST_CASE("load_samples: text write-then-read round trip") {
  const auto seq = synthetic_speech(500, 77);
  const auto p = scratch("roundtrip.txt");
  {
    std::ofstream out(p);
    out.precision(17);
    for (double x : seq) out << x << '\n';
  }
  const auto back = load_samples(p).samples;
  REQUIRE(back.size() == seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) CHECK(std::abs(back[i] - seq[i]) <= 1e-9);
}

TEST_CASE("load_samples: 16-bit PCM mono WAV") {
  const auto p = scratch("mono.wav");
  write_bytes(p, wav_bytes(1, 1, 16, {16384, -32768, 0, 32767}));
  const auto data = load_samples(p);
  REQUIRE(data.samples.size() == 4);
  CHECK(data.samples[0] == 0.5);
  CHECK(data.samples[1] == -1.0);
  CHECK(data.samples[2] == 0.0);
  CHECK(data.sample_rate == 8000);
}

TEST_CASE("load_samples rejects unsupported WAV variants") {
  const auto stereo = scratch("stereo.wav");
  write_bytes(stereo, wav_bytes(1, 2, 16, {1, 2, 3, 4}));
  CHECK_THROWS_WITH_AS(load_samples(stereo), doctest::Contains("mono"), std::runtime_error);

  const auto flt = scratch("float.wav");
  write_bytes(flt, wav_bytes(3, 1, 16, {1, 2}));
  CHECK_THROWS_AS(load_samples(flt), std::runtime_error);

  const auto eight = scratch("eight.wav");
  write_bytes(eight, wav_bytes(1, 1, 8, {1, 2}));
  CHECK_THROWS_AS(load_samples(eight), std::runtime_error);

  const auto truncated = scratch("trunc.wav");
  auto bytes = wav_bytes(1, 1, 16, {1, 2, 3});
  bytes.resize(20);
  write_bytes(truncated, bytes);
  CHECK_THROWS_AS(load_samples(truncated), std::runtime_error);

  const auto notwave = scratch("notwave.wav");
  auto riff = wav_bytes(1, 1, 16, {1});
  std::copy_n("AVI ", 4, riff.begin() + 8);
  write_bytes(notwave, riff);
  CHECK_THROWS_AS(load_samples(notwave), std::runtime_error);
}

TEST_CASE("write_wav16 then load_samples recovers quantized values") {
  const auto p = scratch("written.wav");
  const std::vector<double> seq{0.0, 0.5, -0.25, 0.999, -1.0, 1.5};
  write_wav16(p, seq, 16000);
  const auto data = load_samples(p);
  CHECK(data.sample_rate == 16000);
  REQUIRE(data.samples.size() == seq.size());
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) CHECK(std::abs(data.samples[i] - seq[i]) <= 1.0 / 32768.0);
  CHECK(data.samples.back() == 32767.0 / 32768.0);  // clipped
}

#include "dlms/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace dlms {

namespace {

std::uint32_t le32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

std::uint16_t le16(const unsigned char* p) { return std::uint16_t(p[0] | p[1] << 8); }

void put32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put16(std::ostream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

SampleData read_wav16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string name = path.string();

  std::array<unsigned char, 12> riff{};
  if (!in.read(reinterpret_cast<char*>(riff.data()), riff.size()) ||
      std::memcmp(riff.data(), "RIFF", 4) != 0)
    throw std::runtime_error(name + ": malformed RIFF header");
  if (std::memcmp(riff.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error(name + ": unsupported format (RIFF but not WAVE)");

  bool have_fmt = false;
  SampleData out;
  for (;;) {
    std::array<unsigned char, 8> hdr{};
    if (!in.read(reinterpret_cast<char*>(hdr.data()), hdr.size()))
      throw std::runtime_error(name + ": missing data chunk");
    const std::uint32_t size = le32(hdr.data() + 4);
    const std::string id(reinterpret_cast<const char*>(hdr.data()), 4);

    if (id == "fmt ") {
      if (size < 16) throw std::runtime_error(name + ": malformed fmt chunk");
      std::vector<unsigned char> fmt(size);
      if (!in.read(reinterpret_cast<char*>(fmt.data()), size))
        throw std::runtime_error(name + ": truncated fmt chunk");
      const auto format = le16(fmt.data());
      const auto channels = le16(fmt.data() + 2);
      const auto bits = le16(fmt.data() + 14);
      if (format != 1) throw std::runtime_error(name + ": unsupported WAV encoding (PCM only)");
      if (channels != 1)
        throw std::runtime_error(name + ": " + std::to_string(channels) + "-channel WAV, mono required");
      if (bits != 16) throw std::runtime_error(name + ": unsupported bit depth (16-bit only)");
      out.sample_rate = static_cast<int>(le32(fmt.data() + 4));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw std::runtime_error(name + ": data chunk before fmt chunk");
      if (size % 2 != 0) throw std::runtime_error(name + ": odd data chunk size");
      std::vector<unsigned char> raw(size);
      if (!in.read(reinterpret_cast<char*>(raw.data()), size))
        throw std::runtime_error(name + ": truncated data chunk");
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = static_cast<std::int16_t>(le16(raw.data() + 2 * i)) / 32768.0;
      return out;
    } else {
      in.seekg(size + (size & 1u), std::ios::cur);
    }
  }
}

void write_wav16(const std::filesystem::path& path, const std::vector<double>& samples,
                 int sample_rate) {
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  put32(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out.write("data", 4);
  put32(out, data_bytes);
  for (double x : samples) {
    const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace dlms

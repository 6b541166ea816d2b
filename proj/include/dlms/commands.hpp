// CLI verbs behind tools/dlms_sim. Each returns a process exit code and
// writes diagnostics to `err`.
#pragma once

#include "dlms/experiment.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dlms {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitDivergence = 3,
  kExitIo = 4,
};

/// `iteration,msd_db`, iterations counted from 1.
void write_trace_csv(std::ostream& out, const MsdTrace& trace);
/// `iteration,<label>...` for every label with a trace.
void write_comparison_csv(std::ostream& out, const EnsembleResult& result);
/// `param,steady_state_db`; divergent points carry the token `divergent`.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep, const std::string& label);
/// `t,noisy,filtered,residual`, t counted from 0.
void write_denoise_csv(std::ostream& out, const DenoiseResult& result);

/// 17 significant digits; -inf for the zero-deviation sentinel.
std::string format_number(double x);

/// Comma-separated numbers; throws std::invalid_argument on empty or bad input.
std::vector<double> parse_grid(const std::string& text);

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir,
            std::optional<std::uint64_t> seed, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config, SweepParam param, const std::vector<double>& grid,
              const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed, std::ostream& err);
/// `node` is 1-based.
int cmd_denoise(const std::filesystem::path& config, int node, const std::filesystem::path& out_dir,
                std::optional<std::uint64_t> seed, std::ostream& err);
/// Parses and resolves the config, printing the resolved form to `out`.
int cmd_validate(const std::filesystem::path& config, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err);

}  // namespace dlms

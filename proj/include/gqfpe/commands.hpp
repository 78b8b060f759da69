#pragma once

#include <iosfwd>
#include <string>

#include "gqfpe/config.hpp"
#include "gqfpe/output.hpp"

namespace gqfpe {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitUnsupported = 4 };

/// Worker threads for parameter sweeps, from GQFPE_THREADS (default 1).
int thread_count();

nlohmann::ordered_json run_kernels(const RunConfig& config, OutputBundle& out);
nlohmann::ordered_json run_coeffs(const RunConfig& config, OutputBundle& out);
nlohmann::ordered_json run_figure1(const RunConfig& config, OutputBundle& out);
nlohmann::ordered_json run_propagate(const RunConfig& config, OutputBundle& out);
nlohmann::ordered_json run_oracle(const RunConfig& config, OutputBundle& out);
nlohmann::ordered_json run_compare(const RunConfig& config, OutputBundle& out);
nlohmann::ordered_json run_wigner(const RunConfig& config, OutputBundle& out);

/// Runs one command into out_dir, writes `<command>_summary.json` (or error.json) and maps
/// failures to exit codes. Messages go to `log`.
int execute(const RunConfig& config, const std::string& out_dir, std::ostream& log);

}  // namespace gqfpe

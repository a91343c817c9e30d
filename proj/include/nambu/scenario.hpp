#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace nambu {

/// Command-line overrides applied on top of a scenario file.
struct ScenarioOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::string out_dir; // prefix for relative output paths
    std::optional<std::string> task;
};

struct ScenarioResult {
    /// 0 success, 1 I/O or parse error, 2 verification residual above threshold.
    int exit_code = 0;
    std::string message;
};

/// Load a scenario file (JSON), execute its task, and write the requested
/// artifacts. Never throws: failures map onto the exit-code contract.
ScenarioResult run_scenario(const std::string& path, const ScenarioOverrides& overrides = {});

} // namespace nambu

#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>

#include "wavekit/problem_file.hpp"

namespace wavekit::cli {

using Json = nlohmann::ordered_json;

// exit codes shared by every subcommand
inline constexpr int kExitOk = 0;
inline constexpr int kExitHypothesisFailure = 2;
inline constexpr int kExitParseFailure = 3;
inline constexpr int kExitUsage = 4;
inline constexpr int kExitNumericalFailure = 5;

struct CommandResult {
    int exit_code = kExitOk;
    Json json;
    std::string text;  // human-readable summary, printed alongside the JSON
};

/// Hypothesis validation: exit 0 when everything passes, 2 otherwise.
CommandResult cmd_validate(const std::string& path,
                           const std::map<std::string, double>& param_overrides = {});

/// Threshold speed with its analytic bracket and per-interval bisections.
CommandResult cmd_threshold(const std::string& path,
                            const std::map<std::string, double>& param_overrides = {});

/// Wave construction at one speed (explicit or an offset from the
/// threshold): existence verdict, classification, profile CSV and SVG.
CommandResult cmd_wave(const std::string& path, std::optional<double> speed,
                       std::optional<double> speed_offset, const std::string& out_prefix,
                       const std::map<std::string, double>& param_overrides = {});

/// Per-interval feasibility and existence across a range of speeds,
/// distributed over worker threads (capped by WAVEKIT_THREADS).
CommandResult cmd_sweep(const std::string& path, double from, double to, int steps,
                        const std::string& out_prefix,
                        const std::map<std::string, double>& param_overrides = {});

}  // namespace wavekit::cli

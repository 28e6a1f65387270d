#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sidecomp/numeric.hpp"

namespace sidecomp::cli {

enum class Format { json, table };

struct JobConfig {
  std::string command;  // decompose | invariant | similar | rkhs | selftest
  std::string input;
  std::string input2;
  /// rkhs: where to write the truncated tuple (skipped when empty).
  std::string emit;
  NumericPolicy policy;
  Format format = Format::json;
  bool witness = false;
  /// selftest: number of planted instances.
  Index count = 100;
};

enum ExitCode : int { kOk = 0, kInputError = 2, kDegenerate = 3, kViolation = 4 };

struct JobResult {
  int exit_code = kOk;
  nlohmann::json report;  // null when the job failed before producing one
  /// Message for exit codes 2 and 3; failed check names for exit code 4.
  std::string error;
};

/// Seed precedence: explicit flag, then SIDECOMP_SEED, then the default.
/// Throws InputError when the environment value is not an unsigned integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env_value);

JobResult run_job(const JobConfig& config);

/// Serialised report, byte-identical for identical (input, seed, tolerances).
std::string render(const nlohmann::json& report, Format format);

}  // namespace sidecomp::cli

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace wavelab::runner {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitBlowup = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path manifest;
  std::string diagnostic;  // blowup or error message, empty on success
};

// Base pair described by the data section.
WavePair base_pair(const RunConfig& config);

// Lowercase hex SHA-256 of a byte string / file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Validates, runs the mode and writes its artifacts plus manifest.json into
// output_dir. Progress goes to `log`. Invalid configurations throw
// ConfigError before anything is written; a solver blowup still writes the
// artifacts and reports kExitBlowup with the diagnostic.
RunOutcome run(const RunConfig& config, std::ostream& log);

}  // namespace wavelab::runner

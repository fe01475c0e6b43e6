#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "satl/config.hpp"

namespace satl {

struct JobOutput {
  nlohmann::ordered_json results;
  std::string summary;  ///< one line, no trailing newline
};

/// Runs a validated job and writes its CSV artifacts under out_dir. Throws satl::Error.
JobOutput execute(const RunConfig& config, const std::filesystem::path& out_dir);

/// Parse, run, persist. Writes manifest.json on success and error.json on failure,
/// prints the one-line summary to `out` or the error JSON to `err`, and returns
/// the process exit code.
int dispatch(JobKind job, std::string_view config_text, const std::filesystem::path& out_dir,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

}  // namespace satl

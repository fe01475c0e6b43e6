#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "satl/spectrum.hpp"
#include "satl/sweep.hpp"
#include "satl/trajectory.hpp"

namespace satl {

inline constexpr std::string_view kToolName = "satl";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class CsvKind { Spectrum, Trajectory, Sweep, Steady, Ensemble };

/// Header row for a CSV kind. These names are an external contract.
const std::vector<std::string>& csv_header(CsvKind kind);

/// Fixed "%.12g" rendering; empty string for an absent value.
std::string format_number(double value);
std::string format_number(std::optional<double> value);

std::string spectrum_csv(const SpectrumResult& spectrum);
std::string trajectory_csv(const TrajectoryRecord& record);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string steady_csv(const StateSpace& space, const Matrix& rho);
std::string ensemble_csv(const ModelSpec& model, const EnsembleResult& ensemble);

/// Collapse events with channel names.
nlohmann::ordered_json events_json(const ModelSpec& model, const TrajectoryRecord& record);

/// {"error": {"code", "kind", "exit_code", "message"}}
nlohmann::ordered_json error_json(std::string_view code, int exit_code, std::string_view message);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Splits comma-separated text. Quoting is not part of the grammar.
CsvTable parse_csv(std::string_view text);

/// Throws ConfigError unless the header matches the kind exactly, every row has
/// the header's width, and numeric columns parse (empty allowed where optional).
void check_schema(const CsvTable& table, CsvKind kind);

/// Writes text to path, creating parent directories. Throws ConfigError on I/O failure.
void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& json);

}  // namespace satl

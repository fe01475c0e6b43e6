#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "satl/liouvillian.hpp"
#include "satl/spectrum.hpp"
#include "satl/sweep.hpp"
#include "satl/trajectory.hpp"

namespace satl {

enum class JobKind { Steady, Spectrum, Trajectory, Sweep };

std::string_view to_string(JobKind job);
/// Throws ConfigError for anything but steady | spectrum | trajectory | sweep.
JobKind parse_job(std::string_view name);

enum class FitPolicy {
  Auto,    ///< fit single-peaked spectra, report peaks otherwise
  Always,  ///< a doublet is an error
  Never,
};

struct SpectrumJob {
  std::optional<double> omega_min;  ///< both bounds or neither; neither selects the default grid
  std::optional<double> omega_max;
  int points = 2001;
  FitPolicy fit = FitPolicy::Auto;
  SolveMode mode = SolveMode::Auto;
};

struct TrajectoryJob {
  TrajectoryOptions options;
  int n_max = 6;
  int n_traj = 1;  ///< >= 100 additionally writes the ensemble average
  std::uint64_t seed = 0;
  std::uint64_t substream = 0;
};

struct SweepJob {
  std::string parameter;  ///< empty selects the scheme's pump
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  GridSpacing spacing = GridSpacing::Log;
  bool spectra = true;
  bool linewidth = true;
};

struct RunConfig {
  JobKind job = JobKind::Steady;
  Scheme scheme = Scheme::ThreeLevelIncoherent;
  RateParams params;
  int n_max_start = 4;
  TruncationOptions truncation;
  SpectrumJob spectrum;
  TrajectoryJob trajectory;
  SweepJob sweep;
};

/// Parses the sectioned key = value grammar ('#' starts a comment) for the given
/// job. Unknown keys, malformed values and missing required keys raise
/// ConfigError with the offending line number.
RunConfig parse_config(std::string_view text, JobKind job);

/// Every field, defaults included.
nlohmann::ordered_json to_json(const RunConfig& config);

/// Config text that parses back to the same RunConfig.
std::string to_config_text(const RunConfig& config);

SweepPlan make_sweep_plan(const RunConfig& config);

}  // namespace satl

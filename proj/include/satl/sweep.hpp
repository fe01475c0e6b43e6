#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satl/liouvillian.hpp"
#include "satl/spectrum.hpp"

namespace satl {

enum class GridSpacing { Linear, Log };

std::vector<double> make_sweep_grid(double start, double stop, int points, GridSpacing spacing);

struct SweepPlan {
  Scheme scheme = Scheme::ThreeLevelIncoherent;
  RateParams base;
  /// "Gamma" for the incoherent schemes, "E_pump" for the coherent one.
  std::string parameter = "Gamma";
  std::vector<double> values;
  bool spectra = true;
  bool linewidth = true;
  int start_n_max = 4;
  TruncationOptions truncation;
};

/// Throws ConfigError for a parameter the scheme does not pump with or a
/// grid that is not strictly increasing.
void validate(const SweepPlan& plan);

/// The plan's base parameters with the swept parameter set to value.
RateParams point_params(const SweepPlan& plan, double value);

struct SweepRow {
  double value = 0.0;
  int n_max = 0;
  double mean_n = 0.0;
  std::optional<double> fano;
  double beta = 0.0;
  std::optional<double> linewidth;
  std::optional<double> st_width;
  int n_peaks = 0;
  std::string status = "ok";
  std::string error;
  std::optional<SpectrumResult> spectrum;
  std::optional<LineFit> fit;
};

/// Lorentzian linewidth, refitting on zoomed grids until the width is stable.
/// Throws DoubletDetectedError when the line is not single-peaked.
LineFit measure_linewidth(const Solution& solution, const SpectrumResult& coarse);

/// One sweep point evaluated in isolation. Failures are recorded in the row.
SweepRow run_point(const SweepPlan& plan, double value);

/// One row per value, in plan order.
std::vector<SweepRow> run_sweep(const SweepPlan& plan);

/// True when y changes by less than `tolerance` (relative) over each of the last
/// two decades of x, using log-linear interpolation.
bool asymptote_pinned(std::span<const double> x, std::span<const double> y,
                      double tolerance = 0.05);

}  // namespace satl

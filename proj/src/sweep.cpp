#include "satl/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "satl/error.hpp"
#include "satl/observables.hpp"

namespace satl {

namespace {

double interpolate_log(std::span<const double> x, std::span<const double> y, double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double t = (std::log(at) - std::log(x[i - 1])) / (std::log(x[i]) - std::log(x[i - 1]));
  return y[i - 1] + t * (y[i] - y[i - 1]);
}

}  // namespace

std::vector<double> make_sweep_grid(double start, double stop, int points, GridSpacing spacing) {
  if (points < 0) throw ConfigError("sweep point count must be non-negative");
  if (points == 0) return {};
  if (points == 1) return {start};
  if (!(stop > start)) throw ConfigError("sweep stop must exceed start");
  if (spacing == GridSpacing::Log && !(start > 0.0)) {
    throw ConfigError("log sweep grid needs a positive start");
  }
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    out[i] = spacing == GridSpacing::Log
                 ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                 : start + t * (stop - start);
  }
  out.front() = start;
  out.back() = stop;
  return out;
}

void validate(const SweepPlan& plan) {
  const std::string expected = plan.scheme == Scheme::FourLevelCoherent ? "E_pump" : "Gamma";
  if (plan.parameter != expected) {
    throw ConfigError("scheme " + std::string(to_string(plan.scheme)) + " sweeps '" + expected +
                      "', not '" + plan.parameter + "'");
  }
  for (std::size_t i = 1; i < plan.values.size(); ++i) {
    if (!(plan.values[i] > plan.values[i - 1])) {
      throw ConfigError("swept values must be strictly increasing");
    }
  }
}

RateParams point_params(const SweepPlan& plan, double value) {
  RateParams p = plan.base;
  if (plan.parameter == "E_pump") {
    p.E_pump = value;
  } else {
    p.Gamma = value;
  }
  return p;
}

LineFit measure_linewidth(const Solution& solution, const SpectrumResult& coarse) {
  const std::vector<Peak> peaks = classify_peaks(coarse);
  if (peaks.size() != 1) {
    throw DoubletDetectedError("linewidth is undefined for a multi-peaked spectrum",
                               static_cast<int>(peaks.size()));
  }
  double center = peaks.front().omega;
  double width = std::max(half_max_width(coarse.grid, coarse.s), 2.0 * coarse.grid.spacing());

  SpectrumOptions options;
  options.check_reality = false;
  LineFit fit;
  constexpr int kMaxRounds = 8;
  for (int round = 0; round < kMaxRounds; ++round) {
    const FrequencyGrid grid =
        FrequencyGrid::uniform(center - 12.5 * width, center + 12.5 * width, 1001);
    const SpectrumResult zoom =
        regression_spectrum(solution.steady, solution.generator, grid, options);
    const double hm = half_max_width(zoom.grid, zoom.s);
    if (!(hm > 0.0) || hm > 2.5 * width) {
      // the line is wider than the window; widen and retry
      width = std::max(hm, 4.0 * width);
      continue;
    }
    fit = fit_lorentzian(zoom);
    const bool stable = std::abs(fit.fwhm - width) < 0.02 * width;
    width = fit.fwhm;
    center = fit.center;
    if (stable) return fit;
  }
  if (!(fit.fwhm > 0.0)) throw FitError("linewidth refinement did not settle", "fit-refinement");
  return fit;
}

SweepRow run_point(const SweepPlan& plan, double value) {
  SweepRow row;
  row.value = value;
  try {
    const RateParams params = point_params(plan, value);
    row.beta = beta(plan.scheme, params);
    const Solution solution = solve_with_adaptive_truncation(
        [&](int n_max) { return build_model(plan.scheme, params, n_max); }, plan.start_n_max,
        plan.truncation);
    const PhotonStats stats = photon_stats(solution);
    row.n_max = solution.steady.n_max;
    row.mean_n = stats.mean_n;
    row.fano = stats.fano;

    if (plan.spectra || plan.linewidth) {
      SpectrumResult spec = regression_spectrum(solution.steady, solution.generator);
      row.n_peaks = static_cast<int>(classify_peaks(spec).size());
      if (plan.linewidth) {
        if (row.n_peaks == 1) {
          try {
            row.fit = measure_linewidth(solution, spec);
            row.linewidth = row.fit->fwhm;
            row.st_width = schawlow_townes(params.kappa, stats.mean_n);
          } catch (const DoubletDetectedError& e) {
            row.n_peaks = e.n_peaks();
            row.status = "doublet";
          } catch (const FitError& e) {
            row.status = "fit-error";
            row.error = e.what();
          }
        } else {
          row.status = row.n_peaks > 1 ? "doublet" : "no-peak";
        }
      }
      if (plan.spectra) row.spectrum = std::move(spec);
    }
  } catch (const Error& e) {
    row.status = e.code();
    row.error = e.what();
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
  validate(plan);
  std::vector<SweepRow> rows(plan.values.size());
  const long n = static_cast<long>(plan.values.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) rows[i] = run_point(plan, plan.values[i]);
  return rows;
}

bool asymptote_pinned(std::span<const double> x, std::span<const double> y, double tolerance) {
  if (x.size() != y.size() || x.size() < 2) return false;
  const double end = x.back();
  if (!(end / 100.0 >= x.front())) return false;
  const double y2 = interpolate_log(x, y, end);
  const double y1 = interpolate_log(x, y, end / 10.0);
  const double y0 = interpolate_log(x, y, end / 100.0);
  auto change = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
  return change(y1, y2) < tolerance && change(y0, y1) < tolerance;
}

}  // namespace satl

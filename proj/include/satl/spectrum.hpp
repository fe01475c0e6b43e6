#pragma once

#include <string>
#include <vector>

#include "satl/liouvillian.hpp"

namespace satl {

/// Uniform, strictly increasing frequency grid in units of gamma.
class FrequencyGrid {
 public:
  FrequencyGrid() = default;
  explicit FrequencyGrid(std::vector<double> omega);

  static FrequencyGrid uniform(double lo, double hi, int count);

  const std::vector<double>& omega() const noexcept { return omega_; }
  std::size_t size() const noexcept { return omega_.size(); }
  double spacing() const;
  double front() const { return omega_.front(); }
  double back() const { return omega_.back(); }

 private:
  std::vector<double> omega_;
};

/// 2001 points on +-5 max(g, kappa, gamma).
FrequencyGrid default_grid(const RateParams& params);

enum class SolveMode {
  Auto,     ///< Reduced for incoherent schemes, Full otherwise
  Full,     ///< generator blocks reachable from the seed operator
  Reduced,  ///< one-photon-coherence index family (incoherent schemes only)
  Dense,    ///< every element of the vectorized space, no block pruning
};

struct SpectrumOptions {
  SolveMode mode = SolveMode::Auto;
  /// Compare against the reversed-ordering correlation and require a real two-sided transform.
  bool check_reality = true;
  double reality_tolerance = 1e-8;
};

struct SpectrumResult {
  FrequencyGrid grid;
  std::vector<double> s;    ///< normalized, clamped at zero
  std::vector<double> raw;  ///< unnormalized 2 Re of the one-sided transform
  double integral = 0.0;    ///< trapezoid integral of raw
  bool normalized = false;
  double min_before_clamp = 0.0;  ///< most negative normalized value prior to clamping
  double imag_ratio = 0.0;
  int widenings = 0;
  std::vector<std::string> warnings;
};

/// S(omega) = 2 Re int_0^inf e^{i omega tau} tr(a e^{L tau}[A0]) d tau evaluated as
/// -2 Re tr(a (L + i omega)^{-1} A0) for every grid point. Returns the raw values.
std::vector<double> correlation_spectrum(const Generator& gen, const Matrix& seed,
                                         const FrequencyGrid& grid, SolveMode mode,
                                         std::vector<std::string>* warnings = nullptr);

/// Normalized output spectrum from the quantum regression theorem with A(0) = rho_ss a^dagger.
SpectrumResult regression_spectrum(const SteadyState& ss, const Generator& gen,
                                   const FrequencyGrid& grid, const SpectrumOptions& options = {});

/// Same on the default grid, doubling its span while more than 0.5% of the
/// weight sits in the outer 5% of each half-range.
SpectrumResult regression_spectrum(const SteadyState& ss, const Generator& gen,
                                   const SpectrumOptions& options = {});

/// Generator restricted to the index family holding rho_ss a^dagger.
struct ReducedGenerator {
  std::vector<int> indices;  ///< positions in the full vectorized space
  Matrix matrix;
};

/// Elements (r, c) whose conserved excitation charges differ by `offset`.
/// Throws UnsupportedSchemeError for the coherent scheme.
ReducedGenerator sector_reduced_generator(const Generator& gen, int offset = 1);
ReducedGenerator sector_reduced_generator(const ModelSpec& model, int offset = 1);

struct Peak {
  double omega;
  double height;
  double prominence;
};

/// Local maxima whose topographic prominence is at least rel_prominence * global max.
std::vector<Peak> classify_peaks(const SpectrumResult& spec, double rel_prominence = 0.02);

struct LineFit {
  double center = 0.0;
  double fwhm = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  ///< rms residual over the grid, relative to peak height
  std::vector<Peak> peaks;
};

/// Least-squares Lorentzian A (w/2)^2 / ((omega - omega0)^2 + (w/2)^2).
LineFit fit_lorentzian(const SpectrumResult& spec);

/// Full width at half maximum from linear interpolation of the half-max crossings
/// around the highest point. Returns 0 if a crossing is missing.
double half_max_width(const FrequencyGrid& grid, const std::vector<double>& s);

double schawlow_townes(double kappa, double mean_n);

/// Trapezoid rule on a grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace satl

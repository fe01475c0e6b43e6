#include "satl/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/NonLinearOptimization>

#include "satl/error.hpp"

namespace satl {

namespace {

constexpr Complex kI{0.0, 1.0};

using Charge = std::array<int, 2>;

// Excitation charges conserved by the resonant incoherent schemes. Every
// Lindblad term maps an element (r, c) to elements with the same charge difference.
std::vector<Charge> conserved_charges(const ModelSpec& model) {
  const StateSpace& space = model.space;
  std::vector<Charge> q(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const BasisLabel l = space.label(i);
    switch (model.scheme) {
      case Scheme::ThreeLevelIncoherent:
        q[i] = {l.photons + (l.level == 2 ? 1 : 0), 0};
        break;
      case Scheme::FourLevelIncoherent:
        q[i] = {l.photons + (l.level == 3 ? 1 : 0), l.level == 1 ? 1 : 0};
        break;
      case Scheme::FourLevelCoherent:
        throw UnsupportedSchemeError(
            "no reduced one-photon-coherence family is derived for the coherent scheme");
    }
  }
  return q;
}

std::vector<int> family_indices(const ModelSpec& model, int offset) {
  const std::vector<Charge> q = conserved_charges(model);
  const int d = model.space.dim();
  std::vector<int> out;
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      if (q[r][0] - q[c][0] == offset && q[r][1] == q[c][1]) out.push_back(r + c * d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> support_of(const Vector& v) {
  std::vector<int> out;
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] != Complex(0.0)) out.push_back(i);
  }
  return out;
}

std::vector<int> solve_indices(const Generator& gen, const Vector& seed, SolveMode mode) {
  const std::vector<int> seeds = support_of(seed);
  const bool incoherent = gen.model.scheme != Scheme::FourLevelCoherent;
  if (mode == SolveMode::Auto) mode = incoherent ? SolveMode::Reduced : SolveMode::Full;

  switch (mode) {
    case SolveMode::Dense: {
      std::vector<int> all(seed.size());
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    case SolveMode::Full:
      return invariant_support(connected_blocks(gen.matrix), seeds);
    case SolveMode::Reduced: {
      const std::vector<Charge> q = conserved_charges(gen.model);
      const int d = gen.dim();
      const int first = seeds.front();
      const int offset = q[first % d][0] - q[first / d][0];
      std::vector<int> family = family_indices(gen.model, offset);
      for (int s : seeds) {
        if (!std::binary_search(family.begin(), family.end(), s)) {
          throw NumericalError("seed operator is not confined to one charge sector",
                               "sector-mismatch");
        }
      }
      return family;
    }
    case SolveMode::Auto:
      break;
  }
  return {};
}

// -W . (L + i omega)^{-1} seed for each omega, with W . X = tr(weight X).
// L is reduced once to Hessenberg form; each frequency is then an O(m^2) solve.
class Resolvent {
 public:
  Resolvent(const Generator& gen, const Matrix& seed, const Matrix& weight, SolveMode mode) {
    const Vector b = stack(seed);
    if (support_of(b).empty()) return;
    indices_ = solve_indices(gen, b, mode);
    const int d = gen.dim();
    const int m = static_cast<int>(indices_.size());

    Vector b_sub(m), w_sub(m);
    for (int i = 0; i < m; ++i) {
      const int r = indices_[i] % d;
      const int c = indices_[i] / d;
      b_sub[i] = b[indices_[i]];
      w_sub[i] = weight(c, r);
    }
    Eigen::HessenbergDecomposition<Matrix> hd(submatrix(gen.matrix, indices_));
    hessenberg_ = hd.matrixH();
    const Matrix q = hd.matrixQ();
    rhs_ = q.adjoint() * b_sub;
    weight_ = q.transpose() * w_sub;
    scale_ = hessenberg_.cwiseAbs().maxCoeff();
  }

  bool empty() const { return indices_.empty(); }

  /// Returns false when the shifted matrix is numerically singular.
  bool evaluate(double omega, Matrix& work, Vector& y, Complex& out) const {
    const int m = static_cast<int>(hessenberg_.rows());
    work = hessenberg_;
    work.diagonal().array() += kI * omega;
    y = rhs_;
    const double tiny = 1e-14 * std::max(scale_, std::abs(omega));
    for (int k = 0; k + 1 < m; ++k) {
      if (std::abs(work(k + 1, k)) > std::abs(work(k, k))) {
        for (int j = k; j < m; ++j) std::swap(work(k, j), work(k + 1, j));
        std::swap(y[k], y[k + 1]);
      }
      if (std::abs(work(k, k)) <= tiny) return false;
      const Complex f = work(k + 1, k) / work(k, k);
      if (f != Complex(0.0)) {
        for (int j = k + 1; j < m; ++j) work(k + 1, j) -= f * work(k, j);
        y[k + 1] -= f * y[k];
      }
      work(k + 1, k) = 0.0;
    }
    if (std::abs(work(m - 1, m - 1)) <= tiny) return false;
    for (int i = m - 1; i >= 0; --i) {
      Complex acc = y[i];
      for (int j = i + 1; j < m; ++j) acc -= work(i, j) * y[j];
      y[i] = acc / work(i, i);
    }
    out = -(weight_.transpose() * y)(0);
    return true;
  }

 private:
  std::vector<int> indices_;
  Matrix hessenberg_;
  Vector rhs_;
  Vector weight_;
  double scale_ = 0.0;
};

std::vector<Complex> one_sided_transform(const Generator& gen, const Matrix& seed,
                                         const Matrix& weight, const std::vector<double>& omega,
                                         double spacing, SolveMode mode,
                                         std::vector<std::string>* warnings) {
  std::vector<Complex> out(omega.size(), Complex(0.0));
  const Resolvent resolvent(gen, seed, weight, mode);
  if (resolvent.empty()) return out;

  std::vector<char> perturbed(omega.size(), 0);
  std::vector<char> failed(omega.size(), 0);
  const long n = static_cast<long>(omega.size());
#pragma omp parallel
  {
    Matrix work;
    Vector y;
#pragma omp for schedule(static)
    for (long i = 0; i < n; ++i) {
      if (!resolvent.evaluate(omega[i], work, y, out[i])) {
        perturbed[i] = 1;
        if (!resolvent.evaluate(omega[i] + 1e-9 * spacing, work, y, out[i])) failed[i] = 1;
      }
    }
  }
  for (long i = 0; i < n; ++i) {
    if (failed[i]) {
      throw NumericalError("resolvent is singular at omega = " + std::to_string(omega[i]),
                           "singular-resolvent");
    }
    if (perturbed[i] && warnings) {
      warnings->push_back("singular resolvent at omega = " + std::to_string(omega[i]) +
                          "; shifted by 1e-9 grid spacings");
    }
  }
  return out;
}

double outer_weight_fraction(const FrequencyGrid& grid, const std::vector<double>& raw,
                             double total) {
  const double lo = grid.front();
  const double hi = grid.back();
  const double mid = 0.5 * (lo + hi);
  const double cut = 0.95 * 0.5 * (hi - lo);
  const auto& w = grid.omega();
  double outer = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (std::abs(w[i] - mid) >= cut && std::abs(w[i + 1] - mid) >= cut) {
      outer += 0.5 * (raw[i] + raw[i + 1]) * (w[i + 1] - w[i]);
    }
  }
  return outer / total;
}

struct LorentzianFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>* omega;
  const std::vector<double>* s;

  int inputs() const { return 3; }
  int values() const { return static_cast<int>(omega->size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    const double h = 0.5 * x[2];
    for (int i = 0; i < values(); ++i) {
      const double dw = (*omega)[i] - x[1];
      f[i] = x[0] * h * h / (dw * dw + h * h) - (*s)[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    const double h = 0.5 * x[2];
    for (int i = 0; i < values(); ++i) {
      const double dw = (*omega)[i] - x[1];
      const double den = dw * dw + h * h;
      jac(i, 0) = h * h / den;
      jac(i, 1) = x[0] * h * h * 2.0 * dw / (den * den);
      jac(i, 2) = x[0] * (h / den - h * h * h / (den * den));
    }
    return 0;
  }
};

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<double> omega) : omega_(std::move(omega)) {
  if (omega_.size() < 2) throw ConfigError("frequency grid needs at least two points");
  for (std::size_t i = 1; i < omega_.size(); ++i) {
    if (!(omega_[i] > omega_[i - 1])) {
      throw ConfigError("frequency grid must be strictly increasing");
    }
  }
}

FrequencyGrid FrequencyGrid::uniform(double lo, double hi, int count) {
  if (count < 2 || !(hi > lo)) throw ConfigError("invalid uniform frequency grid");
  std::vector<double> w(count);
  for (int i = 0; i < count; ++i) w[i] = lo + (hi - lo) * i / (count - 1);
  return FrequencyGrid(std::move(w));
}

double FrequencyGrid::spacing() const {
  return (omega_.back() - omega_.front()) / static_cast<double>(omega_.size() - 1);
}

FrequencyGrid default_grid(const RateParams& p) {
  const double scale = std::max({std::abs(p.g), p.kappa, p.gamma});
  const double half = 5.0 * (scale > 0.0 ? scale : 1.0);
  return FrequencyGrid::uniform(-half, half, 2001);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    total += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  }
  return total;
}

std::vector<double> correlation_spectrum(const Generator& gen, const Matrix& seed,
                                         const FrequencyGrid& grid, SolveMode mode,
                                         std::vector<std::string>* warnings) {
  const Matrix a = annihilation(gen.model.space).matrix;
  const std::vector<Complex> g =
      one_sided_transform(gen, seed, a, grid.omega(), grid.spacing(), mode, warnings);
  std::vector<double> raw(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) raw[i] = 2.0 * g[i].real();
  return raw;
}

SpectrumResult regression_spectrum(const SteadyState& ss, const Generator& gen,
                                   const FrequencyGrid& grid, const SpectrumOptions& options) {
  if (ss.rho.rows() != gen.dim()) {
    throw ConfigError("steady state does not belong to this generator");
  }
  const Matrix a = annihilation(gen.model.space).matrix;
  const Matrix seed = ss.rho * a.adjoint();

  SpectrumResult out;
  out.grid = grid;
  const std::vector<Complex> forward = one_sided_transform(
      gen, seed, a, grid.omega(), grid.spacing(), options.mode, &out.warnings);
  out.raw.resize(forward.size());
  for (std::size_t i = 0; i < forward.size(); ++i) out.raw[i] = 2.0 * forward[i].real();

  out.integral = trapezoid(grid.omega(), out.raw);
  const double peak = *std::max_element(out.raw.begin(), out.raw.end());
  if (!(out.integral > 1e-300) || !(peak > 0.0)) {
    throw ZeroSignalError("field correlation vanishes; the spectrum cannot be normalized");
  }

  if (options.check_reality) {
    // int_0^inf e^{-i w t} <a^dagger(t) a(0)> dt must equal the conjugate of the forward
    // transform, making the two-sided transform real.
    std::vector<double> negated(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) negated[i] = -grid.omega()[i];
    const std::vector<Complex> backward = one_sided_transform(
        gen, a * ss.rho, a.adjoint(), negated, grid.spacing(), options.mode, &out.warnings);
    double imag = 0.0, real = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Complex two_sided = forward[i] + backward[i];
      imag += std::abs(two_sided.imag());
      real += std::abs(two_sided.real());
    }
    out.imag_ratio = real > 0.0 ? imag / real : 0.0;
    if (!(out.imag_ratio < options.reality_tolerance)) {
      throw NumericalError("two-sided spectrum has imaginary weight ratio " +
                               std::to_string(out.imag_ratio),
                           "spectrum-reality");
    }
  }

  out.s.resize(out.raw.size());
  out.min_before_clamp = 0.0;
  for (std::size_t i = 0; i < out.raw.size(); ++i) {
    const double v = out.raw[i] / out.integral;
    out.min_before_clamp = std::min(out.min_before_clamp, v);
    out.s[i] = std::max(v, 0.0);
  }
  if (out.min_before_clamp < -1e-9) {
    out.warnings.push_back("normalized spectrum dipped to " +
                           std::to_string(out.min_before_clamp) + " before clamping");
  }
  out.normalized = true;
  return out;
}

SpectrumResult regression_spectrum(const SteadyState& ss, const Generator& gen,
                                   const SpectrumOptions& options) {
  FrequencyGrid grid = default_grid(gen.model.params);
  constexpr int kMaxWidenings = 8;
  for (int widenings = 0;; ++widenings) {
    SpectrumResult out = regression_spectrum(ss, gen, grid, options);
    out.widenings = widenings;
    if (widenings == kMaxWidenings ||
        outer_weight_fraction(out.grid, out.raw, out.integral) <= 0.005) {
      return out;
    }
    grid = FrequencyGrid::uniform(2.0 * grid.front(), 2.0 * grid.back(),
                                  static_cast<int>(grid.size()));
  }
}

ReducedGenerator sector_reduced_generator(const Generator& gen, int offset) {
  ReducedGenerator out;
  out.indices = family_indices(gen.model, offset);
  out.matrix = submatrix(gen.matrix, out.indices);
  return out;
}

ReducedGenerator sector_reduced_generator(const ModelSpec& model, int offset) {
  // check support before paying for the generator
  conserved_charges(model);
  return sector_reduced_generator(build_generator(model), offset);
}

std::vector<Peak> classify_peaks(const SpectrumResult& spec, double rel_prominence) {
  const std::vector<double>& s = spec.s;
  const std::vector<double>& w = spec.grid.omega();
  const std::size_t n = s.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;
  const double global = *std::max_element(s.begin(), s.end());
  if (!(global > 0.0)) return peaks;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(s[i] > s[i - 1])) continue;
    // walk across a flat top
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] == s[i]) ++j;
    if (j + 1 >= n || !(s[j + 1] < s[i])) continue;

    double left_min = s[i];
    for (std::size_t k = i; k-- > 0;) {
      if (s[k] > s[i]) break;
      left_min = std::min(left_min, s[k]);
    }
    double right_min = s[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (s[k] > s[i]) break;
      right_min = std::min(right_min, s[k]);
    }
    const double prominence = s[i] - std::max(left_min, right_min);
    if (prominence >= rel_prominence * global) {
      peaks.push_back({0.5 * (w[i] + w[j]), s[i], prominence});
    }
    i = j;
  }
  return peaks;
}

double half_max_width(const FrequencyGrid& grid, const std::vector<double>& s) {
  const auto& w = grid.omega();
  const std::size_t p =
      static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  const double half = 0.5 * s[p];
  std::size_t l = p;
  while (l > 0 && s[l] >= half) --l;
  std::size_t r = p;
  while (r + 1 < s.size() && s[r] >= half) ++r;
  if (s[l] >= half || s[r] >= half) return 0.0;
  const double left = w[l] + (half - s[l]) * (w[l + 1] - w[l]) / (s[l + 1] - s[l]);
  const double right = w[r - 1] + (half - s[r - 1]) * (w[r] - w[r - 1]) / (s[r] - s[r - 1]);
  return right - left;
}

LineFit fit_lorentzian(const SpectrumResult& spec) {
  LineFit fit;
  fit.peaks = classify_peaks(spec);
  if (fit.peaks.size() > 1) {
    throw DoubletDetectedError("spectrum has " + std::to_string(fit.peaks.size()) +
                                   " peaks; a single Lorentzian linewidth is undefined",
                               static_cast<int>(fit.peaks.size()));
  }
  if (fit.peaks.empty()) throw FitError("spectrum has no peak to fit", "no-peak");

  double width = half_max_width(spec.grid, spec.s);
  if (!(width > 0.0)) width = 4.0 * spec.grid.spacing();

  LorentzianFunctor functor{{}, {}};
  functor.omega = &spec.grid.omega();
  functor.s = &spec.s;
  Eigen::VectorXd x(3);
  x << fit.peaks.front().height, fit.peaks.front().omega, width;

  Eigen::LevenbergMarquardt<LorentzianFunctor> lm(functor);
  lm.parameters.maxfev = 2000;
  lm.parameters.ftol = 1e-14;
  lm.parameters.xtol = 1e-14;
  const auto status = lm.minimize(x);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  if (status == Status::ImproperInputParameters || status == Status::TooManyFunctionEvaluation ||
      !std::isfinite(x[2]) || x[2] == 0.0 || !(x[0] > 0.0)) {
    throw FitError("Lorentzian fit did not converge (status " + std::to_string(int(status)) +
                       ", width " + std::to_string(x[2]) + ")",
                   "fit-nonconvergence");
  }

  fit.amplitude = x[0];
  fit.center = x[1];
  fit.fwhm = std::abs(x[2]);
  Eigen::VectorXd f(functor.values());
  functor(x, f);
  fit.residual = std::sqrt(f.squaredNorm() / f.size()) / fit.amplitude;
  if (spec.grid.back() - spec.grid.front() < 10.0 * fit.fwhm) {
    throw FitError("frequency grid spans less than ten linewidths", "grid-too-narrow");
  }
  return fit;
}

double schawlow_townes(double kappa, double mean_n) {
  if (!(mean_n > 0.0)) throw DomainError("Schawlow-Townes width needs a positive photon number");
  return kappa / (2.0 * mean_n);
}

}  // namespace satl

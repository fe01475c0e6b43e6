#include "satl/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Eigenvalues>

#include "satl/error.hpp"

namespace satl {

namespace {

void require_gamma(const RateParams& p) {
  if (!(p.gamma > 0.0)) throw DomainError("beta requires gamma > 0");
  if (p.kappa < 0.0 || p.Gamma < 0.0 || p.gamma_f < 0.0) {
    throw DomainError("beta requires non-negative rates");
  }
}

double beta_from_cavity_rate(double cavity_rate, double gamma) {
  return cavity_rate / (cavity_rate + 0.5 * gamma);
}

}  // namespace

PhotonStats photon_stats(const StateSpace& space, const Matrix& rho) {
  PhotonStats out;
  out.populations = Eigen::MatrixXd::Zero(space.n_levels(), space.photon_states());
  for (int i = 0; i < space.dim(); ++i) {
    const BasisLabel l = space.label(i);
    const double p = rho(i, i).real();
    out.populations(l.level - 1, l.photons) = p;
    out.mean_n += l.photons * p;
    out.second_moment += static_cast<double>(l.photons) * l.photons * p;
  }
  if (out.mean_n >= 1e-12) {
    out.fano = (out.second_moment - out.mean_n * out.mean_n) / out.mean_n;
  }
  return out;
}

PhotonStats photon_stats(const Solution& solution) {
  return photon_stats(solution.generator.model.space, solution.steady.rho);
}

double beta_three_level(const RateParams& p) {
  require_gamma(p);
  const double cavity = 2.0 * p.g * p.g / (p.gamma + p.Gamma + 2.0 * p.kappa);
  return beta_from_cavity_rate(cavity, p.gamma);
}

double beta_four_level(const RateParams& p) {
  require_gamma(p);
  const double denom = p.gamma_f + 2.0 * p.kappa;
  if (!(denom > 0.0)) {
    throw DomainError("four-level beta requires gamma_f + 2 kappa > 0");
  }
  return beta_from_cavity_rate(2.0 * p.g * p.g / denom, p.gamma);
}

double beta(Scheme scheme, const RateParams& params) {
  return scheme == Scheme::ThreeLevelIncoherent ? beta_three_level(params)
                                                : beta_four_level(params);
}

double level_population(const StateSpace& space, const Matrix& rho, int level) {
  double total = 0.0;
  for (int n = 0; n <= space.n_max(); ++n) {
    const int i = space.index(level, n);
    total += rho(i, i).real();
  }
  return total;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  const Matrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (diff + diff.adjoint()),
                                            Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

double verify_adiabatic_reduction(const RateParams& p, int n, double t_final) {
  if (n < 0) throw PreconditionError("photon number must be non-negative");
  if (!(t_final > 0.0)) throw PreconditionError("integration time must be positive");
  const double fastest_other = std::max({p.gamma, std::abs(p.g), p.kappa, p.Gamma});
  if (!(p.gamma_f >= 50.0 * fastest_other)) {
    throw PreconditionError("adiabatic reduction requires gamma_f >= 50 max(gamma, g, kappa, "
                            "Gamma); gamma_f = " +
                            std::to_string(p.gamma_f));
  }

  const double np1 = n + 1.0;
  const double coupling = p.g * std::sqrt(np1);
  const double damp_ground = 0.5 * p.Gamma + n * p.kappa;
  const double damp_lower = 0.5 * p.gamma_f + np1 * p.kappa;
  const double damp_upper = 0.5 * p.gamma + n * p.kappa;
  const double eliminated = p.g * p.g * np1 / (p.kappa * np1 + 0.5 * p.gamma_f);

  // state: C_{1,n}, C_{2,n+1}, C_{3,n}, reduced C_{3,n}
  using State = std::array<double, 4>;
  auto rhs = [&](const State& c, State& dc, double /*t*/) {
    dc[0] = -damp_ground * c[0];
    dc[1] = -damp_lower * c[1] + coupling * c[2];
    dc[2] = -damp_upper * c[2] - coupling * c[1];
    dc[3] = -damp_upper * c[3] - eliminated * c[3];
  };

  namespace odeint = boost::numeric::odeint;
  State c{0.0, 0.0, 1.0, 1.0};
  constexpr int kSamples = 4000;
  std::vector<double> times(kSamples + 1);
  for (int k = 0; k <= kSamples; ++k) times[k] = t_final * k / kSamples;
  double deviation = 0.0;
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, c, times.begin(), times.end(), t_final / kSamples,
                          [&](const State& s, double) {
                            deviation = std::max(deviation, std::abs(s[2] - s[3]));
                          });
  return deviation;
}

}  // namespace satl

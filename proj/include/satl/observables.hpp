#pragma once

#include <optional>

#include "satl/liouvillian.hpp"

namespace satl {

struct PhotonStats {
  double mean_n = 0.0;
  double second_moment = 0.0;
  /// Variance over mean; empty when mean_n < 1e-12.
  std::optional<double> fano;
  /// populations(level - 1, n)
  Eigen::MatrixXd populations;
};

PhotonStats photon_stats(const StateSpace& space, const Matrix& rho);
PhotonStats photon_stats(const Solution& solution);

/// Spontaneous-emission fraction into the cavity mode, three-level scheme.
double beta_three_level(const RateParams& params);

/// Spontaneous-emission fraction for the four-level schemes (fast lower-level decay).
double beta_four_level(const RateParams& params);

double beta(Scheme scheme, const RateParams& params);

/// Population of an atomic level summed over photon number.
double level_population(const StateSpace& space, const Matrix& rho, int level);

/// (1/2) sum |eig(a - b)| for Hermitian a, b.
double trace_distance(const Matrix& a, const Matrix& b);

/// Integrates the three coupled amplitude equations for photon number n
/// (C_{1,n}, C_{2,n+1}, C_{3,n}) alongside the reduced equation obtained by
/// eliminating C_{2,n+1}, starting from C_{3,n} = 1, and returns the largest
/// deviation of C_{3,n}(t) between the two over 0 <= t <= t_final.
/// Requires gamma_f >= 50 max(gamma, g, kappa, Gamma).
double verify_adiabatic_reduction(const RateParams& params, int n, double t_final = 10.0);

}  // namespace satl

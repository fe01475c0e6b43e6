#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "satl/hilbert.hpp"

namespace satl {

enum class Scheme { ThreeLevelIncoherent, FourLevelIncoherent, FourLevelCoherent };

/// "three-incoherent" | "four-incoherent" | "four-coherent"
std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// Number of atomic levels kept in the basis for a scheme.
int atomic_levels(Scheme scheme);

/// Rates and couplings, all in units of the lasing-transition rate gamma.
struct RateParams {
  double g = 0.0;        ///< atom-field coupling
  double kappa = 0.0;    ///< cavity field decay (energy decays at 2 kappa)
  double gamma = 1.0;    ///< spontaneous decay on the lasing transition
  double Gamma = 0.0;    ///< incoherent pump
  double gamma_f = 0.0;  ///< decay out of the lower lasing level
  double gamma_4 = 0.0;  ///< decay out of the upper pump level (coherent scheme)
  double E_pump = 0.0;   ///< coherent pump amplitude
};

/// Throws ConfigError for negative rates or nonzero fields the scheme does not use.
void validate(const RateParams& params, Scheme scheme);

/// A dissipation channel rate * (F rho F^dagger - {F^dagger F, rho} / 2).
/// The trajectory collapse operator is sqrt(rate) * F.
struct Collapse {
  std::string name;
  OperatorMatrix op;
  double rate;
};

struct LasingTransition {
  int upper;
  int lower;
};

struct ModelSpec {
  Scheme scheme;
  RateParams params;
  StateSpace space;
  OperatorMatrix hamiltonian;
  std::vector<Collapse> collapses;
  LasingTransition lasing;
};

/// Two-level gain atom (1 = lower, 2 = upper) with incoherent pump 1 -> 2.
ModelSpec three_level_incoherent(const RateParams& params, int n_max);

/// Levels 1 (ground), 2 (lower lasing), 3 (upper lasing); pump 1 -> 3.
ModelSpec four_level_incoherent(const RateParams& params, int n_max);

/// Levels 1..4 with a coherent drive 1 <-> 4 and decay 4 -> 3.
ModelSpec four_level_coherent(const RateParams& params, int n_max);

ModelSpec build_model(Scheme scheme, const RateParams& params, int n_max);

}  // namespace satl

#include "satl/models.hpp"

#include <cmath>
#include <string>

#include "satl/error.hpp"

namespace satl {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_truncation(int n_max) {
  if (n_max < 1) {
    throw ConfigError("photon truncation n_max must be at least 1, got " +
                      std::to_string(n_max));
  }
}

Matrix adjoint(const OperatorMatrix& op) { return op.matrix.adjoint(); }

// i g (a^dagger sigma_{upper,lower} - a sigma_{lower,upper})
Matrix jaynes_cummings(const StateSpace& space, double g, int upper, int lower) {
  const Matrix a = annihilation(space).matrix;
  const Matrix down = atomic_transition(space, upper, lower).matrix;
  const Matrix up = atomic_transition(space, lower, upper).matrix;
  return kI * g * (a.adjoint() * down - a * up);
}

Collapse channel(std::string name, OperatorMatrix op, double rate) {
  op.tag = OperatorTag::Collapse;
  return {std::move(name), std::move(op), rate};
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::ThreeLevelIncoherent:
      return "three-incoherent";
    case Scheme::FourLevelIncoherent:
      return "four-incoherent";
    case Scheme::FourLevelCoherent:
      return "four-coherent";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "three-incoherent") return Scheme::ThreeLevelIncoherent;
  if (name == "four-incoherent") return Scheme::FourLevelIncoherent;
  if (name == "four-coherent") return Scheme::FourLevelCoherent;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

int atomic_levels(Scheme scheme) {
  switch (scheme) {
    case Scheme::ThreeLevelIncoherent:
      return 2;
    case Scheme::FourLevelIncoherent:
      return 3;
    case Scheme::FourLevelCoherent:
      return 4;
  }
  return 0;
}

void validate(const RateParams& p, Scheme scheme) {
  auto non_negative = [](double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw ConfigError(std::string("rate '") + name + "' must be finite and non-negative");
    }
  };
  auto unused = [scheme](double value, const char* name) {
    if (value != 0.0) {
      throw ConfigError(std::string("parameter '") + name + "' is not used by scheme " +
                        std::string(to_string(scheme)) + " and must be zero");
    }
  };
  if (!std::isfinite(p.g)) throw ConfigError("coupling 'g' must be finite");
  if (!std::isfinite(p.E_pump)) throw ConfigError("coupling 'E_pump' must be finite");
  non_negative(p.kappa, "kappa");
  non_negative(p.gamma, "gamma");
  non_negative(p.Gamma, "Gamma");
  non_negative(p.gamma_f, "gamma_f");
  non_negative(p.gamma_4, "gamma_4");

  switch (scheme) {
    case Scheme::ThreeLevelIncoherent:
      unused(p.gamma_f, "gamma_f");
      unused(p.gamma_4, "gamma_4");
      unused(p.E_pump, "E_pump");
      break;
    case Scheme::FourLevelIncoherent:
      unused(p.gamma_4, "gamma_4");
      unused(p.E_pump, "E_pump");
      break;
    case Scheme::FourLevelCoherent:
      unused(p.Gamma, "Gamma");
      break;
  }
}

ModelSpec three_level_incoherent(const RateParams& params, int n_max) {
  require_truncation(n_max);
  validate(params, Scheme::ThreeLevelIncoherent);
  StateSpace space(2, n_max);

  ModelSpec model{Scheme::ThreeLevelIncoherent,
                  params,
                  space,
                  {OperatorTag::Hamiltonian, jaynes_cummings(space, params.g, 2, 1)},
                  {},
                  {2, 1}};
  model.collapses.push_back(channel("cavity", annihilation(space), 2.0 * params.kappa));
  model.collapses.push_back(
      channel("spontaneous", atomic_transition(space, 2, 1), params.gamma));
  model.collapses.push_back(channel("pump", atomic_transition(space, 1, 2), params.Gamma));
  return model;
}

ModelSpec four_level_incoherent(const RateParams& params, int n_max) {
  require_truncation(n_max);
  validate(params, Scheme::FourLevelIncoherent);
  StateSpace space(3, n_max);

  ModelSpec model{Scheme::FourLevelIncoherent,
                  params,
                  space,
                  {OperatorTag::Hamiltonian, jaynes_cummings(space, params.g, 3, 2)},
                  {},
                  {3, 2}};
  model.collapses.push_back(channel("cavity", annihilation(space), 2.0 * params.kappa));
  model.collapses.push_back(channel("pump", atomic_transition(space, 1, 3), params.Gamma));
  model.collapses.push_back(
      channel("spontaneous", atomic_transition(space, 3, 2), params.gamma));
  model.collapses.push_back(
      channel("lower-decay", atomic_transition(space, 2, 1), params.gamma_f));
  return model;
}

ModelSpec four_level_coherent(const RateParams& params, int n_max) {
  require_truncation(n_max);
  validate(params, Scheme::FourLevelCoherent);
  StateSpace space(4, n_max);

  // i E (sigma_41 - sigma_14) drives 1 <-> 4
  const OperatorMatrix s41 = atomic_transition(space, 4, 1);
  Matrix h = jaynes_cummings(space, params.g, 3, 2) +
             kI * params.E_pump * (s41.matrix - adjoint(s41));

  ModelSpec model{Scheme::FourLevelCoherent,
                  params,
                  space,
                  {OperatorTag::Hamiltonian, std::move(h)},
                  {},
                  {3, 2}};
  model.collapses.push_back(channel("cavity", annihilation(space), 2.0 * params.kappa));
  model.collapses.push_back(
      channel("spontaneous", atomic_transition(space, 3, 2), params.gamma));
  model.collapses.push_back(
      channel("lower-decay", atomic_transition(space, 2, 1), params.gamma_f));
  model.collapses.push_back(
      channel("pump-level-decay", atomic_transition(space, 4, 3), params.gamma_4));
  return model;
}

ModelSpec build_model(Scheme scheme, const RateParams& params, int n_max) {
  switch (scheme) {
    case Scheme::ThreeLevelIncoherent:
      return three_level_incoherent(params, n_max);
    case Scheme::FourLevelIncoherent:
      return four_level_incoherent(params, n_max);
    case Scheme::FourLevelCoherent:
      return four_level_coherent(params, n_max);
  }
  throw ConfigError("unknown scheme");
}

}  // namespace satl

#include "satl/hilbert.hpp"

#include <cmath>
#include <string>

#include "satl/error.hpp"

namespace satl {

StateSpace::StateSpace(int n_levels, int n_max) : n_levels_(n_levels), n_max_(n_max) {
  if (n_levels < 2 || n_levels > 4) {
    throw ConfigError("atomic level count must be 2, 3 or 4, got " + std::to_string(n_levels));
  }
  if (n_max < 0) {
    throw ConfigError("photon truncation must be non-negative, got " + std::to_string(n_max));
  }
}

int StateSpace::index(int level, int photons) const {
  if (level < 1 || level > n_levels_) {
    throw IndexError("atomic level " + std::to_string(level) + " outside 1.." +
                     std::to_string(n_levels_));
  }
  if (photons < 0 || photons > n_max_) {
    throw IndexError("photon number " + std::to_string(photons) + " outside 0.." +
                     std::to_string(n_max_));
  }
  return (level - 1) * photon_states() + photons;
}

BasisLabel StateSpace::label(int index) const {
  if (index < 0 || index >= dim()) {
    throw IndexError("flat index " + std::to_string(index) + " outside 0.." +
                     std::to_string(dim() - 1));
  }
  return {index / photon_states() + 1, index % photon_states()};
}

OperatorMatrix annihilation(const StateSpace& space) {
  Matrix a = Matrix::Zero(space.dim(), space.dim());
  for (int level = 1; level <= space.n_levels(); ++level) {
    for (int n = 1; n <= space.n_max(); ++n) {
      a(space.index(level, n - 1), space.index(level, n)) = std::sqrt(static_cast<double>(n));
    }
  }
  return {OperatorTag::Annihilation, std::move(a)};
}

OperatorMatrix atomic_transition(const StateSpace& space, int from, int to) {
  if (from < 1 || from > space.n_levels() || to < 1 || to > space.n_levels()) {
    throw IndexError("atomic transition " + std::to_string(from) + "->" + std::to_string(to) +
                     " invalid for " + std::to_string(space.n_levels()) + " levels");
  }
  Matrix s = Matrix::Zero(space.dim(), space.dim());
  for (int n = 0; n <= space.n_max(); ++n) {
    s(space.index(to, n), space.index(from, n)) = 1.0;
  }
  return {OperatorTag::AtomicTransition, std::move(s)};
}

Matrix photon_number(const StateSpace& space) {
  Matrix num = Matrix::Zero(space.dim(), space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    num(i, i) = static_cast<double>(space.label(i).photons);
  }
  return num;
}

}  // namespace satl

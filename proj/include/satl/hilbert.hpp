#pragma once

#include <complex>
#include <Eigen/Dense>

namespace satl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// (atomic level, photon number) label of a basis state. Levels are 1-based.
struct BasisLabel {
  int level;
  int photons;

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

/// Truncated atom (x) cavity-mode basis.
///
/// Ordering is level-major: all photon numbers 0..n_max of level 1 come
/// first, then level 2, and so on, i.e. index = (level - 1) * (n_max + 1) + n.
class StateSpace {
 public:
  StateSpace(int n_levels, int n_max);

  int n_levels() const noexcept { return n_levels_; }
  int n_max() const noexcept { return n_max_; }
  int photon_states() const noexcept { return n_max_ + 1; }
  int dim() const noexcept { return n_levels_ * (n_max_ + 1); }

  /// Throws IndexError when level or photons is out of range.
  int index(int level, int photons) const;
  BasisLabel label(int index) const;

  friend bool operator==(const StateSpace&, const StateSpace&) = default;

 private:
  int n_levels_;
  int n_max_;
};

enum class OperatorTag { Annihilation, AtomicTransition, Hamiltonian, Collapse };

struct OperatorMatrix {
  OperatorTag tag;
  Matrix matrix;
};

/// Cavity annihilation operator a, identity on the atom.
OperatorMatrix annihilation(const StateSpace& space);

/// sigma_{from,to} = |to><from|, identity on the field.
OperatorMatrix atomic_transition(const StateSpace& space, int from, int to);

/// Diagonal photon-number operator a^dagger a.
Matrix photon_number(const StateSpace& space);

}  // namespace satl

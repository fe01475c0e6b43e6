#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "satl/models.hpp"

namespace satl {

/// Reproducible uniform stream keyed by (seed, substream). Each trajectory gets
/// its own substream so results do not depend on scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t substream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t substream() const noexcept { return substream_; }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t seed_;
  std::uint64_t substream_;
  std::mt19937_64 engine_;
};

struct ConditionedState {
  Vector amplitudes;
  double time = 0.0;

  double norm() const { return amplitudes.norm(); }
};

/// Basis state |level, photons> at t = 0.
ConditionedState basis_state(const StateSpace& space, int level, int photons);

struct CollapseEvent {
  double time;
  int channel;  ///< index into ModelSpec::collapses
};

/// H - (i/2) sum_k rate_k F_k^dagger F_k
OperatorMatrix effective_hamiltonian(const ModelSpec& model);

/// Largest rate or coupling in the model; the time step must resolve it.
double fastest_rate(const ModelSpec& model);

/// 0.005 / fastest_rate
double default_time_step(const ModelSpec& model);

/// Monte-Carlo wave-function stepper for a fixed model and time step.
class TrajectoryEngine {
 public:
  /// Throws PreconditionError when dt > 0.01 / fastest_rate.
  TrajectoryEngine(const ModelSpec& model, double dt);

  const ModelSpec& model() const noexcept { return model_; }
  double dt() const noexcept { return dt_; }

  /// One step of length dt: either a single collapse or no-jump evolution, then
  /// renormalization.
  std::optional<CollapseEvent> step(ConditionedState& state, RngStream& rng) const;

  /// Applies the no-jump propagator without renormalizing.
  void propagate_no_jump(Vector& amplitudes) const;

  /// dt <psi|F_k^dagger F_k|psi> for each channel, psi normalized.
  std::vector<double> jump_probabilities(const Vector& amplitudes) const;

 private:
  ModelSpec model_;
  double dt_;
  Matrix no_jump_;
  std::vector<Matrix> jumps_;                ///< sqrt(rate) F
  std::vector<Eigen::VectorXd> jump_weights_;  ///< rate * diag(F^dagger F)
};

struct TrajectoryRecord {
  std::vector<double> time;
  std::vector<double> population_upper;
  /// sum_n <lower, n+1|psi><psi|upper, n>
  std::vector<Complex> dipole;
  std::vector<CollapseEvent> events;

  std::vector<double> dipole_magnitude() const;
};

struct TrajectoryOptions {
  double dt = 0.0;  ///< 0 selects default_time_step
  double t_final = 100.0;
  int record_stride = 1;
  int initial_level = 1;
  int initial_photons = 0;
};

TrajectoryRecord run_trajectory(const ModelSpec& model, const TrajectoryOptions& options,
                                RngStream& rng);

struct EnsembleResult {
  std::vector<double> time;
  std::vector<Matrix> rho;
  int n_traj = 0;
};

/// Average of |psi_c><psi_c| over n_traj trajectories, substreams 0..n_traj-1.
EnsembleResult ensemble_density(const ModelSpec& model, const TrajectoryOptions& options,
                                int n_traj, std::uint64_t seed);

}  // namespace satl

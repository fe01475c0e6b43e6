#include "satl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "satl/error.hpp"

namespace satl {

namespace {

constexpr Complex kI{0.0, 1.0};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// exp(factor * A) for Hermitian A.
Matrix hermitian_exp(const Matrix& a, Complex factor) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.adjoint()));
  const Eigen::VectorXcd phases =
      (factor * eig.eigenvalues().cast<Complex>()).array().exp().matrix();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

Complex lasing_dipole(const ModelSpec& model, const Vector& psi) {
  const StateSpace& space = model.space;
  Complex d = 0.0;
  for (int n = 0; n < space.n_max(); ++n) {
    d += psi[space.index(model.lasing.lower, n + 1)] *
         std::conj(psi[space.index(model.lasing.upper, n)]);
  }
  return d;
}

double upper_population(const ModelSpec& model, const Vector& psi) {
  double p = 0.0;
  for (int n = 0; n <= model.space.n_max(); ++n) {
    p += std::norm(psi[model.space.index(model.lasing.upper, n)]);
  }
  return p;
}

int step_count(double t_final, double dt) {
  return static_cast<int>(std::llround(t_final / dt));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t substream)
    : seed_(seed),
      substream_(substream),
      engine_(splitmix64(seed ^ splitmix64(substream ^ 0x5851f42d4c957f2dULL))) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

ConditionedState basis_state(const StateSpace& space, int level, int photons) {
  ConditionedState s;
  s.amplitudes = Vector::Zero(space.dim());
  s.amplitudes[space.index(level, photons)] = 1.0;
  return s;
}

OperatorMatrix effective_hamiltonian(const ModelSpec& model) {
  Matrix h = model.hamiltonian.matrix;
  for (const Collapse& ch : model.collapses) {
    h -= 0.5 * kI * ch.rate * (ch.op.matrix.adjoint() * ch.op.matrix);
  }
  return {OperatorTag::Hamiltonian, std::move(h)};
}

double fastest_rate(const ModelSpec& model) {
  double fastest = std::max(std::abs(model.params.g), std::abs(model.params.E_pump));
  for (const Collapse& ch : model.collapses) fastest = std::max(fastest, ch.rate);
  return fastest;
}

double default_time_step(const ModelSpec& model) {
  const double fastest = fastest_rate(model);
  return fastest > 0.0 ? 0.005 / fastest : 0.005;
}

TrajectoryEngine::TrajectoryEngine(const ModelSpec& model, double dt) : model_(model), dt_(dt) {
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  const double fastest = fastest_rate(model);
  if (fastest > 0.0 && dt > 0.01 / fastest * (1.0 + 1e-12)) {
    throw PreconditionError("time step " + std::to_string(dt) +
                            " exceeds 0.01 / fastest rate = " + std::to_string(0.01 / fastest));
  }
  const int d = model.space.dim();
  Matrix decay = Matrix::Zero(d, d);
  for (const Collapse& ch : model.collapses) {
    const Matrix k = ch.rate * (ch.op.matrix.adjoint() * ch.op.matrix);
    if ((k - Matrix(k.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 0.0) {
      throw ConfigError("collapse operator '" + ch.name + "' has a non-diagonal F^dagger F");
    }
    decay += k;
    jumps_.push_back(std::sqrt(ch.rate) * ch.op.matrix);
    jump_weights_.push_back(k.diagonal().real());
  }
  // symmetric split: half Hermitian step, full damping step, half Hermitian step
  const Matrix half = hermitian_exp(model.hamiltonian.matrix, -kI * (0.5 * dt));
  const Matrix damp = hermitian_exp(decay, Complex(-0.5 * dt));
  no_jump_ = half * damp * half;
}

void TrajectoryEngine::propagate_no_jump(Vector& amplitudes) const {
  amplitudes = no_jump_ * amplitudes;
}

std::vector<double> TrajectoryEngine::jump_probabilities(const Vector& amplitudes) const {
  std::vector<double> p(jump_weights_.size());
  const Eigen::VectorXd prob = amplitudes.cwiseAbs2();
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = dt_ * jump_weights_[k].dot(prob);
  return p;
}

std::optional<CollapseEvent> TrajectoryEngine::step(ConditionedState& state,
                                                     RngStream& rng) const {
  const std::vector<double> p = jump_probabilities(state.amplitudes);
  std::vector<int> fired;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (rng.uniform() < p[k]) fired.push_back(static_cast<int>(k));
  }
  state.time += dt_;

  std::optional<CollapseEvent> event;
  if (!fired.empty()) {
    int channel = fired.front();
    if (fired.size() > 1) {
      double total = 0.0;
      for (int k : fired) total += p[k];
      double pick = rng.uniform() * total;
      for (int k : fired) {
        channel = k;
        pick -= p[k];
        if (pick < 0.0) break;
      }
    }
    state.amplitudes = jumps_[channel] * state.amplitudes;
    event = CollapseEvent{state.time, channel};
  } else {
    state.amplitudes = no_jump_ * state.amplitudes;
  }
  const double norm = state.amplitudes.norm();
  if (!(norm > 1e-12)) {
    throw NumericalError("conditioned state norm collapsed to " + std::to_string(norm),
                         "norm-collapse");
  }
  state.amplitudes /= norm;
  return event;
}

std::vector<double> TrajectoryRecord::dipole_magnitude() const {
  std::vector<double> out(dipole.size());
  std::transform(dipole.begin(), dipole.end(), out.begin(),
                 [](Complex z) { return std::abs(z); });
  return out;
}

TrajectoryRecord run_trajectory(const ModelSpec& model, const TrajectoryOptions& options,
                                RngStream& rng) {
  if (options.record_stride < 1) throw ConfigError("record stride must be positive");
  if (!(options.t_final >= 0.0)) throw ConfigError("final time must be non-negative");
  const double dt = options.dt > 0.0 ? options.dt : default_time_step(model);
  const TrajectoryEngine engine(model, dt);
  ConditionedState state =
      basis_state(model.space, options.initial_level, options.initial_photons);
  const int steps = step_count(options.t_final, dt);

  TrajectoryRecord rec;
  auto record = [&](int k) {
    rec.time.push_back(k * dt);
    rec.population_upper.push_back(upper_population(model, state.amplitudes));
    rec.dipole.push_back(lasing_dipole(model, state.amplitudes));
  };
  record(0);
  for (int k = 1; k <= steps; ++k) {
    if (auto event = engine.step(state, rng)) {
      event->time = k * dt;
      rec.events.push_back(*event);
    }
    state.time = k * dt;
    if (k % options.record_stride == 0) record(k);
  }
  return rec;
}

EnsembleResult ensemble_density(const ModelSpec& model, const TrajectoryOptions& options,
                                int n_traj, std::uint64_t seed) {
  if (n_traj < 100) throw PreconditionError("ensemble needs at least 100 trajectories");
  if (options.record_stride < 1) throw ConfigError("record stride must be positive");
  const double dt = options.dt > 0.0 ? options.dt : default_time_step(model);
  const TrajectoryEngine engine(model, dt);
  const int steps = step_count(options.t_final, dt);
  const int records = steps / options.record_stride + 1;
  const int d = model.space.dim();

  // Fixed chunking keeps the floating-point summation order independent of threads.
  constexpr int kChunks = 64;
  std::vector<std::vector<Matrix>> partial(kChunks,
                                           std::vector<Matrix>(records, Matrix::Zero(d, d)));
#pragma omp parallel for schedule(dynamic)
  for (int chunk = 0; chunk < kChunks; ++chunk) {
    for (int t = chunk; t < n_traj; t += kChunks) {
      RngStream rng(seed, static_cast<std::uint64_t>(t));
      ConditionedState state =
          basis_state(model.space, options.initial_level, options.initial_photons);
      partial[chunk][0] += state.amplitudes * state.amplitudes.adjoint();
      for (int k = 1; k <= steps; ++k) {
        engine.step(state, rng);
        if (k % options.record_stride == 0) {
          partial[chunk][k / options.record_stride] +=
              state.amplitudes * state.amplitudes.adjoint();
        }
      }
    }
  }

  EnsembleResult out;
  out.n_traj = n_traj;
  out.rho.assign(records, Matrix::Zero(d, d));
  for (int r = 0; r < records; ++r) {
    out.time.push_back(static_cast<double>(r) * options.record_stride * dt);
    for (int chunk = 0; chunk < kChunks; ++chunk) out.rho[r] += partial[chunk][r];
    out.rho[r] /= static_cast<double>(n_traj);
  }
  return out;
}

}  // namespace satl

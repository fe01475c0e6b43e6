#pragma once

// Time-domain route to the output spectrum: integrate dX/dt = L[X] in matrix form
// from X(0) = rho_ss a^dagger, form G(t) = tr(a X(t)), and Fourier transform
// G on a uniform time grid with composite Simpson weights at the exact target
// frequencies. Shares no code with the resolvent path.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

#include "satl/models.hpp"

namespace satl::test {

struct TimeCorrelation {
  double dt = 0.0;
  std::vector<Complex> g;  ///< G(k dt), k = 0..N (N even)
};

inline TimeCorrelation integrate_correlation(const ModelSpec& model, const Matrix& rho_ss,
                                             double dt, double tail = 1e-9,
                                             double t_cap = 4000.0) {
  using Sparse = Eigen::SparseMatrix<Complex>;
  const int d = model.space.dim();
  const Complex i(0.0, 1.0);
  Matrix a_dense = Matrix::Zero(d, d);
  for (int j = 1; j <= model.space.n_levels(); ++j) {
    for (int n = 1; n <= model.space.n_max(); ++n) {
      a_dense(model.space.index(j, n - 1), model.space.index(j, n)) = std::sqrt(double(n));
    }
  }
  const Sparse h = model.hamiltonian.matrix.sparseView();
  std::vector<Sparse> f, fd;
  Matrix decay = Matrix::Zero(d, d);
  for (const Collapse& c : model.collapses) {
    if (c.rate == 0.0) continue;
    f.push_back((std::sqrt(c.rate) * c.op.matrix).sparseView());
    fd.push_back(Sparse(f.back().adjoint()));
    decay += c.rate * c.op.matrix.adjoint() * c.op.matrix;
  }
  const Sparse k = (0.5 * decay).sparseView();

  using State = std::vector<Complex>;
  auto rhs = [&](const State& x, State& dx, double) {
    Eigen::Map<const Matrix> X(x.data(), d, d);
    Eigen::Map<Matrix> D(dx.data(), d, d);
    D = -i * (h * X) + i * (X * h) - k * X - X * k;
    for (std::size_t c = 0; c < f.size(); ++c) D += f[c] * (X * fd[c]);
  };

  const Matrix x0 = rho_ss * a_dense.adjoint();
  State x(x0.data(), x0.data() + static_cast<std::ptrdiff_t>(d) * d);
  auto trace_a = [&](const State& s) {
    Eigen::Map<const Matrix> X(s.data(), d, d);
    return (a_dense * X).trace();
  };

  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_dense_output(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(x, 0.0, dt);

  TimeCorrelation out;
  out.dt = dt;
  out.g.push_back(trace_a(x));
  const double g0 = std::abs(out.g.front());
  constexpr int kChunk = 2000;  // samples per convergence check, even
  double t = 0.0;
  State sample(x.size());
  for (;;) {
    double chunk_max = 0.0;
    for (int s = 0; s < kChunk; ++s) {
      const double target = t + dt;
      while (stepper.current_time() < target) stepper.do_step(rhs);
      stepper.calc_state(target, sample);
      t = target;
      out.g.push_back(trace_a(sample));
      chunk_max = std::max(chunk_max, std::abs(out.g.back()));
    }
    if (chunk_max < tail * g0 || t >= t_cap) break;
  }
  return out;
}

/// 2 Re int_0^T e^{i w t} G(t) dt by composite Simpson.
inline std::vector<double> fourier_spectrum(const TimeCorrelation& corr,
                                            const std::vector<double>& omega) {
  const std::size_t n = corr.g.size() - 1;  // even
  std::vector<double> out(omega.size());
  for (std::size_t w = 0; w < omega.size(); ++w) {
    const Complex step = std::exp(Complex(0.0, omega[w] * corr.dt));
    Complex phase = 1.0, acc = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double weight = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += weight * phase * corr.g[k];
      phase *= step;
      if (k % 512 == 511) phase /= std::abs(phase);
    }
    out[w] = 2.0 * (acc * (corr.dt / 3.0)).real();
  }
  return out;
}

}  // namespace satl::test

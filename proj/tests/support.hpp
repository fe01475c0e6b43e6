#pragma once

// Shared test helpers: seeded generators and oracles that do not go through the
// vectorized generator.

#include <cmath>
#include <random>
#include <vector>

#include "satl/liouvillian.hpp"
#include "satl/models.hpp"

namespace satl::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

inline Matrix random_matrix(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) m(r, c) = Complex(n(rng), n(rng));
  }
  return m;
}

inline Matrix random_hermitian(Rng& rng, int d) {
  const Matrix m = random_matrix(rng, d);
  return 0.5 * (m + m.adjoint());
}

/// Random full-rank density matrix.
inline Matrix random_density(Rng& rng, int d) {
  const Matrix m = random_matrix(rng, d);
  Matrix rho = m * m.adjoint();
  return rho / rho.trace();
}

/// Rates drawn log-uniformly from [lo, hi] for every field the scheme uses.
inline RateParams random_params(Rng& rng, Scheme scheme, double lo = 0.05, double hi = 10.0) {
  RateParams p;
  p.g = log_uniform(rng, lo, hi);
  p.kappa = log_uniform(rng, lo, hi);
  p.gamma = 1.0;
  switch (scheme) {
    case Scheme::ThreeLevelIncoherent:
      p.Gamma = log_uniform(rng, lo, hi);
      break;
    case Scheme::FourLevelIncoherent:
      p.Gamma = log_uniform(rng, lo, hi);
      p.gamma_f = log_uniform(rng, lo, hi);
      break;
    case Scheme::FourLevelCoherent:
      p.E_pump = log_uniform(rng, lo, hi);
      p.gamma_f = log_uniform(rng, lo, hi);
      p.gamma_4 = log_uniform(rng, lo, hi);
      break;
  }
  return p;
}

/// -i[H, X] + sum_k rate_k (F X F^+ - {F^+ F, X}/2), evaluated with dense matrix products.
inline Matrix lindblad_action(const ModelSpec& model, const Matrix& x) {
  const Complex i(0.0, 1.0);
  const Matrix& h = model.hamiltonian.matrix;
  Matrix out = -i * (h * x - x * h);
  for (const Collapse& c : model.collapses) {
    const Matrix& f = c.op.matrix;
    const Matrix ff = f.adjoint() * f;
    out += c.rate * (f * x * f.adjoint() - 0.5 * (ff * x + x * ff));
  }
  return out;
}

/// Hand-built operators for a basis with `levels` atomic levels, written out with
/// explicit loops so they do not share code with the hilbert module.
struct HandBasis {
  int levels;
  int n_max;
  int dim() const { return levels * (n_max + 1); }
  int idx(int level, int n) const { return (level - 1) * (n_max + 1) + n; }

  Matrix a() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int j = 1; j <= levels; ++j) {
      for (int n = 1; n <= n_max; ++n) m(idx(j, n - 1), idx(j, n)) = std::sqrt(double(n));
    }
    return m;
  }

  /// sigma_{from,to} = |to><from|
  Matrix sigma(int from, int to) const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (int n = 0; n <= n_max; ++n) m(idx(to, n), idx(from, n)) = 1.0;
    return m;
  }
};

/// Generator assembled column by column: column r + c d is vec(L[E_rc]) where the
/// Lindblad action is written term by term.
inline Matrix brute_force_generator(const Matrix& h, const std::vector<std::pair<Matrix, double>>& ops) {
  const int d = static_cast<int>(h.rows());
  const Complex i(0.0, 1.0);
  Matrix out = Matrix::Zero(d * d, d * d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      Matrix e = Matrix::Zero(d, d);
      e(r, c) = 1.0;
      Matrix l = -i * h * e + i * e * h;
      for (const auto& [f, rate] : ops) {
        l += rate * f * e * f.adjoint();
        l -= 0.5 * rate * f.adjoint() * f * e;
        l -= 0.5 * rate * e * f.adjoint() * f;
      }
      for (int cc = 0; cc < d; ++cc) {
        for (int rr = 0; rr < d; ++rr) out(rr + cc * d, r + c * d) = l(rr, cc);
      }
    }
  }
  return out;
}

}  // namespace satl::test

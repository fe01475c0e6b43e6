#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "satl/models.hpp"

namespace satl {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Column-stacked vec(rho): element (r, c) lives at r + c * dim.
Vector stack(const Matrix& rho);
Matrix unstack(const Vector& v, int dim);

/// Vectorized Lindblad generator, d vec(rho)/dt = matrix * vec(rho).
struct Generator {
  ModelSpec model;
  SparseMatrix matrix;

  int dim() const noexcept { return model.space.dim(); }
  Matrix dense() const { return Matrix(matrix); }
  /// unstack(matrix * stack(rho))
  Matrix apply(const Matrix& rho) const;
  /// Maximum absolute row sum.
  double norm() const;
};

Generator build_generator(const ModelSpec& model);

/// Connected components of the sparsity graph of a square matrix. The matrix is
/// block diagonal with respect to these index sets.
struct BlockDecomposition {
  std::vector<int> block_of;
  std::vector<std::vector<int>> blocks;
};

BlockDecomposition connected_blocks(const SparseMatrix& m);

/// Sorted union of all blocks touching any of the seed indices.
std::vector<int> invariant_support(const BlockDecomposition& decomposition,
                                   std::span<const int> seeds);

/// Dense restriction m[indices, indices].
Matrix submatrix(const SparseMatrix& m, std::span<const int> indices);

struct SteadyState {
  Matrix rho;
  int n_max = 0;
  double residual = 0.0;         ///< || L vec(rho) ||_inf after symmetrization
  double trace_error = 0.0;      ///< |tr rho - 1|
  double hermiticity_error = 0.0;  ///< max |rho - rho^dagger| before symmetrization
  double min_eigenvalue = 0.0;
  double top_sector_population = 0.0;
};

struct SteadyStateOptions {
  /// Rank cut-off relative to the generator norm.
  double rank_tolerance = 1e-8;
  /// Residual above residual_limit * max(1, norm) is reported as a numerical error.
  double residual_limit = 1e-9;
};

SteadyState steady_state(const Generator& gen, const SteadyStateOptions& options = {});

/// Total population with n == n_max.
double top_sector_population(const StateSpace& space, const Matrix& rho);

struct TruncationOptions {
  int ceiling = 60;
  int step = 2;
  double threshold = 1e-4;
};

/// A solved model at its final truncation.
struct Solution {
  Generator generator;
  SteadyState steady;
};

using ModelFactory = std::function<ModelSpec(int n_max)>;

/// Raise n_max in steps until the top photon sector holds less than the
/// threshold population.
Solution solve_with_adaptive_truncation(const ModelFactory& factory, int start_n_max,
                                        const TruncationOptions& options = {},
                                        const SteadyStateOptions& steady_options = {});

/// rho(k * dt) for k = 0..steps, by repeated application of exp(L dt).
std::vector<Matrix> propagate(const Generator& gen, const Matrix& rho0, double dt, int steps);

}  // namespace satl

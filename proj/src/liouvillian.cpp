#include "satl/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <unsupported/Eigen/MatrixFunctions>

#include "satl/error.hpp"

namespace satl {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Entry {
  int row;
  int col;
  Complex value;
};

std::vector<Entry> nonzeros(const Matrix& m) {
  std::vector<Entry> out;
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < m.rows(); ++r) {
      if (m(r, c) != Complex(0.0)) out.push_back({r, c, m(r, c)});
    }
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

int numerical_rank(const Matrix& m, double tolerance) {
  if (m.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const double max_pivot = qr.maxPivot();
  if (max_pivot <= tolerance) return 0;
  qr.setThreshold(tolerance / max_pivot);
  return static_cast<int>(qr.rank());
}

}  // namespace

Vector stack(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unstack(const Vector& v, int dim) {
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

Matrix Generator::apply(const Matrix& rho) const {
  const Vector out = matrix * stack(rho);
  return unstack(out, dim());
}

double Generator::norm() const {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(matrix.rows());
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) {
      row_sums[it.row()] += std::abs(it.value());
    }
  }
  return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

Generator build_generator(const ModelSpec& model) {
  const int d = model.space.dim();
  if (model.hamiltonian.matrix.rows() != d || model.hamiltonian.matrix.cols() != d) {
    throw ConfigError("Hamiltonian dimension does not match the state space");
  }
  std::vector<Eigen::Triplet<Complex>> triplets;

  // -i (I (x) H - H^T (x) I)
  for (const Entry& h : nonzeros(model.hamiltonian.matrix)) {
    for (int c = 0; c < d; ++c) {
      triplets.emplace_back(h.row + c * d, h.col + c * d, -kI * h.value);
    }
    for (int r = 0; r < d; ++r) {
      triplets.emplace_back(r + h.col * d, r + h.row * d, kI * h.value);
    }
  }

  for (const Collapse& ch : model.collapses) {
    const Matrix& f = ch.op.matrix;
    if (f.rows() != d || f.cols() != d) {
      throw ConfigError("collapse operator '" + ch.name + "' has the wrong dimension");
    }
    if (ch.rate == 0.0) continue;
    const std::vector<Entry> fz = nonzeros(f);
    for (const Entry& left : fz) {
      for (const Entry& right : fz) {
        // (F rho F^dagger)_{r,c} += F_{r,i} rho_{i,j} conj(F_{c,j})
        triplets.emplace_back(left.row + right.row * d, left.col + right.col * d,
                              ch.rate * left.value * std::conj(right.value));
      }
    }
    const Matrix k = f.adjoint() * f;
    for (const Entry& e : nonzeros(k)) {
      for (int c = 0; c < d; ++c) {
        triplets.emplace_back(e.row + c * d, e.col + c * d, -0.5 * ch.rate * e.value);
      }
      for (int r = 0; r < d; ++r) {
        triplets.emplace_back(r + e.col * d, r + e.row * d, -0.5 * ch.rate * e.value);
      }
    }
  }

  SparseMatrix m(d * d, d * d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(Complex(0.0), 0.0);
  m.makeCompressed();
  return {model, std::move(m)};
}

BlockDecomposition connected_blocks(const SparseMatrix& m) {
  const int n = static_cast<int>(m.rows());
  UnionFind uf(n);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      uf.unite(static_cast<int>(it.row()), static_cast<int>(it.col()));
    }
  }
  BlockDecomposition out;
  out.block_of.assign(n, -1);
  std::vector<int> root_block(n, -1);
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (root_block[root] < 0) {
      root_block[root] = static_cast<int>(out.blocks.size());
      out.blocks.emplace_back();
    }
    out.block_of[i] = root_block[root];
    out.blocks[root_block[root]].push_back(i);
  }
  return out;
}

std::vector<int> invariant_support(const BlockDecomposition& decomposition,
                                   std::span<const int> seeds) {
  std::vector<char> chosen(decomposition.blocks.size(), 0);
  for (int s : seeds) chosen[decomposition.block_of.at(s)] = 1;
  std::vector<int> out;
  for (std::size_t b = 0; b < decomposition.blocks.size(); ++b) {
    if (chosen[b]) {
      out.insert(out.end(), decomposition.blocks[b].begin(), decomposition.blocks[b].end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Matrix submatrix(const SparseMatrix& m, std::span<const int> indices) {
  std::vector<int> local(m.rows(), -1);
  for (std::size_t i = 0; i < indices.size(); ++i) local[indices[i]] = static_cast<int>(i);
  const int n = static_cast<int>(indices.size());
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (SparseMatrix::InnerIterator it(m, indices[j]); it; ++it) {
      const int i = local[it.row()];
      if (i >= 0) out(i, j) = it.value();
    }
  }
  return out;
}

double top_sector_population(const StateSpace& space, const Matrix& rho) {
  double total = 0.0;
  for (int level = 1; level <= space.n_levels(); ++level) {
    const int i = space.index(level, space.n_max());
    total += rho(i, i).real();
  }
  return total;
}

SteadyState steady_state(const Generator& gen, const SteadyStateOptions& options) {
  const int d = gen.dim();
  const double norm = gen.norm();
  const double tolerance = options.rank_tolerance * std::max(norm, 1e-300);

  const BlockDecomposition blocks = connected_blocks(gen.matrix);
  std::vector<int> diagonal(d);
  for (int i = 0; i < d; ++i) diagonal[i] = i + i * d;

  std::vector<char> has_diagonal(blocks.blocks.size(), 0);
  for (int idx : diagonal) has_diagonal[blocks.block_of[idx]] = 1;

  // rank(M_full) = sum of block ranks
  int kernel_dimension = 0;
  int kernel_block = -1;
  for (std::size_t b = 0; b < blocks.blocks.size(); ++b) {
    const Matrix sub = submatrix(gen.matrix, blocks.blocks[b]);
    const int nullity = static_cast<int>(blocks.blocks[b].size()) - numerical_rank(sub, tolerance);
    if (nullity > 0) {
      kernel_dimension += nullity;
      kernel_block = static_cast<int>(b);
    }
  }
  if (kernel_dimension != 1 || !has_diagonal[kernel_block]) {
    throw DegenerateSteadyStateError(
        "generator kernel has dimension " + std::to_string(kernel_dimension) +
            "; the steady state is not unique",
        kernel_dimension);
  }

  // Solve in the kernel block, replacing the ground/vacuum population row by tr(rho) = 1.
  const std::vector<int>& idx = blocks.blocks[kernel_block];
  Matrix a = submatrix(gen.matrix, idx);
  const int n = static_cast<int>(idx.size());
  const int ground = gen.model.space.index(1, 0);
  const auto pos = std::find(idx.begin(), idx.end(), ground + ground * d);
  int replace_row = -1;
  if (pos != idx.end()) {
    replace_row = static_cast<int>(pos - idx.begin());
  } else {
    for (int i = 0; i < n; ++i) {
      if (idx[i] % d == idx[i] / d) {
        replace_row = i;
        break;
      }
    }
  }
  Vector rhs = Vector::Zero(n);
  for (int j = 0; j < n; ++j) {
    a(replace_row, j) = (idx[j] % d == idx[j] / d) ? Complex(1.0) : Complex(0.0);
  }
  rhs[replace_row] = 1.0;
  const Vector x = a.partialPivLu().solve(rhs);

  Vector full = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int j = 0; j < n; ++j) full[idx[j]] = x[j];
  Matrix rho = unstack(full, d);

  SteadyState out;
  out.n_max = gen.model.space.n_max();
  out.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  out.trace_error = std::abs(rho.trace() - Complex(1.0));
  out.residual = (gen.matrix * stack(rho)).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.top_sector_population = top_sector_population(gen.model.space, rho);
  out.rho = std::move(rho);

  if (!(out.residual <= options.residual_limit * std::max(1.0, norm))) {
    throw NumericalError("steady-state residual " + std::to_string(out.residual) +
                             " exceeds tolerance",
                         "steady-state-residual", out.residual);
  }
  return out;
}

Solution solve_with_adaptive_truncation(const ModelFactory& factory, int start_n_max,
                                        const TruncationOptions& options,
                                        const SteadyStateOptions& steady_options) {
  if (start_n_max < 1) {
    throw ConfigError("starting photon truncation must be at least 1");
  }
  if (options.step < 1) throw ConfigError("truncation step must be positive");
  int n_max = start_n_max;
  double last_top = 0.0;
  while (n_max <= options.ceiling) {
    Generator gen = build_generator(factory(n_max));
    SteadyState ss = steady_state(gen, steady_options);
    last_top = ss.top_sector_population;
    if (last_top < options.threshold) return {std::move(gen), std::move(ss)};
    n_max += options.step;
  }
  throw TruncationError("photon truncation exceeded ceiling " + std::to_string(options.ceiling) +
                            " (top-sector population " + std::to_string(last_top) + ")",
                        n_max - options.step);
}

std::vector<Matrix> propagate(const Generator& gen, const Matrix& rho0, double dt, int steps) {
  const int d = gen.dim();
  const Vector v0 = stack(rho0);
  std::vector<int> seeds;
  for (int i = 0; i < v0.size(); ++i) {
    if (v0[i] != Complex(0.0)) seeds.push_back(i);
  }
  const std::vector<int> support = invariant_support(connected_blocks(gen.matrix), seeds);
  const Matrix step = (submatrix(gen.matrix, support) * dt).exp();

  Vector local(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) local[i] = v0[support[i]];

  std::vector<Matrix> out;
  out.reserve(steps + 1);
  Vector full = Vector::Zero(v0.size());
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) local = step * local;
    for (std::size_t i = 0; i < support.size(); ++i) full[support[i]] = local[i];
    out.push_back(unstack(full, d));
  }
  return out;
}

}  // namespace satl

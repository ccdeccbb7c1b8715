#include "thirdq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace thirdq {

void require_square(const ComplexMatrix& a, const char* name) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(name) + ": matrix must be square, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_finite(const ComplexMatrix& a, const char* name) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(name) + ": matrix has non-finite entries");
  }
}

namespace {

double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues()(0);
}

bool value_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

/* Greedy complete-linkage grouping of (re, im)-sorted values. */
std::vector<std::vector<int>> cluster_sorted(const ComplexVector& values, double tol) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < values.size(); ++i) {
    bool joined = false;
    if (!clusters.empty()) {
      auto& last = clusters.back();
      joined = std::all_of(last.begin(), last.end(), [&](int j) {
        return std::abs(values(i) - values(j)) <= tol;
      });
      if (joined) last.push_back(i);
    }
    if (!joined) clusters.push_back({i});
  }
  return clusters;
}

}  // namespace

EigenClusters eig(const ComplexMatrix& a, double cluster_tol_rel) {
  require_square(a, "eig");
  require_finite(a, "eig");
  const int n = static_cast<int>(a.rows());

  EigenClusters out;
  if (n == 0) return out;

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig: eigensolver did not converge");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return value_less(solver.eigenvalues()(i), solver.eigenvalues()(j));
  });

  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(order[i]);
    out.vectors.col(i) = solver.eigenvectors().col(order[i]);
  }

  out.cluster_tol = cluster_tol_rel * spectral_norm(a);
  out.clusters = cluster_sorted(out.values, out.cluster_tol);

  Eigen::JacobiSVD<ComplexMatrix> vsvd(out.vectors);
  const auto& sv = vsvd.singularValues();
  double smin = sv(sv.size() - 1);
  out.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  return out;
}

bool JordanSpec::diagonalizable() const { return max_block_size() <= 1; }

int JordanSpec::max_block_size() const {
  int m = 0;
  for (const auto& g : groups) {
    for (int s : g.block_sizes) m = std::max(m, s);
  }
  return m;
}

JordanSpec jordan_structure(const ComplexMatrix& a, double rank_tol) {
  require_square(a, "jordan_structure");
  require_finite(a, "jordan_structure");
  const int n = static_cast<int>(a.rows());

  JordanSpec spec;
  spec.dimension = n;
  if (n == 0) return spec;

  /* Defective eigenvalues split numerically by roughly the square root of the
   * working precision, so group coarsely before probing ranks. */
  const double cluster_rel = std::max(1e-8, std::sqrt(rank_tol));
  EigenClusters ec = eig(a, cluster_rel);

  const ComplexMatrix identity = ComplexMatrix::Identity(n, n);

  for (const auto& cluster : ec.clusters) {
    const int mult = static_cast<int>(cluster.size());
    Complex lambda(0.0, 0.0);
    for (int idx : cluster) lambda += ec.values(idx);
    lambda /= static_cast<double>(mult);

    JordanGroup group;
    group.eigenvalue = lambda;

    if (mult == 1) {
      group.block_sizes = {1};
      spec.groups.push_back(std::move(group));
      continue;
    }

    ComplexMatrix base = a - lambda * identity;
    /* Threshold on the scale the k-th power would have without cancellation;
     * the power itself can collapse to pure roundoff (nilpotent part), which
     * must read as rank zero rather than full rank. */
    const double base_scale = spectral_norm(base);
    double power_scale = 1.0;
    ComplexMatrix power = identity;
    std::vector<int> blocks_ge;  // blocks_ge[k-1] = number of blocks of size >= k
    int prev_nullity = 0;

    for (int k = 1; k <= mult; ++k) {
      power = power * base;
      power_scale *= base_scale;
      Eigen::JacobiSVD<ComplexMatrix> svd(power);
      const auto& sv = svd.singularValues();
      const double thresh = rank_tol * std::max(power_scale, 1e-300);

      int rank = 0;
      for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > thresh) ++rank;
      }
      if (rank > 0 && rank < sv.size() && (sv(rank - 1) - sv(rank)) < 10.0 * thresh) {
        spec.low_confidence = true;
      }

      int nullity = std::min(n - rank, mult);
      int ge = nullity - prev_nullity;
      if (!blocks_ge.empty()) ge = std::min(ge, blocks_ge.back());
      if (ge <= 0) break;
      blocks_ge.push_back(ge);
      prev_nullity = nullity;
      if (nullity >= mult) break;
    }

    int total = 0;
    for (std::size_t k = 0; k < blocks_ge.size(); ++k) {
      int exact = blocks_ge[k] - (k + 1 < blocks_ge.size() ? blocks_ge[k + 1] : 0);
      for (int c = 0; c < exact; ++c) {
        group.block_sizes.push_back(static_cast<int>(k) + 1);
        total += static_cast<int>(k) + 1;
      }
    }
    if (total < mult) {
      /* rank probing under-counted (marginal decisions); pad conservatively */
      spec.low_confidence = true;
      for (int c = 0; c < mult - total; ++c) group.block_sizes.push_back(1);
    }
    std::sort(group.block_sizes.begin(), group.block_sizes.end(), std::greater<int>());
    spec.groups.push_back(std::move(group));
  }

  return spec;
}

ComplexMatrix expm(const ComplexMatrix& a) {
  require_square(a, "expm");
  require_finite(a, "expm");
  if (a.size() == 0) return a;
  ComplexMatrix e = a.exp();
  if (!e.allFinite()) {
    throw std::overflow_error("expm: result overflowed, input frobenius norm " +
                              std::to_string(a.norm()));
  }
  return e;
}

SylvesterSolution solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& b,
                                  const ComplexMatrix& c) {
  require_square(a, "solve_sylvester (A)");
  require_square(b, "solve_sylvester (B)");
  require_finite(a, "solve_sylvester (A)");
  require_finite(b, "solve_sylvester (B)");
  require_finite(c, "solve_sylvester (C)");
  const int m = static_cast<int>(a.rows());
  const int p = static_cast<int>(b.rows());
  if (c.rows() != m || c.cols() != p) {
    throw std::invalid_argument("solve_sylvester: C must be " + std::to_string(m) + "x" +
                                std::to_string(p));
  }

  Eigen::ComplexEigenSolver<ComplexMatrix> ea(a, false), eb(b, false);
  double min_sum = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < p; ++j) {
      min_sum = std::min(min_sum, std::abs(ea.eigenvalues()(i) + eb.eigenvalues()(j)));
    }
  }
  const double scale = a.norm() + b.norm();
  if (min_sum <= 1e-12 * scale) {
    throw NoUniqueSolutionError(
        "solve_sylvester: no unique solution, min |alpha_i + beta_j| = " +
            std::to_string(min_sum),
        min_sum);
  }

  /* vec(A Z) = (I (x) A) vec Z, vec(Z B) = (B^T (x) I) vec Z, column stacking */
  ComplexMatrix kron = ComplexMatrix::Zero(m * p, m * p);
  for (int i = 0; i < p; ++i) kron.block(i * m, i * m, m, m) = a;
  const ComplexMatrix im = ComplexMatrix::Identity(m, m);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      kron.block(i * m, j * m, m, m) += b(j, i) * im;
    }
  }

  Eigen::Map<const ComplexVector> vec_c(c.data(), m * p);
  ComplexVector vec_z = Eigen::PartialPivLU<ComplexMatrix>(kron).solve(vec_c);

  SylvesterSolution out;
  out.z = Eigen::Map<const ComplexMatrix>(vec_z.data(), m, p);
  out.residual = (a * out.z + out.z * b - c).norm();
  out.min_eigenvalue_sum = min_sum;
  return out;
}

}  // namespace thirdq

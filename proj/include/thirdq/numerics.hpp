#pragma once

#include <vector>

#include "thirdq/types.hpp"

namespace thirdq {

/* Eigendecomposition with tolerance-based grouping of near-degenerate values. */
struct EigenClusters {
  ComplexVector values;   // sorted by (re, im)
  ComplexMatrix vectors;  // columns match values
  std::vector<std::vector<int>> clusters;  // partition of indices; members agree within cluster_tol
  double cluster_tol = 0.0;  // absolute tolerance actually used
  double condition = 0.0;    // sigma_max / sigma_min of the eigenvector matrix
};

/* cluster_tol_rel is taken relative to the spectral norm of a. */
EigenClusters eig(const ComplexMatrix& a, double cluster_tol_rel = 1e-8);

struct JordanGroup {
  Complex eigenvalue;           // cluster centroid
  std::vector<int> block_sizes; // descending
};

struct JordanSpec {
  std::vector<JordanGroup> groups;
  int dimension = 0;
  bool low_confidence = false;  // a rank decision was marginal or counts needed padding

  bool diagonalizable() const;
  int max_block_size() const;
};

/* Jordan block structure via rank probing of (a - lambda I)^k with SVD rank
 * decisions at rank_tol relative to each power's largest singular value. */
JordanSpec jordan_structure(const ComplexMatrix& a, double rank_tol = 1e-10);

/* Matrix exponential. Throws std::overflow_error on non-finite result. */
ComplexMatrix expm(const ComplexMatrix& a);

struct SylvesterSolution {
  ComplexMatrix z;
  double residual = 0.0;            // ||A Z + Z B - C||_F
  double min_eigenvalue_sum = 0.0;  // min_{i,j} |alpha_i + beta_j|
};

/* Solves A Z + Z B = C by dense Kronecker assembly.
 * Throws NoUniqueSolutionError when min |alpha_i + beta_j| <= 1e-12 (||A|| + ||B||). */
SylvesterSolution solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& b,
                                  const ComplexMatrix& c);

}  // namespace thirdq

#pragma once

#include <vector>

#include "thirdq/model.hpp"
#include "thirdq/numerics.hpp"

namespace thirdq {

/* Realizations of the combined parity on the doubled (a, a^dag) index space:
 * reflection pairs site i with site n-1-i inside each sector, sector_swap
 * additionally exchanges the two sectors. */
enum class Parity { reflection, sector_swap };

RealMatrix site_parity(int n);                  // antidiagonal permutation, n x n
RealMatrix parity_matrix(Parity kind, int n);   // 2n x 2n

struct SymmetryReport {
  /* model-level check: couplings map onto themselves under parity + conjugation */
  bool huber_applicable = true;   // false when baths are not real
  bool huber_hamiltonian = false;
  bool huber_baths = false;
  double huber_hamiltonian_residual = 0.0;
  double huber_baths_residual = 0.0;
  std::vector<int> unmatched_baths;

  /* matrix-level check on x */
  bool matrix_pt = false;       // P conj(X) P = -X
  bool matrix_anti_pt = false;  // P conj(X) P = +X
  double pt_residual = 0.0;
  double anti_pt_residual = 0.0;
};

/* Coupling-level symmetry: h and k must satisfy P conj(h) P = h and
 * P conj(k) P = k; every bath (l, k) must have a partner bath (possibly
 * itself) equal to (P k, P l) within tol. Complex baths mark the check
 * not applicable. Residuals are relative. */
SymmetryReport check_huber(const QuadraticModel& model, double tol = 1e-10);

/* Matrix-level symmetry of x under the chosen parity realization. */
SymmetryReport check_matrix_pt(const ComplexMatrix& x, Parity parity, double tol = 1e-10);

enum class PtClass { unbroken, broken, mixed };

/* Classifies a rate spectrum: unbroken when every real part vanishes, broken
 * when every nonzero real part comes with a partner of opposite real part and
 * equal imaginary part, mixed otherwise. */
PtClass classify_beta_pt(const EigenClusters& betas, double tol = 1e-10);
const char* pt_class_name(PtClass c);

}  // namespace thirdq

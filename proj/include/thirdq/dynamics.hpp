#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thirdq/model.hpp"
#include "thirdq/numerics.hpp"

namespace thirdq {

/* First and second moments in doubled ordering: psi = (<a_1>..<a_n>, <a_1^dag>..),
 * z blocks [[<a_i a_j>, <a_j^dag a_i>], [<a_i^dag a_j>, <a_i^dag a_j^dag>]]. */
struct MomentState {
  ComplexVector psi;
  ComplexMatrix z;
  double t = 0.0;
};

/* Product-like initial data: occupations nbar per mode, optional coherent
 * amplitudes; cross correlations start at zero. */
MomentState occupation_state(const RealVector& nbar, const ComplexVector& amplitudes = {});

struct EvolveOptions {
  bool cross_check = true;       // integrate the same ODE independently and compare
  double rk_tol = 1e-10;         // adaptive integrator tolerance
  double rk4_step_scale = 1e-3;  // fixed-step size = scale / ||x||_F
  double quad_tol = 1e-10;       // adaptive quadrature tolerance (resonant source term)
  double resonance_tol = 1e-8;   // |beta_i + beta_j| below this (relative) forces quadrature
  double cond_cap = 1e8;         // eigenvector conditioning cap for the spectral route
  double norm_cap = 1e12;        // truncate the series once moments exceed this
  double agree_tol = 1e-7;       // dual-path agreement threshold
};

struct FirstMomentSeries {
  std::vector<double> times;
  std::vector<ComplexVector> psi;
  double cross_check_error = 0.0;
  bool capped = false;
};

/* psi(t) = expm(-2 x^T t) psi0, cross-checked against direct integration.
 * Initial data sits at t = 0; times must be nondecreasing and nonnegative. */
FirstMomentSeries evolve_first(const ComplexMatrix& x, const ComplexVector& psi0,
                               const std::vector<double>& times,
                               const EvolveOptions& opts = {});

struct SecondMomentSeries {
  std::vector<double> times;
  std::vector<ComplexMatrix> z;
  double path_discrepancy = 0.0;  // max over samples of relative closed-form vs RK4 gap
  bool discrepancy_flag = false;
  bool resonant_fallback = false;  // spectral resolution unusable; quadrature used
  bool capped = false;
};

/* z(t) = e^{-2t x^T} z0 e^{-2t x} + int_0^t e^{-2s x^T} (2y) e^{-2s x} ds,
 * evaluated through the spectral resolution of x when safe, otherwise by
 * adaptive quadrature; always compared against fixed-step integration. */
SecondMomentSeries evolve_second(const ComplexMatrix& x, const ComplexMatrix& y,
                                 const ComplexMatrix& z0, const std::vector<double>& times,
                                 const EvolveOptions& opts = {});

struct StationaryResult {
  ComplexMatrix z;
  double residual = 0.0;  // ||x^T z + z x - y||_F
};

/* Unique stationary covariance from x^T z + z x = y. Throws
 * NoUniqueSolutionError ("no unique stationary covariance") at resonance. */
StationaryResult stationary_second(const ComplexMatrix& x, const ComplexMatrix& y);

struct ObservableSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<Complex>> values;  // [name][time]
  std::vector<std::string> warnings;
};

/* Per-mode amplitudes a_i, occupations n_i, and with a frame also mz_i = <S_i^z>/S. */
ObservableSeries observable_series(const std::vector<MomentState>& states,
                                   const std::optional<HPFrame>& frame = {});

}  // namespace thirdq

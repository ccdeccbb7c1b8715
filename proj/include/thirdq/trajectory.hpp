#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "thirdq/types.hpp"

namespace thirdq {

using SparseC = Eigen::SparseMatrix<Complex>;

/* Two large spins of length S: exchange g/(2S)(S_A^+ S_B^- + h.c.), gain
 * (gamma_g/2S) D[S_A^+] and loss (gamma_l/2S) D[S_B^-] with
 * D[c] rho = 2 c rho c^dag - c^dag c rho - rho c^dag c. */
struct SpinModel {
  double spin = 0.5;
  double g = 0.0;
  double gamma_g = 0.0;
  double gamma_l = 0.0;

  int site_dim() const { return static_cast<int>(2.0 * spin + 1.5); }
  int dim() const { return site_dim() * site_dim(); }
};

/* Validates: spin half-integer in (0, 15], rates nonnegative. */
SpinModel make_spin_model(double spin, double g, double gamma_g, double gamma_l);

struct SpinOperators {
  SparseC h;
  std::vector<SparseC> jumps;         // S_A^+, S_B^-
  std::vector<double> rates;          // gamma_g/2S, gamma_l/2S
  std::vector<RealVector> ctc;        // diagonal of c^dag c per jump
  RealVector sz_a, sz_b;              // diagonal of S^z per site
};

SpinOperators build_operators(const SpinModel& model);

/* Product basis state |S, ma> (x) |S, mb>; index = (ma+S)(2S+1) + (mb+S). */
ComplexVector basis_state(const SpinModel& model, double ma, double mb);
ComplexMatrix product_density(const SpinModel& model, double ma, double mb);

struct LindbladOptions {
  double dt = 0.0;          // 0 selects a step from the generator norm
  double trace_tol = 1e-6;  // trace drift triggering a step halving
  int max_halvings = 8;
};

struct LindbladResult {
  std::vector<double> times;
  std::vector<double> mz_a, mz_b;  // <S^z>/S
  ComplexMatrix rho_final;
  double dt_used = 0.0;
  int halvings = 0;
};

/* Fixed-step RK4 master-equation integration with hermitization each step
 * and automatic step halving on trace drift. */
LindbladResult lindblad_evolve(const SpinModel& model, const ComplexMatrix& rho0,
                               const std::vector<double>& times,
                               const LindbladOptions& opts = {});

struct SteadyOptions {
  double tol = 1e-9;     // entrywise 1-norm of d rho / dt
  double t_max = 400.0;
  double dt = 0.0;
};

struct SteadyResult {
  ComplexMatrix rho;
  double t = 0.0;
  double purity = 0.0;
  double mz_a = 0.0, mz_b = 0.0;  // <S^z>/S
  double residual = 0.0;
  bool converged = false;
};

/* Integrates from the maximally mixed state until the generator residual
 * (entrywise 1-norm of d rho/dt) drops below tol or t_max is reached. */
SteadyResult steady_state(const SpinModel& model, const SteadyOptions& opts = {});

struct McOptions {
  double max_jump_prob = 0.05;  // bound on per-step total jump probability
  double dt_cap = 1e-3;
  double dt = 0.0;  // 0 selects min(max_jump_prob/rate_bound, dt_cap, min interval)
};

struct JumpRecord {
  double t = 0.0;
  int channel = 0;
};

struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> mz_a;  // [trajectory][time], <S_A^z>/S
  std::vector<double> mean, sem;          // sem uses the n-1 variance estimate
  std::vector<std::vector<JumpRecord>> jumps;
  std::vector<std::uint64_t> stream_seeds;
  double dt_used = 0.0;
  bool dt_reduced = false;  // a step exceeded max_jump_prob and forced halving
};

/* Quantum-jump unravelling: deterministic drift under the non-hermitian
 * effective Hamiltonian with renormalization, jumps drawn per step from one
 * uniform draw per step across channels. Trajectory i uses stream_seed(seed, i),
 * so results are reproducible bit for bit and independent of scheduling. */
TrajectoryEnsemble mc_trajectories(const SpinModel& model, const ComplexVector& psi0,
                                   const std::vector<double>& times, int n_traj,
                                   std::uint64_t seed, const McOptions& opts = {});

}  // namespace thirdq

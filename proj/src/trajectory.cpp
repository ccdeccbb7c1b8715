#include "thirdq/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thirdq/rng.hpp"

namespace thirdq {

namespace {

bool is_half_integer(double v) { return std::abs(2.0 * v - std::round(2.0 * v)) < 1e-9; }

int level_index(double spin, double m, const char* what) {
  double a = m + spin;
  if (!is_half_integer(m) || std::abs(a - std::round(a)) > 1e-9 || a < -1e-9 ||
      a > 2.0 * spin + 1e-9) {
    throw std::invalid_argument(std::string(what) + ": m = " + std::to_string(m) +
                                " is not a level of a spin-" + std::to_string(spin) + " site");
  }
  return static_cast<int>(std::round(a));
}

/* |S, m+1><S, m| amplitudes sqrt(S(S+1) - m(m+1)) */
SparseC site_raising(double spin) {
  const int d = static_cast<int>(2.0 * spin + 1.5);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int a = 0; a + 1 < d; ++a) {
    double m = -spin + a;
    trips.emplace_back(a + 1, a, Complex(std::sqrt(spin * (spin + 1.0) - m * (m + 1.0)), 0.0));
  }
  SparseC sp(d, d);
  sp.setFromTriplets(trips.begin(), trips.end());
  return sp;
}

SparseC kron_sparse(const SparseC& a, const SparseC& b) {
  const int ar = static_cast<int>(a.rows());
  const int br = static_cast<int>(b.rows());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseC::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseC::InnerIterator ib(b, kb); ib; ++ib) {
          trips.emplace_back(static_cast<int>(ia.row()) * br + static_cast<int>(ib.row()),
                             static_cast<int>(ia.col()) * br + static_cast<int>(ib.col()),
                             ia.value() * ib.value());
        }
      }
    }
  }
  SparseC out(ar * br, static_cast<int>(a.cols()) * static_cast<int>(b.cols()));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SparseC identity_sparse(int d) {
  SparseC id(d, d);
  id.setIdentity();
  return id;
}

double sparse_row_sum_norm(const SparseC& a) {
  RealVector sums = RealVector::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseC::InnerIterator it(a, k); it; ++it) {
      sums(it.row()) += std::abs(it.value());
    }
  }
  return sums.size() ? sums.maxCoeff() : 0.0;
}

void check_sample_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("sample times must not be empty");
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw std::invalid_argument("sample times must be finite and nonnegative");
    }
    if (i > 0 && times[i] < prev) {
      throw std::invalid_argument("sample times must be nondecreasing");
    }
    prev = times[i];
  }
}

struct MasterEquation {
  SparseC k_drift, k_drift_adj;
  std::vector<SparseC> jumps, jumps_adj;
  std::vector<double> twice_rates;

  ComplexMatrix rhs(const ComplexMatrix& rho) const {
    ComplexMatrix r = k_drift * rho;
    r += rho * k_drift_adj;
    for (std::size_t mu = 0; mu < jumps.size(); ++mu) {
      if (twice_rates[mu] == 0.0) continue;
      ComplexMatrix tmp = rho * jumps_adj[mu];
      r += twice_rates[mu] * (jumps[mu] * tmp);
    }
    return r;
  }
};

MasterEquation assemble(const SpinOperators& ops, int dim) {
  MasterEquation me;
  const Complex i1(0.0, 1.0);
  SparseC decay(dim, dim);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int i = 0; i < dim; ++i) {
    double v = 0.0;
    for (std::size_t mu = 0; mu < ops.jumps.size(); ++mu) {
      v += ops.rates[mu] * ops.ctc[mu](i);
    }
    trips.emplace_back(i, i, Complex(v, 0.0));
  }
  decay.setFromTriplets(trips.begin(), trips.end());
  me.k_drift = (-i1 * ops.h - decay).pruned();
  me.k_drift_adj = SparseC(me.k_drift.adjoint());
  for (std::size_t mu = 0; mu < ops.jumps.size(); ++mu) {
    me.jumps.push_back(ops.jumps[mu]);
    me.jumps_adj.push_back(SparseC(ops.jumps[mu].adjoint()));
    me.twice_rates.push_back(2.0 * ops.rates[mu]);
  }
  return me;
}

double default_step(const SpinModel& model, const SpinOperators& ops) {
  double jump_scale = 0.0;
  for (std::size_t mu = 0; mu < ops.jumps.size(); ++mu) {
    jump_scale += ops.rates[mu] * ops.ctc[mu].maxCoeff();
  }
  double bound = 2.0 * sparse_row_sum_norm(ops.h) + 4.0 * jump_scale;
  (void)model;
  return std::min(0.02, bound > 0.0 ? 2.0 / bound : 0.02);
}

double diag_expectation(const RealVector& diag, const ComplexMatrix& rho) {
  double v = 0.0;
  for (int i = 0; i < diag.size(); ++i) v += diag(i) * rho(i, i).real();
  return v;
}

}  // namespace

SpinModel make_spin_model(double spin, double g, double gamma_g, double gamma_l) {
  if (!(spin > 0.0) || spin > 15.0 || !is_half_integer(spin)) {
    throw std::invalid_argument("make_spin_model: spin must be a half-integer in (0, 15]");
  }
  if (!std::isfinite(g)) throw std::invalid_argument("make_spin_model: g must be finite");
  if (!(gamma_g >= 0.0) || !(gamma_l >= 0.0)) {
    throw std::invalid_argument("make_spin_model: rates must be nonnegative");
  }
  return SpinModel{spin, g, gamma_g, gamma_l};
}

SpinOperators build_operators(const SpinModel& model) {
  const double s = model.spin;
  const int d1 = model.site_dim();
  const int dim = d1 * d1;

  SparseC sp = site_raising(s);
  SparseC sm = SparseC(sp.adjoint());
  SparseC id = identity_sparse(d1);

  SpinOperators ops;
  SparseC exchange = kron_sparse(sp, sm);
  ops.h = (model.g / (2.0 * s)) * (exchange + SparseC(exchange.adjoint()));
  ops.jumps = {kron_sparse(sp, id), kron_sparse(id, sm)};
  ops.rates = {model.gamma_g / (2.0 * s), model.gamma_l / (2.0 * s)};

  /* diagonals of c^dag c: S^- S^+ for the raising jump, S^+ S^- for lowering */
  RealVector up_ctc(dim), down_ctc(dim);
  ops.sz_a.resize(dim);
  ops.sz_b.resize(dim);
  for (int a = 0; a < d1; ++a) {
    const double ma = -s + a;
    for (int b = 0; b < d1; ++b) {
      const double mb = -s + b;
      const int idx = a * d1 + b;
      up_ctc(idx) = s * (s + 1.0) - ma * (ma + 1.0);
      down_ctc(idx) = s * (s + 1.0) - mb * (mb - 1.0);
      ops.sz_a(idx) = ma;
      ops.sz_b(idx) = mb;
    }
  }
  ops.ctc = {up_ctc, down_ctc};
  return ops;
}

ComplexVector basis_state(const SpinModel& model, double ma, double mb) {
  const int d1 = model.site_dim();
  const int ia = level_index(model.spin, ma, "basis_state");
  const int ib = level_index(model.spin, mb, "basis_state");
  ComplexVector psi = ComplexVector::Zero(model.dim());
  psi(ia * d1 + ib) = 1.0;
  return psi;
}

ComplexMatrix product_density(const SpinModel& model, double ma, double mb) {
  ComplexVector psi = basis_state(model, ma, mb);
  return psi * psi.adjoint();
}

LindbladResult lindblad_evolve(const SpinModel& model, const ComplexMatrix& rho0,
                               const std::vector<double>& times, const LindbladOptions& opts) {
  const int dim = model.dim();
  if (rho0.rows() != dim || rho0.cols() != dim) {
    throw std::invalid_argument("lindblad_evolve: rho0 has wrong dimension");
  }
  require_finite(rho0, "lindblad_evolve");
  check_sample_times(times);
  if (std::abs(rho0.trace().real() - 1.0) > 1e-8 || std::abs(rho0.trace().imag()) > 1e-8) {
    throw std::invalid_argument("lindblad_evolve: rho0 must have unit trace");
  }

  SpinOperators ops = build_operators(model);
  MasterEquation me = assemble(ops, dim);
  double dt = opts.dt > 0.0 ? opts.dt : default_step(model, ops);

  LindbladResult out;
  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt) {
    out.times.clear();
    out.mz_a.clear();
    out.mz_b.clear();
    ComplexMatrix rho = rho0;
    double t = 0.0;
    bool drifted = false;

    for (double ts : times) {
      if (ts > t) {
        const int n = std::max(1, static_cast<int>(std::ceil((ts - t) / dt - 1e-12)));
        const double h = (ts - t) / n;
        for (int i = 0; i < n; ++i) {
          ComplexMatrix k1 = me.rhs(rho);
          ComplexMatrix k2 = me.rhs(rho + (h / 2.0) * k1);
          ComplexMatrix k3 = me.rhs(rho + (h / 2.0) * k2);
          ComplexMatrix k4 = me.rhs(rho + h * k3);
          rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
          rho = 0.5 * (rho + rho.adjoint().eval());
        }
        t = ts;
        if (std::abs(rho.trace().real() - 1.0) > opts.trace_tol) {
          drifted = true;
          break;
        }
      }
      out.times.push_back(ts);
      out.mz_a.push_back(diag_expectation(ops.sz_a, rho) / model.spin);
      out.mz_b.push_back(diag_expectation(ops.sz_b, rho) / model.spin);
    }

    if (!drifted) {
      out.rho_final = std::move(rho);
      out.dt_used = dt;
      out.halvings = attempt;
      return out;
    }
    dt /= 2.0;
  }
  throw std::runtime_error("lindblad_evolve: trace drift persists after " +
                           std::to_string(opts.max_halvings) + " step halvings");
}

SteadyResult steady_state(const SpinModel& model, const SteadyOptions& opts) {
  const int dim = model.dim();
  SpinOperators ops = build_operators(model);
  MasterEquation me = assemble(ops, dim);
  const double dt = opts.dt > 0.0 ? opts.dt : default_step(model, ops);

  ComplexMatrix rho = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  double t = 0.0;
  const int chunk = std::max(1, static_cast<int>(std::round(0.5 / dt)));

  SteadyResult out;
  while (true) {
    ComplexMatrix deriv = me.rhs(rho);
    out.residual = deriv.cwiseAbs().sum();
    if (out.residual < opts.tol) {
      out.converged = true;
      break;
    }
    if (t >= opts.t_max) break;

    for (int i = 0; i < chunk; ++i) {
      ComplexMatrix k1 = me.rhs(rho);
      ComplexMatrix k2 = me.rhs(rho + (dt / 2.0) * k1);
      ComplexMatrix k3 = me.rhs(rho + (dt / 2.0) * k2);
      ComplexMatrix k4 = me.rhs(rho + dt * k3);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      rho = 0.5 * (rho + rho.adjoint().eval());
      t += dt;
    }
    rho /= rho.trace().real();
  }

  out.rho = rho;
  out.t = t;
  out.purity = rho.squaredNorm();
  out.mz_a = diag_expectation(ops.sz_a, rho) / model.spin;
  out.mz_b = diag_expectation(ops.sz_b, rho) / model.spin;
  return out;
}

TrajectoryEnsemble mc_trajectories(const SpinModel& model, const ComplexVector& psi0,
                                   const std::vector<double>& times, int n_traj,
                                   std::uint64_t seed, const McOptions& opts) {
  const int dim = model.dim();
  if (psi0.size() != dim) {
    throw std::invalid_argument("mc_trajectories: psi0 has wrong dimension");
  }
  if (psi0.norm() < 1e-300) {
    throw std::invalid_argument("mc_trajectories: psi0 is zero");
  }
  if (n_traj < 1) throw std::invalid_argument("mc_trajectories: n_traj must be positive");
  check_sample_times(times);

  SpinOperators ops = build_operators(model);
  const int n_jumps = static_cast<int>(ops.jumps.size());
  if (n_jumps > 8) throw std::logic_error("mc_trajectories: too many jump channels");

  double rate_bound = 0.0;
  for (int mu = 0; mu < n_jumps; ++mu) {
    rate_bound += 2.0 * ops.rates[mu] * ops.ctc[mu].maxCoeff();
  }
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] > times[i - 1]) min_gap = std::min(min_gap, times[i] - times[i - 1]);
  }
  if (times.front() > 0.0) min_gap = std::min(min_gap, times.front());

  double dt = opts.dt;
  if (dt <= 0.0) {
    dt = opts.dt_cap;
    if (rate_bound > 0.0) dt = std::min(dt, opts.max_jump_prob / rate_bound);
    if (std::isfinite(min_gap)) dt = std::min(dt, min_gap);
  }

  const ComplexVector psi_init = psi0 / psi0.norm();
  const Complex i1(0.0, 1.0);

  TrajectoryEnsemble out;
  out.times = times;
  out.dt_used = dt;

  const int n_times = static_cast<int>(times.size());
  out.mz_a.assign(n_traj, std::vector<double>(n_times, 0.0));
  out.jumps.resize(n_traj);

  for (int traj = 0; traj < n_traj; ++traj) {
    const std::uint64_t sseed = stream_seed(seed, static_cast<std::uint64_t>(traj));
    out.stream_seeds.push_back(sseed);

    double local_dt = dt;
    bool done = false;
    for (int attempt = 0; attempt < 60 && !done; ++attempt) {
      SplitMix64 rng(sseed);
      ComplexVector psi = psi_init;
      std::vector<JumpRecord> jumps;
      std::vector<double> record(n_times, 0.0);
      double t = 0.0;
      bool violated = false;

      for (int k = 0; k < n_times && !violated; ++k) {
        const double ts = times[k];
        if (ts > t) {
          const int nsteps = std::max(1, static_cast<int>(std::ceil((ts - t) / local_dt - 1e-12)));
          const double h = (ts - t) / nsteps;
          for (int stp = 0; stp < nsteps; ++stp) {
            double q_tot = 0.0;
            double q[8] = {0.0};
            for (int mu = 0; mu < n_jumps; ++mu) {
              double amp2 = 0.0;
              const RealVector& c2 = ops.ctc[mu];
              for (int i = 0; i < dim; ++i) amp2 += c2(i) * std::norm(psi(i));
              q[mu] = 2.0 * ops.rates[mu] * amp2 * h;
              q_tot += q[mu];
            }
            if (q_tot > opts.max_jump_prob) {
              violated = true;
              break;
            }
            const double u = rng.u01();
            if (u < q_tot) {
              double acc = 0.0;
              int chosen = n_jumps - 1;
              for (int mu = 0; mu < n_jumps; ++mu) {
                acc += q[mu];
                if (u < acc) {
                  chosen = mu;
                  break;
                }
              }
              psi = ops.jumps[chosen] * psi;
              const double nrm = psi.norm();
              if (nrm < 1e-300) {
                throw std::runtime_error("mc_trajectories: jump annihilated the state");
              }
              psi /= nrm;
              jumps.push_back(JumpRecord{t + h * (stp + 1.0), chosen});
            } else {
              ComplexVector hpsi = ops.h * psi;
              for (int mu = 0; mu < n_jumps; ++mu) {
                if (ops.rates[mu] == 0.0) continue;
                hpsi -= i1 * ops.rates[mu] * ops.ctc[mu].cast<Complex>().cwiseProduct(psi);
              }
              psi -= i1 * h * hpsi;
              psi /= psi.norm();
            }
          }
          t = ts;
        }
        if (!violated) {
          double mz = 0.0;
          for (int i = 0; i < dim; ++i) mz += ops.sz_a(i) * std::norm(psi(i));
          record[k] = mz / model.spin;
        }
      }

      if (violated) {
        local_dt /= 2.0;
        out.dt_reduced = true;
        continue;
      }
      out.mz_a[traj] = std::move(record);
      out.jumps[traj] = std::move(jumps);
      done = true;
    }
    if (!done) {
      throw std::runtime_error("mc_trajectories: jump probability bound kept failing");
    }
  }

  out.mean.assign(n_times, 0.0);
  out.sem.assign(n_times, 0.0);
  for (int k = 0; k < n_times; ++k) {
    double sum = 0.0;
    for (int traj = 0; traj < n_traj; ++traj) sum += out.mz_a[traj][k];
    const double mean = sum / n_traj;
    out.mean[k] = mean;
    if (n_traj > 1) {
      double ss = 0.0;
      for (int traj = 0; traj < n_traj; ++traj) {
        const double d = out.mz_a[traj][k] - mean;
        ss += d * d;
      }
      out.sem[k] = std::sqrt(ss / (n_traj - 1)) / std::sqrt(static_cast<double>(n_traj));
    }
  }
  return out;
}

}  // namespace thirdq

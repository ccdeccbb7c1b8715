#include "thirdq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/LU>

#include "rk.hpp"

namespace thirdq {

namespace {

Complex phi1(Complex x) {
  /* (1 - e^{-x})/x, series near zero */
  if (std::abs(x) < 1e-4) {
    return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0 + x * x * x * x / 120.0;
  }
  return (1.0 - std::exp(-x)) / x;
}

void check_times(const std::vector<double>& times) {
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw std::invalid_argument("times must be finite and nonnegative");
    }
    if (i > 0 && times[i] < prev) {
      throw std::invalid_argument("times must be nondecreasing");
    }
    prev = times[i];
  }
}

/* adaptive Simpson for matrix-valued integrands */
template <typename F>
ComplexMatrix simpson_recurse(F& f, double a, double b, const ComplexMatrix& fa,
                              const ComplexMatrix& fm, const ComplexMatrix& fb,
                              const ComplexMatrix& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const ComplexMatrix flm = f(lm);
  const ComplexMatrix frm = f(rm);
  const ComplexMatrix left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
  const ComplexMatrix right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
  const ComplexMatrix sum = left + right;
  const double err = (sum - whole).norm() / 15.0;
  if (depth <= 0 || err <= tol * (1.0 + sum.norm())) {
    return sum + (sum - whole) / 15.0;
  }
  return simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
ComplexMatrix adaptive_simpson(F&& f, double a, double b, double tol) {
  if (b <= a) {
    ComplexMatrix probe = f(a);
    return ComplexMatrix::Zero(probe.rows(), probe.cols());
  }
  const double m = 0.5 * (a + b);
  const ComplexMatrix fa = f(a);
  const ComplexMatrix fm = f(m);
  const ComplexMatrix fb = f(b);
  const ComplexMatrix whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 30);
}

}  // namespace

MomentState occupation_state(const RealVector& nbar, const ComplexVector& amplitudes) {
  const int n = static_cast<int>(nbar.size());
  if (n < 1) throw std::invalid_argument("occupation_state: need at least one mode");
  if (amplitudes.size() != 0 && amplitudes.size() != n) {
    throw std::invalid_argument("occupation_state: amplitudes length mismatch");
  }
  for (int i = 0; i < n; ++i) {
    if (nbar(i) < 0.0) throw std::invalid_argument("occupation_state: negative occupation");
  }

  MomentState st;
  st.psi = ComplexVector::Zero(2 * n);
  if (amplitudes.size() == n) {
    st.psi.head(n) = amplitudes;
    st.psi.tail(n) = amplitudes.conjugate();
  }
  st.z = ComplexMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    st.z(i, n + i) = nbar(i);  // <a_i^dag a_i> in the upper-right block
    st.z(n + i, i) = nbar(i);  // and in the lower-left block
  }
  st.t = 0.0;
  return st;
}

FirstMomentSeries evolve_first(const ComplexMatrix& x, const ComplexVector& psi0,
                               const std::vector<double>& times, const EvolveOptions& opts) {
  require_square(x, "evolve_first");
  require_finite(x, "evolve_first");
  if (psi0.size() != x.rows()) {
    throw std::invalid_argument("evolve_first: psi0 length must match x");
  }
  check_times(times);

  const ComplexMatrix gen = -2.0 * x.transpose();
  FirstMomentSeries out;

  ComplexVector psi_rk = psi0;
  double t_rk = 0.0;
  auto rhs = [&gen](double, const ComplexVector& v) -> ComplexVector { return gen * v; };

  for (double t : times) {
    ComplexMatrix propagator;
    try {
      propagator = expm(gen * t);
    } catch (const std::overflow_error&) {
      out.capped = true;
      break;
    }
    ComplexVector psi = propagator * psi0;
    if (!psi.allFinite() || psi.cwiseAbs().maxCoeff() > opts.norm_cap) {
      out.capped = true;
      break;
    }
    if (opts.cross_check) {
      psi_rk = detail::dopri5(rhs, psi_rk, t_rk, t, opts.rk_tol);
      t_rk = t;
      double diff = (psi - psi_rk).norm() / (1.0 + psi.norm());
      out.cross_check_error = std::max(out.cross_check_error, diff);
    }
    out.times.push_back(t);
    out.psi.push_back(std::move(psi));
  }
  return out;
}

SecondMomentSeries evolve_second(const ComplexMatrix& x, const ComplexMatrix& y,
                                 const ComplexMatrix& z0, const std::vector<double>& times,
                                 const EvolveOptions& opts) {
  require_square(x, "evolve_second");
  require_finite(x, "evolve_second");
  const int d = static_cast<int>(x.rows());
  if (y.rows() != d || y.cols() != d || z0.rows() != d || z0.cols() != d) {
    throw std::invalid_argument("evolve_second: dimension mismatch");
  }
  require_finite(y, "evolve_second");
  require_finite(z0, "evolve_second");
  check_times(times);

  SecondMomentSeries out;
  const ComplexMatrix xt = x.transpose();
  const ComplexMatrix two_y = 2.0 * y;

  /* spectral resolution is unusable at resonance (beta_i + beta_j ~ 0) or for
   * an ill-conditioned eigenbasis */
  EigenClusters ec = eig(x);
  double beta_scale = 0.0;
  for (int i = 0; i < d; ++i) beta_scale = std::max(beta_scale, std::abs(ec.values(i)));
  double min_pair = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      min_pair = std::min(min_pair, std::abs(ec.values(i) + ec.values(j)));
    }
  }
  const bool resonant = min_pair <= opts.resonance_tol * std::max(beta_scale, 1.0);
  const bool ill_conditioned = !(ec.condition <= opts.cond_cap);
  out.resonant_fallback = resonant || ill_conditioned;

  ComplexMatrix v, v_inv, v_inv_t, w0, g;
  if (!out.resonant_fallback) {
    v = ec.vectors;
    v_inv = Eigen::PartialPivLU<ComplexMatrix>(v).inverse();
    v_inv_t = v_inv.transpose();
    w0 = v.transpose() * z0 * v;
    g = v.transpose() * two_y * v;
  }

  auto integrand = [&](double s) -> ComplexMatrix {
    ComplexMatrix es = expm(-2.0 * s * x);
    return es.transpose() * two_y * es;
  };

  /* RK4 comparison path */
  ComplexMatrix z_rk = z0;
  double t_rk = 0.0;
  const double rk_step = opts.rk4_step_scale / std::max(x.norm(), 1e-3);
  auto rhs = [&](double, const ComplexMatrix& z) -> ComplexMatrix {
    return -2.0 * (xt * z + z * x) + two_y;
  };

  ComplexMatrix accum = ComplexMatrix::Zero(d, d);  // integral term for the quadrature route
  double t_quad = 0.0;

  for (double t : times) {
    ComplexMatrix z_closed(d, d);
    bool overflow = false;
    if (!out.resonant_fallback) {
      ComplexVector e(d);
      for (int i = 0; i < d; ++i) e(i) = std::exp(-2.0 * t * ec.values(i));
      ComplexMatrix inner(d, d);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          Complex pair = ec.values(i) + ec.values(j);
          inner(i, j) = e(i) * w0(i, j) * e(j) + g(i, j) * t * phi1(2.0 * t * pair);
        }
      }
      z_closed = v_inv_t * inner * v_inv;
      overflow = !z_closed.allFinite();
    } else {
      try {
        accum += adaptive_simpson(integrand, t_quad, t, opts.quad_tol);
        t_quad = t;
        ComplexMatrix et = expm(-2.0 * t * x);
        z_closed = et.transpose() * z0 * et + accum;
      } catch (const std::overflow_error&) {
        overflow = true;
      }
      overflow = overflow || !z_closed.allFinite();
    }
    if (overflow || z_closed.cwiseAbs().maxCoeff() > opts.norm_cap) {
      out.capped = true;
      break;
    }

    detail::rk4_fixed(rhs, z_rk, t_rk, t, rk_step);
    t_rk = t;
    double diff = (z_closed - z_rk).norm() / (1.0 + z_closed.norm());
    out.path_discrepancy = std::max(out.path_discrepancy, diff);

    out.times.push_back(t);
    out.z.push_back(0.5 * (z_closed + z_closed.transpose().eval()));
  }
  out.discrepancy_flag = out.path_discrepancy > opts.agree_tol;
  return out;
}

StationaryResult stationary_second(const ComplexMatrix& x, const ComplexMatrix& y) {
  require_square(x, "stationary_second");
  try {
    SylvesterSolution sol = solve_sylvester(x.transpose(), x, y);
    StationaryResult out;
    out.z = 0.5 * (sol.z + sol.z.transpose().eval());
    out.residual = (x.transpose() * out.z + out.z * x - y).norm();
    return out;
  } catch (const NoUniqueSolutionError& e) {
    throw NoUniqueSolutionError(
        "no unique stationary covariance: min |beta_i + beta_j| = " +
            std::to_string(e.min_eigenvalue_sum),
        e.min_eigenvalue_sum);
  }
}

ObservableSeries observable_series(const std::vector<MomentState>& states,
                                   const std::optional<HPFrame>& frame) {
  ObservableSeries out;
  if (states.empty()) return out;

  const int d = static_cast<int>(states.front().psi.size());
  if (d % 2 != 0 || d == 0) {
    throw std::invalid_argument("observable_series: states must live on the doubled space");
  }
  const int n = d / 2;
  if (frame && static_cast<int>(frame->orientations.size()) != n) {
    throw std::invalid_argument("observable_series: frame covers a different mode count");
  }

  for (int i = 0; i < n; ++i) out.names.push_back("a" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) out.names.push_back("n" + std::to_string(i + 1));
  if (frame) {
    for (int i = 0; i < n; ++i) out.names.push_back("mz" + std::to_string(i + 1));
  }
  out.values.assign(out.names.size(), {});

  std::set<std::string> warned;
  for (const auto& st : states) {
    if (st.psi.size() != d || st.z.rows() != d || st.z.cols() != d) {
      throw std::invalid_argument("observable_series: inconsistent state dimensions");
    }
    out.times.push_back(st.t);
    for (int i = 0; i < n; ++i) out.values[i].push_back(st.psi(i));
    for (int i = 0; i < n; ++i) {
      Complex occ = st.z(n + i, i);
      out.values[n + i].push_back(occ);
      if (frame) {
        HPValue hv = hp_observable(occ, *frame, i);
        out.values[2 * n + i].push_back(Complex(hv.value, 0.0));
        if (hv.warning && warned.insert(*hv.warning).second) {
          out.warnings.push_back(*hv.warning);
        }
      }
    }
  }
  return out;
}

}  // namespace thirdq

#include "thirdq/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thirdq {

RealMatrix site_parity(int n) {
  if (n <= 0) throw std::invalid_argument("site_parity: n must be positive");
  RealMatrix p = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, n - 1 - i) = 1.0;
  return p;
}

RealMatrix parity_matrix(Parity kind, int n) {
  RealMatrix pn = site_parity(n);
  RealMatrix p = RealMatrix::Zero(2 * n, 2 * n);
  if (kind == Parity::reflection) {
    p.topLeftCorner(n, n) = pn;
    p.bottomRightCorner(n, n) = pn;
  } else {
    p.topRightCorner(n, n) = pn;
    p.bottomLeftCorner(n, n) = pn;
  }
  return p;
}

SymmetryReport check_huber(const QuadraticModel& model, double tol) {
  SymmetryReport rep;
  const int n = model.n;
  const RealMatrix p = site_parity(n);

  double coupling_scale = std::max(model.h.norm(), model.k.norm());
  double res_h = 0.0;
  if (coupling_scale > 0.0) {
    res_h = std::max((model.h - p * model.h.conjugate() * p).norm(),
                     (model.k - p * model.k.conjugate() * p).norm()) /
            coupling_scale;
  }
  rep.huber_hamiltonian_residual = res_h;
  rep.huber_hamiltonian = res_h <= tol;

  double bath_scale = 0.0;
  double bath_imag = 0.0;
  for (const auto& b : model.baths) {
    bath_scale = std::max(bath_scale, std::sqrt(b.l.squaredNorm() + b.k.squaredNorm()));
    bath_imag = std::max({bath_imag, b.l.imag().cwiseAbs().maxCoeff(),
                          b.k.imag().cwiseAbs().maxCoeff()});
  }
  if (bath_imag > tol * std::max(bath_scale, 1.0)) {
    /* the pairing criterion is stated for real couplings only */
    rep.huber_applicable = false;
    rep.huber_baths = false;
    rep.huber_baths_residual = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }

  /* every bath must find a partner realizing the parity-swapped pair */
  double worst = 0.0;
  for (std::size_t mu = 0; mu < model.baths.size(); ++mu) {
    const ComplexVector target_l = p * model.baths[mu].k;
    const ComplexVector target_k = p * model.baths[mu].l;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cand : model.baths) {
      double d = std::sqrt((cand.l - target_l).squaredNorm() + (cand.k - target_k).squaredNorm());
      best = std::min(best, d);
    }
    if (bath_scale > 0.0) best /= bath_scale;
    if (best > tol) rep.unmatched_baths.push_back(static_cast<int>(mu));
    worst = std::max(worst, best);
  }
  rep.huber_baths_residual = model.baths.empty() ? 0.0 : worst;
  rep.huber_baths = rep.unmatched_baths.empty();
  return rep;
}

SymmetryReport check_matrix_pt(const ComplexMatrix& x, Parity parity, double tol) {
  require_square(x, "check_matrix_pt");
  require_finite(x, "check_matrix_pt");
  if (x.rows() % 2 != 0) {
    throw std::invalid_argument("check_matrix_pt: matrix must act on the doubled space");
  }
  const int n = static_cast<int>(x.rows()) / 2;
  const RealMatrix p = parity_matrix(parity, n);
  const ComplexMatrix mapped = p * x.conjugate() * p;

  SymmetryReport rep;
  const double scale = x.norm();
  if (scale == 0.0) {
    rep.matrix_pt = rep.matrix_anti_pt = true;
    return rep;
  }
  rep.pt_residual = (mapped + x).norm() / scale;
  rep.anti_pt_residual = (mapped - x).norm() / scale;
  rep.matrix_pt = rep.pt_residual <= tol;
  rep.matrix_anti_pt = rep.anti_pt_residual <= tol;
  return rep;
}

PtClass classify_beta_pt(const EigenClusters& betas, double tol) {
  const auto& v = betas.values;
  double scale = 0.0;
  for (int i = 0; i < v.size(); ++i) scale = std::max(scale, std::abs(v(i)));
  const double eps = tol * std::max(scale, 1.0);

  bool all_real_zero = true;
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i).real()) > eps) all_real_zero = false;
  }
  if (all_real_zero) return PtClass::unbroken;

  /* broken: every rate with nonzero real part pairs with its reflection */
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i).real()) <= eps) continue;
    bool found = false;
    for (int j = 0; j < v.size(); ++j) {
      if (std::abs(v(j).real() + v(i).real()) <= eps &&
          std::abs(v(j).imag() - v(i).imag()) <= eps) {
        found = true;
        break;
      }
    }
    if (!found) return PtClass::mixed;
  }
  return PtClass::broken;
}

const char* pt_class_name(PtClass c) {
  switch (c) {
    case PtClass::unbroken: return "unbroken";
    case PtClass::broken: return "broken";
    case PtClass::mixed: return "mixed";
  }
  return "?";
}

}  // namespace thirdq

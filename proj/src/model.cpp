#include "thirdq/model.hpp"

#include <algorithm>
#include <cmath>

namespace thirdq {

namespace {

constexpr double kEntryTol = 1e-12;

void check_entry_symmetry(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  double worst = (a - b).cwiseAbs().maxCoeff();
  if (worst > kEntryTol) {
    throw std::invalid_argument(std::string("make_quadratic_model: ") + what +
                                " violated by " + std::to_string(worst));
  }
}

double require_param(const Params& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("make_preset: missing parameter '" + key + "'");
  }
  if (!std::isfinite(it->second)) {
    throw std::invalid_argument("make_preset: parameter '" + key + "' is not finite");
  }
  return it->second;
}

double optional_param(const Params& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!std::isfinite(it->second)) {
    throw std::invalid_argument("make_preset: parameter '" + key + "' is not finite");
  }
  return it->second;
}

void reject_unknown(const Params& params, const std::vector<std::string>& known) {
  for (const auto& [key, value] : params) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("make_preset: unknown parameter '" + key + "'");
    }
  }
}

double require_rate(const Params& params, const std::string& key) {
  double v = require_param(params, key);
  if (v < 0.0) {
    throw std::invalid_argument("make_preset: rate '" + key + "' must be nonnegative, got " +
                                std::to_string(v));
  }
  return v;
}

double require_spin(const Params& params) {
  double s = optional_param(params, "spin", 1000.0);
  if (!(s > 0.0)) {
    throw std::invalid_argument("make_preset: 'spin' must be positive");
  }
  return s;
}

BathVector loss_bath(int n, int site, double rate) {
  BathVector b;
  b.l = ComplexVector::Zero(n);
  b.k = ComplexVector::Zero(n);
  b.l(site) = std::sqrt(rate);
  return b;
}

BathVector gain_bath(int n, int site, double rate) {
  BathVector b;
  b.l = ComplexVector::Zero(n);
  b.k = ComplexVector::Zero(n);
  b.k(site) = std::sqrt(rate);
  return b;
}

}  // namespace

QuadraticModel make_quadratic_model(const ComplexMatrix& h, const ComplexMatrix& k,
                                    std::vector<BathVector> baths) {
  require_square(h, "make_quadratic_model (H)");
  require_square(k, "make_quadratic_model (K)");
  require_finite(h, "make_quadratic_model (H)");
  require_finite(k, "make_quadratic_model (K)");
  const int n = static_cast<int>(h.rows());
  if (n < 1) {
    throw std::invalid_argument("make_quadratic_model: need at least one mode");
  }
  if (k.rows() != n) {
    throw std::invalid_argument("make_quadratic_model: H and K dimensions differ");
  }
  check_entry_symmetry(h, h.adjoint(), "hermiticity of H");
  check_entry_symmetry(k, k.transpose(), "symmetry of K");

  for (std::size_t mu = 0; mu < baths.size(); ++mu) {
    const auto& b = baths[mu];
    if (b.l.size() != n || b.k.size() != n) {
      throw std::invalid_argument("make_quadratic_model: bath " + std::to_string(mu) +
                                  " has wrong length");
    }
    if (!b.l.allFinite() || !b.k.allFinite()) {
      throw std::invalid_argument("make_quadratic_model: bath " + std::to_string(mu) +
                                  " has non-finite entries");
    }
  }

  QuadraticModel model;
  model.n = n;
  model.h = 0.5 * (h + h.adjoint().eval());
  model.k = 0.5 * (k + k.transpose().eval());
  model.baths = std::move(baths);
  return model;
}

BathMatrices build_bath_matrices(const QuadraticModel& model) {
  const int n = model.n;
  BathMatrices bm;
  bm.m = ComplexMatrix::Zero(n, n);
  bm.n = ComplexMatrix::Zero(n, n);
  bm.l = ComplexMatrix::Zero(n, n);
  for (const auto& b : model.baths) {
    bm.m += b.l * b.l.adjoint();
    bm.n += b.k * b.k.adjoint();
    bm.l += b.l * b.k.adjoint();
  }
  return bm;
}

StructureMatrices build_structure(const QuadraticModel& model) {
  const int n = model.n;
  BathMatrices bm = build_bath_matrices(model);
  const ComplexMatrix& h = model.h;
  const ComplexMatrix& k = model.k;
  const ComplexMatrix& m = bm.m;
  const ComplexMatrix& nn = bm.n;
  const ComplexMatrix& l = bm.l;
  const Complex i1(0.0, 1.0);

  StructureMatrices out;
  out.m = m;
  out.n = nn;
  out.l = l;

  out.x.resize(2 * n, 2 * n);
  out.x.topLeftCorner(n, n) = 0.5 * (i1 * h.conjugate() - nn.conjugate() + m);
  out.x.topRightCorner(n, n) = 0.5 * (-2.0 * i1 * k - l + l.transpose());
  out.x.bottomLeftCorner(n, n) = 0.5 * (2.0 * i1 * k.conjugate() - l.conjugate() + l.adjoint());
  out.x.bottomRightCorner(n, n) = 0.5 * (-i1 * h - nn + m.conjugate());

  // materialized so the diagonal blocks come out exactly symmetric
  const ComplexMatrix lsym = l + ComplexMatrix(l.transpose());
  out.y.resize(2 * n, 2 * n);
  out.y.topLeftCorner(n, n) = 0.5 * (-2.0 * i1 * k.conjugate() - lsym.conjugate());
  out.y.topRightCorner(n, n) = nn;
  out.y.bottomLeftCorner(n, n) = nn.transpose();
  out.y.bottomRightCorner(n, n) = 0.5 * (2.0 * i1 * k - lsym);

  out.s0 = out.x.trace();
  return out;
}

Preset preset_from_name(const std::string& name) {
  if (name == "afm_2spin") return Preset::afm_2spin;
  if (name == "fm_2spin_up") return Preset::fm_2spin_up;
  if (name == "two_boson") return Preset::two_boson;
  if (name == "rabi_normal") return Preset::rabi_normal;
  throw UnknownPresetError("unknown preset '" + name + "'");
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::afm_2spin: return "afm_2spin";
    case Preset::fm_2spin_up: return "fm_2spin_up";
    case Preset::two_boson: return "two_boson";
    case Preset::rabi_normal: return "rabi_normal";
  }
  return "?";
}

std::vector<std::string> preset_param_names(Preset p) {
  switch (p) {
    case Preset::afm_2spin:
    case Preset::fm_2spin_up: return {"gamma_g", "gamma_l", "g", "spin"};
    case Preset::two_boson: return {"gamma", "g"};
    case Preset::rabi_normal: return {"omega", "g", "gamma"};
  }
  return {};
}

PresetModel make_preset(Preset p, const Params& params) {
  PresetModel out;
  switch (p) {
    case Preset::afm_2spin: {
      reject_unknown(params, {"gamma_g", "gamma_l", "g", "spin"});
      double gg = require_rate(params, "gamma_g");
      double gl = require_rate(params, "gamma_l");
      double g = require_param(params, "g");
      double spin = require_spin(params);
      ComplexMatrix h = ComplexMatrix::Zero(2, 2);
      ComplexMatrix k = ComplexMatrix::Zero(2, 2);
      k(0, 1) = k(1, 0) = 0.5 * g;
      out.model = make_quadratic_model(h, k, {loss_bath(2, 0, gg), loss_bath(2, 1, gl)});
      out.frame = HPFrame{spin, {Orientation::up_vacuum, Orientation::down_vacuum}};
      break;
    }
    case Preset::fm_2spin_up: {
      reject_unknown(params, {"gamma_g", "gamma_l", "g", "spin"});
      double gg = require_rate(params, "gamma_g");
      double gl = require_rate(params, "gamma_l");
      double g = require_param(params, "g");
      double spin = require_spin(params);
      ComplexMatrix h = ComplexMatrix::Zero(2, 2);
      h(0, 1) = h(1, 0) = g;
      ComplexMatrix k = ComplexMatrix::Zero(2, 2);
      out.model = make_quadratic_model(h, k, {loss_bath(2, 0, gg), gain_bath(2, 1, gl)});
      out.frame = HPFrame{spin, {Orientation::up_vacuum, Orientation::up_vacuum}};
      break;
    }
    case Preset::two_boson: {
      reject_unknown(params, {"gamma", "g"});
      double gamma = require_rate(params, "gamma");
      double g = require_param(params, "g");
      ComplexMatrix h = ComplexMatrix::Zero(2, 2);
      h(0, 1) = h(1, 0) = g;
      ComplexMatrix k = ComplexMatrix::Zero(2, 2);
      out.model = make_quadratic_model(h, k, {loss_bath(2, 0, gamma), gain_bath(2, 1, gamma)});
      break;
    }
    case Preset::rabi_normal: {
      reject_unknown(params, {"omega", "g", "gamma"});
      double omega = require_param(params, "omega");
      double g = require_param(params, "g");
      double gamma = require_rate(params, "gamma");
      if (!(omega > 0.0)) {
        throw std::invalid_argument("make_preset: 'omega' must be positive");
      }
      double r = 0.5 * omega * g * g;
      ComplexMatrix h(2, 2);
      h << omega - r, -r, -r, omega - r;
      ComplexMatrix k(2, 2);
      k << -0.5 * r, -0.5 * r, -0.5 * r, -0.5 * r;
      out.model = make_quadratic_model(h, k, {loss_bath(2, 0, gamma), gain_bath(2, 1, gamma)});
      double gc = std::sqrt(0.5 * (1.0 + gamma * gamma / (omega * omega)));
      if (std::abs(g) >= gc) {
        out.warnings.push_back(
            "coupling outside the normal phase: |g| >= g_c = " + std::to_string(gc) +
            "; the quadratic expansion about the trivial state is not valid here");
      }
      break;
    }
  }
  return out;
}

HPValue hp_observable(Complex n_expect, const HPFrame& frame, int site) {
  if (site < 0 || site >= static_cast<int>(frame.orientations.size())) {
    throw std::invalid_argument("hp_observable: site out of range");
  }
  double scale = std::max(1.0, std::abs(n_expect.real()));
  if (std::abs(n_expect.imag()) > 1e-8 * scale) {
    throw std::invalid_argument("hp_observable: occupation has imaginary part " +
                                std::to_string(n_expect.imag()));
  }
  double n = n_expect.real();
  if (n < -1e-8) {
    throw std::invalid_argument("hp_observable: negative occupation " + std::to_string(n));
  }
  n = std::max(n, 0.0);

  HPValue out;
  const double s = frame.spin;
  out.value = frame.orientations[site] == Orientation::up_vacuum ? 1.0 - n / s : -1.0 + n / s;
  if (n / (2.0 * s) >= 0.1) {
    out.warning = "occupation fraction n/(2S) = " + std::to_string(n / (2.0 * s)) +
                  " at site " + std::to_string(site) +
                  "; the linearized spin mapping is unreliable";
  }
  return out;
}

double occupation_for_sz(const HPFrame& frame, int site, double sz0) {
  if (site < 0 || site >= static_cast<int>(frame.orientations.size())) {
    throw std::invalid_argument("occupation_for_sz: site out of range");
  }
  const double s = frame.spin;
  double n = frame.orientations[site] == Orientation::up_vacuum ? s - sz0 : s + sz0;
  if (n < 0.0) {
    throw std::invalid_argument("occupation_for_sz: <S^z> = " + std::to_string(sz0) +
                                " is outside [-S, S] for the frame at site " +
                                std::to_string(site));
  }
  return n;
}

}  // namespace thirdq

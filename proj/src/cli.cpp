#include "thirdq/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thirdq/dynamics.hpp"
#include "thirdq/model.hpp"
#include "thirdq/model_io.hpp"
#include "thirdq/spectrum.hpp"
#include "thirdq/symmetry.hpp"
#include "thirdq/trajectory.hpp"

namespace thirdq {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

ordered_json base_meta(const std::string& command, const ordered_json& model_desc) {
  ordered_json m;
  m["tool"] = "thirdq";
  m["version"] = kVersion;
  m["command"] = command;
  if (!model_desc.is_null()) m["model"] = model_desc;
  return m;
}

void write_meta(const std::string& out_path, const ordered_json& meta) {
  write_text_file(out_path + ".meta.json", meta.dump(2) + "\n");
}

ordered_json complex_json(const Complex& z) {
  return ordered_json::array({z.real(), z.imag()});
}

std::vector<double> parse_real_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": cannot parse '" + token + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(flag) + ": empty list");
  return out;
}

/* tokens are re or re:im */
std::vector<Complex> parse_complex_list(const std::string& text, const char* flag) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    double re = 0.0, im = 0.0;
    auto colon = token.find(':');
    try {
      std::size_t used = 0;
      std::string re_part = colon == std::string::npos ? token : token.substr(0, colon);
      re = std::stod(re_part, &used);
      if (used != re_part.size()) throw std::invalid_argument(token);
      if (colon != std::string::npos) {
        std::string im_part = token.substr(colon + 1);
        im = std::stod(im_part, &used);
        if (used != im_part.size()) throw std::invalid_argument(token);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": cannot parse '" + token + "'");
    }
    out.emplace_back(re, im);
  }
  if (out.empty()) throw std::invalid_argument(std::string(flag) + ": empty list");
  return out;
}

std::vector<double> linspace(double t0, double t1, int steps) {
  if (!(t0 >= 0.0) || !(t1 >= t0)) {
    throw std::invalid_argument("time window must satisfy 0 <= t0 <= t1");
  }
  if (steps < 2) {
    if (steps == 1 && t1 == t0) return {t0};
    throw std::invalid_argument("need at least 2 sample points");
  }
  std::vector<double> out(steps);
  for (int i = 0; i < steps; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / (steps - 1);
  }
  out.back() = t1;
  return out;
}

std::string stem_path(const std::string& path) {
  auto slash = path.find_last_of('/');
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

/* ---- shared model selection ---- */

struct ModelOpts {
  std::string preset_name;
  std::string model_file;
  double gg = 0, gl = 0, g = 0, gamma = 0, omega = 0, spin = 0;
  CLI::Option *o_gg = nullptr, *o_gl = nullptr, *o_g = nullptr, *o_gamma = nullptr,
              *o_omega = nullptr, *o_spin = nullptr;

  void add(CLI::App* sub) {
    auto* o_preset = sub->add_option("--preset", preset_name, "built-in model family");
    auto* o_file = sub->add_option("--model-file", model_file, "JSON model description");
    o_preset->excludes(o_file);
    o_gg = sub->add_option("--gg", gg, "gain rate gamma_g");
    o_gl = sub->add_option("--gl", gl, "loss rate gamma_l");
    o_g = sub->add_option("--g", g, "coherent coupling g");
    o_gamma = sub->add_option("--gamma", gamma, "balanced rate gamma");
    o_omega = sub->add_option("--omega", omega, "mode frequency omega");
    o_spin = sub->add_option("--spin-S", spin, "spin length for the linearized frame");
  }

  struct Resolved {
    QuadraticModel model;
    std::optional<HPFrame> frame;
    std::vector<std::string> warnings;
    ordered_json desc;
  };

  Resolved resolve() const {
    Resolved out;
    const bool any_param = (o_gg && o_gg->count()) || (o_gl && o_gl->count()) ||
                           (o_g && o_g->count()) || (o_gamma && o_gamma->count()) ||
                           (o_omega && o_omega->count()) || (o_spin && o_spin->count());
    if (!model_file.empty()) {
      if (any_param) {
        throw std::invalid_argument("parameter flags cannot be combined with --model-file");
      }
      LoadedModel lm = load_model_file(model_file);
      out.model = std::move(lm.model);
      out.frame = std::move(lm.frame);
      out.desc["model_file"] = model_file;
      return out;
    }
    if (preset_name.empty()) {
      throw std::invalid_argument("provide exactly one of --preset or --model-file");
    }
    Preset p = preset_from_name(preset_name);
    Params params;
    auto put = [&params](CLI::Option* o, const char* key, double v) {
      if (o && o->count()) params[key] = v;
    };
    put(o_gg, "gamma_g", gg);
    put(o_gl, "gamma_l", gl);
    put(o_g, "g", g);
    put(o_gamma, "gamma", gamma);
    put(o_omega, "omega", omega);
    put(o_spin, "spin", spin);
    PresetModel pm = make_preset(p, params);
    out.model = std::move(pm.model);
    out.frame = std::move(pm.frame);
    out.warnings = std::move(pm.warnings);
    out.desc["preset"] = preset_name;
    ordered_json pj;
    for (const auto& [key, value] : params) pj[key] = value;
    out.desc["params"] = std::move(pj);
    return out;
  }
};

/* ---- subcommands ---- */

struct SpectrumCmd {
  ModelOpts model;
  int max_order = 6;
  double cluster_tol_rel = 1e-8;
  double rank_tol = 1e-10;
  std::string out;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("spectrum", "full generator spectrum from the rate spectrum");
    model.add(sub);
    sub->add_option("--max-order", max_order, "highest total excitation order enumerated");
    sub->add_option("--tol", cluster_tol_rel, "relative eigenvalue clustering tolerance");
    sub->add_option("--rank-tol", rank_tol, "relative rank tolerance for block detection");
    sub->add_option("--out", out, "output CSV path")->required();
    sub->callback([this, &rc] { rc = run(); });
  }

  int run() {
    auto rm = model.resolve();
    StructureMatrices sm = build_structure(rm.model);
    EigenClusters betas = beta_spectrum(sm.x, cluster_tol_rel);
    JordanSpec jordan = jordan_structure(sm.x, rank_tol);
    LiouvillianSpectrum spec = enumerate_liouvillian(betas, jordan, max_order);

    std::ostringstream csv;
    csv << "re_lambda,im_lambda,multiplicity\n";
    for (const auto& e : spec.entries) {
      csv << fmt(e.lambda.real()) << ',' << fmt(e.lambda.imag()) << ',' << e.multiplicity
          << '\n';
    }
    write_text_file(out, csv.str());

    ordered_json meta = base_meta("spectrum", rm.desc);
    meta["options"] = {{"max_order", max_order},
                       {"cluster_tol_rel", cluster_tol_rel},
                       {"rank_tol", rank_tol}};
    meta["max_order_used"] = spec.max_order;
    meta["truncated"] = spec.truncated;
    meta["validity"] = spec.validity == Validity::rigorous ? "rigorous" : "formal";
    meta["degenerate_blocks"] = spec.degenerate_blocks;
    meta["gap"] = liouvillian_gap(betas);
    meta["beta_class"] = pt_class_name(classify_beta_pt(betas));
    ordered_json bj = ordered_json::array();
    for (int i = 0; i < betas.values.size(); ++i) bj.push_back(complex_json(betas.values(i)));
    meta["betas"] = std::move(bj);
    ordered_json jj = ordered_json::array();
    for (const auto& grp : jordan.groups) {
      ordered_json gj;
      gj["eigenvalue"] = complex_json(grp.eigenvalue);
      gj["block_sizes"] = grp.block_sizes;
      jj.push_back(std::move(gj));
    }
    meta["jordan"] = std::move(jj);
    meta["jordan_low_confidence"] = jordan.low_confidence;
    meta["warnings"] = rm.warnings;
    write_meta(out, meta);
    return 0;
  }
};

struct GapCmd {
  ModelOpts model;
  double cluster_tol_rel = 1e-8;
  std::string out;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("gap", "spectral gap of the generator");
    model.add(sub);
    sub->add_option("--tol", cluster_tol_rel, "relative eigenvalue clustering tolerance");
    sub->add_option("--out", out, "optional output CSV path");
    sub->callback([this, &rc] { rc = run(); });
  }

  int run() {
    auto rm = model.resolve();
    StructureMatrices sm = build_structure(rm.model);
    EigenClusters betas = beta_spectrum(sm.x, cluster_tol_rel);
    double gap = liouvillian_gap(betas);
    std::cout << fmt(gap) << "\n";
    if (!out.empty()) {
      write_text_file(out, "gap\n" + fmt(gap) + "\n");
      ordered_json meta = base_meta("gap", rm.desc);
      meta["gap"] = gap;
      meta["warnings"] = rm.warnings;
      write_meta(out, meta);
    }
    return 0;
  }
};

struct PtCheckCmd {
  ModelOpts model;
  std::string parity = "reflection";
  double tol = 1e-10;
  std::string out;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("pt-check", "coupling- and matrix-level symmetry report");
    model.add(sub);
    sub->add_option("--parity", parity, "parity realization: reflection or sector_swap")
        ->check(CLI::IsMember({"reflection", "sector_swap"}));
    sub->add_option("--tol", tol, "relative symmetry tolerance");
    sub->add_option("--out", out, "optional output JSON path");
    sub->callback([this, &rc] { rc = run(); });
  }

  int run() {
    auto rm = model.resolve();
    StructureMatrices sm = build_structure(rm.model);
    Parity par = parity == "reflection" ? Parity::reflection : Parity::sector_swap;

    SymmetryReport huber = check_huber(rm.model, tol);
    SymmetryReport matrix = check_matrix_pt(sm.x, par, tol);
    EigenClusters betas = beta_spectrum(sm.x);

    ordered_json j = base_meta("pt-check", rm.desc);
    j["parity"] = parity;
    j["tol"] = tol;
    ordered_json hj;
    hj["applicable"] = huber.huber_applicable;
    hj["hamiltonian"] = huber.huber_hamiltonian;
    hj["hamiltonian_residual"] = huber.huber_hamiltonian_residual;
    hj["baths"] = huber.huber_baths;
    if (huber.huber_applicable) {
      hj["baths_residual"] = huber.huber_baths_residual;
    } else {
      hj["baths_residual"] = nullptr;
    }
    hj["unmatched_baths"] = huber.unmatched_baths;
    j["huber"] = std::move(hj);
    ordered_json mj;
    mj["pt"] = matrix.matrix_pt;
    mj["pt_residual"] = matrix.pt_residual;
    mj["anti_pt"] = matrix.matrix_anti_pt;
    mj["anti_pt_residual"] = matrix.anti_pt_residual;
    j["matrix"] = std::move(mj);
    j["beta_class"] = pt_class_name(classify_beta_pt(betas, tol));
    ordered_json bj = ordered_json::array();
    for (int i = 0; i < betas.values.size(); ++i) bj.push_back(complex_json(betas.values(i)));
    j["betas"] = std::move(bj);
    j["warnings"] = rm.warnings;

    std::cout << j.dump(2) << "\n";
    if (!out.empty()) write_text_file(out, j.dump(2) + "\n");
    return 0;
  }
};

struct EpScanCmd {
  std::string preset_name;
  double g = 0.0, spin = 0.0;
  double gg_min = 0.0, gg_max = 0.0, gl_min = 0.0, gl_max = 0.0;
  int gg_steps = 0, gl_steps = 0;
  double rank_tol = 1e-10;
  std::string out;
  CLI::Option* o_spin = nullptr;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("ep-scan", "flag defective points on a rate grid");
    sub->add_option("--preset", preset_name, "model family: afm_2spin or fm_2spin_up")
        ->required();
    sub->add_option("--g", g, "coherent coupling g")->required();
    o_spin = sub->add_option("--spin-S", spin, "spin length for the linearized frame");
    sub->add_option("--gg-min", gg_min)->required();
    sub->add_option("--gg-max", gg_max)->required();
    sub->add_option("--gg-steps", gg_steps)->required();
    sub->add_option("--gl-min", gl_min)->required();
    sub->add_option("--gl-max", gl_max)->required();
    sub->add_option("--gl-steps", gl_steps)->required();
    sub->add_option("--rank-tol", rank_tol, "relative rank tolerance for block detection");
    sub->add_option("--out", out, "output CSV path")->required();
    sub->callback([this, &rc] { rc = run(); });
  }

  static std::vector<double> axis(double lo, double hi, int steps, const char* what) {
    if (steps < 1) throw std::invalid_argument(std::string(what) + ": steps must be >= 1");
    if (hi < lo) throw std::invalid_argument(std::string(what) + ": max < min");
    if (steps == 1) return {lo};
    std::vector<double> vals(steps);
    for (int i = 0; i < steps; ++i) vals[i] = lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    vals.back() = hi;
    return vals;
  }

  int run() {
    Preset p = preset_from_name(preset_name);
    if (p != Preset::afm_2spin && p != Preset::fm_2spin_up) {
      throw std::invalid_argument("ep-scan: preset must expose gamma_g and gamma_l rates");
    }
    auto grid = cartesian_grid({{"gamma_g", axis(gg_min, gg_max, gg_steps, "--gg")},
                                {"gamma_l", axis(gl_min, gl_max, gl_steps, "--gl")}});
    for (auto& params : grid) {
      params["g"] = g;
      if (o_spin && o_spin->count()) params["spin"] = spin;
    }
    auto points = ep_scan(p, grid, rank_tol);

    std::ostringstream csv;
    csv << "gamma_g,gamma_l,g,block_sizes\n";
    for (const auto& pt : points) {
      std::vector<int> blocks;
      for (const auto& grp : pt.jordan.groups) {
        for (int b : grp.block_sizes) blocks.push_back(b);
      }
      std::sort(blocks.begin(), blocks.end(), std::greater<int>());
      std::string bs;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) bs += ';';
        bs += std::to_string(blocks[i]);
      }
      csv << fmt(pt.params.at("gamma_g")) << ',' << fmt(pt.params.at("gamma_l")) << ','
          << fmt(pt.params.at("g")) << ',' << bs << '\n';
    }
    write_text_file(out, csv.str());

    ordered_json desc;
    desc["preset"] = preset_name;
    ordered_json meta = base_meta("ep-scan", desc);
    meta["options"] = {{"g", g},
                       {"gg_min", gg_min},
                       {"gg_max", gg_max},
                       {"gg_steps", gg_steps},
                       {"gl_min", gl_min},
                       {"gl_max", gl_max},
                       {"gl_steps", gl_steps},
                       {"rank_tol", rank_tol}};
    meta["grid_points"] = static_cast<int>(grid.size());
    meta["flagged"] = static_cast<int>(points.size());
    write_meta(out, meta);
    return 0;
  }
};

struct DynamicsCmd {
  ModelOpts model;
  double t0 = 0.0, t1 = 10.0;
  int steps = 201;
  std::string n0_text, a0_text;
  double sz0 = 0.0;
  bool stationary_strict = false;
  std::string out;
  CLI::Option *o_sz0 = nullptr, *o_n0 = nullptr, *o_a0 = nullptr;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("dynamics", "first and second moment evolution");
    model.add(sub);
    sub->add_option("--t0", t0, "window start");
    sub->add_option("--t1", t1, "window end")->required();
    sub->add_option("--steps", steps, "number of samples (inclusive endpoints)");
    o_n0 = sub->add_option("--n0", n0_text, "initial occupations, comma separated");
    o_a0 = sub->add_option("--a0", a0_text, "initial amplitudes re[:im], comma separated");
    o_sz0 = sub->add_option("--sz0", sz0, "initial <S_A^z>; requires a spin frame");
    o_sz0->excludes(o_n0);
    sub->add_flag("--stationary-strict", stationary_strict,
                  "fail when no unique stationary covariance exists");
    sub->add_option("--out", out, "output CSV path")->required();
    sub->callback([this, &rc] { rc = run(); });
  }

  int run() {
    auto rm = model.resolve();
    StructureMatrices sm = build_structure(rm.model);
    const int n = rm.model.n;
    auto times = linspace(t0, t1, steps);

    RealVector nbar = RealVector::Zero(n);
    if (o_sz0 && o_sz0->count()) {
      if (!rm.frame) {
        throw std::invalid_argument("--sz0 needs a model with a spin frame");
      }
      /* site A sets the occupation; remaining sites start with the same value */
      double occ = occupation_for_sz(*rm.frame, 0, sz0);
      nbar.setConstant(occ);
    } else if (o_n0 && o_n0->count()) {
      auto vals = parse_real_list(n0_text, "--n0");
      if (static_cast<int>(vals.size()) != n) {
        throw std::invalid_argument("--n0: expected " + std::to_string(n) + " entries");
      }
      for (int i = 0; i < n; ++i) nbar(i) = vals[i];
    }
    ComplexVector amps;
    if (o_a0 && o_a0->count()) {
      auto vals = parse_complex_list(a0_text, "--a0");
      if (static_cast<int>(vals.size()) != n) {
        throw std::invalid_argument("--a0: expected " + std::to_string(n) + " entries");
      }
      amps.resize(n);
      for (int i = 0; i < n; ++i) amps(i) = vals[i];
    }

    MomentState init = occupation_state(nbar, amps);
    EvolveOptions opts;
    FirstMomentSeries first = evolve_first(sm.x, init.psi, times, opts);
    SecondMomentSeries second = evolve_second(sm.x, sm.y, init.z, times, opts);

    const std::size_t len = std::min(first.times.size(), second.times.size());
    std::vector<MomentState> states(len);
    for (std::size_t i = 0; i < len; ++i) {
      states[i] = MomentState{first.psi[i], second.z[i], first.times[i]};
    }
    ObservableSeries obs = observable_series(states, rm.frame);

    std::ostringstream csv;
    csv << "t,observable,re,im\n";
    for (std::size_t ti = 0; ti < obs.times.size(); ++ti) {
      for (std::size_t oi = 0; oi < obs.names.size(); ++oi) {
        const Complex v = obs.values[oi][ti];
        csv << fmt(obs.times[ti]) << ',' << obs.names[oi] << ',' << fmt(v.real()) << ','
            << fmt(v.imag()) << '\n';
      }
    }
    write_text_file(out, csv.str());

    ordered_json meta = base_meta("dynamics", rm.desc);
    meta["options"] = {{"t0", t0}, {"t1", t1}, {"steps", steps}};
    ordered_json icj;
    icj["nbar"] = std::vector<double>(nbar.data(), nbar.data() + n);
    if (amps.size()) {
      ordered_json aj = ordered_json::array();
      for (int i = 0; i < n; ++i) aj.push_back(complex_json(amps(i)));
      icj["amplitudes"] = std::move(aj);
    }
    meta["initial"] = std::move(icj);
    meta["cross_check_error"] = first.cross_check_error;
    meta["path_discrepancy"] = second.path_discrepancy;
    meta["discrepancy_flag"] = second.discrepancy_flag;
    meta["resonant_fallback"] = second.resonant_fallback;
    meta["capped"] = first.capped || second.capped;
    ordered_json st;
    try {
      StationaryResult ss = stationary_second(sm.x, sm.y);
      ordered_json occ = ordered_json::array();
      for (int i = 0; i < n; ++i) occ.push_back(ss.z(n + i, i).real());
      st["occupations"] = std::move(occ);
      st["residual"] = ss.residual;
    } catch (const NoUniqueSolutionError& e) {
      if (stationary_strict) throw;
      st["error"] = e.what();
      st["min_eigenvalue_sum"] = e.min_eigenvalue_sum;
    }
    meta["stationary"] = std::move(st);
    std::vector<std::string> warnings = rm.warnings;
    warnings.insert(warnings.end(), obs.warnings.begin(), obs.warnings.end());
    meta["warnings"] = warnings;
    write_meta(out, meta);
    return 0;
  }
};

struct SteadyCmd {
  double spin = 1.0, g = 0.0, gg = 0.0, gl = 0.0;
  double tol = 1e-9, t_max = 400.0;
  std::string out;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("steady", "finite-spin master equation steady state");
    sub->add_option("--spin-S", spin, "spin length")->required();
    sub->add_option("--g", g, "coherent coupling g")->required();
    sub->add_option("--gg", gg, "gain rate gamma_g")->required();
    sub->add_option("--gl", gl, "loss rate gamma_l")->required();
    sub->add_option("--tol", tol, "residual tolerance (entrywise 1-norm of d rho/dt)");
    sub->add_option("--t-max", t_max, "integration horizon");
    sub->add_option("--out", out, "optional output JSON path");
    sub->callback([this, &rc] { rc = run(); });
  }

  int run() {
    SpinModel sm = make_spin_model(spin, g, gg, gl);
    SteadyOptions opts;
    opts.tol = tol;
    opts.t_max = t_max;
    SteadyResult res = steady_state(sm, opts);

    ordered_json j = base_meta("steady", nullptr);
    j["options"] = {{"spin", spin}, {"g", g}, {"gamma_g", gg}, {"gamma_l", gl},
                    {"tol", tol},   {"t_max", t_max}};
    j["converged"] = res.converged;
    j["t"] = res.t;
    j["residual"] = res.residual;
    j["purity"] = res.purity;
    j["mz_a"] = res.mz_a;
    j["mz_b"] = res.mz_b;
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) write_text_file(out, j.dump(2) + "\n");
    return 0;
  }
};

struct TrajectoryCmd {
  double spin = 1.0, g = 0.0, gg = 0.0, gl = 0.0;
  double t0 = 0.0, t1 = 10.0;
  int steps = 101, ntraj = 100;
  std::uint64_t seed = 1;
  double ma0 = 0.0, mb0 = 0.0;
  bool no_lindblad = false;
  std::string out;
  CLI::Option *o_ma0 = nullptr, *o_mb0 = nullptr;

  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("trajectory", "quantum-jump unravelling of the spin model");
    sub->add_option("--spin-S", spin, "spin length")->required();
    sub->add_option("--g", g, "coherent coupling g")->required();
    sub->add_option("--gg", gg, "gain rate gamma_g")->required();
    sub->add_option("--gl", gl, "loss rate gamma_l")->required();
    sub->add_option("--t0", t0, "window start");
    sub->add_option("--t1", t1, "window end")->required();
    sub->add_option("--steps", steps, "number of samples (inclusive endpoints)");
    sub->add_option("--ntraj", ntraj, "number of trajectories");
    sub->add_option("--seed", seed, "master seed");
    o_ma0 = sub->add_option("--ma0", ma0, "initial <S_A^z> level (default -S)");
    o_mb0 = sub->add_option("--mb0", mb0, "initial <S_B^z> level (default +S)");
    sub->add_flag("--no-lindblad", no_lindblad, "skip the master equation reference column");
    sub->add_option("--out", out, "output CSV path")->required();
    sub->callback([this, &rc] { rc = run(); });
  }

  int run() {
    SpinModel sm = make_spin_model(spin, g, gg, gl);
    const double a0 = (o_ma0 && o_ma0->count()) ? ma0 : -spin;
    const double b0 = (o_mb0 && o_mb0->count()) ? mb0 : spin;
    auto times = linspace(t0, t1, steps);

    ComplexVector psi0 = basis_state(sm, a0, b0);
    TrajectoryEnsemble ens = mc_trajectories(sm, psi0, times, ntraj, seed);

    std::vector<double> lind;
    double lind_dt = 0.0;
    if (!no_lindblad) {
      LindbladResult lr = lindblad_evolve(sm, product_density(sm, a0, b0), times);
      lind = lr.mz_a;
      lind_dt = lr.dt_used;
    }

    std::ostringstream csv;
    csv << "t,mean,sem" << (no_lindblad ? "" : ",lindblad") << "\n";
    for (std::size_t i = 0; i < ens.times.size(); ++i) {
      csv << fmt(ens.times[i]) << ',' << fmt(ens.mean[i]) << ',' << fmt(ens.sem[i]);
      if (!no_lindblad) csv << ',' << fmt(lind[i]);
      csv << '\n';
    }
    write_text_file(out, csv.str());

    std::ostringstream tcsv;
    tcsv << "t,trajectory,mz_a\n";
    for (int traj = 0; traj < ntraj; ++traj) {
      for (std::size_t i = 0; i < ens.times.size(); ++i) {
        tcsv << fmt(ens.times[i]) << ',' << traj << ',' << fmt(ens.mz_a[traj][i]) << '\n';
      }
    }
    write_text_file(stem_path(out) + "_trajectories.csv", tcsv.str());

    ordered_json meta = base_meta("trajectory", nullptr);
    meta["options"] = {{"spin", spin}, {"g", g},     {"gamma_g", gg},   {"gamma_l", gl},
                       {"t0", t0},     {"t1", t1},   {"steps", steps},  {"ntraj", ntraj},
                       {"seed", seed}, {"ma0", a0},  {"mb0", b0}};
    meta["observable"] = "mz_a";
    meta["dt_used"] = ens.dt_used;
    meta["dt_reduced"] = ens.dt_reduced;
    if (!no_lindblad) meta["lindblad_dt"] = lind_dt;
    std::vector<int> jump_counts;
    for (const auto& js : ens.jumps) jump_counts.push_back(static_cast<int>(js.size()));
    meta["jump_counts"] = jump_counts;
    meta["stream_seeds"] = ens.stream_seeds;
    write_meta(out, meta);
    return 0;
  }
};

struct PresetsCmd {
  void add(CLI::App& app, int& rc) {
    auto* sub = app.add_subcommand("presets", "list built-in model families");
    sub->callback([&rc] {
      std::cout << "afm_2spin    gamma_g gamma_l g [spin=1000]   anti-aligned two-spin model\n"
                   "fm_2spin_up  gamma_g gamma_l g [spin=1000]   aligned two-spin model\n"
                   "two_boson    gamma g                         balanced gain/loss boson pair\n"
                   "rabi_normal  omega g gamma                   driven mode pair, normal phase\n";
      rc = 0;
    });
  }
};

int fail(const std::string& what, int code) {
  ordered_json j;
  j["error"] = what;
  j["code"] = code;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"spectra, symmetry checks, and dynamics of open quadratic bosonic models"};
  app.require_subcommand(1);

  int rc = 0;
  SpectrumCmd spectrum_cmd;
  GapCmd gap_cmd;
  PtCheckCmd pt_cmd;
  EpScanCmd ep_cmd;
  DynamicsCmd dyn_cmd;
  SteadyCmd steady_cmd;
  TrajectoryCmd traj_cmd;
  PresetsCmd presets_cmd;

  spectrum_cmd.add(app, rc);
  gap_cmd.add(app, rc);
  pt_cmd.add(app, rc);
  ep_cmd.add(app, rc);
  dyn_cmd.add(app, rc);
  steady_cmd.add(app, rc);
  traj_cmd.add(app, rc);
  presets_cmd.add(app, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UnknownPresetError& e) {
    return fail(e.what(), 3);
  } catch (const ModelFileError& e) {
    return fail(e.what(), 4);
  } catch (const NoUniqueSolutionError& e) {
    return fail(e.what(), 6);
  } catch (const std::overflow_error& e) {
    return fail(e.what(), 7);
  } catch (const std::invalid_argument& e) {
    return fail(e.what(), 5);
  } catch (const std::exception& e) {
    return fail(e.what(), 1);
  }
  return rc;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("thirdq");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& s : full) argv.push_back(s.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace thirdq

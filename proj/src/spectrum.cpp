#include "thirdq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thirdq {

EigenClusters beta_spectrum(const ComplexMatrix& x, double cluster_tol_rel) {
  return eig(x, cluster_tol_rel);
}

namespace {

/* binomial C(a+b, b) with overflow saturation */
long long choose_sat(int total, int pick) {
  long long acc = 1;
  for (int i = 1; i <= pick; ++i) {
    if (acc > std::numeric_limits<long long>::max() / (total - pick + i)) {
      return std::numeric_limits<long long>::max();
    }
    acc = acc * (total - pick + i) / i;
  }
  return acc;
}

void enumerate_tuples(const std::vector<Complex>& slots, int slot, int budget,
                      std::vector<int>& current, std::vector<std::pair<Complex, std::vector<int>>>& out,
                      Complex partial) {
  if (slot == static_cast<int>(slots.size())) {
    out.emplace_back(-2.0 * partial, current);
    return;
  }
  for (int m = 0; m <= budget; ++m) {
    current[slot] = m;
    enumerate_tuples(slots, slot + 1, budget - m, current, out,
                     partial + static_cast<double>(m) * slots[slot]);
  }
  current[slot] = 0;
}

}  // namespace

LiouvillianSpectrum enumerate_liouvillian(const EigenClusters& betas, const JordanSpec& jordan,
                                          int max_order, long long entry_cap) {
  if (max_order < 0) throw std::invalid_argument("enumerate_liouvillian: max_order < 0");
  if (entry_cap < 1) throw std::invalid_argument("enumerate_liouvillian: entry_cap < 1");
  if (jordan.dimension != static_cast<int>(betas.values.size())) {
    throw std::invalid_argument(
        "enumerate_liouvillian: rate spectrum and block structure disagree on dimension");
  }

  /* one slot per block, carrying the block's rate */
  std::vector<Complex> slots;
  bool degenerate = false;
  for (const auto& g : jordan.groups) {
    for (int size : g.block_sizes) {
      slots.push_back(g.eigenvalue);
      if (size >= 2) degenerate = true;
    }
  }
  const int s = static_cast<int>(slots.size());

  LiouvillianSpectrum out;
  out.degenerate_blocks = degenerate;
  out.max_order = max_order;
  while (out.max_order > 0 && choose_sat(out.max_order + s, s) > entry_cap) {
    --out.max_order;
    out.truncated = true;
  }

  std::vector<std::pair<Complex, std::vector<int>>> raw;
  std::vector<int> current(s, 0);
  enumerate_tuples(slots, 0, out.max_order, current, raw, Complex(0.0, 0.0));

  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    if (a.first.imag() != b.first.imag()) return a.first.imag() < b.first.imag();
    return a.second < b.second;
  });

  double lam_scale = 0.0;
  for (const auto& [lam, tup] : raw) {
    (void)tup;
    lam_scale = std::max(lam_scale, std::abs(lam));
  }
  const double tol = std::max(betas.cluster_tol * 2.0 * std::max(out.max_order, 1),
                              1e-14 * lam_scale);

  for (const auto& [lam, tup] : raw) {
    if (!out.entries.empty() && std::abs(lam - out.entries.back().lambda) <= tol) {
      auto& entry = out.entries.back();
      entry.multiplicity += 1;
      if (tup < entry.rep) entry.rep = tup;
    } else {
      SpectrumEntry entry;
      entry.lambda = lam;
      entry.multiplicity = 1;
      entry.rep = tup;
      out.entries.push_back(std::move(entry));
    }
  }

  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });

  bool rigorous = true;
  for (const auto& b : slots) {
    if (b.real() <= betas.cluster_tol) rigorous = false;
  }
  out.validity = rigorous ? Validity::rigorous : Validity::formal;
  return out;
}

double liouvillian_gap(const EigenClusters& betas) {
  if (betas.values.size() == 0) return 0.0;
  double min_re = std::numeric_limits<double>::infinity();
  for (int i = 0; i < betas.values.size(); ++i) {
    min_re = std::min(min_re, betas.values(i).real());
  }
  return std::max(0.0, 2.0 * min_re);
}

std::vector<EpPoint> ep_scan(Preset family, const std::vector<Params>& grid, double rank_tol) {
  std::vector<EpPoint> out;
  for (const auto& params : grid) {
    PresetModel pm = make_preset(family, params);
    StructureMatrices sm = build_structure(pm.model);
    JordanSpec spec = jordan_structure(sm.x, rank_tol);
    if (spec.max_block_size() >= 2) {
      out.push_back(EpPoint{params, std::move(spec)});
    }
  }
  return out;
}

std::vector<Params> cartesian_grid(
    const std::vector<std::pair<std::string, std::vector<double>>>& axes) {
  for (const auto& [name, vals] : axes) {
    if (vals.empty()) throw std::invalid_argument("cartesian_grid: axis '" + name + "' is empty");
  }
  std::vector<Params> out{Params{}};
  for (const auto& [name, vals] : axes) {
    std::vector<Params> next;
    next.reserve(out.size() * vals.size());
    for (const auto& base : out) {
      for (double v : vals) {
        Params p = base;
        p[name] = v;
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace thirdq

#pragma once

#include <cstdint>
#include <vector>

#include "thirdq/model.hpp"
#include "thirdq/numerics.hpp"

namespace thirdq {

/* Rate spectrum of the structure matrix x. */
EigenClusters beta_spectrum(const ComplexMatrix& x, double cluster_tol_rel = 1e-8);

struct SpectrumEntry {
  Complex lambda;
  long long multiplicity = 0;
  std::vector<int> rep;  // one representative occupation tuple over the rate slots
};

enum class Validity { rigorous, formal };

struct LiouvillianSpectrum {
  std::vector<SpectrumEntry> entries;  // sorted by re descending, then im ascending
  int max_order = 0;                   // order actually enumerated
  bool truncated = false;              // entry cap forced a lower order
  Validity validity = Validity::formal;  // rigorous only when every rate has re > 0
  bool degenerate_blocks = false;  // defective rates present: counts are index-tuple counts
};

/* Full generator spectrum lambda = -2 sum_s m_s beta_s, one slot per Jordan
 * block carrying that block's rate, summed over occupations up to max_order. */
LiouvillianSpectrum enumerate_liouvillian(const EigenClusters& betas, const JordanSpec& jordan,
                                          int max_order = 6,
                                          long long entry_cap = 2000000);

/* 2 min_r re(beta_r), clamped at zero. */
double liouvillian_gap(const EigenClusters& betas);

struct EpPoint {
  Params params;
  JordanSpec jordan;
};

/* Flags grid points whose structure matrix is defective. Grid order preserved. */
std::vector<EpPoint> ep_scan(Preset family, const std::vector<Params>& grid,
                             double rank_tol = 1e-10);

/* Cartesian product of named axes; the first axis varies slowest. */
std::vector<Params> cartesian_grid(
    const std::vector<std::pair<std::string, std::vector<double>>>& axes);

}  // namespace thirdq

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "thirdq/types.hpp"

namespace thirdq {

/* One linear bath coupling L = l . a + k . a^dagger (rates folded into the vectors). */
struct BathVector {
  ComplexVector l;
  ComplexVector k;
};

/* n-mode quadratic model
 *   H = a^dag . h . a  +  a . k . a  +  a^dag . conj(k) . a^dag
 * with h hermitian and k symmetric (no 1/2 on the pair terms). */
struct QuadraticModel {
  int n = 0;
  ComplexMatrix h;
  ComplexMatrix k;
  std::vector<BathVector> baths;
};

/* Validates hermiticity/symmetry to 1e-12 on entries, then symmetrizes exactly. */
QuadraticModel make_quadratic_model(const ComplexMatrix& h, const ComplexMatrix& k,
                                    std::vector<BathVector> baths);

struct BathMatrices {
  ComplexMatrix m;  // sum_mu l_mu l_mu^dag
  ComplexMatrix n;  // sum_mu k_mu k_mu^dag
  ComplexMatrix l;  // sum_mu l_mu k_mu^dag
};

BathMatrices build_bath_matrices(const QuadraticModel& model);

/* Structure matrices of the quadratic master equation. x drives first moments
 * (d psi/dt = -2 x^T psi), y sources second moments; y is exactly symmetric. */
struct StructureMatrices {
  ComplexMatrix m, n, l;
  ComplexMatrix x, y;  // 2n x 2n
  Complex s0;          // trace of x
};

StructureMatrices build_structure(const QuadraticModel& model);

enum class Orientation { up_vacuum, down_vacuum };

/* Bookkeeping for models obtained by linearizing large spins about a chosen
 * product state: spin length and, per site, which pole hosts the vacuum. */
struct HPFrame {
  double spin = 0.0;
  std::vector<Orientation> orientations;
};

enum class Preset { afm_2spin, fm_2spin_up, two_boson, rabi_normal };

using Params = std::map<std::string, double>;

struct PresetModel {
  QuadraticModel model;
  std::optional<HPFrame> frame;
  std::vector<std::string> warnings;
};

class UnknownPresetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Preset preset_from_name(const std::string& name);  // throws UnknownPresetError
std::string preset_name(Preset p);
std::vector<std::string> preset_param_names(Preset p);  // required keys, then optional
PresetModel make_preset(Preset p, const Params& params);

struct HPValue {
  double value = 0.0;
  std::optional<std::string> warning;
};

/* Maps a mode occupation to <S^z>/S in the frame. Imaginary residue below
 * 1e-8 (relative, floored at 1) is stripped; larger residue or an occupation
 * below -1e-8 throws std::invalid_argument. Warns when n/(2S) >= 0.1. */
HPValue hp_observable(Complex n_expect, const HPFrame& frame, int site);

/* Occupation whose hp_observable equals sz0/S at the given site. */
double occupation_for_sz(const HPFrame& frame, int site, double sz0);

}  // namespace thirdq

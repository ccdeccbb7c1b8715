#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "thirdq/model.hpp"
#include "thirdq/symmetry.hpp"

using thirdq::Complex;
using thirdq::ComplexMatrix;
using thirdq::Params;
using thirdq::Parity;
using thirdq::Preset;
using thirdq::PtClass;

namespace {

thirdq::EigenClusters values_only(const std::vector<Complex>& v) {
  thirdq::EigenClusters ec;
  ec.values.resize(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) ec.values(static_cast<int>(i)) = v[i];
  return ec;
}

}  // namespace

TEST_SUITE("symmetry") {

TEST_CASE("parity matrices square to the identity") {
  for (int n = 1; n <= 4; ++n) {
    const auto p1 = thirdq::site_parity(n);
    CHECK((p1 * p1 - thirdq::RealMatrix::Identity(n, n)).norm() == 0.0);
    for (const auto kind : {Parity::reflection, Parity::sector_swap}) {
      const auto p = thirdq::parity_matrix(kind, n);
      CHECK((p * p - thirdq::RealMatrix::Identity(2 * n, 2 * n)).norm() == 0.0);
    }
  }
  CHECK(thirdq::site_parity(2)(0, 1) == 1.0);
  CHECK(thirdq::parity_matrix(Parity::reflection, 2)(0, 1) == 1.0);
  CHECK(thirdq::parity_matrix(Parity::reflection, 2)(0, 3) == 0.0);
  CHECK(thirdq::parity_matrix(Parity::sector_swap, 2)(0, 3) == 1.0);
}

TEST_CASE("mirror-paired models pass the coupling check") {
  thirdq::SplitMix64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 4);
    const auto m = gen::random_mirror_model(rng, n);
    const auto rep = thirdq::check_huber(m);
    CAPTURE(trial);
    CHECK(rep.huber_applicable);
    CHECK(rep.huber_hamiltonian);
    CHECK(rep.huber_baths);
    CHECK(rep.huber_hamiltonian_residual <= 1e-12);
    CHECK(rep.huber_baths_residual <= 1e-12);
    CHECK(rep.unmatched_baths.empty());
  }
}

TEST_CASE("perturbed models fail the coupling check") {
  thirdq::SplitMix64 rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 3);
    const auto m = gen::perturb_asymmetric(rng, gen::random_mirror_model(rng, n), trial);
    const auto rep = thirdq::check_huber(m);
    CAPTURE(trial);
    CHECK((!rep.huber_hamiltonian || !rep.huber_baths));
  }
}

TEST_CASE("coupling check on the presets") {
  SUBCASE("balanced pair and driven pair are symmetric") {
    for (const auto pm :
         {thirdq::make_preset(Preset::two_boson, Params{{"gamma", 0.7}, {"g", 1.0}}),
          thirdq::make_preset(Preset::rabi_normal,
                              Params{{"omega", 1.0}, {"g", 0.5}, {"gamma", 0.1}})}) {
      const auto rep = thirdq::check_huber(pm.model);
      CHECK(rep.huber_applicable);
      CHECK(rep.huber_hamiltonian);
      CHECK(rep.huber_baths);
    }
  }
  SUBCASE("aligned model is symmetric only at equal rates") {
    const auto uneq = thirdq::make_preset(
        Preset::fm_2spin_up, Params{{"gamma_g", 0.5}, {"gamma_l", 0.45}, {"g", 1.0}});
    const auto rep_uneq = thirdq::check_huber(uneq.model);
    CHECK(rep_uneq.huber_hamiltonian);
    CHECK(!rep_uneq.huber_baths);
    CHECK(!rep_uneq.unmatched_baths.empty());

    const auto eq = thirdq::make_preset(
        Preset::fm_2spin_up, Params{{"gamma_g", 0.5}, {"gamma_l", 0.5}, {"g", 1.0}});
    CHECK(thirdq::check_huber(eq.model).huber_baths);
  }
  SUBCASE("anti-aligned model always fails the bath pairing") {
    for (const double gl : {2.0, 1.0}) {
      const auto pm = thirdq::make_preset(
          Preset::afm_2spin, Params{{"gamma_g", 2.0}, {"gamma_l", gl}, {"g", 1.0}});
      const auto rep = thirdq::check_huber(pm.model);
      CHECK(rep.huber_hamiltonian);
      CHECK(!rep.huber_baths);
      CHECK(rep.unmatched_baths.size() == 2);
    }
  }
  SUBCASE("complex baths make the check inapplicable") {
    thirdq::SplitMix64 rng(33);
    auto m = gen::random_mirror_model(rng, 2);
    m.baths[0].l(0) += Complex(0.0, 0.5);
    const auto rep = thirdq::check_huber(m);
    CHECK(!rep.huber_applicable);
    CHECK(std::isnan(rep.huber_baths_residual));
  }
}

TEST_CASE("matrix-level symmetry of the balanced pair") {
  const auto pm = thirdq::make_preset(Preset::two_boson, Params{{"gamma", 0.7}, {"g", 1.0}});
  const auto sm = thirdq::build_structure(pm.model);
  const auto rep = thirdq::check_matrix_pt(sm.x, Parity::reflection);
  CHECK(rep.matrix_pt);
  CHECK(rep.pt_residual <= 1e-14);
  CHECK(!rep.matrix_anti_pt);
  /* when P conj(X) P = -X holds exactly, the anti-symmetric residual is
   * |P conj(X) P - X| / |X| = 2 */
  CHECK(rep.anti_pt_residual == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("coupling symmetry implies matrix-level symmetry under reflection") {
  thirdq::SplitMix64 rng(34);
  double worst_sym = 0.0;
  double best_asym = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next() % 4);
    const auto m = gen::random_mirror_model(rng, n);
    const auto sym = thirdq::check_matrix_pt(thirdq::build_structure(m).x, Parity::reflection);
    CAPTURE(trial);
    CHECK(sym.matrix_pt);
    worst_sym = std::max(worst_sym, sym.pt_residual);

    const auto broken = gen::perturb_asymmetric(rng, m, trial);
    const auto asym =
        thirdq::check_matrix_pt(thirdq::build_structure(broken).x, Parity::reflection);
    CHECK(!asym.matrix_pt);
    best_asym = std::min(best_asym, asym.pt_residual);
  }
  CHECK(worst_sym < 1e-10);
  CHECK(best_asym > 1e-3);
}

TEST_CASE("anti-aligned matrix symmetry sits in the sector-swap realization") {
  const auto balanced = thirdq::make_preset(
      Preset::afm_2spin, Params{{"gamma_g", 2.0}, {"gamma_l", 2.0}, {"g", 1.0}});
  const auto x_bal = thirdq::build_structure(balanced.model).x;
  const auto swap_rep = thirdq::check_matrix_pt(x_bal, Parity::sector_swap);
  CHECK(swap_rep.matrix_anti_pt);
  CHECK(!swap_rep.matrix_pt);
  const auto refl_rep = thirdq::check_matrix_pt(x_bal, Parity::reflection);
  CHECK(!refl_rep.matrix_pt);
  CHECK(!refl_rep.matrix_anti_pt);

  const auto skewed = thirdq::make_preset(
      Preset::afm_2spin, Params{{"gamma_g", 2.0}, {"gamma_l", 1.0}, {"g", 1.0}});
  const auto x_skew = thirdq::build_structure(skewed.model).x;
  CHECK(!thirdq::check_matrix_pt(x_skew, Parity::sector_swap).matrix_anti_pt);
}

TEST_CASE("zero matrix is trivially symmetric both ways") {
  const auto rep = thirdq::check_matrix_pt(ComplexMatrix::Zero(4, 4), Parity::reflection);
  CHECK(rep.matrix_pt);
  CHECK(rep.matrix_anti_pt);
  CHECK(rep.pt_residual == 0.0);
  CHECK(rep.anti_pt_residual == 0.0);
}

TEST_CASE("rate spectra classify into the three phases") {
  SUBCASE("purely imaginary rates are unbroken") {
    const auto ec = values_only({Complex(0.0, 0.3), Complex(0.0, -0.3),
                                 Complex(1e-13, 0.1), Complex(-1e-13, -0.1)});
    CHECK(thirdq::classify_beta_pt(ec) == PtClass::unbroken);
  }
  SUBCASE("reflection-paired real parts are broken") {
    const auto ec = values_only({Complex(0.2, 0.5), Complex(-0.2, 0.5),
                                 Complex(0.2, -0.5), Complex(-0.2, -0.5)});
    CHECK(thirdq::classify_beta_pt(ec) == PtClass::broken);

    const auto bb = values_only(oracle::two_boson_betas(1.5, 1.0));
    CHECK(thirdq::classify_beta_pt(bb) == PtClass::broken);
  }
  SUBCASE("unpaired real parts are mixed") {
    const auto ec = values_only(oracle::fm_up_betas(0.5, 0.45, 1.0));
    CHECK(thirdq::classify_beta_pt(ec) == PtClass::mixed);
  }
  SUBCASE("balanced pair crosses from unbroken to broken at gamma = g") {
    CHECK(thirdq::classify_beta_pt(values_only(oracle::two_boson_betas(0.5, 1.0))) ==
          PtClass::unbroken);
    CHECK(thirdq::classify_beta_pt(values_only(oracle::two_boson_betas(1.5, 1.0))) ==
          PtClass::broken);
  }
  CHECK(std::string(thirdq::pt_class_name(PtClass::unbroken)) == "unbroken");
  CHECK(std::string(thirdq::pt_class_name(PtClass::broken)) == "broken");
  CHECK(std::string(thirdq::pt_class_name(PtClass::mixed)) == "mixed");
}

}  // TEST_SUITE

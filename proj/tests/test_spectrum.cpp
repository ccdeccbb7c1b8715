#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "generators.hpp"
#include "oracles.hpp"
#include "thirdq/model.hpp"
#include "thirdq/spectrum.hpp"

using thirdq::Complex;
using thirdq::ComplexMatrix;
using thirdq::Params;
using thirdq::Preset;

namespace {

std::vector<Complex> spectrum_values(const thirdq::EigenClusters& ec) {
  std::vector<Complex> v(ec.values.data(), ec.values.data() + ec.values.size());
  return oracle::sorted_complex(v);
}

/* multiset comparison: roundoff in degenerate values can reorder a sort, so
 * match each expected value to its nearest unclaimed computed value */
void check_close(const std::vector<Complex>& got, const std::vector<Complex>& want,
                 double tol) {
  REQUIRE(got.size() == want.size());
  std::vector<bool> used(got.size(), false);
  for (std::size_t i = 0; i < want.size(); ++i) {
    std::size_t best = got.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < got.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(got[j] - want[i]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    used[best] = true;
    CAPTURE(i);
    CHECK(best_d <= tol);
  }
}

thirdq::EigenClusters preset_betas(Preset p, const Params& params) {
  const auto pm = thirdq::make_preset(p, params);
  return thirdq::beta_spectrum(thirdq::build_structure(pm.model).x);
}

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("anti-aligned rates match the closed form") {
  check_close(spectrum_values(preset_betas(
                  Preset::afm_2spin, Params{{"gamma_g", 2.0}, {"gamma_l", 2.0}, {"g", 1.0}})),
              oracle::sorted_complex(oracle::afm_betas(2.0, 2.0, 1.0)), 1e-12);

  thirdq::SplitMix64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const double gg = gen::uniform(rng, 0.05, 3.0);
    const double gl = gen::uniform(rng, 0.05, 3.0);
    const double g = gen::uniform(rng, 0.05, 3.0);
    CAPTURE(gg);
    CAPTURE(gl);
    CAPTURE(g);
    check_close(spectrum_values(preset_betas(
                    Preset::afm_2spin, Params{{"gamma_g", gg}, {"gamma_l", gl}, {"g", g}})),
                oracle::sorted_complex(oracle::afm_betas(gg, gl, g)), 1e-10);
  }
}

TEST_CASE("aligned rates match the signed closed form on both rate orderings") {
  check_close(spectrum_values(preset_betas(
                  Preset::fm_2spin_up,
                  Params{{"gamma_g", 0.5}, {"gamma_l", 0.45}, {"g", 1.0}})),
              oracle::sorted_complex(oracle::fm_up_betas(0.5, 0.45, 1.0)), 1e-12);

  thirdq::SplitMix64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const double gg = gen::uniform(rng, 0.05, 2.0);
    const double gl = gen::uniform(rng, 0.05, 2.0);
    const double g = gen::uniform(rng, 0.05, 2.0);
    if (std::abs(gg + gl - 2.0 * g) < 0.05) continue;  // stay away from the defective line
    CAPTURE(gg);
    CAPTURE(gl);
    CAPTURE(g);
    check_close(spectrum_values(preset_betas(
                    Preset::fm_2spin_up, Params{{"gamma_g", gg}, {"gamma_l", gl}, {"g", g}})),
                oracle::sorted_complex(oracle::fm_up_betas(gg, gl, g)), 1e-10);
  }

  SUBCASE("the |gg - gl| variant only agrees on the gg >= gl half") {
    const auto got = spectrum_values(preset_betas(
        Preset::fm_2spin_up, Params{{"gamma_g", 0.3}, {"gamma_l", 0.8}, {"g", 1.0}}));
    const auto signed_form = oracle::sorted_complex(oracle::fm_up_betas(0.3, 0.8, 1.0));
    const auto abs_form = oracle::sorted_complex(oracle::fm_abs_betas(0.3, 0.8, 1.0));
    check_close(got, signed_form, 1e-12);
    double dev = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) dev = std::max(dev, std::abs(got[i] - abs_form[i]));
    CHECK(dev > 0.1);  // the absolute-value form belongs to the other aligned model
  }
}

TEST_CASE("balanced pair rates are the textbook gain-loss eigenvalues") {
  for (const double gamma : {0.3, 0.9, 1.4}) {
    CAPTURE(gamma);
    check_close(spectrum_values(
                    preset_betas(Preset::two_boson, Params{{"gamma", gamma}, {"g", 1.0}})),
                oracle::sorted_complex(oracle::two_boson_betas(gamma, 1.0)), 1e-10);
  }
}

TEST_CASE("driven pair rates match the quartic closed form") {
  const auto got = spectrum_values(preset_betas(
      Preset::rabi_normal, Params{{"omega", 1.0}, {"g", 0.5}, {"gamma", 0.1}}));
  check_close(got, oracle::sorted_complex(oracle::rabi_betas(1.0, 0.5, 0.1)), 1e-10);

  /* frozen point: all four rates pure imaginary; the single-excitation decay
   * rates 2 beta carry the textbook magnitudes */
  std::vector<double> im;
  for (const auto& b : got) {
    CHECK(std::abs(b.real()) <= 1e-12);
    im.push_back(b.imag());
  }
  std::sort(im.begin(), im.end());
  CHECK(2.0 * im[3] == doctest::Approx(0.95931).epsilon(1e-4));
  CHECK(2.0 * im[2] == doctest::Approx(0.74814).epsilon(1e-4));

  thirdq::SplitMix64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const double omega = gen::uniform(rng, 0.5, 2.0);
    const double g = gen::uniform(rng, 0.05, 0.6);
    const double gamma = gen::uniform(rng, 0.01, 0.4);
    CAPTURE(omega);
    CAPTURE(g);
    CAPTURE(gamma);
    check_close(spectrum_values(preset_betas(
                    Preset::rabi_normal,
                    Params{{"omega", omega}, {"g", g}, {"gamma", gamma}})),
                oracle::sorted_complex(oracle::rabi_betas(omega, g, gamma)), 1e-9);
  }
}

TEST_CASE("generator spectrum enumerates occupation sums") {
  SUBCASE("distinct rates give binomial counting with collisions") {
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 0) = 1.0;
    x(1, 1) = 2.0;
    const auto betas = thirdq::beta_spectrum(x);
    const auto jordan = thirdq::jordan_structure(x);
    const auto spec = thirdq::enumerate_liouvillian(betas, jordan, 4);
    CHECK(spec.max_order == 4);
    CHECK(!spec.truncated);
    CHECK(spec.validity == thirdq::Validity::rigorous);
    CHECK(!spec.degenerate_blocks);

    long long total = 0;
    std::map<long long, long long> by_value;  // key: -lambda rounded
    for (const auto& e : spec.entries) {
      total += e.multiplicity;
      CHECK(std::abs(e.lambda.imag()) <= 1e-12);
      by_value[std::llround(-e.lambda.real())] += e.multiplicity;
    }
    CHECK(total == 15);  // all occupation tuples with m1 + m2 <= 4
    CHECK(by_value[0] == 1);
    CHECK(by_value[4] == 2);   // (2,0) and (0,1)
    CHECK(by_value[8] == 3);   // (4,0), (2,1), (0,2)
    CHECK(by_value[16] == 1);  // (0,4)
  }

  SUBCASE("anti-aligned model at the frozen parameter point") {
    const auto pm = thirdq::make_preset(
        Preset::afm_2spin, Params{{"gamma_g", 2.0}, {"gamma_l", 2.0}, {"g", 1.0}});
    const auto x = thirdq::build_structure(pm.model).x;
    const auto spec =
        thirdq::enumerate_liouvillian(thirdq::beta_spectrum(x), thirdq::jordan_structure(x), 3);

    /* rates {1.5, 1.5, 0.5, 0.5}: lambda = -(3a + b), multiplicity
     * sum over (a, b) of (a+1)(b+1) */
    std::map<long long, long long> by_value;
    for (const auto& e : spec.entries) {
      CHECK(std::abs(e.lambda.imag()) <= 1e-12);
      by_value[std::llround(-e.lambda.real())] += e.multiplicity;
    }
    const std::map<long long, long long> want = {{0, 1}, {1, 2}, {2, 3}, {3, 6},
                                                 {4, 4}, {5, 6}, {6, 3}, {7, 6}, {9, 4}};
    CHECK(by_value == want);
    CHECK(by_value.count(8) == 0);  // no tuple reaches -8 at this order
  }

  SUBCASE("all-zero rates collapse to one entry") {
    const auto betas = thirdq::beta_spectrum(ComplexMatrix::Zero(4, 4));
    const auto jordan = thirdq::jordan_structure(ComplexMatrix::Zero(4, 4));
    const auto spec = thirdq::enumerate_liouvillian(betas, jordan, 4);
    REQUIRE(spec.entries.size() == 1);
    CHECK(spec.entries[0].multiplicity == 70);  // C(4 + 4, 4)
    CHECK(spec.validity == thirdq::Validity::formal);
  }

  SUBCASE("defective rates carry one slot per block") {
    const auto pm = thirdq::make_preset(
        Preset::fm_2spin_up, Params{{"gamma_g", 1.2}, {"gamma_l", 0.8}, {"g", 1.0}});
    const auto x = thirdq::build_structure(pm.model).x;
    const auto jordan = thirdq::jordan_structure(x);
    REQUIRE(jordan.groups.size() == 1);
    CHECK(jordan.groups[0].block_sizes == std::vector<int>{2, 2});

    const auto spec =
        thirdq::enumerate_liouvillian(thirdq::beta_spectrum(x), jordan, 3);
    CHECK(spec.degenerate_blocks);
    /* two slots at rate 0.1: lambda = -0.2 s with s + 1 tuples */
    REQUIRE(spec.entries.size() == 4);
    for (const auto& e : spec.entries) {
      const long long s = std::llround(-e.lambda.real() / 0.2);
      CHECK(e.multiplicity == s + 1);
    }
  }

  SUBCASE("entry cap lowers the order and flags truncation") {
    ComplexMatrix x = ComplexMatrix::Zero(4, 4);
    x(0, 0) = 1.0;
    x(1, 1) = 2.1;
    x(2, 2) = 3.3;
    x(3, 3) = 4.7;
    const auto spec = thirdq::enumerate_liouvillian(thirdq::beta_spectrum(x),
                                                    thirdq::jordan_structure(x), 6, 50);
    CHECK(spec.truncated);
    CHECK(spec.max_order < 6);
    long long total = 0;
    for (const auto& e : spec.entries) total += e.multiplicity;
    CHECK(total <= 50);
  }
}

TEST_CASE("spectral gap") {
  CHECK(thirdq::liouvillian_gap(preset_betas(
            Preset::afm_2spin, Params{{"gamma_g", 2.0}, {"gamma_l", 2.0}, {"g", 1.0}})) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(thirdq::liouvillian_gap(preset_betas(
            Preset::fm_2spin_up, Params{{"gamma_g", 0.5}, {"gamma_l", 0.45}, {"g", 1.0}})) ==
        doctest::Approx(0.025).epsilon(1e-8));
  CHECK(thirdq::liouvillian_gap(preset_betas(
            Preset::two_boson, Params{{"gamma", 0.5}, {"g", 1.0}})) <= 1e-12);
}

TEST_CASE("defective-point scan flags the aligned critical line") {
  std::vector<double> ggs, gls;
  for (int i = 0; i < 9; ++i) ggs.push_back(0.6 + 0.1 * i);
  for (int j = 0; j < 9; ++j) gls.push_back(0.6 + 0.1 * j);
  auto grid = thirdq::cartesian_grid({{"gamma_g", ggs}, {"gamma_l", gls}});
  for (auto& p : grid) p["g"] = 1.0;

  const auto hits = thirdq::ep_scan(Preset::fm_2spin_up, grid);
  /* gg + gl = 2 has nine exact grid solutions */
  CHECK(hits.size() == 9);
  for (const auto& h : hits) {
    CHECK(h.params.at("gamma_g") + h.params.at("gamma_l") == doctest::Approx(2.0));
    REQUIRE(h.jordan.groups.size() >= 1);
    CHECK(h.jordan.max_block_size() >= 2);
  }
}

TEST_CASE("cartesian grid ordering") {
  const auto grid = thirdq::cartesian_grid({{"a", {1.0, 2.0}}, {"b", {10.0, 20.0, 30.0}}});
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].at("a") == 1.0);
  CHECK(grid[0].at("b") == 10.0);
  CHECK(grid[1].at("b") == 20.0);
  CHECK(grid[3].at("a") == 2.0);
  CHECK_THROWS_AS(thirdq::cartesian_grid({{"a", {}}}), std::invalid_argument);
}

}  // TEST_SUITE

#include <doctest.h>

#include <complex>

#include "generators.hpp"
#include "oracles.hpp"
#include "thirdq/numerics.hpp"
#include "thirdq/rng.hpp"

using thirdq::Complex;
using thirdq::ComplexMatrix;

namespace {

ComplexMatrix jordan_block(Complex lambda, int size) {
  ComplexMatrix j = ComplexMatrix::Zero(size, size);
  for (int i = 0; i < size; ++i) j(i, i) = lambda;
  for (int i = 0; i + 1 < size; ++i) j(i, i + 1) = 1.0;
  return j;
}

ComplexMatrix block_diag(const std::vector<ComplexMatrix>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.rows());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  int at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += static_cast<int>(b.rows());
  }
  return out;
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("eig reconstructs random matrices") {
  thirdq::SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 5);
    const ComplexMatrix a = gen::matrix(rng, n, n);
    const auto eg = thirdq::eig(a);
    REQUIRE(eg.values.size() == n);
    const ComplexMatrix lhs = a * eg.vectors;
    const ComplexMatrix rhs = eg.vectors * eg.values.asDiagonal();
    CAPTURE(trial);
    CHECK((lhs - rhs).norm() <= 1e-9 * std::max(1.0, a.norm()));
    CHECK(eg.condition >= 1.0 - 1e-12);
  }
}

TEST_CASE("eig clusters repeated eigenvalues") {
  thirdq::SplitMix64 rng(12);
  ComplexMatrix d = ComplexMatrix::Zero(4, 4);
  d(0, 0) = 3.0;
  d(1, 1) = 3.0;
  d(2, 2) = Complex(0.0, 1.0);
  d(3, 3) = -2.0;
  const ComplexMatrix t =
      ComplexMatrix::Identity(4, 4) + 0.2 * gen::matrix(rng, 4, 4);
  const ComplexMatrix a = t * d * t.inverse();

  const auto eg = thirdq::eig(a, 1e-6);
  std::vector<std::size_t> sizes;
  for (const auto& c : eg.clusters) sizes.push_back(c.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 1, 2});

  int covered = 0;
  for (const auto& c : eg.clusters) covered += static_cast<int>(c.size());
  CHECK(covered == 4);
}

TEST_CASE("jordan structure of canonical forms") {
  SUBCASE("nilpotent 2x2") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = 1.0;
    const auto js = thirdq::jordan_structure(a);
    REQUIRE(js.groups.size() == 1);
    CHECK(std::abs(js.groups[0].eigenvalue) < 1e-10);
    CHECK(js.groups[0].block_sizes == std::vector<int>{2});
    CHECK(!js.diagonalizable());
    CHECK(js.max_block_size() == 2);
  }
  SUBCASE("diagonal") {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    a(2, 2) = 3.0;
    const auto js = thirdq::jordan_structure(a);
    CHECK(js.groups.size() == 3);
    CHECK(js.diagonalizable());
    CHECK(js.max_block_size() == 1);
  }
  SUBCASE("mixed block sizes at one eigenvalue") {
    const ComplexMatrix a = block_diag({jordan_block(Complex(1.0, -0.5), 3),
                                        jordan_block(Complex(1.0, -0.5), 1),
                                        jordan_block(2.0, 2)});
    const auto js = thirdq::jordan_structure(a);
    REQUIRE(js.groups.size() == 2);
    bool saw_31 = false, saw_2 = false;
    for (const auto& g : js.groups) {
      if (g.block_sizes == std::vector<int>{3, 1}) saw_31 = true;
      if (g.block_sizes == std::vector<int>{2}) saw_2 = true;
    }
    CHECK(saw_31);
    CHECK(saw_2);
    CHECK(js.max_block_size() == 3);
  }
}

TEST_CASE("jordan structure survives similarity transforms") {
  thirdq::SplitMix64 rng(13);
  const ComplexMatrix j = block_diag(
      {jordan_block(Complex(0.0, 1.5), 2), jordan_block(Complex(0.0, 1.5), 2),
       jordan_block(-1.0, 1)});
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix t =
        ComplexMatrix::Identity(5, 5) + 0.15 * gen::matrix(rng, 5, 5);
    const auto js = thirdq::jordan_structure(t * j * t.inverse(), 1e-8);
    CAPTURE(trial);
    REQUIRE(js.groups.size() == 2);
    bool saw_22 = false;
    for (const auto& g : js.groups) {
      if (g.block_sizes == std::vector<int>{2, 2}) saw_22 = true;
    }
    CHECK(saw_22);
  }
}

TEST_CASE("expm matches series summation") {
  thirdq::SplitMix64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 4);
    const ComplexMatrix a = 1.5 * gen::matrix(rng, n, n);
    const ComplexMatrix e = thirdq::expm(a);
    const ComplexMatrix ref = oracle::expm_series(a);
    CAPTURE(trial);
    CHECK((e - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
  }
  CHECK((thirdq::expm(ComplexMatrix::Zero(3, 3)) - ComplexMatrix::Identity(3, 3)).norm() <=
        1e-14);
}

TEST_CASE("expm of A and -A invert each other") {
  thirdq::SplitMix64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.next() % 3);
    ComplexMatrix a = gen::matrix(rng, n, n);
    a *= gen::uniform(rng, 0.5, 10.0) / a.norm();
    const ComplexMatrix prod = thirdq::expm(a) * thirdq::expm(-a);
    CAPTURE(trial);
    CHECK((prod - ComplexMatrix::Identity(n, n)).norm() <= 1e-10);
  }
}

TEST_CASE("sylvester solve against eigendecomposition route") {
  thirdq::SplitMix64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a =
        gen::matrix(rng, 3, 3) + 5.0 * ComplexMatrix::Identity(3, 3);
    const ComplexMatrix b =
        gen::matrix(rng, 2, 2) + 5.0 * ComplexMatrix::Identity(2, 2);
    const ComplexMatrix c = gen::matrix(rng, 3, 2);
    const auto sol = thirdq::solve_sylvester(a, b, c);
    CAPTURE(trial);
    CHECK((a * sol.z + sol.z * b - c).norm() <= 1e-9 * std::max(1.0, c.norm()));
    CHECK(sol.residual <= 1e-9 * std::max(1.0, c.norm()));
    const ComplexMatrix ref = oracle::sylvester_eig_route(a, b, c);
    CHECK((sol.z - ref).norm() <= 1e-8 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("sylvester solve rejects resonant spectra") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  ComplexMatrix b = ComplexMatrix::Zero(2, 2);
  b(0, 0) = 1.0;
  b(1, 1) = -1.0;
  const ComplexMatrix c = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS(thirdq::solve_sylvester(a, b, c), thirdq::NoUniqueSolutionError);
  try {
    thirdq::solve_sylvester(a, b, c);
  } catch (const thirdq::NoUniqueSolutionError& err) {
    CHECK(err.min_eigenvalue_sum <= 1e-10);
  }
}

TEST_CASE("splitmix64 reference stream") {
  thirdq::SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  CHECK(rng.next() == 0x06C45D188009454Full);

  thirdq::SplitMix64 u(42);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.u01();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  CHECK(thirdq::stream_seed(7, 0) != thirdq::stream_seed(7, 1));
  CHECK(thirdq::stream_seed(7, 3) == thirdq::stream_seed(7, 3));
}

}  // TEST_SUITE

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace thirdq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr const char* kVersion = "0.1.0";

/* A Sylvester/Lyapunov system has no unique solution when some eigenvalue
 * sum alpha_i + beta_j vanishes. Carries the offending minimum. */
class NoUniqueSolutionError : public std::runtime_error {
 public:
  NoUniqueSolutionError(const std::string& what, double min_sum)
      : std::runtime_error(what), min_eigenvalue_sum(min_sum) {}
  double min_eigenvalue_sum;
};

void require_square(const ComplexMatrix& a, const char* name);
void require_finite(const ComplexMatrix& a, const char* name);

}  // namespace thirdq

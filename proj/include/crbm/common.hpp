// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_COMMON_HPP
#define CRBM_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crbm
{

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr Complex I_UNIT{0.0, 1.0};

// Input or configuration that cannot be used (exit code 1 at the CLI).
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Solver breakdown, singular systems, round-off breaches (exit code 2 at the CLI).
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// One point mu = (k, M) of the physical parameter domain.
struct ParameterPoint
{
  double k = 1.0;  // wavenumber, k > 0
  double mach = 0.0;  // Mach number, 0 <= M < 1

  void Validate() const;
  bool operator==(const ParameterPoint &) const = default;
};

std::string ToString(const ParameterPoint &mu);

}  // namespace crbm

#endif  // CRBM_COMMON_HPP

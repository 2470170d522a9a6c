// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_PML_HPP
#define CRBM_PML_HPP

#include "crbm/assembly.hpp"
#include "crbm/common.hpp"
#include "crbm/mesh.hpp"

namespace crbm
{

// Absorbing layers [x_minus - L, x_minus] and [x_plus, x_plus + L].
struct PmlConfig
{
  double x_minus = -1.0;
  double x_plus = 1.0;
  double width = 1.0;
  double sigma0 = 0.0;
  double omega = 1.0;

  void Validate() const;
};

double DampingSigma(double x1, const PmlConfig &cfg);

// d(sigma)/dx1
double DampingSigmaDerivative(double x1, const PmlConfig &cfg);

// -i w / (-i w + sigma)
Complex DampingHat(double x1, const PmlConfig &cfg);

// i w sigma' / (-i w + sigma)^2
Complex DampingHatDerivative(double x1, const PmlConfig &cfg);

// theta = {-(1-M^2), -1, -2ikM, -ikM, k^2/(1-M^2), -k^2 M^2/(1-M^2)}
std::vector<Complex> PmlCoefficients(const ParameterPoint &mu);

// Six blocks on all mesh vertices:
//   B1 = int s d1u d1v,  B2 = int d2u d2v / s,  B3 = int s u d1v,
//   B4 = int s' u v,     B5 = int u v / s,      B6 = int s u v
// with s = sigma_hat. Elements must be region tagged consistently with cfg.
AffineOperator AssembleAffinePml(const Mesh &mesh, const PmlConfig &cfg);

}  // namespace crbm

#endif  // CRBM_PML_HPP

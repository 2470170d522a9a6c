// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_ANALYTIC_HPP
#define CRBM_ANALYTIC_HPP

#include <array>
#include <functional>
#include <optional>

#include "crbm/common.hpp"
#include "crbm/mesh.hpp"
#include "crbm/pml.hpp"

namespace crbm
{

// Bessel functions of the first and second kind, orders 0 and 1, x > 0.
double BesselJ0(double x);
double BesselY0(double x);
double BesselJ1(double x);
double BesselY1(double x);

// H_n^(1)(x) = J_n(x) + i Y_n(x), x > 0.
Complex Hankel0(double x);
Complex Hankel1(double x);

// Principal-branch continuation for Re z > 0.
Complex Hankel0(Complex z);
Complex Hankel1(Complex z);

using Gradient = std::array<Complex, 2>;

struct ExactField
{
  std::function<Complex(double, double)> value;
  std::function<Gradient(double, double)> gradient;  // may be empty
};

// Free-field solution of the convected equation with unit point source,
//   i/(4 sqrt(1-M^2)) H0(k rho/(1-M^2)) exp(-i k M x1/(1-M^2)),
//   rho = sqrt(x1^2 + (1-M^2) x2^2), coordinates relative to the source.
Complex FundamentalSolution(double x1, double x2, const ParameterPoint &mu,
                            const Point2 &source = {});
Gradient FundamentalSolutionGradient(double x1, double x2, const ParameterPoint &mu,
                                     const Point2 &source = {});
ExactField FundamentalField(const ParameterPoint &mu, const Point2 &source = {});

// Same field continued into the absorbing layers: x1 is replaced by the
// complex stretched coordinate inside rho only. Equals FundamentalSolution
// between the layers.
Complex StretchedFundamentalSolution(double x1, double x2, const ParameterPoint &mu,
                                     const PmlConfig &cfg, const Point2 &source = {});

struct ErrorNorms
{
  double linf = 0.0;
  double l2 = 0.0;
  double h1 = 0.0;  // full H1 norm (value and gradient)
};

// Errors of the P1 field u (nodal values on all vertices) against the exact
// field. Only elements accepted by the filter contribute; L-infinity is taken
// over their vertices. Gradient falls back to central differences.
ErrorNorms ComputeErrorNorms(const Mesh &mesh, const ComplexVector &u, const ExactField &exact,
                             const std::function<bool(int)> &element_filter = {});

// Same norms of the field itself (exact = 0), used for relative errors.
ErrorNorms ComputeFieldNorms(const Mesh &mesh, const ComplexVector &u,
                             const std::function<bool(int)> &element_filter = {});

// Nodal interpolant of an exact field.
ComplexVector Interpolate(const Mesh &mesh, const std::function<Complex(double, double)> &f);

}  // namespace crbm

#endif  // CRBM_ANALYTIC_HPP

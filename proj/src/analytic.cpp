// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "crbm/assembly.hpp"

namespace crbm
{

namespace
{

void CheckAwayFromSource(double x, double y)
{
  if (x == 0.0 && y == 0.0)
  {
    throw InputError("fundamental solution evaluated at the source point");
  }
}

}  // namespace

Complex FundamentalSolution(double x1, double x2, const ParameterPoint &mu, const Point2 &source)
{
  const double x = x1 - source.x, y = x2 - source.y;
  CheckAwayFromSource(x, y);
  const double beta2 = 1.0 - mu.mach * mu.mach;
  const double rho = std::sqrt(x * x + beta2 * y * y);
  const Complex phase = std::exp(-I_UNIT * mu.k * mu.mach * x / beta2);
  return I_UNIT / (4.0 * std::sqrt(beta2)) * Hankel0(mu.k * rho / beta2) * phase;
}

Gradient FundamentalSolutionGradient(double x1, double x2, const ParameterPoint &mu,
                                     const Point2 &source)
{
  const double x = x1 - source.x, y = x2 - source.y;
  CheckAwayFromSource(x, y);
  const double beta2 = 1.0 - mu.mach * mu.mach;
  const double rho = std::sqrt(x * x + beta2 * y * y);
  const double z = mu.k * rho / beta2;
  const Complex h0 = Hankel0(z), h1 = Hankel1(z);
  const Complex c = I_UNIT / (4.0 * std::sqrt(beta2)) *
                    std::exp(-I_UNIT * mu.k * mu.mach * x / beta2);
  const double dzdx = mu.k * x / (beta2 * rho);
  const double dzdy = mu.k * y / rho;
  return {c * (-h1 * dzdx - I_UNIT * mu.k * mu.mach / beta2 * h0), c * (-h1 * dzdy)};
}

ExactField FundamentalField(const ParameterPoint &mu, const Point2 &source)
{
  return {[mu, source](double x, double y) { return FundamentalSolution(x, y, mu, source); },
          [mu, source](double x, double y)
          { return FundamentalSolutionGradient(x, y, mu, source); }};
}

Complex StretchedFundamentalSolution(double x1, double x2, const ParameterPoint &mu,
                                     const PmlConfig &cfg, const Point2 &source)
{
  Complex xs = x1;
  if (x1 < cfg.x_minus || x1 > cfg.x_plus)
  {
    const double d = x1 < cfg.x_minus ? x1 - cfg.x_minus : x1 - cfg.x_plus;
    xs += I_UNIT * cfg.sigma0 * d * d * d / (3.0 * cfg.omega);
  }
  if (xs.imag() == 0.0)
  {
    return FundamentalSolution(x1, x2, mu, source);
  }
  const Complex x = xs - source.x;
  const double y = x2 - source.y;
  const double beta2 = 1.0 - mu.mach * mu.mach;
  const Complex rho = std::sqrt(x * x + beta2 * y * y);
  const Complex phase = std::exp(-I_UNIT * mu.k * mu.mach * (x1 - source.x) / beta2);
  return I_UNIT / (4.0 * std::sqrt(beta2)) * Hankel0(mu.k * rho / beta2) * phase;
}

ComplexVector Interpolate(const Mesh &mesh, const std::function<Complex(double, double)> &f)
{
  ComplexVector u(mesh.NumVertices());
  for (int v = 0; v < mesh.NumVertices(); ++v)
  {
    u[v] = f(mesh.vertices[v].x, mesh.vertices[v].y);
  }
  return u;
}

namespace
{

Gradient NumericalGradient(const std::function<Complex(double, double)> &f, double x, double y,
                           double h)
{
  return {(f(x + h, y) - f(x - h, y)) / (2.0 * h), (f(x, y + h) - f(x, y - h)) / (2.0 * h)};
}

void RequireFinite(Complex v)
{
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
  {
    throw InputError("exact field undefined at an evaluation point");
  }
}

}  // namespace

ErrorNorms ComputeErrorNorms(const Mesh &mesh, const ComplexVector &u, const ExactField &exact,
                             const std::function<bool(int)> &element_filter)
{
  if (u.size() != mesh.NumVertices())
  {
    throw InputError("error norms: nodal vector does not match the mesh");
  }
  ErrorNorms n;
  double l2 = 0.0, semi = 0.0;
  std::vector<char> seen(mesh.NumVertices(), 0);
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    if (element_filter && !element_filter(e))
    {
      continue;
    }
    const auto &t = mesh.elements[e];
    for (int v : t)
    {
      if (!seen[v] && exact.value)
      {
        seen[v] = 1;
        const Complex ex = exact.value(mesh.vertices[v].x, mesh.vertices[v].y);
        RequireFinite(ex);
        n.linf = std::max(n.linf, std::abs(u[v] - ex));
      }
      else if (!seen[v])
      {
        seen[v] = 1;
        n.linf = std::max(n.linf, std::abs(u[v]));
      }
    }
    const auto map = GetElementMap(mesh, e);
    const auto g = P1Gradients(map);
    const auto q = GetMidpointRule(mesh, e);
    Complex gh[2] = {0.0, 0.0};
    double hmax = 0.0;
    for (int i = 0; i < 3; ++i)
    {
      gh[0] += u[t[i]] * g[i][0];
      gh[1] += u[t[i]] * g[i][1];
      const auto &a = mesh.vertices[t[i]];
      const auto &b = mesh.vertices[t[(i + 1) % 3]];
      hmax = std::max(hmax, std::hypot(a.x - b.x, a.y - b.y));
    }
    const double w = map.area / 3.0;
    for (int p = 0; p < 3; ++p)
    {
      Complex uh = 0.0;
      for (int i = 0; i < 3; ++i)
      {
        uh += u[t[i]] * MidpointRule::phi[p][i];
      }
      Complex ex = 0.0;
      Gradient gex = {0.0, 0.0};
      if (exact.value)
      {
        const auto &pt = q.points[p];
        ex = exact.value(pt.x, pt.y);
        RequireFinite(ex);
        gex = exact.gradient ? exact.gradient(pt.x, pt.y)
                             : NumericalGradient(exact.value, pt.x, pt.y, 1e-6 * hmax);
        RequireFinite(gex[0]);
        RequireFinite(gex[1]);
      }
      l2 += w * std::norm(uh - ex);
      semi += w * (std::norm(gh[0] - gex[0]) + std::norm(gh[1] - gex[1]));
    }
  }
  n.l2 = std::sqrt(l2);
  n.h1 = std::sqrt(l2 + semi);
  return n;
}

ErrorNorms ComputeFieldNorms(const Mesh &mesh, const ComplexVector &u,
                             const std::function<bool(int)> &element_filter)
{
  return ComputeErrorNorms(mesh, u, ExactField{}, element_filter);
}

}  // namespace crbm

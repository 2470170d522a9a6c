// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/pml.hpp"

#include <cmath>

namespace crbm
{

void PmlConfig::Validate() const
{
  if (!(x_minus < x_plus))
  {
    throw InputError("pml: x_minus must be smaller than x_plus");
  }
  if (!(width > 0.0))
  {
    throw InputError("pml: layer width must be positive");
  }
  if (!(sigma0 >= 0.0) || !std::isfinite(sigma0))
  {
    throw InputError("pml: sigma0 must be nonnegative");
  }
  if (!(omega > 0.0) || !std::isfinite(omega))
  {
    throw InputError("pml: omega must be positive");
  }
}

double DampingSigma(double x1, const PmlConfig &cfg)
{
  if (x1 < cfg.x_minus)
  {
    return cfg.sigma0 * (x1 - cfg.x_minus) * (x1 - cfg.x_minus);
  }
  if (x1 > cfg.x_plus)
  {
    return cfg.sigma0 * (x1 - cfg.x_plus) * (x1 - cfg.x_plus);
  }
  return 0.0;
}

double DampingSigmaDerivative(double x1, const PmlConfig &cfg)
{
  if (x1 < cfg.x_minus)
  {
    return 2.0 * cfg.sigma0 * (x1 - cfg.x_minus);
  }
  if (x1 > cfg.x_plus)
  {
    return 2.0 * cfg.sigma0 * (x1 - cfg.x_plus);
  }
  return 0.0;
}

Complex DampingHat(double x1, const PmlConfig &cfg)
{
  const double s = DampingSigma(x1, cfg);
  if (s == 0.0)
  {
    return 1.0;
  }
  const Complex iw = -I_UNIT * cfg.omega;
  return iw / (iw + s);
}

Complex DampingHatDerivative(double x1, const PmlConfig &cfg)
{
  const double ds = DampingSigmaDerivative(x1, cfg);
  if (ds == 0.0)
  {
    return 0.0;
  }
  const Complex d = -I_UNIT * cfg.omega + DampingSigma(x1, cfg);
  return I_UNIT * cfg.omega * ds / (d * d);
}

std::vector<Complex> PmlCoefficients(const ParameterPoint &mu)
{
  const double beta2 = 1.0 - mu.mach * mu.mach;
  const double k2 = mu.k * mu.k;
  const Complex ikm = I_UNIT * mu.k * mu.mach;
  return {-beta2, -1.0, -2.0 * ikm, -ikm, k2 / beta2, -k2 * mu.mach * mu.mach / beta2};
}

AffineOperator AssembleAffinePml(const Mesh &mesh, const PmlConfig &cfg)
{
  cfg.Validate();
  if (mesh.NumElements() == 0)
  {
    throw InputError("pml assembly: empty mesh");
  }
  if (mesh.element_regions.size() != mesh.elements.size())
  {
    throw InputError("pml assembly: elements carry no region tags");
  }
  const int n = mesh.NumVertices();
  std::array<std::vector<Triplet>, 6> t;
  for (auto &v : t)
  {
    v.reserve(9 * mesh.elements.size());
  }
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto &v = mesh.elements[e];
    const double cx = (mesh.vertices[v[0]].x + mesh.vertices[v[1]].x + mesh.vertices[v[2]].x) / 3.0;
    const Region expect = cx < cfg.x_minus  ? Region::PmlLeft
                          : cx > cfg.x_plus ? Region::PmlRight
                                            : Region::Interior;
    if (mesh.element_regions[e] != expect)
    {
      throw InputError("pml assembly: element " + std::to_string(e) + " tagged " +
                       std::string(RegionName(mesh.element_regions[e])) + " but lies in " +
                       std::string(RegionName(expect)));
    }
    const auto map = GetElementMap(mesh, e);
    const auto g = P1Gradients(map);
    const auto q = GetMidpointRule(mesh, e);
    const double w = map.area / 3.0;
    Complex s_sum = 0.0, s_inv_sum = 0.0;
    std::array<Complex, 3> s, s_inv, ds;
    for (int p = 0; p < 3; ++p)
    {
      s[p] = DampingHat(q.points[p].x, cfg);
      s_inv[p] = 1.0 / s[p];
      ds[p] = DampingHatDerivative(q.points[p].x, cfg);
      s_sum += w * s[p];
      s_inv_sum += w * s_inv[p];
    }
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        // row i: test function, column j: trial function
        Complex b3 = 0.0, b4 = 0.0, b5 = 0.0, b6 = 0.0;
        for (int p = 0; p < 3; ++p)
        {
          const double pj = MidpointRule::phi[p][j];
          const double pij = pj * MidpointRule::phi[p][i];
          b3 += w * s[p] * pj * g[i][0];
          b4 += w * ds[p] * pij;
          b5 += w * s_inv[p] * pij;
          b6 += w * s[p] * pij;
        }
        t[0].push_back({v[i], v[j], s_sum * g[i][0] * g[j][0]});
        t[1].push_back({v[i], v[j], s_inv_sum * g[i][1] * g[j][1]});
        t[2].push_back({v[i], v[j], b3});
        t[3].push_back({v[i], v[j], b4});
        t[4].push_back({v[i], v[j], b5});
        t[5].push_back({v[i], v[j], b6});
      }
    }
  }
  AffineOperator op;
  for (auto &tt : t)
  {
    op.blocks.push_back(SparseMatrix::FromTriplets(n, n, std::move(tt)));
  }
  op.theta = PmlCoefficients;
  op.family = "pml";
  return op;
}

}  // namespace crbm

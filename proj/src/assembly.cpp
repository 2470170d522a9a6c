// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/assembly.hpp"
#include "crbm/csv.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace crbm
{

void ParameterPoint::Validate() const
{
  if (!(k > 0.0) || !std::isfinite(k))
  {
    throw InputError("parameter: wavenumber must be positive, got " + std::to_string(k));
  }
  if (!(mach >= 0.0 && mach < 1.0))
  {
    throw InputError("parameter: Mach number must lie in [0, 1), got " + std::to_string(mach));
  }
}

std::string ToString(const ParameterPoint &mu)
{
  return "(k=" + FormatDouble(mu.k) + ", M=" + FormatDouble(mu.mach) + ")";
}

LocalAlpha ComputeLocalAlpha(const ElementMap &map, double mach)
{
  const double b11 = map.B[0][0], b12 = map.B[0][1], b21 = map.B[1][0], b22 = map.B[1][1];
  const double m2 = mach * mach;
  const double s = 1.0 / (4.0 * map.area);
  return {s * (b12 * b12 + b22 * b22 - m2 * b22 * b22),
          s * (-b11 * b12 - b21 * b22 + m2 * b21 * b22),
          s * (b11 * b11 + b21 * b21 - m2 * b21 * b21)};
}

LocalMatrices ComputeLocalMatrices(const ElementMap &map, const ParameterPoint &mu)
{
  const auto alpha = ComputeLocalAlpha(map, mu.mach);
  const double mass_scale = mu.k * mu.k * map.area / 12.0;
  // -2ikM int p d1(v): the templates carry det(B) d1(phi_i) and int phi_j = |K|/3,
  // which leaves a factor 1/3.
  const Complex conv_scale = -I_UNIT * mu.k * mu.mach / 3.0;
  LocalMatrices lm;
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      lm.stiffness(i, j) = alpha.a1 * LocalTemplates::S1[i][j] +
                           alpha.a2 * LocalTemplates::S2[i][j] +
                           alpha.a3 * LocalTemplates::S3[i][j];
      lm.mass(i, j) = mass_scale * LocalTemplates::Mass[i][j];
      lm.convection(i, j) =
          conv_scale * (map.B[1][1] * LocalTemplates::C1[i][j] - map.B[1][0] * LocalTemplates::C2[i][j]);
    }
  }
  return lm;
}

std::array<std::array<double, 2>, 3> P1Gradients(const ElementMap &map)
{
  // grad phi = B^{-T} grad_hat phi
  const double det = map.Det();
  const double ref[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
  std::array<std::array<double, 2>, 3> g;
  for (int i = 0; i < 3; ++i)
  {
    g[i][0] = (map.B[1][1] * ref[i][0] - map.B[1][0] * ref[i][1]) / det;
    g[i][1] = (-map.B[0][1] * ref[i][0] + map.B[0][0] * ref[i][1]) / det;
  }
  return g;
}

MidpointRule GetMidpointRule(const Mesh &mesh, int e)
{
  const auto &t = mesh.elements[e];
  MidpointRule q;
  for (int i = 0; i < 3; ++i)
  {
    const auto &a = mesh.vertices[t[i]];
    const auto &b = mesh.vertices[t[(i + 1) % 3]];
    q.points[i] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  }
  return q;
}

std::vector<Complex> AffineOperator::Coefficients(const ParameterPoint &mu) const
{
  auto c = theta(mu);
  if (static_cast<int>(c.size()) != NumTerms())
  {
    throw InputError("affine operator '" + family + "': coefficient count mismatch");
  }
  return c;
}

std::vector<Complex> AffineVector::Coefficients(const ParameterPoint &mu) const
{
  auto c = theta(mu);
  if (static_cast<int>(c.size()) != NumTerms())
  {
    throw InputError("affine vector '" + family + "': coefficient count mismatch");
  }
  return c;
}

SparseMatrix EvalOperator(const AffineOperator &op, const ParameterPoint &mu)
{
  const auto c = op.Coefficients(mu);
  std::vector<const SparseMatrix *> ptrs;
  for (const auto &b : op.blocks)
  {
    ptrs.push_back(&b);
  }
  return SparseMatrix::LinearCombination(c, ptrs);
}

ComplexVector EvalVector(const AffineVector &vec, const ParameterPoint &mu)
{
  const auto c = vec.Coefficients(mu);
  ComplexVector out = ComplexVector::Zero(vec.Size());
  for (int m = 0; m < vec.NumTerms(); ++m)
  {
    out += c[m] * vec.blocks[m];
  }
  return out;
}

std::vector<Complex> BoundedCoefficients(const ParameterPoint &mu)
{
  return {1.0, mu.mach * mu.mach, mu.k * mu.k, I_UNIT * mu.k * mu.mach};
}

namespace
{

void AddLocal(std::vector<Triplet> &t, const std::array<int, 3> &v, const Matrix3c &local)
{
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      t.push_back({v[i], v[j], local(i, j)});
    }
  }
}

}  // namespace

AffineOperator AssembleAffineBounded(const Mesh &mesh)
{
  if (mesh.NumElements() == 0)
  {
    throw InputError("assembly: empty mesh");
  }
  const int n = mesh.NumVertices();
  std::array<std::vector<Triplet>, 4> t;
  for (auto &v : t)
  {
    v.reserve(9 * mesh.elements.size());
  }
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto map = GetElementMap(mesh, e);
    const auto a0 = ComputeLocalAlpha(map, 0.0);
    const double s = 1.0 / (4.0 * map.area);
    const double b21 = map.B[1][0], b22 = map.B[1][1];
    // alpha(M) = alpha(0) + M^2 * alpha1
    const LocalAlpha a1{-s * b22 * b22, s * b21 * b22, -s * b21 * b21};
    Matrix3c stiff0, stiff1, mass, conv;
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        stiff0(i, j) = -(a0.a1 * LocalTemplates::S1[i][j] + a0.a2 * LocalTemplates::S2[i][j] +
                         a0.a3 * LocalTemplates::S3[i][j]);
        stiff1(i, j) = -(a1.a1 * LocalTemplates::S1[i][j] + a1.a2 * LocalTemplates::S2[i][j] +
                         a1.a3 * LocalTemplates::S3[i][j]);
        mass(i, j) = map.area / 12.0 * LocalTemplates::Mass[i][j];
        conv(i, j) = -(b22 * LocalTemplates::C1[i][j] - b21 * LocalTemplates::C2[i][j]) / 3.0;
      }
    }
    const auto &v = mesh.elements[e];
    AddLocal(t[0], v, stiff0);
    AddLocal(t[1], v, stiff1);
    AddLocal(t[2], v, mass);
    AddLocal(t[3], v, conv);
  }
  AffineOperator op;
  for (auto &tt : t)
  {
    op.blocks.push_back(SparseMatrix::FromTriplets(n, n, std::move(tt)));
  }
  op.theta = BoundedCoefficients;
  op.family = "bounded";
  return op;
}

SparseMatrix AssembleDirect(const Mesh &mesh, const ParameterPoint &mu)
{
  const int n = mesh.NumVertices();
  std::vector<Triplet> t;
  t.reserve(9 * mesh.elements.size());
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto lm = ComputeLocalMatrices(GetElementMap(mesh, e), mu);
    AddLocal(t, mesh.elements[e], lm.System());
  }
  return SparseMatrix::FromTriplets(n, n, std::move(t));
}

namespace
{

// weight_grad * (grad u . grad v) + weight_mass * u v
SparseMatrix AssembleScalarForm(const Mesh &mesh, double wx, double wy, double wm)
{
  const int n = mesh.NumVertices();
  std::vector<Triplet> t;
  t.reserve(9 * mesh.elements.size());
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto map = GetElementMap(mesh, e);
    const auto g = P1Gradients(map);
    Matrix3c local;
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
      {
        local(i, j) = map.area * (wx * g[i][0] * g[j][0] + wy * g[i][1] * g[j][1]) +
                      wm * map.area / 12.0 * LocalTemplates::Mass[i][j];
      }
    }
    AddLocal(t, mesh.elements[e], local);
  }
  return SparseMatrix::FromTriplets(n, n, std::move(t));
}

}  // namespace

SparseMatrix AssembleH1(const Mesh &mesh) { return AssembleScalarForm(mesh, 1.0, 1.0, 1.0); }
SparseMatrix AssembleMass(const Mesh &mesh) { return AssembleScalarForm(mesh, 0.0, 0.0, 1.0); }
SparseMatrix AssembleStiffness(const Mesh &mesh)
{
  return AssembleScalarForm(mesh, 1.0, 1.0, 0.0);
}

ComplexVector AssembleLoad(const Mesh &mesh, const SourceFn &f)
{
  ComplexVector load = ComplexVector::Zero(mesh.NumVertices());
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto map = GetElementMap(mesh, e);
    const auto q = GetMidpointRule(mesh, e);
    const auto &v = mesh.elements[e];
    for (int p = 0; p < 3; ++p)
    {
      const Complex fv = f(q.points[p].x, q.points[p].y) * (map.area / 3.0);
      for (int i = 0; i < 3; ++i)
      {
        load[v[i]] += fv * MidpointRule::phi[p][i];
      }
    }
  }
  return load;
}

ComplexVector AssembleMeanFunctional(const Mesh &mesh, const Rect &rect)
{
  ComplexVector l = ComplexVector::Zero(mesh.NumVertices());
  double area = 0.0;
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto &v = mesh.elements[e];
    const double cx = (mesh.vertices[v[0]].x + mesh.vertices[v[1]].x + mesh.vertices[v[2]].x) / 3.0;
    const double cy = (mesh.vertices[v[0]].y + mesh.vertices[v[1]].y + mesh.vertices[v[2]].y) / 3.0;
    if (cx < rect.x0 || cx > rect.x1 || cy < rect.y0 || cy > rect.y1)
    {
      continue;
    }
    const double a = GetElementMap(mesh, e).area;
    area += a;
    for (int i = 0; i < 3; ++i)
    {
      l[v[i]] += a / 3.0;
    }
  }
  if (!(area > 0.0))
  {
    throw InputError("measurement rectangle contains no element centroid");
  }
  return l / area;
}

DofMap::DofMap(const Mesh &mesh, const std::vector<int> &dirichlet_tags)
{
  const int n = mesh.NumVertices();
  std::vector<char> constrained(n, 0);
  std::vector<char> used(n, 0);
  for (const auto &t : mesh.elements)
  {
    for (int v : t)
    {
      used[v] = 1;
    }
  }
  const std::set<int> tags(dirichlet_tags.begin(), dirichlet_tags.end());
  for (const auto &be : mesh.boundary_edges)
  {
    if (tags.count(be.tag))
    {
      constrained[be.v[0]] = constrained[be.v[1]] = 1;
    }
  }
  free_index_.assign(n, -1);
  for (int v = 0; v < n; ++v)
  {
    if (constrained[v] || !used[v])
    {
      constrained_.push_back(v);
    }
    else
    {
      free_index_[v] = static_cast<int>(free_.size());
      free_.push_back(v);
    }
  }
}

ComplexVector DiscreteProblem::BoundaryValues(const ParameterPoint &mu) const
{
  ComplexVector g = ComplexVector::Zero(static_cast<Eigen::Index>(constrained_points.size()));
  if (dirichlet.mode == DirichletMode::Homogeneous || !dirichlet.value)
  {
    return g;
  }
  for (std::size_t i = 0; i < constrained_points.size(); ++i)
  {
    g[i] = dirichlet.value(constrained_points[i].x, constrained_points[i].y, mu);
  }
  return g;
}

ComplexVector DiscreteProblem::Rhs(const ParameterPoint &mu) const
{
  if (affine_rhs)
  {
    return EvalVector(f, mu);
  }
  const ComplexVector g = BoundaryValues(mu);
  const auto theta = a.Coefficients(mu);
  ComplexVector rhs = load;
  for (std::size_t m = 0; m < coupling.size(); ++m)
  {
    rhs -= theta[m] * (coupling[m] * g);
  }
  return rhs;
}

ComplexVector DiscreteProblem::Reconstruct(const ComplexVector &u_free,
                                           const ParameterPoint &mu) const
{
  if (u_free.size() != static_cast<Eigen::Index>(free_vertices.size()))
  {
    throw InputError("reconstruct: free-dof vector has wrong size");
  }
  ComplexVector u = ComplexVector::Zero(num_vertices);
  for (std::size_t i = 0; i < free_vertices.size(); ++i)
  {
    u[free_vertices[i]] = u_free[i];
  }
  const ComplexVector g = BoundaryValues(mu);
  for (std::size_t i = 0; i < constrained_vertices.size(); ++i)
  {
    u[constrained_vertices[i]] = g[i];
  }
  return u;
}

DiscreteProblem ApplyDirichlet(const Mesh &mesh, const AffineOperator &full_op,
                               const SparseMatrix &full_x, const ComplexVector &full_load,
                               const DirichletData &dirichlet,
                               const std::optional<ComplexVector> &full_output)
{
  std::set<int> present;
  for (const auto &be : mesh.boundary_edges)
  {
    present.insert(be.tag);
  }
  for (int tag : dirichlet.tags)
  {
    if (!present.count(tag))
    {
      throw InputError("Dirichlet tag " + std::to_string(tag) + " is absent from the mesh");
    }
  }
  if (dirichlet.mode != DirichletMode::Homogeneous && !dirichlet.value)
  {
    throw InputError("non-homogeneous Dirichlet data without a value function");
  }
  const int n = mesh.NumVertices();
  if (full_op.Size() != n || full_x.Rows() != n || full_load.size() != n)
  {
    throw InputError("apply Dirichlet: inconsistent dof counts");
  }

  DofMap dofs(mesh, dirichlet.tags);
  DiscreteProblem p;
  p.num_vertices = n;
  p.free_vertices = dofs.Free();
  p.constrained_vertices = dofs.Constrained();
  for (int v : p.constrained_vertices)
  {
    p.constrained_points.push_back(mesh.vertices[v]);
  }
  p.dirichlet = dirichlet;
  p.a.theta = full_op.theta;
  p.a.family = full_op.family;
  for (const auto &b : full_op.blocks)
  {
    p.a.blocks.push_back(b.Restrict(dofs.Free(), dofs.Free()));
    p.coupling.push_back(b.Restrict(dofs.Free(), dofs.Constrained()));
  }
  p.x = full_x.Restrict(dofs.Free(), dofs.Free());
  p.load.resize(dofs.NumFree());
  for (int i = 0; i < dofs.NumFree(); ++i)
  {
    p.load[i] = full_load[dofs.Free()[i]];
  }
  if (full_output)
  {
    AffineVector out;
    ComplexVector l(dofs.NumFree());
    for (int i = 0; i < dofs.NumFree(); ++i)
    {
      l[i] = (*full_output)[dofs.Free()[i]];
    }
    out.blocks.push_back(std::move(l));
    out.theta = [](const ParameterPoint &) { return std::vector<Complex>{1.0}; };
    out.family = "unit";
    p.output = std::move(out);
  }

  p.affine_rhs = dirichlet.mode != DirichletMode::PerParameter;
  if (!p.affine_rhs)
  {
    return p;
  }
  // F(mu) = load - sum_m theta_m(mu) A_m,fc g  with g parameter independent.
  const ComplexVector g = p.BoundaryValues(ParameterPoint{});
  std::vector<int> lifted_terms;
  const bool has_load = !p.load.isZero(0.0);
  if (has_load)
  {
    p.f.blocks.push_back(p.load);
  }
  if (dirichlet.mode == DirichletMode::ParameterIndependent)
  {
    for (int m = 0; m < full_op.NumTerms(); ++m)
    {
      ComplexVector v = -(p.coupling[m] * g);
      if (!v.isZero(0.0))
      {
        p.f.blocks.push_back(std::move(v));
        lifted_terms.push_back(m);
      }
    }
  }
  if (p.f.blocks.empty())
  {
    p.f.blocks.push_back(ComplexVector::Zero(dofs.NumFree()));
  }
  const bool unit_first = has_load || lifted_terms.empty();
  // lifted:<operator family>:<u|n>:<term list>
  p.f.family = "lifted:" + full_op.family + (unit_first ? ":u:" : ":n:");
  for (std::size_t i = 0; i < lifted_terms.size(); ++i)
  {
    p.f.family += (i ? "," : "") + std::to_string(lifted_terms[i]);
  }
  auto theta_a = full_op.theta;
  p.f.theta = [theta_a, lifted_terms, unit_first](const ParameterPoint &mu)
  {
    std::vector<Complex> c;
    if (unit_first)
    {
      c.push_back(1.0);
    }
    if (!lifted_terms.empty())
    {
      const auto ta = theta_a(mu);
      for (int m : lifted_terms)
      {
        c.push_back(ta[m]);
      }
    }
    return c;
  };
  return p;
}

}  // namespace crbm

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_ASSEMBLY_HPP
#define CRBM_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crbm/common.hpp"
#include "crbm/linsolve.hpp"
#include "crbm/mesh.hpp"

namespace crbm
{

// Constant 3x3 element templates of the P1 convected Helmholtz system.
struct LocalTemplates
{
  static constexpr int S1[3][3] = {{1, -1, 0}, {-1, 1, 0}, {0, 0, 0}};
  static constexpr int S2[3][3] = {{2, -1, -1}, {-1, 0, 1}, {-1, 1, 0}};
  static constexpr int S3[3][3] = {{1, 0, -1}, {0, 0, 0}, {-1, 0, 1}};
  static constexpr int Mass[3][3] = {{2, 1, 1}, {1, 2, 1}, {1, 1, 2}};
  static constexpr int C1[3][3] = {{-1, -1, -1}, {1, 1, 1}, {0, 0, 0}};
  static constexpr int C2[3][3] = {{-1, -1, -1}, {0, 0, 0}, {1, 1, 1}};
};

struct LocalAlpha
{
  double a1, a2, a3;
};

// Stiffness weights of S1, S2, S3 for the anisotropic diffusion
// diag(1 - M^2, 1) on element K.
LocalAlpha ComputeLocalAlpha(const ElementMap &map, double mach);

using Matrix3c = Eigen::Matrix<Complex, 3, 3>;

struct LocalMatrices
{
  Matrix3c stiffness;
  Matrix3c mass;
  Matrix3c convection;

  // -S + M + C, rows are test functions, columns trial functions.
  Matrix3c System() const { return -stiffness + mass + convection; }
};

LocalMatrices ComputeLocalMatrices(const ElementMap &map, const ParameterPoint &mu);

// Gradients of the three P1 hat functions on the element (constant).
std::array<std::array<double, 2>, 3> P1Gradients(const ElementMap &map);

// Edge-midpoint rule: the three quadrature points of an element with weight |K|/3 each,
// and the hat function values there.
struct MidpointRule
{
  std::array<Point2, 3> points;
  static constexpr double phi[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
};
MidpointRule GetMidpointRule(const Mesh &mesh, int e);

using CoefficientFn = std::function<std::vector<Complex>(const ParameterPoint &)>;

//
// A(mu) = sum_m theta_m(mu) A_m with parameter independent blocks. The
// family string names the coefficient set so that archives can check that
// an online run evaluates the same coefficients.
//
struct AffineOperator
{
  std::vector<SparseMatrix> blocks;
  CoefficientFn theta;
  std::string family;

  int NumTerms() const { return static_cast<int>(blocks.size()); }
  int Size() const { return blocks.empty() ? 0 : blocks.front().Rows(); }
  std::vector<Complex> Coefficients(const ParameterPoint &mu) const;
};

struct AffineVector
{
  std::vector<ComplexVector> blocks;
  CoefficientFn theta;
  std::string family;

  int NumTerms() const { return static_cast<int>(blocks.size()); }
  int Size() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().size()); }
  std::vector<Complex> Coefficients(const ParameterPoint &mu) const;
};

SparseMatrix EvalOperator(const AffineOperator &op, const ParameterPoint &mu);
ComplexVector EvalVector(const AffineVector &vec, const ParameterPoint &mu);

// theta = {1, M^2, k^2, i k M}
std::vector<Complex> BoundedCoefficients(const ParameterPoint &mu);

// Four real blocks on all mesh vertices: M-independent stiffness (negated),
// M^2 correction, mass, convection.
AffineOperator AssembleAffineBounded(const Mesh &mesh);

// Element-by-element assembly of -S + M + C at one parameter, no affine split.
SparseMatrix AssembleDirect(const Mesh &mesh, const ParameterPoint &mu);

// H1 inner product matrix (grad u . grad v + u v) on all vertices.
SparseMatrix AssembleH1(const Mesh &mesh);

// Plain mass matrix and the x1-derivative stiffness int d1u d1v on all vertices.
SparseMatrix AssembleMass(const Mesh &mesh);
SparseMatrix AssembleStiffness(const Mesh &mesh);

using SourceFn = std::function<Complex(double, double)>;

// Load vector int f phi_i by the edge-midpoint rule, all vertices.
ComplexVector AssembleLoad(const Mesh &mesh, const SourceFn &f);

struct Rect
{
  double x0, x1, y0, y1;
};

// Functional l(u) = mean of u over the elements whose centroid lies in rect.
ComplexVector AssembleMeanFunctional(const Mesh &mesh, const Rect &rect);

enum class DirichletMode
{
  Homogeneous,
  ParameterIndependent,
  PerParameter
};

using BoundaryValueFn = std::function<Complex(double, double, const ParameterPoint &)>;

struct DirichletData
{
  std::vector<int> tags;  // boundary tags carrying the condition
  BoundaryValueFn value;  // unused for Homogeneous
  DirichletMode mode = DirichletMode::Homogeneous;
};

//
// Split of mesh vertices into free and constrained degrees of freedom.
// Vertices that belong to no element are constrained to zero.
//
class DofMap
{
public:
  DofMap(const Mesh &mesh, const std::vector<int> &dirichlet_tags);

  int NumFree() const { return static_cast<int>(free_.size()); }
  int NumConstrained() const { return static_cast<int>(constrained_.size()); }
  int NumVertices() const { return static_cast<int>(free_index_.size()); }
  const std::vector<int> &Free() const { return free_; }
  const std::vector<int> &Constrained() const { return constrained_; }
  int FreeIndex(int vertex) const { return free_index_[vertex]; }

private:
  std::vector<int> free_;
  std::vector<int> constrained_;
  std::vector<int> free_index_;
};

//
// Full-order problem on the free degrees of freedom:
//   A(mu) u = F(mu),   F(mu) = load - A_fc(mu) g_c(mu).
// The right-hand side is affine unless the Dirichlet data depend on mu.
//
struct DiscreteProblem
{
  AffineOperator a;                   // free x free
  std::vector<SparseMatrix> coupling;  // free x constrained, one per operator term
  AffineVector f;                     // valid when affine_rhs
  bool affine_rhs = true;
  SparseMatrix x;                     // X inner product, free x free
  std::optional<AffineVector> output;  // measurement functional
  std::vector<Point2> constrained_points;
  std::vector<int> free_vertices;
  std::vector<int> constrained_vertices;
  int num_vertices = 0;
  ComplexVector load;                 // source load, free dofs
  DirichletData dirichlet;

  int Size() const { return a.Size(); }
  ComplexVector Rhs(const ParameterPoint &mu) const;
  ComplexVector BoundaryValues(const ParameterPoint &mu) const;
  // Nodal field on all vertices from free-dof values.
  ComplexVector Reconstruct(const ComplexVector &u_free, const ParameterPoint &mu) const;
};

// Restricts full-vertex operators to the free dofs and builds the lifted
// right-hand side. Throws InputError when a Dirichlet tag is absent.
DiscreteProblem ApplyDirichlet(const Mesh &mesh, const AffineOperator &full_op,
                               const SparseMatrix &full_x, const ComplexVector &full_load,
                               const DirichletData &dirichlet,
                               const std::optional<ComplexVector> &full_output = std::nullopt);

}  // namespace crbm

#endif  // CRBM_ASSEMBLY_HPP

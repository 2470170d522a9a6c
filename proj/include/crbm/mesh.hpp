// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_MESH_HPP
#define CRBM_MESH_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crbm
{

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2 &) const = default;
};

enum class Region : int
{
  Interior = 1,
  PmlLeft = 2,
  PmlRight = 3
};

std::string_view RegionName(Region r);

struct BoundaryEdge
{
  std::array<int, 2> v;
  int tag;

  bool operator==(const BoundaryEdge &) const = default;
};

//
// Conforming triangulation. Vertex indices are 0-based; elements are stored
// counterclockwise. Immutable once validated.
//
struct Mesh
{
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> elements;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<Region> element_regions;
  std::map<int, std::string> boundary_names;  // tag -> physical name

  int NumVertices() const { return static_cast<int>(vertices.size()); }
  int NumElements() const { return static_cast<int>(elements.size()); }

  // Boundary tag for a physical name, if any edge carries it.
  std::optional<int> BoundaryTag(std::string_view name) const;
  double Area() const;

  // Throws InputError describing the first violated mesh invariant.
  void Validate() const;

  bool operator==(const Mesh &) const = default;
};

// Affine map T(xhat) = B xhat + b from the reference triangle onto element K.
struct ElementMap
{
  double B[2][2];
  double b[2];
  double area;

  double Det() const { return B[0][0] * B[1][1] - B[0][1] * B[1][0]; }
  Point2 Apply(double xhat, double yhat) const;
  Point2 ApplyInverse(const Point2 &x) const;
};

ElementMap GetElementMap(const Mesh &mesh, int e);

Mesh ParseMsh(std::string_view text);
Mesh ReadMshFile(const std::string &path);
std::string WriteMsh(const Mesh &mesh);

struct RectHole
{
  double x0, x1, y0, y1;
};

// Structured triangulation of [x0,x1]x[y0,y1] with nx-by-ny cells, each split
// along its lower-left/upper-right diagonal. Cells inside the optional hole are
// omitted. Boundary tags: 1 bottom, 2 right, 3 top, 4 left, 5 hole.
Mesh GenerateRectMesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx,
                      int ny, std::optional<RectHole> hole = std::nullopt);

// Tags elements whose centroid lies left of x_minus or right of x_plus as PML.
void TagPmlRegions(Mesh &mesh, double x_minus, double x_plus);

struct MeshSummary
{
  int num_vertices;
  int num_elements;
  int num_boundary_edges;
  double area;
};

MeshSummary Summarize(const Mesh &mesh);
std::string FormatSummary(const MeshSummary &s);

}  // namespace crbm

#endif  // CRBM_MESH_HPP

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_CONFIG_HPP
#define CRBM_CONFIG_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crbm/analytic.hpp"
#include "crbm/assembly.hpp"
#include "crbm/mesh.hpp"
#include "crbm/pml.hpp"
#include "crbm/rbm.hpp"

namespace crbm
{

struct MeshSpec
{
  std::string file;  // resolved against the config directory
  std::array<double, 2> x = {-1.0, 1.0};
  std::array<double, 2> y = {-1.0, 1.0};
  int nx = 16, ny = 16;
  std::optional<RectHole> hole;
};

struct GridSpec
{
  double min = 1.0, max = 1.0;
  int count = 1;
};

struct SourceSpec
{
  std::string type = "none";  // none | gaussian
  Point2 center;
  double width = 0.05;
  double amplitude = 1.0;
};

struct BoundarySpec
{
  std::vector<std::string> tags;  // names or numeric tags; empty means every boundary
  std::string type = "zero";      // zero | constant | fundamental
  Complex value = 0.0;
  Point2 source;
  std::optional<ParameterPoint> frozen;  // fundamental data evaluated at a fixed mu
};

struct ExactSpec
{
  std::string type = "none";  // none | fundamental
  Point2 source;
};

struct RunConfig
{
  std::string problem = "bounded";  // bounded | pml
  MeshSpec mesh;
  GridSpec k, mach;
  GreedyOptions greedy;
  PmlConfig pml;
  bool omega_given = false;
  SourceSpec source;
  BoundarySpec boundary;
  bool boundary_given = false;
  std::optional<Rect> output_rect;
  ExactSpec exact;
  bool dual = true;
  std::vector<ParameterPoint> validate;
  std::vector<ParameterPoint> queries;
  std::string output_dir = ".";

  // Throws InputError naming the offending key.
  void Validate() const;
  bool InParameterBox(const ParameterPoint &mu) const;
};

RunConfig ParseConfig(const std::string &json_text, const std::string &base_dir = ".");
RunConfig LoadConfig(const std::string &path);

// Row-major in k then M; endpoints included.
std::vector<ParameterPoint> BuildTrainingSet(const RunConfig &cfg);

struct ProblemSetup
{
  Mesh mesh;
  DiscreteProblem problem;
  std::function<ExactField(const ParameterPoint &)> exact;  // empty without an exact field
  std::function<bool(int)> measure_region;  // elements entering error norms
  PmlConfig pml;
};

Mesh LoadMesh(const RunConfig &cfg);
ProblemSetup BuildProblem(const RunConfig &cfg);

// Discrete load of a Gaussian bump scaled so that its entries sum to -amplitude
// (a point source of strength amplitude under the sign convention L u = -delta).
ComplexVector GaussianLoad(const Mesh &mesh, const Point2 &center, double width,
                           double amplitude);

}  // namespace crbm

#endif  // CRBM_CONFIG_HPP

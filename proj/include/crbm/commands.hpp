// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_COMMANDS_HPP
#define CRBM_COMMANDS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "crbm/config.hpp"

namespace crbm
{

struct MeshGenOptions
{
  std::array<double, 2> x = {-1.0, 1.0};
  std::array<double, 2> y = {-1.0, 1.0};
  int nx = 16, ny = 16;
  std::optional<RectHole> hole;
  std::optional<std::array<double, 2>> pml;  // x_minus, x_plus
  std::string out;
};

void RunMeshGen(const MeshGenOptions &opts, std::ostream &log);
void RunMeshInfo(const std::string &path, std::ostream &log);

// Writes basis.crbm, trace.csv and costs.csv into the output directory.
void RunOffline(const RunConfig &cfg, std::ostream &log);

struct OnlineOptions
{
  std::string basis;
  std::vector<ParameterPoint> queries;
  bool fields = false;  // field_<k>_<M>.csv and .vtk per query
};

// Writes online.csv and online_costs.csv.
void RunOnline(const RunConfig &cfg, const OnlineOptions &opts, std::ostream &log);

// Writes validate.csv.
void RunValidate(const RunConfig &cfg, const std::string &basis, std::ostream &log);

// "k,M;k,M" inline list or a file with one "k,M" pair per line (# comments).
std::vector<ParameterPoint> ParseQueries(const std::string &spec);

std::string FieldCsv(const Mesh &mesh, const ComplexVector &u);
std::string FieldVtk(const Mesh &mesh, const ComplexVector &u);

}  // namespace crbm

#endif  // CRBM_COMMANDS_HPP

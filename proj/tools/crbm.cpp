// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "crbm/commands.hpp"

int main(int argc, char **argv)
{
  using namespace crbm;
  CLI::App app{"crbm: certified reduced basis solver for the convected Helmholtz equation"};
  app.require_subcommand(1);

  auto *mesh = app.add_subcommand("mesh", "generate or inspect meshes");
  mesh->require_subcommand(1);
  MeshGenOptions gen;
  std::vector<double> hole, pml;
  auto *mgen = mesh->add_subcommand("gen", "structured rectangle mesh (optional hole)");
  mgen->add_option("--x", gen.x, "x range")->expected(2);
  mgen->add_option("--y", gen.y, "y range")->expected(2);
  mgen->add_option("--nx", gen.nx, "cells in x");
  mgen->add_option("--ny", gen.ny, "cells in y");
  mgen->add_option("--hole", hole, "x0 x1 y0 y1")->expected(4);
  mgen->add_option("--pml", pml, "x_minus x_plus")->expected(2);
  mgen->add_option("-o,--out", gen.out, "output .msh (stdout if omitted)");
  std::string info_path;
  auto *minfo = mesh->add_subcommand("info", "print mesh summary");
  minfo->add_option("file", info_path)->required();

  std::string config, basis, query;
  bool fields = false;
  auto *off = app.add_subcommand("offline", "greedy basis construction");
  off->add_option("--config", config)->required();
  auto *on = app.add_subcommand("online", "reduced solves for a query list");
  on->add_option("--config", config)->required();
  on->add_option("--basis", basis)->required();
  on->add_option("--query", query, "file or inline list 'k,M;k,M'");
  on->add_flag("--fields", fields, "write field CSV and VTK per query");
  auto *val = app.add_subcommand("validate", "truth comparison at validation parameters");
  val->add_option("--config", config)->required();
  val->add_option("--basis", basis)->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try
  {
    if (mgen->parsed())
    {
      if (!hole.empty())
      {
        gen.hole = RectHole{hole[0], hole[1], hole[2], hole[3]};
      }
      if (!pml.empty())
      {
        gen.pml = std::array<double, 2>{pml[0], pml[1]};
      }
      RunMeshGen(gen, std::cout);
    }
    else if (minfo->parsed())
    {
      RunMeshInfo(info_path, std::cout);
    }
    else if (off->parsed())
    {
      RunOffline(LoadConfig(config), std::cout);
    }
    else if (on->parsed())
    {
      const auto cfg = LoadConfig(config);
      OnlineOptions o;
      o.basis = basis;
      o.queries = query.empty() ? cfg.queries : ParseQueries(query);
      o.fields = fields;
      RunOnline(cfg, o, std::cout);
    }
    else if (val->parsed())
    {
      RunValidate(LoadConfig(config), basis, std::cout);
    }
  }
  catch (const InputError &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  catch (const NumericalError &e)
  {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

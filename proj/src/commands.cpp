// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/commands.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crbm/csv.hpp"
#include "crbm/kernels.hpp"

namespace crbm
{

namespace
{

namespace fs = std::filesystem;

std::string Join(const std::string &dir, const std::string &name)
{
  return (fs::path(dir) / name).string();
}

void WriteText(const std::string &path, const std::string &text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw InputError("cannot write " + path);
  }
  out << text;
}

double Now()
{
  return MonotonicSeconds();
}

std::string Tag(const ParameterPoint &mu)
{
  return FormatDouble(mu.k) + "_" + FormatDouble(mu.mach);
}

}  // namespace

void RunMeshGen(const MeshGenOptions &opts, std::ostream &log)
{
  Mesh mesh = GenerateRectMesh(opts.x, opts.y, opts.nx, opts.ny, opts.hole);
  if (opts.pml)
  {
    TagPmlRegions(mesh, (*opts.pml)[0], (*opts.pml)[1]);
  }
  if (opts.out.empty())
  {
    log << WriteMsh(mesh);
    return;
  }
  WriteText(opts.out, WriteMsh(mesh));
  log << FormatSummary(Summarize(mesh));
}

void RunMeshInfo(const std::string &path, std::ostream &log)
{
  log << FormatSummary(Summarize(ReadMshFile(path)));
}

void RunOffline(const RunConfig &cfg, std::ostream &log)
{
  fs::create_directories(cfg.output_dir);
  Stopwatch sw;
  const double t0 = Now();
  std::optional<ProblemSetup> setup;
  {
    auto scope = sw.Start("assembly");
    setup = BuildProblem(cfg);
  }
  const auto train = BuildTrainingSet(cfg);
  log << "kernels " << kernels::BackendName(kernels::ActiveBackend()) << "\n";
  log << "dofs " << setup->problem.Size() << " training " << train.size() << "\n";
  std::optional<TruthModel> truth;
  {
    auto scope = sw.Start("x_factorization");
    truth.emplace(setup->problem);
  }
  GreedyResult g = GreedyBuild(*truth, train, cfg.greedy);
  sw.Merge(g.costs);
  ArchiveContents archive{g.basis, std::nullopt, cfg.problem};
  if (cfg.dual && truth->HasOutput())
  {
    auto scope = sw.Start("dual_build");
    archive.dual = DualBuild(*truth, g.basis, cfg.greedy.rbm);
  }
  {
    auto scope = sw.Start("write_archive");
    WriteArchive(Join(cfg.output_dir, "basis.crbm"), archive);
  }
  const double c_off = Now() - t0;

  CsvWriter trace({"iter", "k", "M", "residuum", "dimension", "seconds"});
  for (const auto &r : g.trace)
  {
    trace.Row({std::to_string(r.iteration), FormatDouble(r.mu.k), FormatDouble(r.mu.mach),
               FormatDouble(r.residuum), std::to_string(r.dimension), FormatDouble(r.seconds)});
  }
  trace.WriteFile(Join(cfg.output_dir, "trace.csv"));

  // One reference Galerkin solve for the marginal-number report.
  const ParameterPoint mid = train[train.size() / 2];
  double c_gal = 0.0;
  {
    const double t = Now();
    (void)truth->Solve(mid);
    c_gal = Now() - t;
    sw.Add("galerkin_solve", c_gal);
  }
  const int n = g.basis.Dimension();
  if (g.basis.affine_rhs)
  {
    sw.AddOps("residual_sweep", ResidualEvalCost(g.basis.mf, g.basis.ma, n) * train.size());
  }
  sw.Add("offline_total", c_off);
  WriteText(Join(cfg.output_dir, "costs.csv"), CostCsv(sw));

  log << "basis dimension " << n << "\n";
  if (!g.trace.empty())
  {
    log << "final residuum " << FormatDouble(g.trace.back().residuum) << "\n";
  }
  if (!g.rejected.empty())
  {
    log << "rejected snapshots " << g.rejected.size() << "\n";
  }
  log << "offline seconds " << FormatDouble(c_off) << " galerkin seconds " << FormatDouble(c_gal)
      << "\n";
}

namespace
{

struct OnlineRow
{
  ParameterPoint mu;
  ComplexVector xi;
  double delta = 0.0;
  CorrectedOutput out;
  double seconds = 0.0;
};

}  // namespace

void RunOnline(const RunConfig &cfg, const OnlineOptions &opts, std::ostream &log)
{
  fs::create_directories(cfg.output_dir);
  Stopwatch sw;
  ArchiveContents a;
  {
    auto scope = sw.Start("read_archive");
    a = ReadArchive(opts.basis);
  }
  if (a.problem_kind != cfg.problem)
  {
    throw InputError("basis archive was built for problem '" + a.problem_kind +
                     "', config says '" + cfg.problem + "'");
  }
  const auto &rb = a.basis;
  // Full-order data are only touched for non-affine data or field output.
  std::optional<ProblemSetup> setup;
  std::optional<TruthModel> truth;
  if (!rb.affine_rhs || opts.fields)
  {
    auto scope = sw.Start("full_order_setup");
    setup = BuildProblem(cfg);
    if (setup->problem.Size() != rb.TruthSize())
    {
      throw InputError("basis archive does not match the configured mesh");
    }
  }
  if (!rb.affine_rhs)
  {
    auto scope = sw.Start("x_factorization");
    truth.emplace(setup->problem);
  }
  const DiscreteProblem *problem = setup ? &setup->problem : nullptr;

  CsvWriter csv({"k", "M", "extrapolated", "dimension", "delta", "s_re", "s_im", "s_pd_re",
                 "s_pd_im", "seconds"});
  double total = 0.0;
  for (const auto &mu : opts.queries)
  {
    const bool outside = !cfg.InParameterBox(mu);
    if (outside)
    {
      log << "warning: " << ToString(mu) << " lies outside the training box (extrapolation)\n";
    }
    OnlineRow row;
    row.mu = mu;
    const double t = Now();
    {
      auto scope = sw.Start(rb.affine_rhs ? "online_solve" : "online_solve_nonaffine");
      row.xi = OnlineSolve(rb, mu, problem);
    }
    {
      auto scope = sw.Start(rb.affine_rhs ? "online_residual" : "online_direct_residual");
      row.delta = ErrorEstimator(rb, mu, row.xi, cfg.greedy.rbm.beta,
                                 truth ? &*truth : nullptr);
    }
    if (rb.ml > 0)
    {
      auto scope = sw.Start("online_output");
      row.out = ComputeCorrectedOutput(rb, a.dual ? &*a.dual : nullptr, mu, row.xi, problem);
    }
    row.seconds = Now() - t;
    total += row.seconds;
    csv.Row({FormatDouble(mu.k), FormatDouble(mu.mach), outside ? "1" : "0",
             std::to_string(rb.Dimension()), FormatDouble(row.delta),
             FormatDouble(row.out.s_n.real()), FormatDouble(row.out.s_n.imag()),
             FormatDouble(row.out.s_pd.real()), FormatDouble(row.out.s_pd.imag()),
             FormatDouble(row.seconds)});
    if (opts.fields)
    {
      auto scope = sw.Start("field_output");
      const ComplexVector u = setup->problem.Reconstruct(rb.phi * row.xi, mu);
      WriteText(Join(cfg.output_dir, "field_" + Tag(mu) + ".csv"), FieldCsv(setup->mesh, u));
      WriteText(Join(cfg.output_dir, "field_" + Tag(mu) + ".vtk"), FieldVtk(setup->mesh, u));
    }
  }
  csv.WriteFile(Join(cfg.output_dir, "online.csv"));
  WriteText(Join(cfg.output_dir, "online_costs.csv"), CostCsv(sw));
  log << "queries " << opts.queries.size();
  if (!opts.queries.empty())
  {
    log << " mean seconds " << FormatDouble(total / opts.queries.size());
  }
  log << "\n";
}

void RunValidate(const RunConfig &cfg, const std::string &basis, std::ostream &log)
{
  fs::create_directories(cfg.output_dir);
  if (cfg.validate.empty())
  {
    throw InputError("config: validate: no validation parameters");
  }
  const auto a = ReadArchive(basis);
  if (a.problem_kind != cfg.problem)
  {
    throw InputError("basis archive was built for problem '" + a.problem_kind + "'");
  }
  const auto &rb = a.basis;
  const ProblemSetup setup = BuildProblem(cfg);
  if (setup.problem.Size() != rb.TruthSize())
  {
    throw InputError("basis archive does not match the configured mesh");
  }
  const TruthModel truth(setup.problem);
  CsvWriter csv({"k", "M", "error_x", "relative_error_x", "delta", "eta", "linf", "l2", "h1"});
  std::vector<std::array<double, 7>> values;
  for (const auto &mu : cfg.validate)
  {
    const auto eff = ComputeEffectivity(rb, truth, mu, cfg.greedy.rbm.beta);
    std::array<double, 7> v{eff.error, eff.error / std::max(eff.truth_norm, 1e-300), eff.delta,
                            eff.eta.value_or(std::nan("")), std::nan(""), std::nan(""),
                            std::nan("")};
    if (setup.exact)
    {
      const ComplexVector xi = OnlineSolve(rb, mu, &setup.problem);
      const ComplexVector u = setup.problem.Reconstruct(rb.phi * xi, mu);
      const auto n = ComputeErrorNorms(setup.mesh, u, setup.exact(mu), setup.measure_region);
      v[4] = n.linf;
      v[5] = n.l2;
      v[6] = n.h1;
    }
    values.push_back(v);
    std::vector<std::string> row{FormatDouble(mu.k), FormatDouble(mu.mach)};
    for (int i = 0; i < 7; ++i)
    {
      row.push_back(i == 3 && !eff.eta ? "undefined"
                    : (i >= 4 && !setup.exact) ? ""
                                                : FormatDouble(v[i]));
    }
    csv.Row(row);
    log << ToString(mu) << " error_x " << FormatDouble(eff.error) << " delta "
        << FormatDouble(eff.delta) << "\n";
  }
  for (const std::string agg : {"max", "mean"})
  {
    std::vector<std::string> row{agg, ""};
    for (int i = 0; i < 7; ++i)
    {
      double acc = 0.0;
      int cnt = 0;
      for (const auto &v : values)
      {
        if (std::isnan(v[i]))
        {
          continue;
        }
        acc = agg == "max" ? std::max(acc, v[i]) : acc + v[i];
        ++cnt;
      }
      row.push_back(cnt == 0 ? "" : FormatDouble(agg == "max" ? acc : acc / cnt));
    }
    csv.Row(row);
  }
  csv.WriteFile(Join(cfg.output_dir, "validate.csv"));
}

std::vector<ParameterPoint> ParseQueries(const std::string &spec)
{
  std::string text = spec;
  std::error_code ec;
  if (fs::is_regular_file(spec, ec))
  {
    std::ifstream in(spec);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<ParameterPoint> out;
  std::string item;
  std::stringstream all(text);
  while (std::getline(all, item, text.find(';') != std::string::npos ? ';' : '\n'))
  {
    const auto hash = item.find('#');
    if (hash != std::string::npos)
    {
      item.resize(hash);
    }
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty() || item == "k,M")
    {
      continue;
    }
    const auto comma = item.find(',');
    if (comma == std::string::npos)
    {
      throw InputError("query '" + item + "' is not of the form k,M");
    }
    ParameterPoint mu;
    try
    {
      mu.k = std::stod(item.substr(0, comma));
      mu.mach = std::stod(item.substr(comma + 1));
    }
    catch (const std::exception &)
    {
      throw InputError("query '" + item + "' is not numeric");
    }
    mu.Validate();
    out.push_back(mu);
  }
  return out;
}

std::string FieldCsv(const Mesh &mesh, const ComplexVector &u)
{
  CsvWriter csv({"vertex", "x1", "x2", "re", "im"});
  for (int v = 0; v < mesh.NumVertices(); ++v)
  {
    csv.Row({std::to_string(v), FormatDouble(mesh.vertices[v].x),
             FormatDouble(mesh.vertices[v].y), FormatDouble(u[v].real()),
             FormatDouble(u[v].imag())});
  }
  return csv.Str();
}

std::string FieldVtk(const Mesh &mesh, const ComplexVector &u)
{
  std::ostringstream o;
  o << "# vtk DataFile Version 3.0\ncrbm field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  o << "POINTS " << mesh.NumVertices() << " double\n";
  for (const auto &p : mesh.vertices)
  {
    o << FormatDouble(p.x) << " " << FormatDouble(p.y) << " 0\n";
  }
  o << "CELLS " << mesh.NumElements() << " " << 4 * mesh.NumElements() << "\n";
  for (const auto &t : mesh.elements)
  {
    o << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
  o << "CELL_TYPES " << mesh.NumElements() << "\n";
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    o << "5\n";
  }
  o << "POINT_DATA " << mesh.NumVertices() << "\n";
  for (const char *part : {"re", "im"})
  {
    o << "SCALARS " << part << " double 1\nLOOKUP_TABLE default\n";
    for (Eigen::Index v = 0; v < u.size(); ++v)
    {
      o << FormatDouble(part[0] == 'r' ? u[v].real() : u[v].imag()) << "\n";
    }
  }
  return o.str();
}

}  // namespace crbm

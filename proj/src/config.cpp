// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/config.hpp"

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace crbm
{

using nlohmann::json;

namespace
{

[[noreturn]] void Fail(const std::string &key, const std::string &msg)
{
  throw InputError("config: " + key + ": " + msg);
}

template <typename T>
T Get(const json &j, const std::string &key, const std::string &path, T fallback)
{
  if (!j.contains(key) || j.at(key).is_null())
  {
    return fallback;
  }
  try
  {
    return j.at(key).get<T>();
  }
  catch (const json::exception &)
  {
    Fail(path + key, "wrong type");
  }
}

GridSpec ParseGrid(const json &j, const std::string &key)
{
  if (j.is_number())
  {
    const double v = j.get<double>();
    return {v, v, 1};
  }
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number_integer())
  {
    Fail(key, "expected [min, max, count] or a number");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<int>()};
}

Point2 ParsePoint(const json &j, const std::string &key)
{
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
  {
    Fail(key, "expected [x1, x2]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::array<double, 4> ParseBox(const json &j, const std::string &key)
{
  if (!j.is_array() || j.size() != 4)
  {
    Fail(key, "expected [x0, x1, y0, y1]");
  }
  std::array<double, 4> b;
  for (int i = 0; i < 4; ++i)
  {
    if (!j[i].is_number())
    {
      Fail(key, "expected numbers");
    }
    b[i] = j[i].get<double>();
  }
  if (!(b[0] < b[1] && b[2] < b[3]))
  {
    Fail(key, "empty box");
  }
  return b;
}

std::vector<ParameterPoint> ParseParams(const json &j, const std::string &key)
{
  if (!j.is_array())
  {
    Fail(key, "expected a list of [k, M] pairs");
  }
  std::vector<ParameterPoint> out;
  for (const auto &e : j)
  {
    const auto p = ParsePoint(e, key);
    out.push_back({p.x, p.y});
  }
  return out;
}

void RequireKnownKeys(const json &j, const std::string &path, std::initializer_list<const char *> keys)
{
  for (auto it = j.begin(); it != j.end(); ++it)
  {
    bool known = false;
    for (const char *k : keys)
    {
      known = known || it.key() == k;
    }
    if (!known)
    {
      Fail(path + it.key(), "unknown key");
    }
  }
}

}  // namespace

void RunConfig::Validate() const
{
  if (problem != "bounded" && problem != "pml")
  {
    Fail("problem", "must be 'bounded' or 'pml'");
  }
  if (k.count < 1 || mach.count < 1)
  {
    Fail("parameters", "sample counts must be at least 1");
  }
  if (!(k.min <= k.max) || !(mach.min <= mach.max))
  {
    Fail("parameters", "empty range");
  }
  if (!(k.min > 0.0))
  {
    Fail("parameters.k", "wavenumbers must be positive");
  }
  if (!(mach.min >= 0.0 && mach.max < 1.0))
  {
    Fail("parameters.mach", "Mach numbers must lie in [0, 1)");
  }
  if (!(greedy.tol > 0.0))
  {
    Fail("greedy.tol", "must be positive");
  }
  if (greedy.n_max < 1)
  {
    Fail("greedy.n_max", "must be at least 1");
  }
  if (!(greedy.rbm.beta > 0.0))
  {
    Fail("greedy.beta", "must be positive");
  }
  if (source.type != "none" && source.type != "gaussian")
  {
    Fail("source.type", "must be 'none' or 'gaussian'");
  }
  if (source.type == "gaussian" && !(source.width > 0.0))
  {
    Fail("source.width", "must be positive");
  }
  if (boundary.type != "zero" && boundary.type != "constant" && boundary.type != "fundamental")
  {
    Fail("boundary.type", "must be 'zero', 'constant' or 'fundamental'");
  }
  if (boundary.frozen)
  {
    if (boundary.type != "fundamental")
    {
      Fail("boundary.frozen", "only applies to 'fundamental' data");
    }
    boundary.frozen->Validate();
  }
  if (exact.type != "none" && exact.type != "fundamental")
  {
    Fail("exact.type", "must be 'none' or 'fundamental'");
  }
  if (problem == "pml")
  {
    pml.Validate();
  }
  for (const auto &mu : validate)
  {
    mu.Validate();
  }
  for (const auto &mu : queries)
  {
    mu.Validate();
  }
}

bool RunConfig::InParameterBox(const ParameterPoint &mu) const
{
  return mu.k >= k.min && mu.k <= k.max && mu.mach >= mach.min && mu.mach <= mach.max;
}

RunConfig ParseConfig(const std::string &json_text, const std::string &base_dir)
{
  json j;
  try
  {
    j = json::parse(json_text);
  }
  catch (const json::parse_error &e)
  {
    throw InputError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object())
  {
    throw InputError("config: top level must be an object");
  }
  RequireKnownKeys(j, "",
                   {"problem", "mesh", "parameters", "greedy", "pml", "source", "boundary",
                    "output", "exact", "dual", "validate", "queries", "output_dir"});
  RunConfig c;
  c.problem = Get<std::string>(j, "problem", "", c.problem);

  if (!j.contains("mesh"))
  {
    Fail("mesh", "missing");
  }
  const auto &jm = j["mesh"];
  RequireKnownKeys(jm, "mesh.", {"file", "x", "y", "nx", "ny", "hole"});
  if (jm.contains("file"))
  {
    const auto f = jm["file"].get<std::string>();
    const std::filesystem::path p(f);
    c.mesh.file = p.is_absolute() ? f : (std::filesystem::path(base_dir) / p).string();
  }
  else
  {
    if (jm.contains("x"))
    {
      const auto p = ParsePoint(jm["x"], "mesh.x");
      c.mesh.x = {p.x, p.y};
    }
    if (jm.contains("y"))
    {
      const auto p = ParsePoint(jm["y"], "mesh.y");
      c.mesh.y = {p.x, p.y};
    }
    c.mesh.nx = Get<int>(jm, "nx", "mesh.", c.mesh.nx);
    c.mesh.ny = Get<int>(jm, "ny", "mesh.", c.mesh.ny);
    if (jm.contains("hole"))
    {
      const auto b = ParseBox(jm["hole"], "mesh.hole");
      c.mesh.hole = RectHole{b[0], b[1], b[2], b[3]};
    }
  }

  if (j.contains("parameters"))
  {
    const auto &jp = j["parameters"];
    RequireKnownKeys(jp, "parameters.", {"k", "mach"});
    if (jp.contains("k"))
    {
      c.k = ParseGrid(jp["k"], "parameters.k");
    }
    if (jp.contains("mach"))
    {
      c.mach = ParseGrid(jp["mach"], "parameters.mach");
    }
  }
  else
  {
    c.mach = {0.0, 0.0, 1};
  }

  if (j.contains("greedy"))
  {
    const auto &jg = j["greedy"];
    RequireKnownKeys(jg, "greedy.",
                     {"tol", "n_max", "first", "seed", "beta", "residual", "threads"});
    c.greedy.tol = Get<double>(jg, "tol", "greedy.", c.greedy.tol);
    c.greedy.n_max = Get<int>(jg, "n_max", "greedy.", c.greedy.n_max);
    c.greedy.rbm.beta = Get<double>(jg, "beta", "greedy.", 1.0);
    c.greedy.rbm.threads = Get<int>(jg, "threads", "greedy.", 0);
    if (jg.contains("first"))
    {
      const auto &f = jg["first"];
      if (f.is_number_integer())
      {
        c.greedy.first_index = f.get<int>();
      }
      else if (f == "random")
      {
        c.greedy.seed = Get<std::uint64_t>(jg, "seed", "greedy.", 0);
      }
      else if (f != "midpoint")
      {
        Fail("greedy.first", "expected 'midpoint', 'random' or an index");
      }
    }
    const auto form = Get<std::string>(jg, "residual", "greedy.", "factored");
    if (form == "expansion")
    {
      c.greedy.residual_form = ResidualForm::Expansion;
    }
    else if (form != "factored")
    {
      Fail("greedy.residual", "expected 'factored' or 'expansion'");
    }
  }

  if (j.contains("pml"))
  {
    const auto &jp = j["pml"];
    RequireKnownKeys(jp, "pml.", {"x_minus", "x_plus", "width", "sigma0", "omega"});
    c.pml.x_minus = Get<double>(jp, "x_minus", "pml.", c.pml.x_minus);
    c.pml.x_plus = Get<double>(jp, "x_plus", "pml.", c.pml.x_plus);
    c.pml.width = Get<double>(jp, "width", "pml.", c.pml.width);
    c.pml.sigma0 = Get<double>(jp, "sigma0", "pml.", c.pml.sigma0);
    if (jp.contains("omega") && !jp["omega"].is_null())
    {
      c.pml.omega = Get<double>(jp, "omega", "pml.", 1.0);
      c.omega_given = true;
    }
  }
  if (!c.omega_given)
  {
    c.pml.omega = std::sqrt(c.k.min * c.k.max);
  }

  if (j.contains("source"))
  {
    const auto &js = j["source"];
    RequireKnownKeys(js, "source.", {"type", "center", "width", "amplitude"});
    c.source.type = Get<std::string>(js, "type", "source.", "none");
    if (js.contains("center"))
    {
      c.source.center = ParsePoint(js["center"], "source.center");
    }
    c.source.width = Get<double>(js, "width", "source.", c.source.width);
    c.source.amplitude = Get<double>(js, "amplitude", "source.", c.source.amplitude);
  }

  if (j.contains("boundary"))
  {
    c.boundary_given = true;
    const auto &jb = j["boundary"];
    RequireKnownKeys(jb, "boundary.", {"dirichlet", "type", "value", "source", "frozen"});
    if (jb.contains("dirichlet"))
    {
      if (!jb["dirichlet"].is_array())
      {
        Fail("boundary.dirichlet", "expected a list of boundary names or tags");
      }
      for (const auto &t : jb["dirichlet"])
      {
        c.boundary.tags.push_back(t.is_string() ? t.get<std::string>() : t.dump());
      }
    }
    c.boundary.type = Get<std::string>(jb, "type", "boundary.", "zero");
    if (jb.contains("value"))
    {
      const auto &v = jb["value"];
      if (v.is_number())
      {
        c.boundary.value = v.get<double>();
      }
      else
      {
        const auto p = ParsePoint(v, "boundary.value");
        c.boundary.value = {p.x, p.y};
      }
    }
    if (jb.contains("source"))
    {
      c.boundary.source = ParsePoint(jb["source"], "boundary.source");
    }
    if (jb.contains("frozen"))
    {
      const auto p = ParsePoint(jb["frozen"], "boundary.frozen");
      c.boundary.frozen = ParameterPoint{p.x, p.y};
    }
  }

  if (j.contains("output"))
  {
    const auto &jo = j["output"];
    RequireKnownKeys(jo, "output.", {"rect"});
    if (jo.contains("rect"))
    {
      const auto b = ParseBox(jo["rect"], "output.rect");
      c.output_rect = Rect{b[0], b[1], b[2], b[3]};
    }
  }
  if (j.contains("exact"))
  {
    const auto &je = j["exact"];
    RequireKnownKeys(je, "exact.", {"type", "source"});
    c.exact.type = Get<std::string>(je, "type", "exact.", "none");
    if (je.contains("source"))
    {
      c.exact.source = ParsePoint(je["source"], "exact.source");
    }
  }
  c.dual = Get<bool>(j, "dual", "", c.dual);
  if (j.contains("validate"))
  {
    c.validate = ParseParams(j["validate"], "validate");
  }
  if (j.contains("queries"))
  {
    c.queries = ParseParams(j["queries"], "queries");
  }
  c.output_dir = Get<std::string>(j, "output_dir", "", c.output_dir);
  if (!std::filesystem::path(c.output_dir).is_absolute())
  {
    c.output_dir = (std::filesystem::path(base_dir) / c.output_dir).string();
  }
  c.Validate();
  return c;
}

RunConfig LoadConfig(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InputError("cannot open config file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path();
  return ParseConfig(ss.str(), dir.empty() ? "." : dir.string());
}

std::vector<ParameterPoint> BuildTrainingSet(const RunConfig &cfg)
{
  auto grid = [](const GridSpec &g)
  {
    std::vector<double> v;
    for (int i = 0; i < g.count; ++i)
    {
      v.push_back(g.count == 1 ? g.min
                               : (i == g.count - 1 ? g.max
                                                   : g.min + i * (g.max - g.min) / (g.count - 1)));
    }
    return v;
  };
  std::vector<ParameterPoint> out;
  for (double k : grid(cfg.k))
  {
    for (double m : grid(cfg.mach))
    {
      out.push_back({k, m});
    }
  }
  return out;
}

Mesh LoadMesh(const RunConfig &cfg)
{
  Mesh mesh = cfg.mesh.file.empty()
                   ? GenerateRectMesh(cfg.mesh.x, cfg.mesh.y, cfg.mesh.nx, cfg.mesh.ny,
                                      cfg.mesh.hole)
                   : ReadMshFile(cfg.mesh.file);
  if (cfg.problem == "pml")
  {
    // regions follow the layer interfaces in the configuration
    TagPmlRegions(mesh, cfg.pml.x_minus, cfg.pml.x_plus);
  }
  return mesh;
}

ComplexVector GaussianLoad(const Mesh &mesh, const Point2 &center, double width,
                           double amplitude)
{
  ComplexVector load = AssembleLoad(mesh,
                                    [&](double x, double y)
                                    {
                                      const double r2 = (x - center.x) * (x - center.x) +
                                                        (y - center.y) * (y - center.y);
                                      return Complex(std::exp(-r2 / (width * width)));
                                    });
  const Complex total = load.sum();
  if (std::abs(total) == 0.0)
  {
    throw InputError("gaussian source does not touch the mesh");
  }
  return load * (-amplitude / total);
}

namespace
{

std::vector<int> ResolveTags(const Mesh &mesh, const std::vector<std::string> &names)
{
  std::vector<int> tags;
  if (names.empty())
  {
    for (const auto &be : mesh.boundary_edges)
    {
      if (std::find(tags.begin(), tags.end(), be.tag) == tags.end())
      {
        tags.push_back(be.tag);
      }
    }
    std::sort(tags.begin(), tags.end());
    return tags;
  }
  for (const auto &n : names)
  {
    if (auto t = mesh.BoundaryTag(n))
    {
      tags.push_back(*t);
      continue;
    }
    int v = 0;
    std::istringstream ss(n);
    if (ss >> v && ss.eof())
    {
      tags.push_back(v);
      continue;
    }
    throw InputError("config: boundary.dirichlet: unknown boundary '" + n + "'");
  }
  return tags;
}

}  // namespace

ProblemSetup BuildProblem(const RunConfig &cfg)
{
  ProblemSetup s;
  s.mesh = LoadMesh(cfg);
  s.pml = cfg.pml;
  const bool pml = cfg.problem == "pml";
  AffineOperator op = pml ? AssembleAffinePml(s.mesh, cfg.pml) : AssembleAffineBounded(s.mesh);
  const SparseMatrix x = AssembleH1(s.mesh);
  ComplexVector load = ComplexVector::Zero(s.mesh.NumVertices());
  if (cfg.source.type == "gaussian")
  {
    load = GaussianLoad(s.mesh, cfg.source.center, cfg.source.width, cfg.source.amplitude);
  }

  DirichletData d;
  std::vector<std::string> names = cfg.boundary.tags;
  if (!cfg.boundary_given && pml)
  {
    names = {"left", "right"};
  }
  d.tags = ResolveTags(s.mesh, names);
  if (cfg.boundary.type == "constant")
  {
    const Complex g = cfg.boundary.value;
    d.mode = g == 0.0 ? DirichletMode::Homogeneous : DirichletMode::ParameterIndependent;
    d.value = [g](double, double, const ParameterPoint &) { return g; };
  }
  else if (cfg.boundary.type == "fundamental")
  {
    d.mode = cfg.boundary.frozen ? DirichletMode::ParameterIndependent
                                 : DirichletMode::PerParameter;
    const Point2 src = cfg.boundary.source;
    const std::optional<ParameterPoint> frozen = cfg.boundary.frozen;
    if (pml)
    {
      const PmlConfig pc = cfg.pml;
      d.value = [pc, src, frozen](double x1, double x2, const ParameterPoint &mu)
      { return StretchedFundamentalSolution(x1, x2, frozen.value_or(mu), pc, src); };
    }
    else
    {
      d.value = [src, frozen](double x1, double x2, const ParameterPoint &mu)
      { return FundamentalSolution(x1, x2, frozen.value_or(mu), src); };
    }
  }

  // Measurement functional: mean over a rectangle, default the bounding box.
  Rect rect;
  if (cfg.output_rect)
  {
    rect = *cfg.output_rect;
  }
  else
  {
    rect = {1e300, -1e300, 1e300, -1e300};
    for (const auto &v : s.mesh.vertices)
    {
      rect.x0 = std::min(rect.x0, v.x);
      rect.x1 = std::max(rect.x1, v.x);
      rect.y0 = std::min(rect.y0, v.y);
      rect.y1 = std::max(rect.y1, v.y);
    }
  }
  const ComplexVector l = AssembleMeanFunctional(s.mesh, rect);
  s.problem = ApplyDirichlet(s.mesh, op, x, load, d, l);

  if (cfg.exact.type == "fundamental")
  {
    const Point2 src = cfg.exact.source;
    s.exact = [src](const ParameterPoint &mu) { return FundamentalField(mu, src); };
  }
  if (pml)
  {
    std::vector<char> inside(s.mesh.NumElements());
    for (int e = 0; e < s.mesh.NumElements(); ++e)
    {
      inside[e] = s.mesh.element_regions[e] == Region::Interior;
    }
    s.measure_region = [inside](int e) { return inside[e] != 0; };
  }
  return s;
}

}  // namespace crbm

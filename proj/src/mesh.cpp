// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "crbm/common.hpp"

namespace crbm
{

namespace
{

std::uint64_t EdgeKey(int a, int b)
{
  if (a > b)
  {
    std::swap(a, b);
  }
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double SignedArea(const Point2 &a, const Point2 &b, const Point2 &c)
{
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Line-oriented reader over the in-memory file.
class LineReader
{
public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool Next(std::string_view &line)
  {
    while (pos_ < text_.size())
    {
      auto end = text_.find('\n', pos_);
      if (end == std::string_view::npos)
      {
        end = text_.size();
      }
      line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++lineno_;
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      {
        line.remove_suffix(1);
      }
      while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
      {
        line.remove_prefix(1);
      }
      if (!line.empty())
      {
        return true;
      }
    }
    return false;
  }

  std::string_view Require(const char *what)
  {
    std::string_view line;
    if (!Next(line))
    {
      Fail(std::string("unexpected end of file, expected ") + what);
    }
    return line;
  }

  [[noreturn]] void Fail(const std::string &msg) const
  {
    throw InputError("msh line " + std::to_string(lineno_) + ": " + msg);
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int lineno_ = 0;
};

std::vector<std::string_view> Split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size())
  {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
    {
      ++i;
    }
    if (i >= line.size())
    {
      break;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t')
    {
      ++j;
    }
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T ParseNumber(const LineReader &in, std::string_view tok)
{
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
  {
    in.Fail("bad number '" + std::string(tok) + "'");
  }
  return value;
}

void ExpectHeader(LineReader &in, std::string_view header)
{
  auto line = in.Require(std::string(header).c_str());
  if (line != header)
  {
    in.Fail("expected " + std::string(header) + ", found '" + std::string(line) + "'");
  }
}

std::string FormatDouble(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Region RegionFromName(std::string_view name)
{
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "pml_left")
  {
    return Region::PmlLeft;
  }
  if (lower == "pml_right")
  {
    return Region::PmlRight;
  }
  return Region::Interior;
}

}  // namespace

std::string_view RegionName(Region r)
{
  switch (r)
  {
    case Region::Interior:
      return "interior";
    case Region::PmlLeft:
      return "pml_left";
    case Region::PmlRight:
      return "pml_right";
  }
  return "interior";
}

std::optional<int> Mesh::BoundaryTag(std::string_view name) const
{
  for (const auto &[tag, n] : boundary_names)
  {
    if (n == name)
    {
      return tag;
    }
  }
  return std::nullopt;
}

double Mesh::Area() const
{
  double area = 0.0;
  for (const auto &t : elements)
  {
    area += SignedArea(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
  }
  return area;
}

void Mesh::Validate() const
{
  const int nv = NumVertices();
  if (element_regions.size() != elements.size())
  {
    throw InputError("mesh: region tag count does not match element count");
  }
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(3 * elements.size());
  for (std::size_t e = 0; e < elements.size(); ++e)
  {
    const auto &t = elements[e];
    for (int v : t)
    {
      if (v < 0 || v >= nv)
      {
        throw InputError("mesh: element " + std::to_string(e) + " references vertex " +
                         std::to_string(v) + " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
    {
      throw InputError("mesh: element " + std::to_string(e) + " has repeated vertices");
    }
    if (!(SignedArea(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0))
    {
      throw InputError("mesh: element " + std::to_string(e) + " has non-positive area");
    }
    for (int i = 0; i < 3; ++i)
    {
      ++edge_count[EdgeKey(t[i], t[(i + 1) % 3])];
    }
  }
  for (const auto &be : boundary_edges)
  {
    if (be.v[0] < 0 || be.v[0] >= nv || be.v[1] < 0 || be.v[1] >= nv)
    {
      throw InputError("mesh: boundary edge references a vertex out of range");
    }
    auto it = edge_count.find(EdgeKey(be.v[0], be.v[1]));
    if (it == edge_count.end() || it->second != 1)
    {
      throw InputError("mesh: boundary edge (" + std::to_string(be.v[0]) + ", " +
                       std::to_string(be.v[1]) + ") does not belong to exactly one element");
    }
  }

  // Coincident vertices, relative to the bounding-box diagonal.
  if (nv > 1)
  {
    double xmin = vertices[0].x, xmax = xmin, ymin = vertices[0].y, ymax = ymin;
    for (const auto &p : vertices)
    {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double tol = 1e-12 * std::hypot(xmax - xmin, ymax - ymin);
    std::vector<int> order(nv);
    for (int i = 0; i < nv; ++i)
    {
      order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return vertices[a].x < vertices[b].x; });
    for (int i = 0; i < nv; ++i)
    {
      const auto &p = vertices[order[i]];
      for (int j = i + 1; j < nv && vertices[order[j]].x - p.x <= tol; ++j)
      {
        const auto &q = vertices[order[j]];
        if (std::hypot(q.x - p.x, q.y - p.y) <= tol)
        {
          throw InputError("mesh: vertices " + std::to_string(order[i]) + " and " +
                           std::to_string(order[j]) + " coincide");
        }
      }
    }
  }
}

Point2 ElementMap::Apply(double xhat, double yhat) const
{
  return {B[0][0] * xhat + B[0][1] * yhat + b[0], B[1][0] * xhat + B[1][1] * yhat + b[1]};
}

Point2 ElementMap::ApplyInverse(const Point2 &x) const
{
  const double det = Det();
  const double dx = x.x - b[0], dy = x.y - b[1];
  return {(B[1][1] * dx - B[0][1] * dy) / det, (-B[1][0] * dx + B[0][0] * dy) / det};
}

ElementMap GetElementMap(const Mesh &mesh, int e)
{
  const auto &t = mesh.elements[e];
  const auto &p1 = mesh.vertices[t[0]];
  const auto &p2 = mesh.vertices[t[1]];
  const auto &p3 = mesh.vertices[t[2]];
  ElementMap m;
  m.B[0][0] = p2.x - p1.x;
  m.B[0][1] = p3.x - p1.x;
  m.B[1][0] = p2.y - p1.y;
  m.B[1][1] = p3.y - p1.y;
  m.b[0] = p1.x;
  m.b[1] = p1.y;
  m.area = 0.5 * m.Det();
  return m;
}

Mesh ParseMsh(std::string_view text)
{
  LineReader in(text);
  Mesh mesh;
  std::map<int, std::string> names_2d;
  std::unordered_map<long, int> node_index;
  bool have_format = false, have_nodes = false, have_elements = false;

  struct RawTriangle
  {
    std::array<int, 3> v;
    int physical;
  };
  std::vector<RawTriangle> triangles;

  std::string_view line;
  while (in.Next(line))
  {
    if (line == "$MeshFormat")
    {
      auto tok = Split(in.Require("format line"));
      if (tok.size() < 3 || tok[0].substr(0, 3) != "2.2" || tok[1] != "0")
      {
        in.Fail("only ASCII MSH version 2.2 is supported");
      }
      ExpectHeader(in, "$EndMeshFormat");
      have_format = true;
    }
    else if (line == "$PhysicalNames")
    {
      const int n = ParseNumber<int>(in, in.Require("physical name count"));
      for (int i = 0; i < n; ++i)
      {
        auto l = in.Require("physical name");
        auto tok = Split(l);
        if (tok.size() < 3)
        {
          in.Fail("malformed physical name entry");
        }
        const int dim = ParseNumber<int>(in, tok[0]);
        const int tag = ParseNumber<int>(in, tok[1]);
        auto q0 = l.find('"');
        auto q1 = l.rfind('"');
        std::string name(q0 != std::string_view::npos && q1 > q0 ? l.substr(q0 + 1, q1 - q0 - 1)
                                                                : tok[2]);
        if (dim == 1)
        {
          mesh.boundary_names[tag] = name;
        }
        else if (dim == 2)
        {
          names_2d[tag] = name;
        }
      }
      ExpectHeader(in, "$EndPhysicalNames");
    }
    else if (line == "$Nodes")
    {
      const int n = ParseNumber<int>(in, in.Require("node count"));
      mesh.vertices.reserve(n);
      for (int i = 0; i < n; ++i)
      {
        auto tok = Split(in.Require("node"));
        if (tok.size() < 3)
        {
          in.Fail("malformed node line");
        }
        const long id = ParseNumber<long>(in, tok[0]);
        if (!node_index.emplace(id, i).second)
        {
          in.Fail("duplicate node id " + std::to_string(id));
        }
        mesh.vertices.push_back({ParseNumber<double>(in, tok[1]), ParseNumber<double>(in, tok[2])});
      }
      ExpectHeader(in, "$EndNodes");
      have_nodes = true;
    }
    else if (line == "$Elements")
    {
      if (!have_nodes)
      {
        in.Fail("$Elements before $Nodes");
      }
      const int n = ParseNumber<int>(in, in.Require("element count"));
      for (int i = 0; i < n; ++i)
      {
        auto tok = Split(in.Require("element"));
        if (tok.size() < 3)
        {
          in.Fail("malformed element line");
        }
        const int type = ParseNumber<int>(in, tok[1]);
        const int ntags = ParseNumber<int>(in, tok[2]);
        const int nnodes = type == 1 ? 2 : type == 2 ? 3 : -1;
        if (nnodes < 0)
        {
          in.Fail("unsupported element type " + std::to_string(type) +
                  " (only 2-node lines and 3-node triangles)");
        }
        if (static_cast<int>(tok.size()) != 3 + ntags + nnodes)
        {
          in.Fail("element line has wrong number of fields");
        }
        const int physical = ntags > 0 ? ParseNumber<int>(in, tok[3]) : 0;
        std::array<int, 3> v{-1, -1, -1};
        for (int j = 0; j < nnodes; ++j)
        {
          const long id = ParseNumber<long>(in, tok[3 + ntags + j]);
          auto it = node_index.find(id);
          if (it == node_index.end())
          {
            in.Fail("element references undefined node " + std::to_string(id));
          }
          v[j] = it->second;
        }
        if (type == 1)
        {
          mesh.boundary_edges.push_back({{v[0], v[1]}, physical});
        }
        else
        {
          triangles.push_back({v, physical});
        }
      }
      ExpectHeader(in, "$EndElements");
      have_elements = true;
    }
    else if (line.size() > 1 && line[0] == '$' && line.substr(0, 4) != "$End")
    {
      // Unknown section: skip to its matching end marker.
      const std::string end = "$End" + std::string(line.substr(1));
      std::string_view l;
      bool closed = false;
      while (in.Next(l))
      {
        if (l == end)
        {
          closed = true;
          break;
        }
      }
      if (!closed)
      {
        in.Fail("section " + std::string(line) + " is not closed");
      }
    }
    else
    {
      in.Fail("malformed section header '" + std::string(line) + "'");
    }
  }
  if (!have_format || !have_nodes || !have_elements)
  {
    throw InputError("msh: missing $MeshFormat, $Nodes or $Elements section");
  }

  mesh.elements.reserve(triangles.size());
  mesh.element_regions.reserve(triangles.size());
  for (auto &t : triangles)
  {
    auto v = t.v;
    if (SignedArea(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]) < 0.0)
    {
      std::swap(v[1], v[2]);
    }
    mesh.elements.push_back(v);
    auto it = names_2d.find(t.physical);
    mesh.element_regions.push_back(it == names_2d.end() ? Region::Interior
                                                        : RegionFromName(it->second));
  }
  mesh.Validate();
  return mesh;
}

Mesh ReadMshFile(const std::string &path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f)
  {
    throw InputError("cannot open mesh file '" + path + "'");
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  return ParseMsh(ss.str());
}

std::string WriteMsh(const Mesh &mesh)
{
  std::ostringstream out;
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n" << mesh.boundary_names.size() + 3 << "\n";
  for (const auto &[tag, name] : mesh.boundary_names)
  {
    out << "1 " << tag << " \"" << name << "\"\n";
  }
  for (Region r : {Region::Interior, Region::PmlLeft, Region::PmlRight})
  {
    out << "2 " << static_cast<int>(r) << " \"" << RegionName(r) << "\"\n";
  }
  out << "$EndPhysicalNames\n";
  out << "$Nodes\n" << mesh.vertices.size() << "\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
  {
    out << i + 1 << ' ' << FormatDouble(mesh.vertices[i].x) << ' '
        << FormatDouble(mesh.vertices[i].y) << " 0\n";
  }
  out << "$EndNodes\n";
  out << "$Elements\n" << mesh.boundary_edges.size() + mesh.elements.size() << "\n";
  std::size_t id = 1;
  for (const auto &be : mesh.boundary_edges)
  {
    out << id++ << " 1 2 " << be.tag << ' ' << be.tag << ' ' << be.v[0] + 1 << ' ' << be.v[1] + 1
        << "\n";
  }
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
  {
    const int r = static_cast<int>(mesh.element_regions[e]);
    const auto &t = mesh.elements[e];
    out << id++ << " 2 2 " << r << ' ' << r << ' ' << t[0] + 1 << ' ' << t[1] + 1 << ' '
        << t[2] + 1 << "\n";
  }
  out << "$EndElements\n";
  return out.str();
}

Mesh GenerateRectMesh(std::array<double, 2> x_range, std::array<double, 2> y_range, int nx,
                      int ny, std::optional<RectHole> hole)
{
  if (nx < 1 || ny < 1)
  {
    throw InputError("mesh generator: nx and ny must be at least 1");
  }
  if (!(x_range[1] > x_range[0]) || !(y_range[1] > y_range[0]))
  {
    throw InputError("mesh generator: empty rectangle");
  }
  const double hx = (x_range[1] - x_range[0]) / nx;
  const double hy = (y_range[1] - y_range[0]) / ny;

  // Hole in cell units [i0, i1) x [j0, j1).
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
  if (hole)
  {
    auto to_cell = [](double v, double lo, double h, const char *what)
    {
      const double c = (v - lo) / h;
      const double r = std::round(c);
      if (std::abs(c - r) > 1e-9)
      {
        throw InputError(std::string("mesh generator: hole ") + what +
                         " is not aligned to cell boundaries");
      }
      return static_cast<int>(r);
    };
    i0 = to_cell(hole->x0, x_range[0], hx, "x0");
    i1 = to_cell(hole->x1, x_range[0], hx, "x1");
    j0 = to_cell(hole->y0, y_range[0], hy, "y0");
    j1 = to_cell(hole->y1, y_range[0], hy, "y1");
    if (!(0 < i0 && i0 < i1 && i1 < nx && 0 < j0 && j0 < j1 && j1 < ny))
    {
      throw InputError("mesh generator: hole must lie strictly inside the rectangle");
    }
  }
  auto in_hole_vertex = [&](int i, int j)
  { return hole && i > i0 && i < i1 && j > j0 && j < j1; };
  auto in_hole_cell = [&](int i, int j)
  { return hole && i >= i0 && i < i1 && j >= j0 && j < j1; };

  Mesh mesh;
  std::vector<int> index((nx + 1) * (ny + 1), -1);
  for (int j = 0; j <= ny; ++j)
  {
    for (int i = 0; i <= nx; ++i)
    {
      if (in_hole_vertex(i, j))
      {
        continue;
      }
      index[j * (nx + 1) + i] = mesh.NumVertices();
      const double x = i == nx ? x_range[1] : x_range[0] + i * hx;
      const double y = j == ny ? y_range[1] : y_range[0] + j * hy;
      mesh.vertices.push_back({x, y});
    }
  }
  auto vid = [&](int i, int j) { return index[j * (nx + 1) + i]; };
  for (int j = 0; j < ny; ++j)
  {
    for (int i = 0; i < nx; ++i)
    {
      if (in_hole_cell(i, j))
      {
        continue;
      }
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v11 = vid(i + 1, j + 1),
                v01 = vid(i, j + 1);
      mesh.elements.push_back({v00, v10, v11});
      mesh.elements.push_back({v00, v11, v01});
    }
  }
  mesh.element_regions.assign(mesh.elements.size(), Region::Interior);

  for (int i = 0; i < nx; ++i)
  {
    mesh.boundary_edges.push_back({{vid(i, 0), vid(i + 1, 0)}, 1});
  }
  for (int j = 0; j < ny; ++j)
  {
    mesh.boundary_edges.push_back({{vid(nx, j), vid(nx, j + 1)}, 2});
  }
  for (int i = nx; i > 0; --i)
  {
    mesh.boundary_edges.push_back({{vid(i, ny), vid(i - 1, ny)}, 3});
  }
  for (int j = ny; j > 0; --j)
  {
    mesh.boundary_edges.push_back({{vid(0, j), vid(0, j - 1)}, 4});
  }
  mesh.boundary_names = {{1, "bottom"}, {2, "right"}, {3, "top"}, {4, "left"}};
  if (hole)
  {
    for (int i = i0; i < i1; ++i)
    {
      mesh.boundary_edges.push_back({{vid(i, j0), vid(i + 1, j0)}, 5});
      mesh.boundary_edges.push_back({{vid(i, j1), vid(i + 1, j1)}, 5});
    }
    for (int j = j0; j < j1; ++j)
    {
      mesh.boundary_edges.push_back({{vid(i0, j), vid(i0, j + 1)}, 5});
      mesh.boundary_edges.push_back({{vid(i1, j), vid(i1, j + 1)}, 5});
    }
    mesh.boundary_names[5] = "hole";
  }
  mesh.Validate();
  return mesh;
}

void TagPmlRegions(Mesh &mesh, double x_minus, double x_plus)
{
  for (int e = 0; e < mesh.NumElements(); ++e)
  {
    const auto &t = mesh.elements[e];
    const double cx =
        (mesh.vertices[t[0]].x + mesh.vertices[t[1]].x + mesh.vertices[t[2]].x) / 3.0;
    mesh.element_regions[e] = cx < x_minus  ? Region::PmlLeft
                              : cx > x_plus ? Region::PmlRight
                                            : Region::Interior;
  }
}

MeshSummary Summarize(const Mesh &mesh)
{
  return {mesh.NumVertices(), mesh.NumElements(), static_cast<int>(mesh.boundary_edges.size()),
          mesh.Area()};
}

std::string FormatSummary(const MeshSummary &s)
{
  std::ostringstream out;
  out << "vertices " << s.num_vertices << "\n"
      << "elements " << s.num_elements << "\n"
      << "boundary_edges " << s.num_boundary_edges << "\n"
      << "area " << FormatDouble(s.area) << "\n";
  return out.str();
}

}  // namespace crbm

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "crbm/rbm.hpp"

namespace crbm
{

namespace
{

constexpr char kMagic[8] = {'C', 'R', 'B', 'M', 'A', 'R', 'C', 'H'};
constexpr std::uint32_t kVersion = 1;

class Writer
{
public:
  void Bytes(const void *p, std::size_t n) { out_.append(static_cast<const char *>(p), n); }

  void U64(std::uint64_t v)
  {
    for (int i = 0; i < 8; ++i)
    {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }
  void U32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
    {
      out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
  }
  void F64(double d) { U64(std::bit_cast<std::uint64_t>(d)); }
  void C(Complex z)
  {
    F64(z.real());
    F64(z.imag());
  }
  void Str(const std::string &s)
  {
    U64(s.size());
    Bytes(s.data(), s.size());
  }
  void Mat(const ComplexMatrix &m)
  {
    U64(m.rows());
    U64(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
    {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
      {
        C(m(i, j));
      }
    }
  }
  void Vec(const ComplexVector &v)
  {
    U64(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
      C(v[i]);
    }
  }
  void Params(const std::vector<ParameterPoint> &ps)
  {
    U64(ps.size());
    for (const auto &p : ps)
    {
      F64(p.k);
      F64(p.mach);
    }
  }
  template <typename T, typename F>
  void List(const std::vector<T> &xs, F f)
  {
    U64(xs.size());
    for (const auto &x : xs)
    {
      (this->*f)(x);
    }
  }

  std::string Take() { return std::move(out_); }

private:
  std::string out_;
};

class Reader
{
public:
  explicit Reader(const std::string &in) : in_(in) {}

  void Need(std::size_t n)
  {
    if (pos_ + n > in_.size())
    {
      throw InputError("basis archive is truncated");
    }
  }
  std::uint64_t U64()
  {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
    {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::uint32_t U32()
  {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
    {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  // Counts are bounded by the remaining payload to reject corrupt headers early.
  std::uint64_t Count(std::size_t unit)
  {
    const auto n = U64();
    if (unit > 0 && n > (in_.size() - pos_) / unit)
    {
      throw InputError("basis archive is corrupt (size field too large)");
    }
    return n;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  Complex C()
  {
    const double re = F64();
    return {re, F64()};
  }
  std::string Str()
  {
    const auto n = Count(1);
    std::string s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  ComplexMatrix Mat()
  {
    const auto r = U64();
    const auto c = U64();
    if (r != 0 && c > (in_.size() - pos_) / 16 / r)
    {
      throw InputError("basis archive is corrupt (matrix too large)");
    }
    ComplexMatrix m(r, c);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
    {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
      {
        m(i, j) = C();
      }
    }
    return m;
  }
  ComplexVector Vec()
  {
    ComplexVector v(Count(16));
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
      v[i] = C();
    }
    return v;
  }
  std::vector<ParameterPoint> Params()
  {
    std::vector<ParameterPoint> ps(Count(16));
    for (auto &p : ps)
    {
      p.k = F64();
      p.mach = F64();
    }
    return ps;
  }
  std::vector<ComplexMatrix> Mats()
  {
    std::vector<ComplexMatrix> v(Count(16));
    for (auto &m : v)
    {
      m = Mat();
    }
    return v;
  }
  std::vector<ComplexVector> Vecs()
  {
    std::vector<ComplexVector> v(Count(8));
    for (auto &x : v)
    {
      x = Vec();
    }
    return v;
  }
  bool Done() const { return pos_ == in_.size(); }

  std::size_t pos_ = 0;

private:
  const std::string &in_;
};

void Check(bool ok, const char *what)
{
  if (!ok)
  {
    throw InputError(std::string("basis archive is inconsistent: ") + what);
  }
}

}  // namespace

std::string SerializeArchive(const ArchiveContents &c)
{
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(kVersion);
  w.Str(c.problem_kind);
  const auto &rb = c.basis;
  w.U64(rb.ma);
  w.U64(rb.mf);
  w.U64(rb.ml);
  w.U32(rb.affine_rhs ? 1 : 0);
  w.Str(rb.family_a);
  w.Str(rb.family_f);
  w.Str(rb.family_l);
  w.Mat(rb.phi);
  w.Params(rb.snapshot_params);
  w.List(rb.reduced_blocks, &Writer::Mat);
  w.List(rb.reduced_rhs, &Writer::Vec);
  w.List(rb.reduced_output, &Writer::Vec);
  w.Mat(rb.gram);
  w.Mat(rb.residual_factor);
  w.U32(c.dual ? 1 : 0);
  if (c.dual)
  {
    const auto &d = *c.dual;
    w.Mat(d.phi);
    w.Params(d.snapshot_params);
    w.List(d.reduced_blocks, &Writer::Mat);
    w.List(d.reduced_output, &Writer::Vec);
    w.List(d.cross_rhs, &Writer::Vec);
    w.List(d.cross_blocks, &Writer::Mat);
  }
  return w.Take();
}

ArchiveContents DeserializeArchive(const std::string &bytes)
{
  Reader r(bytes);
  r.Need(sizeof(kMagic));
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
  {
    throw InputError("not a basis archive (bad magic)");
  }
  r.pos_ += sizeof(kMagic);
  const auto version = r.U32();
  if (version != kVersion)
  {
    throw InputError("unsupported basis archive version " + std::to_string(version));
  }
  ArchiveContents c;
  c.problem_kind = r.Str();
  auto &rb = c.basis;
  rb.ma = static_cast<int>(r.U64());
  rb.mf = static_cast<int>(r.U64());
  rb.ml = static_cast<int>(r.U64());
  rb.affine_rhs = r.U32() != 0;
  rb.family_a = r.Str();
  rb.family_f = r.Str();
  rb.family_l = r.Str();
  rb.phi = r.Mat();
  rb.snapshot_params = r.Params();
  rb.reduced_blocks = r.Mats();
  rb.reduced_rhs = r.Vecs();
  rb.reduced_output = r.Vecs();
  rb.gram = r.Mat();
  rb.residual_factor = r.Mat();
  const int n = rb.Dimension();
  Check(static_cast<int>(rb.snapshot_params.size()) == n, "snapshot count");
  Check(static_cast<int>(rb.reduced_blocks.size()) == rb.ma, "operator block count");
  for (const auto &b : rb.reduced_blocks)
  {
    Check(b.rows() == n && b.cols() == n, "reduced block shape");
  }
  Check(static_cast<int>(rb.reduced_rhs.size()) == (rb.affine_rhs ? rb.mf : 0), "rhs blocks");
  for (const auto &v : rb.reduced_rhs)
  {
    Check(v.size() == n, "reduced rhs length");
  }
  Check(static_cast<int>(rb.reduced_output.size()) == rb.ml, "output blocks");
  for (const auto &v : rb.reduced_output)
  {
    Check(v.size() == n, "reduced output length");
  }
  const int k = rb.NumRepresenters();
  Check(rb.gram.rows() == k && rb.gram.cols() == k, "gram shape");
  Check(rb.residual_factor.cols() == k && rb.residual_factor.rows() <= k, "residual factor");
  rb.theta_a = MakeCoefficients(rb.family_a);
  if (rb.affine_rhs)
  {
    rb.theta_f = MakeCoefficients(rb.family_f);
  }
  if (rb.ml > 0)
  {
    rb.theta_l = MakeCoefficients(rb.family_l);
  }
  if (r.U32())
  {
    DualBasis d;
    d.phi = r.Mat();
    d.snapshot_params = r.Params();
    d.reduced_blocks = r.Mats();
    d.reduced_output = r.Vecs();
    d.cross_rhs = r.Vecs();
    d.cross_blocks = r.Mats();
    const int nd = d.Dimension();
    Check(d.phi.rows() == rb.phi.rows(), "dual basis length");
    Check(static_cast<int>(d.reduced_blocks.size()) == rb.ma, "dual block count");
    for (const auto &b : d.reduced_blocks)
    {
      Check(b.rows() == nd && b.cols() == nd, "dual block shape");
    }
    Check(static_cast<int>(d.cross_blocks.size()) == rb.ma, "dual cross block count");
    for (const auto &b : d.cross_blocks)
    {
      Check(b.rows() == nd && b.cols() == n, "dual cross block shape");
    }
    Check(static_cast<int>(d.reduced_output.size()) == rb.ml, "dual output count");
    c.dual = std::move(d);
  }
  Check(r.Done(), "trailing bytes");
  return c;
}

void WriteArchive(const std::string &path, const ArchiveContents &contents)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw InputError("cannot write basis archive " + path);
  }
  const auto bytes = SerializeArchive(contents);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ArchiveContents ReadArchive(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw InputError("cannot open basis archive " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return DeserializeArchive(ss.str());
}

}  // namespace crbm

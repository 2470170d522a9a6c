// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/linsolve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "crbm/kernels.hpp"

namespace crbm
{

using EigenSparse = Eigen::SparseMatrix<Complex>;

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0)
{
}

SparseMatrix SparseMatrix::FromTriplets(int rows, int cols, std::vector<Triplet> triplets)
{
  for (const auto &t : triplets)
  {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
    {
      throw InputError("sparse matrix: triplet index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet &a, const Triplet &b)
            { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t k = 0; k < triplets.size(); ++k)
  {
    const auto &t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col)
    {
      m.values_.back() += t.value;
      continue;
    }
    m.col_idx_.push_back(t.col);
    m.values_.push_back(t.value);
    ++m.row_ptr_[t.row + 1];
  }
  for (int r = 0; r < rows; ++r)
  {
    m.row_ptr_[r + 1] += m.row_ptr_[r];
  }
  return m;
}

SparseMatrix SparseMatrix::Identity(int n)
{
  std::vector<Triplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i)
  {
    t.push_back({i, i, 1.0});
  }
  return FromTriplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::LinearCombination(std::span<const Complex> coeffs,
                                             std::span<const SparseMatrix *const> mats)
{
  if (coeffs.size() != mats.size() || mats.empty())
  {
    throw InputError("linear combination: coefficient/matrix count mismatch");
  }
  const int rows = mats[0]->Rows(), cols = mats[0]->Cols();
  std::vector<Triplet> t;
  std::size_t nnz = 0;
  for (const auto *m : mats)
  {
    if (m->Rows() != rows || m->Cols() != cols)
    {
      throw InputError("linear combination: shape mismatch");
    }
    nnz += m->NonZeros();
  }
  t.reserve(nnz);
  for (std::size_t b = 0; b < mats.size(); ++b)
  {
    const auto &m = *mats[b];
    for (int r = 0; r < rows; ++r)
    {
      for (int k = m.row_ptr_[r]; k < m.row_ptr_[r + 1]; ++k)
      {
        t.push_back({r, m.col_idx_[k], coeffs[b] * m.values_[k]});
      }
    }
  }
  return FromTriplets(rows, cols, std::move(t));
}

Complex SparseMatrix::Entry(int i, int j) const
{
  auto begin = col_idx_.begin() + row_ptr_[i];
  auto end = col_idx_.begin() + row_ptr_[i + 1];
  auto it = std::lower_bound(begin, end, j);
  return (it != end && *it == j) ? values_[it - col_idx_.begin()] : Complex(0.0);
}

void SparseMatrix::Multiply(std::span<const Complex> x, std::span<Complex> y) const
{
  kernels::CsrMatvec(row_ptr_, col_idx_, values_, x, y);
}

ComplexVector SparseMatrix::operator*(const ComplexVector &x) const
{
  ComplexVector y(rows_);
  Multiply({x.data(), static_cast<std::size_t>(x.size())},
           {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

ComplexMatrix SparseMatrix::operator*(const ComplexMatrix &x) const
{
  ComplexMatrix y(rows_, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
  {
    Multiply({x.col(c).data(), static_cast<std::size_t>(x.rows())},
             {y.col(c).data(), static_cast<std::size_t>(rows_)});
  }
  return y;
}

SparseMatrix SparseMatrix::Adjoint() const
{
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r)
  {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      t.push_back({col_idx_[k], r, std::conj(values_[k])});
    }
  }
  return FromTriplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::Scaled(Complex s) const
{
  SparseMatrix m = *this;
  for (auto &v : m.values_)
  {
    v *= s;
  }
  return m;
}

SparseMatrix SparseMatrix::Restrict(std::span<const int> rows, std::span<const int> cols) const
{
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < cols.size(); ++j)
  {
    col_map[cols[j]] = static_cast<int>(j);
  }
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    const int r = rows[i];
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      if (col_map[col_idx_[k]] >= 0)
      {
        t.push_back({static_cast<int>(i), col_map[col_idx_[k]], values_[k]});
      }
    }
  }
  return FromTriplets(static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(t));
}

double SparseMatrix::MaxAbs() const
{
  double m = 0.0;
  for (const auto &v : values_)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

double SparseMatrix::FrobeniusNorm() const
{
  double s = 0.0;
  for (const auto &v : values_)
  {
    s += std::norm(v);
  }
  return std::sqrt(s);
}

bool SparseMatrix::IsZero() const
{
  return std::all_of(values_.begin(), values_.end(), [](Complex v) { return v == 0.0; });
}

ComplexMatrix SparseMatrix::ToDense() const
{
  ComplexMatrix d = ComplexMatrix::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
  {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      d(r, col_idx_[k]) = values_[k];
    }
  }
  return d;
}

EigenSparse SparseMatrix::ToEigen() const
{
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r)
  {
    for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
    {
      t.emplace_back(r, col_idx_[k], values_[k]);
    }
  }
  EigenSparse m(rows_, cols_);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

struct SparseLuSolver::Impl
{
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix a;
  double norm_f = 0.0;
};

SparseLuSolver::SparseLuSolver(const SparseMatrix &a) : impl_(std::make_unique<Impl>()), n_(a.Rows())
{
  if (a.Rows() != a.Cols())
  {
    throw InputError("sparse solve: matrix is not square");
  }
  impl_->a = a;
  impl_->norm_f = a.FrobeniusNorm();
  if (n_ == 0)
  {
    return;
  }
  auto m = a.ToEigen();
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success)
  {
    throw NumericalError("sparse LU failed: " + impl_->lu.lastErrorMessage());
  }
}

SparseLuSolver::~SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(SparseLuSolver &&) noexcept = default;
SparseLuSolver &SparseLuSolver::operator=(SparseLuSolver &&) noexcept = default;

ComplexVector SparseLuSolver::Solve(const ComplexVector &b) const
{
  if (b.size() != n_)
  {
    throw InputError("sparse solve: right-hand side has wrong size");
  }
  if (n_ == 0)
  {
    return ComplexVector(0);
  }
  ComplexVector x = impl_->lu.solve(b);
  if (!x.allFinite())
  {
    throw NumericalError("sparse LU produced non-finite solution (singular matrix)");
  }
  const double res = (impl_->a * x - b).norm();
  if (res > 1e-10 * (impl_->norm_f * x.norm() + b.norm()))
  {
    throw NumericalError("sparse LU backward error " + std::to_string(res) +
                         " exceeds tolerance (matrix numerically singular)");
  }
  return x;
}

struct HermitianSolver::Impl
{
  Eigen::SimplicialLLT<EigenSparse, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

HermitianSolver::HermitianSolver(const SparseMatrix &x)
    : impl_(std::make_unique<Impl>()), x_(x), n_(x.Rows())
{
  if (x.Rows() != x.Cols())
  {
    throw InputError("Hermitian solve: matrix is not square");
  }
  const double scale = x.MaxAbs();
  for (int r = 0; r < n_; ++r)
  {
    for (int k = x.RowPtr()[r]; k < x.RowPtr()[r + 1]; ++k)
    {
      if (std::abs(x.Values()[k] - std::conj(x.Entry(x.ColIdx()[k], r))) > 1e-14 * scale)
      {
        throw InputError("Hermitian solve: matrix is not Hermitian");
      }
    }
  }
  if (n_ == 0)
  {
    return;
  }
  impl_->llt.compute(x.ToEigen());
  if (impl_->llt.info() != Eigen::Success)
  {
    throw NumericalError("Cholesky factorization failed: matrix is not positive definite");
  }
}

HermitianSolver::~HermitianSolver() = default;
HermitianSolver::HermitianSolver(HermitianSolver &&) noexcept = default;
HermitianSolver &HermitianSolver::operator=(HermitianSolver &&) noexcept = default;

ComplexVector HermitianSolver::Solve(const ComplexVector &b) const
{
  if (b.size() != n_)
  {
    throw InputError("Hermitian solve: right-hand side has wrong size");
  }
  if (n_ == 0)
  {
    return ComplexVector(0);
  }
  return impl_->llt.solve(b);
}

ComplexVector RieszRepresentation(const HermitianSolver &x, const ComplexVector &r)
{
  return x.Solve(r);
}

double RieszNorm(const ComplexVector &riesz, const ComplexVector &r)
{
  const Complex s =
      kernels::Dotc({riesz.data(), static_cast<std::size_t>(riesz.size())},
                    {r.data(), static_cast<std::size_t>(r.size())});
  if (std::abs(s.imag()) > 1e-12 * std::abs(s) && std::abs(s) > 0.0)
  {
    throw NumericalError("Riesz norm: e^H r has a significant imaginary part");
  }
  return std::sqrt(std::max(0.0, s.real()));
}

Complex XInner(const SparseMatrix &x, const ComplexVector &u, const ComplexVector &v)
{
  const ComplexVector xu = x * u;
  return kernels::Dotc({v.data(), static_cast<std::size_t>(v.size())},
                       {xu.data(), static_cast<std::size_t>(xu.size())});
}

double XNorm(const SparseMatrix &x, const ComplexVector &u)
{
  return std::sqrt(std::max(0.0, XInner(x, u, u).real()));
}

}  // namespace crbm

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_LINSOLVE_HPP
#define CRBM_LINSOLVE_HPP

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "crbm/common.hpp"

namespace crbm
{

struct Triplet
{
  int row;
  int col;
  Complex value;
};

//
// Compressed-row complex matrix. Column indices are strictly increasing within
// each row; explicitly stored zeros are kept so that patterns stay stable
// across parameter values.
//
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  // Duplicate (row, col) entries are summed.
  static SparseMatrix FromTriplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix Identity(int n);

  // sum_m coeffs[m] * mats[m] on the union pattern; all operands share a shape.
  static SparseMatrix LinearCombination(std::span<const Complex> coeffs,
                                        std::span<const SparseMatrix *const> mats);

  int Rows() const { return rows_; }
  int Cols() const { return cols_; }
  std::size_t NonZeros() const { return values_.size(); }

  const std::vector<int> &RowPtr() const { return row_ptr_; }
  const std::vector<int> &ColIdx() const { return col_idx_; }
  const std::vector<Complex> &Values() const { return values_; }
  std::vector<Complex> &Values() { return values_; }

  Complex Entry(int i, int j) const;
  void Multiply(std::span<const Complex> x, std::span<Complex> y) const;
  ComplexVector operator*(const ComplexVector &x) const;
  ComplexMatrix operator*(const ComplexMatrix &x) const;

  SparseMatrix Adjoint() const;
  SparseMatrix Scaled(Complex s) const;
  // Rows and columns picked (and renumbered) by the given index lists.
  SparseMatrix Restrict(std::span<const int> rows, std::span<const int> cols) const;

  double MaxAbs() const;
  double FrobeniusNorm() const;
  bool IsZero() const;
  ComplexMatrix ToDense() const;
  Eigen::SparseMatrix<Complex> ToEigen() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<Complex> values_;
};

//
// Direct sparse LU factorization of a square complex matrix. Construction is
// exclusive; Solve is const and may be called concurrently.
//
class SparseLuSolver
{
public:
  explicit SparseLuSolver(const SparseMatrix &a);
  ~SparseLuSolver();
  SparseLuSolver(SparseLuSolver &&) noexcept;
  SparseLuSolver &operator=(SparseLuSolver &&) noexcept;

  int Size() const { return n_; }
  // Throws NumericalError when the backward error exceeds
  // 1e-10 (|A|_F |x| + |b|).
  ComplexVector Solve(const ComplexVector &b) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

//
// Cholesky factorization of a Hermitian positive-definite matrix (the X inner
// product). Throws NumericalError if the matrix is not positive definite.
//
class HermitianSolver
{
public:
  explicit HermitianSolver(const SparseMatrix &x);
  ~HermitianSolver();
  HermitianSolver(HermitianSolver &&) noexcept;
  HermitianSolver &operator=(HermitianSolver &&) noexcept;

  int Size() const { return n_; }
  ComplexVector Solve(const ComplexVector &b) const;
  const SparseMatrix &Matrix() const { return x_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SparseMatrix x_;
  int n_ = 0;
};

// Riesz representative e = X^{-1} r of the functional r.
ComplexVector RieszRepresentation(const HermitianSolver &x, const ComplexVector &r);

// X-norm of the Riesz representative, sqrt(Re(e^H r)). Throws NumericalError
// if e^H r has a non-negligible imaginary part.
double RieszNorm(const ComplexVector &riesz, const ComplexVector &r);

// (u, v)_X = v^H X u
Complex XInner(const SparseMatrix &x, const ComplexVector &u, const ComplexVector &v);
double XNorm(const SparseMatrix &x, const ComplexVector &u);

}  // namespace crbm

#endif  // CRBM_LINSOLVE_HPP

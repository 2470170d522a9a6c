// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"

#include "crbm/linsolve.hpp"

using namespace crbm;

namespace
{

SparseMatrix FromDense(const ComplexMatrix &d)
{
  std::vector<Triplet> t;
  for (int i = 0; i < d.rows(); ++i)
  {
    for (int j = 0; j < d.cols(); ++j)
    {
      if (d(i, j) != 0.0)
      {
        t.push_back({i, j, d(i, j)});
      }
    }
  }
  return SparseMatrix::FromTriplets(static_cast<int>(d.rows()), static_cast<int>(d.cols()), t);
}

ComplexMatrix RandomHpd(std::mt19937_64 &rng, int n)
{
  std::normal_distribution<double> d;
  ComplexMatrix b(n, n);
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      b(i, j) = {d(rng), d(rng)};
    }
  }
  ComplexMatrix x = b.adjoint() * b + ComplexMatrix::Identity(n, n);
  return 0.5 * (x + x.adjoint());
}

ComplexVector RandomVec(std::mt19937_64 &rng, int n)
{
  std::normal_distribution<double> d;
  ComplexVector v(n);
  for (int i = 0; i < n; ++i)
  {
    v[i] = {d(rng), d(rng)};
  }
  return v;
}

}  // namespace

TEST_CASE("sparse solve small examples")
{
  SUBCASE("identity")
  {
    const ComplexVector b = ComplexVector::LinSpaced(5, 1.0, 5.0);
    SparseLuSolver lu(SparseMatrix::Identity(5));
    CHECK((lu.Solve(b) - b).norm() == 0.0);
  }
  SUBCASE("diagonal")
  {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = Complex(0, 4);
    ComplexVector b(2);
    b << 2.0, Complex(0, 4);
    const ComplexVector x = SparseLuSolver(FromDense(a)).Solve(b);
    CHECK(std::abs(x[0] - 1.0) < 1e-15);
    CHECK(std::abs(x[1] - 1.0) < 1e-15);
  }
  SUBCASE("hermitian 2x2 with unit determinant")
  {
    ComplexMatrix a(2, 2);
    a << 1.0, Complex(0, 1), Complex(0, -1), 2.0;
    ComplexVector b(2);
    b << 1.0, 0.0;
    const ComplexVector x = SparseLuSolver(FromDense(a)).Solve(b);
    CHECK(std::abs(x[0] - 2.0) < 1e-14);
    CHECK(std::abs(x[1] - Complex(0, 1)) < 1e-14);
  }
}

TEST_CASE("sparse solve meets the backward error bound on random systems")
{
  std::mt19937_64 rng(11);
  for (int n : {3, 17, 60})
  {
    ComplexMatrix a = RandomHpd(rng, n);
    a(0, n - 1) += Complex(0.0, 3.0);  // break symmetry
    const ComplexVector b = RandomVec(rng, n);
    const SparseMatrix s = FromDense(a);
    const ComplexVector x = SparseLuSolver(s).Solve(b);
    CHECK((s * x - b).norm() <= 1e-10 * (s.FrobeniusNorm() * x.norm() + b.norm()));
  }
}

TEST_CASE("singular systems fail explicitly")
{
  ComplexMatrix a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  ComplexVector b(3);
  b << 1, 1, 1;
  CHECK_THROWS_AS(SparseLuSolver(FromDense(a)).Solve(b), NumericalError);

  // structurally empty row
  std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}};
  CHECK_THROWS_AS(SparseLuSolver(SparseMatrix::FromTriplets(3, 3, t)).Solve(b), NumericalError);
}

TEST_CASE("riesz representation")
{
  std::mt19937_64 rng(12);
  const ComplexVector r = RandomVec(rng, 6);
  SUBCASE("identity")
  {
    HermitianSolver x(SparseMatrix::Identity(6));
    CHECK((RieszRepresentation(x, r) - r).norm() < 1e-15);
  }
  SUBCASE("scaled identity")
  {
    HermitianSolver x(SparseMatrix::Identity(6).Scaled(2.0));
    const ComplexVector e = RieszRepresentation(x, r);
    CHECK((e - r / 2.0).norm() < 1e-15);
    CHECK(RieszNorm(e, r) == doctest::Approx(r.norm() / std::sqrt(2.0)).epsilon(1e-14));
  }
  SUBCASE("random hermitian positive definite")
  {
    const ComplexMatrix xd = RandomHpd(rng, 20);
    const SparseMatrix xs = FromDense(xd);
    HermitianSolver x(xs);
    const ComplexVector rr = RandomVec(rng, 20);
    const ComplexVector e = RieszRepresentation(x, rr);
    for (int t = 0; t < 10; ++t)
    {
      const ComplexVector v = RandomVec(rng, 20);
      // (e, v)_X = v^H X e must reproduce the functional v^H r
      const Complex lhs = XInner(xs, e, v);
      const Complex rhs = v.dot(rr);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
    const double nx = XNorm(xs, e);
    CHECK(RieszNorm(e, rr) == doctest::Approx(nx).epsilon(1e-12));
  }
}

TEST_CASE("factor once, solve many")
{
  std::mt19937_64 rng(13);
  const SparseMatrix xs = FromDense(RandomHpd(rng, 15));
  HermitianSolver once(xs);
  for (int t = 0; t < 5; ++t)
  {
    const ComplexVector b = RandomVec(rng, 15);
    const ComplexVector a = once.Solve(b);
    const ComplexVector f = HermitianSolver(xs).Solve(b);
    CHECK((a - f).norm() <= 1e-12 * f.norm());
  }
  ComplexMatrix ad = RandomHpd(rng, 15);
  ad(2, 3) += 1.0;
  const SparseMatrix as = FromDense(ad);
  SparseLuSolver lu(as);
  for (int t = 0; t < 5; ++t)
  {
    const ComplexVector b = RandomVec(rng, 15);
    CHECK((lu.Solve(b) - SparseLuSolver(as).Solve(b)).norm() <= 1e-12 * lu.Solve(b).norm());
  }
}

TEST_CASE("hermitian solver rejects bad input")
{
  ComplexMatrix a(2, 2);
  a << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(HermitianSolver(FromDense(a)), InputError);
  ComplexMatrix b(2, 2);
  b << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(HermitianSolver(FromDense(b)), NumericalError);
}

TEST_CASE("riesz norm is real and nonnegative")
{
  std::mt19937_64 rng(14);
  const SparseMatrix xs = FromDense(RandomHpd(rng, 12));
  HermitianSolver x(xs);
  for (int t = 0; t < 10; ++t)
  {
    const ComplexVector r = RandomVec(rng, 12);
    const ComplexVector e = x.Solve(r);
    const Complex s = e.dot(r);
    CHECK(std::abs(s.imag()) <= 1e-12 * std::abs(s));
    CHECK(RieszNorm(e, r) >= 0.0);
  }
  ComplexVector e(1), r(1);
  e << 1.0;
  r << Complex(1.0, 1.0);
  CHECK_THROWS_AS(RieszNorm(e, r), NumericalError);
}

TEST_CASE("sparse matrix operations")
{
  std::vector<Triplet> t{{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, Complex(0, 1)}, {2, 2, 5.0}};
  const SparseMatrix m = SparseMatrix::FromTriplets(3, 3, t);
  CHECK(m.Entry(0, 1) == Complex(3.0));
  CHECK(m.NonZeros() == 3);
  CHECK(m.Adjoint().Entry(0, 1) == Complex(0, -1));
  for (int r = 0; r < 3; ++r)
  {
    for (int k = m.RowPtr()[r] + 1; k < m.RowPtr()[r + 1]; ++k)
    {
      CHECK(m.ColIdx()[k - 1] < m.ColIdx()[k]);
    }
  }

  const std::vector<int> keep{0, 2};
  const SparseMatrix sub = m.Restrict(keep, keep);
  CHECK(sub.Rows() == 2);
  CHECK(sub.Entry(1, 1) == Complex(5.0));
  CHECK(sub.Entry(0, 0) == Complex(0.0));

  const SparseMatrix *mats[] = {&m, &m};
  const Complex coeffs[] = {1.0, Complex(0, 1)};
  const SparseMatrix lc = SparseMatrix::LinearCombination(coeffs, mats);
  CHECK(lc.Entry(2, 2) == Complex(5.0, 5.0));

  const Complex zero[] = {0.0, 0.0};
  CHECK(SparseMatrix::LinearCombination(zero, mats).IsZero());

  CHECK_THROWS_AS(SparseMatrix::FromTriplets(2, 2, {{2, 0, 1.0}}), InputError);
}

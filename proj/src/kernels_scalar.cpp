// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/kernels.hpp"

namespace crbm::kernels::scalar
{

Complex Dotc(std::span<const Complex> x, std::span<const Complex> y)
{
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void Axpy(Complex a, std::span<const Complex> x, std::span<Complex> y)
{
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr};
  }
}

void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y)
{
  const std::size_t nrows = row_ptr.size() - 1;
  for (std::size_t r = 0; r < nrows; ++r)
  {
    double re = 0.0, im = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
    {
      const double vr = vals[k].real(), vi = vals[k].imag();
      const double xr = x[cols[k]].real(), xi = x[cols[k]].imag();
      re += vr * xr - vi * xi;
      im += vr * xi + vi * xr;
    }
    y[r] = {re, im};
  }
}

Complex HermitianForm(std::span<const Complex> c, std::span<const Complex> g)
{
  const std::size_t n = c.size();
  Complex acc = 0.0;
  for (std::size_t j = 0; j < n; ++j)
  {
    acc += Dotc(c, g.subspan(j * n, n)) * c[j];
  }
  return acc;
}

}  // namespace crbm::kernels::scalar

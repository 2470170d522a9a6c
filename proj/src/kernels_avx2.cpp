// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 -mfma; only reached after the dispatcher has checked the
// CPU. Two complex doubles per 256-bit register, interleaved (re, im, re, im).

#include "crbm/kernels.hpp"

#if defined(CRBM_HAVE_AVX2_TU)
#include <immintrin.h>
#endif

namespace crbm::kernels::avx2
{

#if defined(CRBM_HAVE_AVX2_TU)

namespace
{

inline const double *AsDoubles(const Complex *p) { return reinterpret_cast<const double *>(p); }
inline double *AsDoubles(Complex *p) { return reinterpret_cast<double *>(p); }

inline double HorizontalSum(__m256d v)
{
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// (v * x) for two interleaved complex pairs.
inline __m256d ComplexMul(__m256d v, __m256d x)
{
  const __m256d vr = _mm256_movedup_pd(v);
  const __m256d vi = _mm256_permute_pd(v, 0xF);
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(vr, x, _mm256_mul_pd(vi, xs));
}

}  // namespace

Complex Dotc(std::span<const Complex> x, std::span<const Complex> y)
{
  const std::size_t n = x.size();
  const double *px = AsDoubles(x.data());
  const double *py = AsDoubles(y.data());
  // acc_re lanes: xr*yr, xi*yi; acc_im lanes: xr*yi, xi*yr
  __m256d acc_re0 = _mm256_setzero_pd(), acc_im0 = _mm256_setzero_pd();
  __m256d acc_re1 = _mm256_setzero_pd(), acc_im1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
  {
    const __m256d a0 = _mm256_loadu_pd(px + 2 * i);
    const __m256d b0 = _mm256_loadu_pd(py + 2 * i);
    const __m256d a1 = _mm256_loadu_pd(px + 2 * i + 4);
    const __m256d b1 = _mm256_loadu_pd(py + 2 * i + 4);
    acc_re0 = _mm256_fmadd_pd(a0, b0, acc_re0);
    acc_im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), acc_im0);
    acc_re1 = _mm256_fmadd_pd(a1, b1, acc_re1);
    acc_im1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(b1, 0x5), acc_im1);
  }
  for (; i + 2 <= n; i += 2)
  {
    const __m256d a0 = _mm256_loadu_pd(px + 2 * i);
    const __m256d b0 = _mm256_loadu_pd(py + 2 * i);
    acc_re0 = _mm256_fmadd_pd(a0, b0, acc_re0);
    acc_im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0x5), acc_im0);
  }
  const __m256d acc_re = _mm256_add_pd(acc_re0, acc_re1);
  const __m256d acc_im = _mm256_add_pd(acc_im0, acc_im1);
  double re = HorizontalSum(acc_re);
  // imaginary part: xr*yi - xi*yr, i.e. even lanes minus odd lanes
  alignas(32) double t[4];
  _mm256_store_pd(t, acc_im);
  double im = (t[0] - t[1]) + (t[2] - t[3]);
  for (; i < n; ++i)
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
  const std::size_t n = x.size();
  const double *px = AsDoubles(x.data());
  double *py = AsDoubles(y.data());
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
  {
    const __m256d xv = _mm256_loadu_pd(px + 2 * i);
    const __m256d xs = _mm256_permute_pd(xv, 0x5);
    const __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
    _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(_mm256_loadu_pd(py + 2 * i), prod));
  }
  for (; i < n; ++i)
  {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = {y[i].real() + a.real() * xr - a.imag() * xi,
            y[i].imag() + a.real() * xi + a.imag() * xr};
  }
}

void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y)
{
  const std::size_t nrows = row_ptr.size() - 1;
  const double *pv = AsDoubles(vals.data());
  const double *px = AsDoubles(x.data());
  for (std::size_t r = 0; r < nrows; ++r)
  {
    __m256d acc = _mm256_setzero_pd();
    int k = row_ptr[r];
    const int end = row_ptr[r + 1];
    for (; k + 2 <= end; k += 2)
    {
      const __m256d v = _mm256_loadu_pd(pv + 2 * k);
      const __m128d x0 = _mm_loadu_pd(px + 2 * cols[k]);
      const __m128d x1 = _mm_loadu_pd(px + 2 * cols[k + 1]);
      const __m256d xv = _mm256_insertf128_pd(_mm256_castpd128_pd256(x0), x1, 1);
      acc = _mm256_add_pd(acc, ComplexMul(v, xv));
    }
    __m128d s = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    double re = _mm_cvtsd_f64(s);
    double im = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
    for (; k < end; ++k)
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

#else

Complex Dotc(std::span<const Complex> x, std::span<const Complex> y)
{
  return scalar::Dotc(x, y);
}
void Axpy(Complex a, std::span<const Complex> x, std::span<Complex> y) { scalar::Axpy(a, x, y); }
void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y)
{
  scalar::CsrMatvec(row_ptr, cols, vals, x, y);
}
Complex HermitianForm(std::span<const Complex> c, std::span<const Complex> g)
{
  return scalar::HermitianForm(c, g);
}

#endif

}  // namespace crbm::kernels::avx2

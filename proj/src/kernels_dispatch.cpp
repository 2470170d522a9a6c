// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "crbm/kernels.hpp"

namespace crbm::kernels
{

namespace
{

Backend DetectBackend()
{
  if (const char *env = std::getenv("CRBM_KERNELS"); env && std::string(env) == "scalar")
  {
    return Backend::Scalar;
  }
  return Avx2Available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend> &ActiveSlot()
{
  static std::atomic<Backend> active{DetectBackend()};
  return active;
}

}  // namespace

std::string_view BackendName(Backend b)
{
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

bool Avx2Available()
{
#if defined(CRBM_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend ActiveBackend() { return ActiveSlot().load(std::memory_order_relaxed); }

void SetBackend(Backend b)
{
  if (b == Backend::Avx2 && !Avx2Available())
  {
    throw InputError("AVX2 kernels requested but not supported on this CPU");
  }
  ActiveSlot().store(b, std::memory_order_relaxed);
}

Complex Dotc(std::span<const Complex> x, std::span<const Complex> y)
{
  if (x.size() != y.size())
  {
    throw InputError("dotc: length mismatch");
  }
  return ActiveBackend() == Backend::Avx2 ? avx2::Dotc(x, y) : scalar::Dotc(x, y);
}

void Axpy(Complex a, std::span<const Complex> x, std::span<Complex> y)
{
  if (x.size() != y.size())
  {
    throw InputError("axpy: length mismatch");
  }
  ActiveBackend() == Backend::Avx2 ? avx2::Axpy(a, x, y) : scalar::Axpy(a, x, y);
}

void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y)
{
  if (row_ptr.size() != y.size() + 1 || cols.size() != vals.size())
  {
    throw InputError("csr matvec: inconsistent dimensions");
  }
  ActiveBackend() == Backend::Avx2 ? avx2::CsrMatvec(row_ptr, cols, vals, x, y)
                                   : scalar::CsrMatvec(row_ptr, cols, vals, x, y);
}

Complex HermitianForm(std::span<const Complex> c, std::span<const Complex> g)
{
  if (g.size() != c.size() * c.size())
  {
    throw InputError("hermitian form: matrix size mismatch");
  }
  return ActiveBackend() == Backend::Avx2 ? avx2::HermitianForm(c, g)
                                          : scalar::HermitianForm(c, g);
}

}  // namespace crbm::kernels

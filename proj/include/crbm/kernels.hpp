// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_KERNELS_HPP
#define CRBM_KERNELS_HPP

#include <span>
#include <string_view>

#include "crbm/common.hpp"

//
// Complex double inner loops used by assembly, Gram computations and the
// online stage. Each kernel has a scalar reference version and an AVX2/FMA
// version; the active one is chosen once at startup from the CPU features and
// can be overridden (CRBM_KERNELS=scalar, or SetBackend in tests).
//
namespace crbm::kernels
{

enum class Backend
{
  Scalar,
  Avx2
};

std::string_view BackendName(Backend b);
bool Avx2Available();
Backend ActiveBackend();
// Throws InputError when the requested backend is not supported on this CPU.
void SetBackend(Backend b);

// sum_i conj(x_i) * y_i
Complex Dotc(std::span<const Complex> x, std::span<const Complex> y);

// y += a * x
void Axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);

// y = A x for a CSR matrix with nrows rows.
void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y);

// c^H G c for a column-major n-by-n matrix G, n = c.size().
Complex HermitianForm(std::span<const Complex> c, std::span<const Complex> g);

// Explicit variants, exposed for equivalence testing.
namespace scalar
{
Complex Dotc(std::span<const Complex> x, std::span<const Complex> y);
void Axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y);
Complex HermitianForm(std::span<const Complex> c, std::span<const Complex> g);
}  // namespace scalar

namespace avx2
{
Complex Dotc(std::span<const Complex> x, std::span<const Complex> y);
void Axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void CsrMatvec(std::span<const int> row_ptr, std::span<const int> cols,
               std::span<const Complex> vals, std::span<const Complex> x, std::span<Complex> y);
Complex HermitianForm(std::span<const Complex> c, std::span<const Complex> g);
}  // namespace avx2

}  // namespace crbm::kernels

#endif  // CRBM_KERNELS_HPP

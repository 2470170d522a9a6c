// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "crbm/analytic.hpp"

namespace crbm
{

namespace
{

constexpr double kSeriesLimit = 12.0;
constexpr double kEulerGamma = 0.57721566490153286061;

template <typename T>
double Mag(const T &z)
{
  return std::abs(z);
}

template <typename T>
struct Pair
{
  T j, y;
};

// Ascending series, A&S 9.1.10, 9.1.11, 9.1.13.
template <typename T>
Pair<T> Series0(T z)
{
  const T q = z * z / 4.0;
  T term = 1.0;
  T j = 1.0;
  T ys = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k < 200; ++k)
  {
    term *= -q / static_cast<double>(k * k);
    harmonic += 1.0 / k;
    j += term;
    ys -= harmonic * term;
    if (Mag(term) * (1.0 + harmonic) < 1e-18 * Mag(j) && k > 2)
    {
      break;
    }
  }
  const double c = 2.0 / std::numbers::pi;
  return {j, c * (std::log(z / 2.0) + kEulerGamma) * j + c * ys};
}

template <typename T>
Pair<T> Series1(T z)
{
  const T q = z * z / 4.0;
  T term = 1.0;  // (-q)^k / (k! (k+1)!)
  T j = 1.0;
  // psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}
  double hk = 0.0, hk1 = 1.0;
  T ys = (-2.0 * kEulerGamma + hk + hk1) * term;
  for (int k = 1; k < 200; ++k)
  {
    term *= -q / static_cast<double>(k * (k + 1));
    hk += 1.0 / k;
    hk1 += 1.0 / (k + 1);
    j += term;
    const T t = (-2.0 * kEulerGamma + hk + hk1) * term;
    ys += t;
    if (Mag(t) + Mag(term) < 1e-18 * Mag(j) && k > 2)
    {
      break;
    }
  }
  const T half = z / 2.0;
  j *= half;
  const double pi = std::numbers::pi;
  const T y = -2.0 / (pi * z) + 2.0 / pi * std::log(half) * j - half / pi * ys;
  return {j, y};
}

// Hankel asymptotic expansion, A&S 9.2.5-9.2.10, truncated at the smallest term.
template <typename T>
Pair<T> Asymptotic(T z, int order)
{
  const double mu = 4.0 * order * order;
  const T inv8z = 1.0 / (8.0 * z);
  T p = 1.0, q = 0.0;
  T a = 1.0;  // a_k / z^k
  double last = 1e300;
  for (int k = 1; k < 60; ++k)
  {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / static_cast<double>(k) * inv8z;
    const double m = Mag(a);
    if (m > last || m < 1e-18)
    {
      break;
    }
    last = m;
    // P collects even k with signs +,-,+..; Q odd k
    switch (k % 4)
    {
    case 1:
      q += a;
      break;
    case 2:
      p -= a;
      break;
    case 3:
      q -= a;
      break;
    case 0:
      p += a;
      break;
    }
  }
  const double pi = std::numbers::pi;
  const T chi = z - (order * 0.5 + 0.25) * pi;
  const T amp = std::sqrt(2.0 / (pi * z));
  return {amp * (p * std::cos(chi) - q * std::sin(chi)),
          amp * (p * std::sin(chi) + q * std::cos(chi))};
}

template <typename T>
Pair<T> Bessel0(T z)
{
  return Mag(z) <= kSeriesLimit ? Series0(z) : Asymptotic(z, 0);
}

template <typename T>
Pair<T> Bessel1(T z)
{
  return Mag(z) <= kSeriesLimit ? Series1(z) : Asymptotic(z, 1);
}

void CheckPositive(double x)
{
  if (!(x > 0.0) || !std::isfinite(x))
  {
    throw InputError("Bessel functions require a positive finite argument");
  }
}

void CheckHalfPlane(Complex z)
{
  if (!(z.real() > 0.0) || !std::isfinite(std::abs(z)))
  {
    throw InputError("complex Hankel functions require Re z > 0");
  }
}

}  // namespace

double BesselJ0(double x)
{
  if (x == 0.0)
  {
    return 1.0;
  }
  x = std::abs(x);
  return Bessel0(x).j;
}

double BesselY0(double x)
{
  CheckPositive(x);
  return Bessel0(x).y;
}

double BesselJ1(double x)
{
  if (x == 0.0)
  {
    return 0.0;
  }
  return x < 0.0 ? -Bessel1(-x).j : Bessel1(x).j;
}

double BesselY1(double x)
{
  CheckPositive(x);
  return Bessel1(x).y;
}

Complex Hankel0(double x)
{
  CheckPositive(x);
  const auto b = Bessel0(x);
  return {b.j, b.y};
}

Complex Hankel1(double x)
{
  CheckPositive(x);
  const auto b = Bessel1(x);
  return {b.j, b.y};
}

Complex Hankel0(Complex z)
{
  CheckHalfPlane(z);
  const auto b = Bessel0(z);
  return b.j + I_UNIT * b.y;
}

Complex Hankel1(Complex z)
{
  CheckHalfPlane(z);
  const auto b = Bessel1(z);
  return b.j + I_UNIT * b.y;
}

}  // namespace crbm

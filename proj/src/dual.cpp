// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "crbm/rbm.hpp"

namespace crbm
{

DualBasis DualBuild(const TruthModel &truth, const ReducedBasis &primal, const RbmOptions &opts)
{
  const auto &p = truth.Problem();
  if (!p.output)
  {
    throw InputError("dual basis needs an output functional");
  }
  DualBasis d;
  const int n = truth.Size();
  d.phi.resize(n, 0);
  ComplexMatrix x_phi(n, 0);
  for (const auto &mu : primal.snapshot_params)
  {
    ComplexVector w = truth.SolveDual(mu);
    ComplexVector xw = truth.X() * w;
    const double n0 = std::sqrt(std::max(0.0, w.dot(xw).real()));
    if (!(n0 > 0.0))
    {
      continue;
    }
    for (int pass = 0; pass < 2 && d.phi.cols() > 0; ++pass)
    {
      const ComplexVector h = d.phi.adjoint() * xw;
      w -= d.phi * h;
      xw -= x_phi * h;
    }
    const double n1 = std::sqrt(std::max(0.0, w.dot(xw).real()));
    if (n1 < opts.reject_tol * n0)
    {
      continue;
    }
    d.phi.conservativeResize(Eigen::NoChange, d.phi.cols() + 1);
    d.phi.col(d.phi.cols() - 1) = w / n1;
    x_phi.conservativeResize(Eigen::NoChange, x_phi.cols() + 1);
    x_phi.col(x_phi.cols() - 1) = xw / n1;
    d.snapshot_params.push_back(mu);
  }
  for (int m = 0; m < p.a.NumTerms(); ++m)
  {
    const ComplexMatrix a_du = p.a.blocks[m] * d.phi;
    d.reduced_blocks.push_back(d.phi.adjoint() * a_du);
    const ComplexMatrix a_pr = p.a.blocks[m] * primal.phi;
    d.cross_blocks.push_back(d.phi.adjoint() * a_pr);
  }
  for (int m = 0; m < p.output->NumTerms(); ++m)
  {
    d.reduced_output.push_back(d.phi.adjoint() * p.output->blocks[m]);
  }
  if (p.affine_rhs)
  {
    for (int m = 0; m < p.f.NumTerms(); ++m)
    {
      d.cross_rhs.push_back(d.phi.adjoint() * p.f.blocks[m]);
    }
  }
  return d;
}

CorrectedOutput ComputeCorrectedOutput(const ReducedBasis &rb, const DualBasis *dual,
                                       const ParameterPoint &mu, const ComplexVector &xi,
                                       const DiscreteProblem *problem)
{
  if (rb.ml == 0)
  {
    throw InputError("corrected output: no output functional in the basis");
  }
  CorrectedOutput out;
  const auto tl = rb.theta_l(mu);
  out.s_n = 0.0;
  for (int m = 0; m < rb.ml; ++m)
  {
    out.s_n += tl[m] * rb.reduced_output[m].dot(xi);
  }
  out.s_pd = out.s_n;
  if (!dual || dual->Dimension() == 0)
  {
    return out;
  }
  const int nd = dual->Dimension();
  const auto ta = rb.theta_a(mu);
  // (sum conj(theta_m) B_m^H) xi_du = -sum conj(theta_l) phi_du^H L_m
  ComplexMatrix a = ComplexMatrix::Zero(nd, nd);
  for (int m = 0; m < rb.ma; ++m)
  {
    a += std::conj(ta[m]) * dual->reduced_blocks[m].adjoint();
  }
  ComplexVector b = ComplexVector::Zero(nd);
  for (int m = 0; m < rb.ml; ++m)
  {
    b -= std::conj(tl[m]) * dual->reduced_output[m];
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  if (!(lu.rcond() > 1e-15))
  {
    throw NumericalError("singular reduced dual system at " + ToString(mu));
  }
  out.xi_du = lu.solve(b);
  // phi_du^H (F - A phi xi)
  ComplexVector r;
  if (rb.affine_rhs)
  {
    const auto tf = rb.theta_f(mu);
    r = ComplexVector::Zero(nd);
    for (int m = 0; m < rb.mf; ++m)
    {
      r += tf[m] * dual->cross_rhs[m];
    }
  }
  else
  {
    if (!problem)
    {
      throw InputError("corrected output: non-affine data need the full-order problem");
    }
    r = dual->phi.adjoint() * problem->Rhs(mu);
  }
  for (int m = 0; m < rb.ma; ++m)
  {
    r -= ta[m] * (dual->cross_blocks[m] * xi);
  }
  out.s_pd = out.s_n - out.xi_du.dot(r);
  return out;
}

}  // namespace crbm

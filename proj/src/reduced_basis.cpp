// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/LU>

#include "crbm/kernels.hpp"
#include "crbm/pml.hpp"
#include "crbm/rbm.hpp"

namespace crbm
{

TruthModel::TruthModel(DiscreteProblem problem)
    : problem_(std::move(problem)), x_solver_(std::make_shared<HermitianSolver>(problem_.x))
{
}

SparseMatrix TruthModel::Operator(const ParameterPoint &mu) const
{
  return EvalOperator(problem_.a, mu);
}

ComplexVector TruthModel::Solve(const ParameterPoint &mu) const
{
  mu.Validate();
  SparseLuSolver lu(Operator(mu));
  return lu.Solve(Rhs(mu));
}

ComplexVector TruthModel::SolveDual(const ParameterPoint &mu) const
{
  mu.Validate();
  SparseLuSolver lu(Operator(mu).Adjoint());
  return lu.Solve(-OutputVector(mu));
}

ComplexVector TruthModel::Residual(const ParameterPoint &mu, const ComplexVector &u) const
{
  return Rhs(mu) - Operator(mu) * u;
}

double TruthModel::ResidualNorm(const ParameterPoint &mu, const ComplexVector &u) const
{
  const ComplexVector r = Residual(mu, u);
  return RieszNorm(x_solver_->Solve(r), r);
}

ComplexVector TruthModel::OutputVector(const ParameterPoint &mu) const
{
  if (!problem_.output)
  {
    throw InputError("no output functional configured");
  }
  const auto theta = problem_.output->Coefficients(mu);
  ComplexVector l = ComplexVector::Zero(Size());
  for (std::size_t m = 0; m < theta.size(); ++m)
  {
    l += std::conj(theta[m]) * problem_.output->blocks[m];
  }
  return l;
}

Complex TruthModel::Output(const ParameterPoint &mu, const ComplexVector &u) const
{
  return OutputVector(mu).dot(u);
}

ComplexVector TruthSolve(const DiscreteProblem &problem, const ParameterPoint &mu)
{
  mu.Validate();
  SparseLuSolver lu(EvalOperator(problem.a, mu));
  return lu.Solve(problem.Rhs(mu));
}

CoefficientFn MakeCoefficients(const std::string &family)
{
  if (family == "bounded")
  {
    return BoundedCoefficients;
  }
  if (family == "pml")
  {
    return PmlCoefficients;
  }
  if (family == "unit")
  {
    return [](const ParameterPoint &) { return std::vector<Complex>{1.0}; };
  }
  if (family.rfind("lifted:", 0) == 0)
  {
    std::vector<std::string> parts;
    std::stringstream ss(family);
    std::string item;
    while (std::getline(ss, item, ':'))
    {
      parts.push_back(item);
    }
    if (parts.size() < 3 || parts.size() > 4 || (parts[2] != "u" && parts[2] != "n"))
    {
      throw InputError("malformed coefficient family '" + family + "'");
    }
    auto theta_a = MakeCoefficients(parts[1]);
    const bool unit_first = parts[2] == "u";
    std::vector<int> terms;
    if (parts.size() == 4)
    {
      std::stringstream ts(parts[3]);
      while (std::getline(ts, item, ','))
      {
        terms.push_back(std::stoi(item));
      }
    }
    return [theta_a, unit_first, terms](const ParameterPoint &mu)
    {
      std::vector<Complex> c;
      if (unit_first)
      {
        c.push_back(1.0);
      }
      if (!terms.empty())
      {
        const auto ta = theta_a(mu);
        for (int m : terms)
        {
          c.push_back(ta.at(m));
        }
      }
      return c;
    };
  }
  throw InputError("unknown coefficient family '" + family + "'");
}

namespace
{

Complex Dotc(const ComplexVector &x, const ComplexVector &y)
{
  return kernels::Dotc({x.data(), static_cast<std::size_t>(x.size())},
                       {y.data(), static_cast<std::size_t>(y.size())});
}

// x^H y for each column of x
ComplexVector AdjointTimes(const ComplexMatrix &x, const ComplexVector &y)
{
  ComplexVector out(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c)
  {
    out[c] = kernels::Dotc({x.col(c).data(), static_cast<std::size_t>(x.rows())},
                           {y.data(), static_cast<std::size_t>(y.size())});
  }
  return out;
}

void AppendColumn(ComplexMatrix &m, const ComplexVector &v)
{
  if (m.cols() == 0)
  {
    m.resize(v.size(), 0);
  }
  m.conservativeResize(Eigen::NoChange, m.cols() + 1);
  m.col(m.cols() - 1) = v;
}

// Removes from v its X-projection onto the X-orthonormal columns of q and
// returns the accumulated coefficients. xv = X v is recomputed after every
// pass; passes repeat while one cancels more than half of the norm.
ComplexVector XOrthogonalize(const SparseMatrix &x, const ComplexMatrix &q, ComplexVector &v,
                             ComplexVector &xv, double &norm)
{
  ComplexVector h = ComplexVector::Zero(q.cols());
  xv = x * v;
  norm = std::sqrt(std::max(0.0, Dotc(v, xv).real()));
  if (q.cols() == 0)
  {
    return h;
  }
  for (int pass = 0; pass < 6; ++pass)
  {
    const ComplexVector hp = AdjointTimes(q, xv);
    v -= q * hp;
    xv = x * v;
    h += hp;
    const double before = norm;
    norm = std::sqrt(std::max(0.0, Dotc(v, xv).real()));
    if (pass >= 1 && norm > 0.5 * before)
    {
      break;
    }
  }
  return h;
}

}  // namespace

BasisBuilder::BasisBuilder(const TruthModel &truth, RbmOptions opts)
    : truth_(truth), opts_(opts)
{
  const auto &p = truth.Problem();
  const int n = truth.Size();
  rb_.phi.resize(n, 0);
  x_phi_.resize(n, 0);
  rb_.ma = p.a.NumTerms();
  rb_.affine_rhs = p.affine_rhs;
  rb_.mf = p.affine_rhs ? p.f.NumTerms() : 0;
  rb_.ml = p.output ? p.output->NumTerms() : 0;
  rb_.family_a = p.a.family;
  rb_.theta_a = p.a.theta;
  if (p.affine_rhs)
  {
    rb_.family_f = p.f.family;
    rb_.theta_f = p.f.theta;
    rb_.reduced_rhs.assign(rb_.mf, ComplexVector(0));
  }
  if (p.output)
  {
    rb_.family_l = p.output->family;
    rb_.theta_l = p.output->theta;
    rb_.reduced_output.assign(rb_.ml, ComplexVector(0));
  }
  rb_.reduced_blocks.assign(rb_.ma, ComplexMatrix(0, 0));
  a_phi_.assign(rb_.ma, ComplexMatrix(n, 0));
  reps_.resize(n, 0);
  funcs_.resize(n, 0);
  q_.resize(n, 0);
  rb_.gram.resize(0, 0);
  rb_.residual_factor.resize(0, 0);
  if (p.affine_rhs)
  {
    ComplexMatrix f(n, rb_.mf);
    for (int m = 0; m < rb_.mf; ++m)
    {
      f.col(m) = p.f.blocks[m];
    }
    AppendRepresenters(f);
  }
}

void BasisBuilder::AppendRepresenters(const ComplexMatrix &functionals)
{
  const int k_old = static_cast<int>(reps_.cols());
  const int k_new = static_cast<int>(functionals.cols());
  ComplexMatrix v(functionals.rows(), k_new);
  {
    auto scope = costs_.Start("riesz");
    for (int c = 0; c < k_new; ++c)
    {
      v.col(c) = truth_.XSolver().Solve(functionals.col(c));
    }
  }
  auto scope = costs_.Start("gram_update");
  // G(p, q) = v_p^H r_q
  ComplexMatrix g(k_old + k_new, k_old + k_new);
  g.topLeftCorner(k_old, k_old) = rb_.gram;
  for (int c = 0; c < k_new; ++c)
  {
    const ComplexVector r = functionals.col(c);
    for (int p = 0; p < k_old; ++p)
    {
      const Complex val = Dotc(reps_.col(p), r);
      g(p, k_old + c) = val;
      g(k_old + c, p) = std::conj(val);
    }
  }
  for (int a = 0; a < k_new; ++a)
  {
    for (int b = 0; b < k_new; ++b)
    {
      g(k_old + a, k_old + b) = Dotc(v.col(a), functionals.col(b));
    }
  }
  auto block = g.bottomRightCorner(k_new, k_new);
  const ComplexMatrix sym = 0.5 * (block + block.adjoint());
  block = sym;
  for (int c = 0; c < k_new; ++c)
  {
    g(k_old + c, k_old + c) = g(k_old + c, k_old + c).real();
  }
  rb_.gram = std::move(g);

  // Incremental X-orthonormal factor V = Q R.
  for (int c = 0; c < k_new; ++c)
  {
    ComplexVector vv = v.col(c);
    ComplexVector rr;
    const double n0 = std::sqrt(std::max(0.0, Dotc(vv, functionals.col(c)).real()));
    double nrm = 0.0;
    const ComplexVector h = XOrthogonalize(truth_.X(), q_, vv, rr, nrm);
    const int rank = static_cast<int>(q_.cols());
    const int cols = static_cast<int>(rb_.residual_factor.cols());
    const bool grow = nrm > 0.0 && nrm > 1e-15 * n0;
    ComplexMatrix r = ComplexMatrix::Zero(rank + (grow ? 1 : 0), cols + 1);
    r.topLeftCorner(rank, cols) = rb_.residual_factor;
    r.block(0, cols, rank, 1) = h;
    if (grow)
    {
      r(rank, cols) = nrm;
      AppendColumn(q_, vv / nrm);
    }
    rb_.residual_factor = std::move(r);
  }
  for (int c = 0; c < k_new; ++c)
  {
    AppendColumn(reps_, v.col(c));
    AppendColumn(funcs_, functionals.col(c));
  }
}

bool BasisBuilder::Extend(const ComplexVector &snapshot, const ParameterPoint &mu)
{
  const auto &p = truth_.Problem();
  if (snapshot.size() != truth_.Size())
  {
    throw InputError("snapshot has wrong dimension");
  }
  ComplexVector s = snapshot;
  ComplexVector xs = truth_.X() * s;
  {
    auto scope = costs_.Start("orthonormalize");
    const double n0 = std::sqrt(std::max(0.0, Dotc(s, xs).real()));
    if (!(n0 > 0.0))
    {
      return false;
    }
    double n1 = 0.0;
    XOrthogonalize(truth_.X(), rb_.phi, s, xs, n1);
    if (n1 < opts_.reject_tol * n0)
    {
      return false;
    }
    s /= n1;
    xs /= n1;
    AppendColumn(rb_.phi, s);
    AppendColumn(x_phi_, xs);
    rb_.snapshot_params.push_back(mu);
  }
  const int n = rb_.Dimension();
  ComplexMatrix functionals(truth_.Size(), rb_.ma);
  {
    auto scope = costs_.Start("reduced_update");
    for (int m = 0; m < rb_.ma; ++m)
    {
      const ComplexVector as = p.a.blocks[m] * s;
      AppendColumn(a_phi_[m], as);
      functionals.col(m) = as;
      ComplexMatrix b = ComplexMatrix::Zero(n, n);
      b.topLeftCorner(n - 1, n - 1) = rb_.reduced_blocks[m];
      b.col(n - 1) = AdjointTimes(rb_.phi, as);
      // row: s^H A_m phi
      b.row(n - 1) = AdjointTimes(a_phi_[m], s).adjoint();
      b(n - 1, n - 1) = Dotc(s, as);
      rb_.reduced_blocks[m] = std::move(b);
    }
    for (int m = 0; m < rb_.mf; ++m)
    {
      auto &v = rb_.reduced_rhs[m];
      v.conservativeResize(n);
      v[n - 1] = Dotc(s, p.f.blocks[m]);
    }
    for (int m = 0; m < rb_.ml; ++m)
    {
      auto &v = rb_.reduced_output[m];
      v.conservativeResize(n);
      v[n - 1] = Dotc(s, p.output->blocks[m]);
    }
  }
  AppendRepresenters(functionals);
  return true;
}

ComplexVector ReducedRhs(const ReducedBasis &rb, const ParameterPoint &mu,
                         const DiscreteProblem *problem)
{
  if (!rb.affine_rhs)
  {
    if (!problem)
    {
      throw InputError("non-affine right-hand side needs the full-order problem online");
    }
    return rb.phi.adjoint() * problem->Rhs(mu);
  }
  const auto theta = rb.theta_f(mu);
  if (static_cast<int>(theta.size()) != rb.mf)
  {
    throw InputError("rhs coefficient count mismatch");
  }
  ComplexVector b = ComplexVector::Zero(rb.Dimension());
  for (int m = 0; m < rb.mf; ++m)
  {
    b += theta[m] * rb.reduced_rhs[m];
  }
  return b;
}

ComplexVector OnlineSolve(const ReducedBasis &rb, const ParameterPoint &mu,
                          const ComplexVector &reduced_rhs)
{
  mu.Validate();
  const int n = rb.Dimension();
  if (n == 0)
  {
    throw InputError("online solve on an empty basis");
  }
  const auto theta = rb.theta_a(mu);
  if (static_cast<int>(theta.size()) != rb.ma)
  {
    throw InputError("operator coefficient count mismatch");
  }
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (int m = 0; m < rb.ma; ++m)
  {
    a += theta[m] * rb.reduced_blocks[m];
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1e-15))
  {
    throw NumericalError("singular reduced system at " + ToString(mu) + " with N = " +
                         std::to_string(n));
  }
  return lu.solve(reduced_rhs);
}

ComplexVector OnlineSolve(const ReducedBasis &rb, const ParameterPoint &mu,
                          const DiscreteProblem *problem)
{
  return OnlineSolve(rb, mu, ReducedRhs(rb, mu, problem));
}

ComplexVector ResidualCoefficients(const ReducedBasis &rb, const ParameterPoint &mu,
                                   const ComplexVector &xi)
{
  if (!rb.affine_rhs)
  {
    throw InputError("online residual norm requires an affine right-hand side");
  }
  const int n = rb.Dimension();
  if (xi.size() != n)
  {
    throw InputError("reduced coefficient vector has wrong size");
  }
  const auto tf = rb.theta_f(mu);
  const auto ta = rb.theta_a(mu);
  ComplexVector c(rb.NumRepresenters());
  for (int m = 0; m < rb.mf; ++m)
  {
    c[m] = tf[m];
  }
  for (int j = 0; j < n; ++j)
  {
    for (int m = 0; m < rb.ma; ++m)
    {
      c[rb.mf + j * rb.ma + m] = -ta[m] * xi[j];
    }
  }
  return c;
}

ResidualEvaluation ResidualNormOnline(const ReducedBasis &rb, const ParameterPoint &mu,
                                      const ComplexVector &xi, ResidualForm form)
{
  const ComplexVector c = ResidualCoefficients(rb, mu, xi);
  ResidualEvaluation ev;
  double s = 0.0;
  for (Eigen::Index p = 0; p < c.size(); ++p)
  {
    s += std::abs(c[p]) * std::sqrt(std::max(0.0, rb.gram(p, p).real()));
  }
  ev.scale = s * s;
  if (form == ResidualForm::Factored)
  {
    const ComplexVector rc = rb.residual_factor * c;
    ev.norm = rc.norm();
    ev.raw = ev.norm * ev.norm;
    return ev;
  }
  const Complex v = kernels::HermitianForm(
      {c.data(), static_cast<std::size_t>(c.size())},
      {rb.gram.data(), static_cast<std::size_t>(rb.gram.size())});
  ev.raw = v.real();
  if (ev.raw >= 0.0)
  {
    ev.norm = std::sqrt(ev.raw);
  }
  else if (ev.raw > -1e-12 * ev.scale)
  {
    ev.norm = 0.0;
  }
  else
  {
    ev.norm = 0.0;
    ev.breach = true;
  }
  return ev;
}

double ResidualNormDirect(const TruthModel &truth, const ComplexMatrix &phi,
                          const ParameterPoint &mu, const ComplexVector &xi)
{
  return truth.ResidualNorm(mu, phi * xi);
}

double ErrorEstimator(const ReducedBasis &rb, const ParameterPoint &mu, const ComplexVector &xi,
                      double beta, const TruthModel *truth)
{
  if (!(beta > 0.0))
  {
    throw InputError("stability constant must be positive");
  }
  if (rb.affine_rhs)
  {
    return ResidualNormOnline(rb, mu, xi).norm / beta;
  }
  if (!truth)
  {
    throw InputError("non-affine estimator needs the full-order model");
  }
  return ResidualNormDirect(*truth, rb.phi, mu, xi) / beta;
}

Effectivity ComputeEffectivity(const ReducedBasis &rb, const TruthModel &truth,
                               const ParameterPoint &mu, double beta)
{
  const auto &p = truth.Problem();
  const ComplexVector xi = OnlineSolve(rb, mu, &p);
  const ComplexVector u = truth.Solve(mu);
  Effectivity e;
  e.delta = ErrorEstimator(rb, mu, xi, beta, &truth);
  e.error = XNorm(truth.X(), u - rb.phi * xi);
  e.truth_norm = XNorm(truth.X(), u);
  if (e.error > 1e-12 * std::max(e.truth_norm, 1e-300))
  {
    e.eta = e.delta / e.error;
  }
  return e;
}

void ParallelFor(int n, int threads, const std::function<void(int)> &fn)
{
  if (threads <= 0)
  {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, n);
  if (threads <= 1)
  {
    for (int i = 0; i < n; ++i)
    {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t)
  {
    pool.emplace_back(
        [&, t]
        {
          try
          {
            for (int i = t; i < n; i += threads)
            {
              fn(i);
            }
          }
          catch (...)
          {
            errors[t] = std::current_exception();
          }
        });
  }
  for (auto &th : pool)
  {
    th.join();
  }
  for (auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace crbm

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   crbm_acceptance [--strict] [criterion ...]
//
// Exit status is 1 when a criterion outside the known-failure list fails,
// or when any criterion fails under --strict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crbm/analytic.hpp"
#include "crbm/config.hpp"
#include "crbm/costs.hpp"
#include "crbm/pml.hpp"
#include "crbm/rbm.hpp"

using namespace crbm;

namespace
{

const std::string kData = CRBM_DATA_DIR;

// Criteria that fail on this implementation; see README.
const std::set<int> kKnownFailures = {6};

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char *fmt, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double Now()
{
  return MonotonicSeconds();
}

long double LongSeries(long double x, bool y)
{
  // J0 and Y0 ascending series in long double
  const long double q = -x * x / 4.0L;
  long double term = 1.0L, j = 1.0L, h = 0.0L, sy = 0.0L;
  for (int m = 1; m < 200; ++m)
  {
    term *= q / (static_cast<long double>(m) * m);
    h += 1.0L / m;
    j += term;
    sy += term * h;
  }
  if (!y)
  {
    return j;
  }
  const long double euler = 0.577215664901532860606512090082402431L;
  const long double pi = 3.141592653589793238462643383279502884L;
  return 2.0L / pi * ((std::log(x / 2.0L) + euler) * j - sy);
}

Outcome Criterion1()
{
  const auto a = ComputeMarginalNumber(23281, 25.538, 0.1099);
  const auto b = ComputeMarginalNumber(4899, 188.2764, 0.15763);
  return {a.n == 916u && b.n == 27u, "n* = " + a.ToString() + ", " + b.ToString()};
}

// Shared by criteria 2, 3, 4 and 11.
struct BoxRun
{
  std::unique_ptr<TruthModel> truth;
  std::vector<ParameterPoint> train;
  GreedyResult greedy;
  double seconds = 0.0;
};

BoxRun &Box()
{
  static BoxRun run = []
  {
    BoxRun r;
    const double t0 = Now();
    const Mesh m =
        GenerateRectMesh({-1, 1}, {-1, 1}, 72, 72, RectHole{-0.25, 0.25, -0.25, 0.25});
    DirichletData d;
    d.tags = {1, 2, 3, 4, 5};
    d.mode = DirichletMode::ParameterIndependent;
    d.value = [](double x, double y, const ParameterPoint &)
    { return FundamentalSolution(x, y, ParameterPoint{3.5, 0.3}); };
    auto problem = ApplyDirichlet(m, AssembleAffineBounded(m), AssembleH1(m),
                                  ComplexVector::Zero(m.NumVertices()), d,
                                  AssembleMeanFunctional(m, {-1, 1, -1, 1}));
    r.truth = std::make_unique<TruthModel>(std::move(problem));
    for (int i = 0; i < 40; ++i)
    {
      r.train.push_back({2.0 + i * 3.0 / 39.0, 0.3});
    }
    GreedyOptions o;
    o.tol = 1e-12;
    o.n_max = 40;
    r.greedy = GreedyBuild(*r.truth, r.train, o);
    r.seconds = Now() - t0;
    return r;
  }();
  return run;
}

Outcome Criterion2()
{
  const BoxRun &r = Box();
  const auto &trace = r.greedy.trace;
  double top = 0.0, low = 1e300;
  int reach = -1;
  for (const auto &g : trace)
  {
    top = std::max(top, g.residuum);
    low = std::min(low, g.residuum);
    if (reach < 0 && g.residuum <= 1e-10)
    {
      reach = g.dimension;
    }
  }
  const double orders = std::log10(top / low);
  const bool pass = reach > 0 && reach <= 32 && orders >= 10.0 && r.seconds <= 600.0;
  return {pass, std::to_string(r.truth->Size()) + " dofs, residuum " +
                    Fmt("%.3g", trace.front().residuum) + " -> " + Fmt("%.3g", low) +
                    ", <= 1e-10 at N=" + std::to_string(reach) + ", " + Fmt("%.1f", orders) +
                    " orders, " + Fmt("%.1f s", r.seconds)};
}

Outcome Criterion3()
{
  const BoxRun &r = Box();
  GreedyOptions o;
  o.tol = 1e-30;
  o.n_max = 10;
  const GreedyResult g = GreedyBuild(*r.truth, r.train, o);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> k(2.0, 5.0);
  double worst = 0.0, worst_exp = 0.0;
  int breaches = 0;
  for (int i = 0; i < 20; ++i)
  {
    const ParameterPoint mu{k(rng), 0.3};
    const ComplexVector xi = OnlineSolve(g.basis, mu);
    const double direct = ResidualNormDirect(*r.truth, g.basis.phi, mu, xi);
    const auto fact = ResidualNormOnline(g.basis, mu, xi, ResidualForm::Factored);
    const auto expn = ResidualNormOnline(g.basis, mu, xi, ResidualForm::Expansion);
    worst = std::max(worst, std::abs(fact.norm - direct) / direct);
    worst_exp = std::max(worst_exp, std::abs(expn.norm - direct) / direct);
    breaches += expn.breach ? 1 : 0;
  }
  return {worst <= 1e-6, "N=" + std::to_string(g.basis.Dimension()) + ", max rel diff " +
                             Fmt("%.2e", worst) + " (expansion form " + Fmt("%.2e", worst_exp) +
                             ", " + std::to_string(breaches) + " breaches)"};
}

Outcome Criterion4()
{
  const BoxRun &r = Box();
  const TruthModel &t = *r.truth;
  const ReducedBasis &rb = r.greedy.basis;
  double worst_e = 0.0, worst_d = 0.0;
  for (const auto &mu : rb.snapshot_params)
  {
    const ComplexVector u = t.Solve(mu);
    const ComplexVector xi = OnlineSolve(rb, mu);
    const ComplexVector e = u - rb.phi * xi;
    const double norm_u = std::sqrt(std::abs(XInner(t.X(), u, u)));
    const double norm_e = std::sqrt(std::abs(XInner(t.X(), e, e)));
    const double scale = t.ResidualNorm(mu, ComplexVector::Zero(t.Size()));  // ||F||_X'
    worst_e = std::max(worst_e, norm_e / norm_u);
    worst_d = std::max(worst_d, ErrorEstimator(rb, mu, xi) / scale);
  }
  return {worst_e <= 1e-8 && worst_d <= 1e-8,
          std::to_string(rb.snapshot_params.size()) + " snapshots, max error/norm " +
              Fmt("%.2e", worst_e) + ", max delta/scale " + Fmt("%.2e", worst_d)};
}

Outcome Criterion5()
{
  const ParameterPoint mu{4.0, 0.3};
  const Point2 src{3.0, 0.0};
  std::vector<ErrorNorms> errs;
  for (int n : {32, 64, 128})
  {
    const Mesh m = GenerateRectMesh({-1, 1}, {-1, 1}, n, n);
    DirichletData d;
    d.tags = {1, 2, 3, 4};
    d.mode = DirichletMode::PerParameter;
    d.value = [src](double x, double y, const ParameterPoint &p)
    { return FundamentalSolution(x, y, p, src); };
    const auto p = ApplyDirichlet(m, AssembleAffineBounded(m), AssembleH1(m),
                                  ComplexVector::Zero(m.NumVertices()), d);
    const ComplexVector u = p.Reconstruct(TruthSolve(p, mu), mu);
    errs.push_back(ComputeErrorNorms(m, u, FundamentalField(mu, src)));
  }
  bool pass = true;
  std::string detail = "rates L2/H1:";
  for (std::size_t i = 1; i < errs.size(); ++i)
  {
    const double r2 = std::log2(errs[i - 1].l2 / errs[i].l2);
    const double r1 = std::log2(errs[i - 1].h1 / errs[i].h1);
    pass = pass && std::abs(r2 - 2.0) <= 0.3 && std::abs(r1 - 1.0) <= 0.3 &&
           errs[i].l2 < errs[i - 1].l2 && errs[i].h1 < errs[i - 1].h1;
    detail += " " + Fmt("%.3f", r2) + "/" + Fmt("%.3f", r1);
  }
  return {pass, detail};
}

Outcome Criterion6()
{
  const RunConfig cfg = ParseConfig(R"({"mesh": {"file": ")" + kData +
                                    R"(/meshes/box_circle.msh"},
    "parameters": {"k": [8, 12, 10], "mach": [0.2, 0.4, 10]},
    "greedy": {"tol": 1e-12, "n_max": 10},
    "boundary": {"type": "fundamental", "source": [0, 0]},
    "exact": {"type": "fundamental", "source": [0, 0]}})");
  const ProblemSetup s = BuildProblem(cfg);
  const TruthModel truth(s.problem);
  const GreedyResult g = GreedyBuild(truth, BuildTrainingSet(cfg), cfg.greedy);
  const ParameterPoint mu{10.0, 0.3};
  const ComplexVector xi = OnlineSolve(g.basis, mu, &s.problem);
  const ComplexVector u = s.problem.Reconstruct(g.basis.phi * xi, mu);
  const ErrorNorms e = ComputeErrorNorms(s.mesh, u, s.exact(mu), s.measure_region);
  const ComplexVector ut = s.problem.Reconstruct(truth.Solve(mu), mu);
  const ErrorNorms et = ComputeErrorNorms(s.mesh, ut, s.exact(mu), s.measure_region);

  auto within = [](double v, double target) { return v <= 5.0 * target && v >= target / 5.0; };
  const bool a = within(e.linf, 0.0278), b = within(e.l2, 0.0223), c = within(e.h1, 0.0320);
  auto tag = [](bool ok) { return ok ? std::string(" ok") : std::string(" out"); };
  return {a && b && c, "N=" + std::to_string(g.basis.Dimension()) + ", Linf " +
                           Fmt("%.4f", e.linf) + tag(a) + ", L2 " + Fmt("%.4f", e.l2) + tag(b) +
                           ", H1 " + Fmt("%.4f", e.h1) + tag(c) + " (truth H1 " +
                           Fmt("%.4f", et.h1) + ")"};
}

Outcome Criterion7()
{
  const RunConfig cfg = ParseConfig(R"({"problem": "pml",
    "mesh": {"x": [-2, 2], "y": [-1, 1], "nx": 320, "ny": 160},
    "parameters": {"k": 10, "mach": 0.3},
    "pml": {"x_minus": -1, "x_plus": 1, "width": 1, "sigma0": 15},
    "source": {"type": "gaussian", "center": [0.04, 0.03], "width": 0.02, "amplitude": 1},
    "boundary": {"type": "fundamental", "source": [0.04, 0.03]},
    "exact": {"type": "fundamental", "source": [0.04, 0.03]}})");
  const ProblemSetup s = BuildProblem(cfg);
  const ParameterPoint mu{10.0, 0.3};
  const ComplexVector u = s.problem.Reconstruct(TruthSolve(s.problem, mu), mu);
  const ErrorNorms e = ComputeErrorNorms(s.mesh, u, s.exact(mu), s.measure_region);
  const ErrorNorms ref = ComputeFieldNorms(
      s.mesh, Interpolate(s.mesh, s.exact(mu).value), s.measure_region);
  const double rel = e.l2 / ref.l2;

  PmlConfig zero = s.pml;
  zero.sigma0 = 0.0;
  double worst = 0.0;
  const AffineOperator damped = AssembleAffinePml(s.mesh, zero);
  const AffineOperator bounded = AssembleAffineBounded(s.mesh);
  for (const ParameterPoint p : {mu, ParameterPoint{3.0, 0.0}, ParameterPoint{7.5, 0.45}})
  {
    const SparseMatrix a = EvalOperator(damped, p);
    const SparseMatrix b = EvalOperator(bounded, p);
    const std::vector<const SparseMatrix *> ab{&a, &b};
    const std::vector<Complex> sign{1.0, -1.0};
    worst = std::max(worst, SparseMatrix::LinearCombination(sign, ab).MaxAbs() / b.MaxAbs());
  }
  return {rel <= 0.10 && worst <= 1e-13, "relative L2(interior) " + Fmt("%.4f", rel) +
                                             ", sigma0=0 max entry diff " + Fmt("%.1e", worst)};
}

Outcome Criterion8()
{
  const Mesh m = GenerateRectMesh({-0.5, 0.5}, {-0.5, 0.5}, 9, 9);  // 64 free dofs
  DirichletData d;
  d.tags = {1, 2, 3, 4};
  const ComplexVector load = GaussianLoad(m, {0.1, 0.05}, 0.1, 1.0);
  const DiscreteProblem p =
      ApplyDirichlet(m, AssembleAffineBounded(m), AssembleH1(m), load, d,
                     AssembleMeanFunctional(m, {-0.25, 0.25, -0.25, 0.25}));
  const TruthModel t(p);
  std::vector<ParameterPoint> train;
  for (int i = 0; i < 12; ++i)
  {
    train.push_back({1.5 + 2.0 * i / 11.0, 0.3});
  }
  GreedyOptions o;
  o.tol = 1e-30;
  o.n_max = 3;
  const GreedyResult g = GreedyBuild(t, train, o);
  const DualBasis dual = DualBuild(t, g.basis);

  double worst = 0.0;
  for (double k : {1.7, 2.45, 3.3})
  {
    const ParameterPoint mu{k, 0.3};
    const ComplexVector xi = OnlineSolve(g.basis, mu, &p);
    const CorrectedOutput c = ComputeCorrectedOutput(g.basis, &dual, mu, xi);

    const ComplexMatrix a = t.Operator(mu).ToDense();
    const ComplexVector f = t.Rhs(mu);
    const ComplexVector l = t.OutputVector(mu);
    const ComplexVector u = a.fullPivLu().solve(f);
    const ComplexVector e = u - g.basis.phi * xi;
    const ComplexVector w = dual.phi * c.xi_du;
    const Complex s = l.dot(u);
    const Complex rdu = -l.dot(e) - w.dot(a * e);
    worst = std::max(worst, std::abs((s - c.s_pd) + rdu) / std::abs(s));
  }
  return {p.Size() <= 100 && worst <= 1e-10,
          std::to_string(p.Size()) + " dofs, max relative defect " + Fmt("%.2e", worst)};
}

Outcome Criterion9()
{
  const double j = std::abs(BesselJ0(1.0) - static_cast<double>(LongSeries(1.0L, false)));
  const double y = std::abs(BesselY0(1.0) - static_cast<double>(LongSeries(1.0L, true)));
  double wr = 0.0;
  for (double x : {0.5, 1.0, 5.0, 20.0})
  {
    // J1 Y0 - J0 Y1 = 2/(pi x)
    const double w = BesselJ1(x) * BesselY0(x) - BesselJ0(x) * BesselY1(x);
    wr = std::max(wr, std::abs(w - 2.0 / (M_PI * x)));
  }
  return {j <= 1e-9 && y <= 1e-9 && wr <= 1e-8, "J0(1) diff " + Fmt("%.1e", j) +
                                                    ", Y0(1) diff " + Fmt("%.1e", y) +
                                                    ", Wronskian diff " + Fmt("%.1e", wr)};
}

Outcome Criterion10()
{
  const OpCount a = ResidualEvalCost(1, 1, 1), b = ResidualEvalCost(1, 4, 10),
                c = ResidualEvalCost(2, 6, 5), d = OfflineCostModel(2, 10, 1, 1, 100, 5, 20);
  return {a == 16 && b == 8323 && c == 4992 && d == 436,
          std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) + "; " +
              std::to_string(d)};
}

Outcome Criterion11()
{
  const BoxRun &r = Box();
  const ReducedBasis &rb = r.greedy.basis;
  // 100-query uniform batch: reduced solve, estimator and output
  Complex sink = 0.0;
  const double t0 = Now();
  for (int i = 0; i < 100; ++i)
  {
    const ParameterPoint mu{2.0 + 3.0 * i / 99.0, 0.3};
    const ComplexVector xi = OnlineSolve(rb, mu);
    sink += ErrorEstimator(rb, mu, xi);
    sink += ComputeCorrectedOutput(rb, nullptr, mu, xi).s_n;
  }
  const double online = (Now() - t0) / 100.0;
  const double t1 = Now();
  for (double k : {2.3, 3.3, 4.3})
  {
    sink += r.truth->Solve({k, 0.3})[0];
  }
  const double galerkin = (Now() - t1) / 3.0;
  const double ratio = galerkin / online;
  return {std::isfinite(std::abs(sink)) && ratio >= 50.0,
          "online " + Fmt("%.2e s", online) + ", Galerkin " + Fmt("%.2e s", galerkin) +
              ", ratio " + Fmt("%.0f", ratio)};
}

}  // namespace

int main(int argc, char **argv)
{
  bool strict = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
  {
    const std::string a = argv[i];
    if (a == "--strict")
    {
      strict = true;
    }
    else
    {
      only.insert(std::stoi(a));
    }
  }
  const std::vector<std::function<Outcome()>> criteria = {
      Criterion1, Criterion2, Criterion3, Criterion4,  Criterion5, Criterion6,
      Criterion7, Criterion8, Criterion9, Criterion10, Criterion11};
  int unexpected = 0, failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i)
  {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id))
    {
      continue;
    }
    Outcome o;
    const double t0 = Now();
    try
    {
      o = criteria[i]();
    }
    catch (const std::exception &e)
    {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = Now() - t0;
    std::printf("criterion %2d: %s  %s  [%.1f s]%s\n", id, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), dt,
                !o.pass && kKnownFailures.count(id) ? "  (known)" : "");
    std::fflush(stdout);
    if (!o.pass)
    {
      ++failed;
      unexpected += kKnownFailures.count(id) ? 0 : 1;
    }
  }
  return (strict ? failed : unexpected) > 0 ? 1 : 0;
}

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <random>

#include <Eigen/LU>

#include "doctest.h"

#include "crbm/analytic.hpp"
#include "crbm/rbm.hpp"

using namespace crbm;

namespace
{

// Homogeneous walls on the unit box, Gaussian source, mean output over the centre.
// The first cavity resonance sits above k = 4.
DiscreteProblem SourceProblem(int n, std::optional<RectHole> hole = std::nullopt,
                              std::vector<int> tags = {1, 2, 3, 4})
{
  const Mesh m = GenerateRectMesh({-0.5, 0.5}, {-0.5, 0.5}, n, n, hole);
  const ComplexVector load = AssembleLoad(
      m, [](double x, double y)
      { return Complex(std::exp(-((x - 0.1) * (x - 0.1) + (y - 0.05) * (y - 0.05)) / 0.02)); });
  DirichletData d;
  d.tags = std::move(tags);
  return ApplyDirichlet(m, AssembleAffineBounded(m), AssembleH1(m), load, d,
                        AssembleMeanFunctional(m, {-0.25, 0.25, -0.25, 0.25}));
}

std::vector<ParameterPoint> KLine(int n, double k0, double k1, double mach)
{
  std::vector<ParameterPoint> t;
  for (int i = 0; i < n; ++i)
  {
    t.push_back({k0 + (k1 - k0) * i / std::max(n - 1, 1), mach});
  }
  return t;
}

AffineVector Unit(const ComplexVector &v)
{
  AffineVector f;
  f.blocks = {v};
  f.theta = [](const ParameterPoint &) { return std::vector<Complex>{1.0}; };
  f.family = "unit";
  return f;
}

// A := X with right-hand side f0 + k f1.
DiscreteProblem XProblem(int n)
{
  const DiscreteProblem base = SourceProblem(n);
  DiscreteProblem p;
  p.x = base.x;
  p.a.blocks = {base.x};
  p.a.theta = [](const ParameterPoint &) { return std::vector<Complex>{1.0}; };
  p.a.family = "unit";
  ComplexVector f1 = ComplexVector::LinSpaced(p.x.Rows(), -1.0, 1.0);
  p.f.blocks = {base.f.blocks.at(0), f1};
  p.f.theta = [](const ParameterPoint &mu) { return std::vector<Complex>{1.0, mu.k}; };
  p.f.family = "test";
  return p;
}

// Real symmetric A(mu) = X + k mass, output functional equal to the load.
DiscreteProblem SelfAdjointProblem(int n)
{
  const Mesh m = GenerateRectMesh({-1, 1}, {-1, 1}, n, n);
  DirichletData d;
  d.tags = {1, 2, 3, 4};
  const ComplexVector load = AssembleLoad(m, [](double x, double y) { return Complex(1.0 + x * y); });
  AffineOperator a;
  a.blocks = {AssembleH1(m), AssembleMass(m)};
  a.theta = [](const ParameterPoint &mu) { return std::vector<Complex>{1.0, mu.k}; };
  a.family = "test";
  DiscreteProblem p = ApplyDirichlet(m, a, AssembleH1(m), load, d, load);
  p.f = Unit(p.f.blocks.at(0));
  return p;
}

double MaxAbs(const ComplexMatrix &a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double OrthoDefect(const TruthModel &t, const ComplexMatrix &phi)
{
  const ComplexMatrix xd = t.X().ToDense();
  return MaxAbs(phi.adjoint() * xd * phi -
                ComplexMatrix::Identity(phi.cols(), phi.cols()));
}

// ||F||_X', the size of the data
double DataScale(const TruthModel &t, const ParameterPoint &mu)
{
  return ResidualNormDirect(t, ComplexMatrix(t.Size(), 0), mu, ComplexVector(0));
}

}  // namespace

TEST_CASE("truth solve examples")
{
  SUBCASE("one dof")
  {
    DiscreteProblem p;
    std::vector<Triplet> ta{{0, 0, Complex(2.0, 1.0)}};
    p.a.blocks = {SparseMatrix::FromTriplets(1, 1, ta)};
    p.a.theta = [](const ParameterPoint &) { return std::vector<Complex>{1.0}; };
    p.x = SparseMatrix::Identity(1);
    ComplexVector f(1);
    f << Complex(0.0, 5.0);
    p.f = Unit(f);
    const TruthModel t(p);
    const ComplexVector u = t.Solve({3.0, 0.1});
    CHECK(std::abs(u[0] - Complex(0.0, 5.0) / Complex(2.0, 1.0)) < 1e-15);
  }
  SUBCASE("manufactured discrete solution")
  {
    DiscreteProblem p = SourceProblem(10);
    const ParameterPoint mu{3.7, 0.25};
    std::mt19937_64 rng(61);
    std::normal_distribution<double> d;
    ComplexVector u(p.Size());
    for (auto &z : u)
    {
      z = {d(rng), d(rng)};
    }
    p.f = Unit(EvalOperator(p.a, mu) * u);
    const TruthModel t(p);
    CHECK((t.Solve(mu) - u).norm() <= 1e-10 * u.norm());
    CHECK(t.ResidualNorm(mu, u) <= 1e-12 * DataScale(t, mu));
  }
  SUBCASE("zero data")
  {
    DiscreteProblem p = SourceProblem(6);
    p.f = Unit(ComplexVector::Zero(p.Size()));
    const TruthModel t(p);
    CHECK(t.Solve({2.5, 0.2}).norm() == 0.0);
  }
}

TEST_CASE("basis extension")
{
  const TruthModel t(SourceProblem(12));
  BasisBuilder b(t);
  const ParameterPoint mu{3.0, 0.3};
  const ComplexVector u = t.Solve(mu);
  REQUIRE(b.Extend(u, mu));
  CHECK(b.Basis().Dimension() == 1);
  CHECK((b.Basis().phi.col(0) - u / XNorm(t.X(), u)).norm() <= 1e-14 * b.Basis().phi.col(0).norm());

  // the same snapshot again, and a multiple of it
  CHECK_FALSE(b.Extend(u, mu));
  CHECK_FALSE(b.Extend(Complex(0.0, -3.0) * u, mu));
  CHECK(b.Basis().Dimension() == 1);

  // an X-orthogonal direction is appended as is
  const ComplexVector v = t.Solve({2.2, 0.3});
  const Complex proj = XInner(t.X(), v, b.Basis().phi.col(0));  // phi^H X v
  const ComplexVector w = v - proj * b.Basis().phi.col(0);
  REQUIRE(b.Extend(w, {2.2, 0.3}));
  CHECK((b.Basis().phi.col(1) - w / XNorm(t.X(), w)).norm() <= 1e-8);

  for (double k : {1.6, 1.9, 2.6, 3.3, 3.5})
  {
    b.Extend(t.Solve({k, 0.3}), {k, 0.3});
    CHECK(OrthoDefect(t, b.Basis().phi) <= 1e-10);
  }
  CHECK(b.Basis().snapshot_params.size() == static_cast<std::size_t>(b.Basis().Dimension()));
  CHECK(b.Basis().NumRepresenters() == b.Basis().mf + b.Basis().ma * b.Basis().Dimension());
}

TEST_CASE("online solve reproduces snapshots and converges")
{
  const TruthModel t(SourceProblem(14));
  const auto train = KLine(12, 1.5, 3.5, 0.3);
  BasisBuilder b(t);
  const std::vector<ParameterPoint> held{{1.6, 0.3}, {2.05, 0.3}, {2.5, 0.3}, {2.95, 0.3}, {3.4, 0.3}};
  std::vector<double> first, last;
  for (std::size_t i = 0; i < train.size(); i += 2)
  {
    b.Extend(t.Solve(train[i]), train[i]);
    const auto &rb = b.Basis();
    std::vector<double> errs;
    for (const auto &mu : held)
    {
      const ComplexVector u = t.Solve(mu);
      errs.push_back(XNorm(t.X(), u - rb.phi * OnlineSolve(rb, mu, &t.Problem())) / XNorm(t.X(), u));
    }
    (first.empty() ? first : last) = errs;
  }
  const auto &rb = b.Basis();
  for (std::size_t j = 0; j < held.size(); ++j)
  {
    CHECK(last[j] < 1e-3 * first[j]);
  }
  // Galerkin reproduction at every snapshot parameter
  for (const auto &mu : rb.snapshot_params)
  {
    const ComplexVector u = t.Solve(mu);
    const ComplexVector xi = OnlineSolve(rb, mu, &t.Problem());
    CHECK(XNorm(t.X(), u - rb.phi * xi) <= 1e-8 * XNorm(t.X(), u));
    CHECK(ResidualNormOnline(rb, mu, xi).norm <= 1e-8 * DataScale(t, mu));
  }
}

TEST_CASE("single snapshot basis")
{
  const TruthModel t(SourceProblem(8));
  BasisBuilder b(t);
  const ParameterPoint mu{3.3, 0.2};
  REQUIRE(b.Extend(t.Solve(mu), mu));
  const ComplexVector xi = OnlineSolve(b.Basis(), mu, &t.Problem());
  CHECK(xi.size() == 1);
  CHECK(ResidualNormOnline(b.Basis(), mu, xi).norm <= 1e-8 * DataScale(t, mu));
}

TEST_CASE("online residual agrees with the direct residual")
{
  const TruthModel t(SourceProblem(16, RectHole{-0.125, 0.125, -0.125, 0.125}));
  GreedyOptions o;
  o.tol = 1e-14;
  o.n_max = 8;
  const auto g = GreedyBuild(t, KLine(20, 1.5, 3.5, 0.3), o);
  const auto &rb = g.basis;
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> k(1.5, 3.5), mach(0.0, 0.45);
  for (int i = 0; i < 20; ++i)
  {
    const ParameterPoint mu{k(rng), mach(rng)};
    const ComplexVector xi = OnlineSolve(rb, mu, &t.Problem());
    const double direct = ResidualNormDirect(t, rb.phi, mu, xi);
    const auto fac = ResidualNormOnline(rb, mu, xi, ResidualForm::Factored);
    CAPTURE(mu.k);
    CAPTURE(mu.mach);
    CHECK(std::abs(fac.norm - direct) <= 1e-6 * direct);
    const auto exp = ResidualNormOnline(rb, mu, xi, ResidualForm::Expansion);
    CHECK(exp.scale > 0.0);
    if (!exp.breach && exp.norm > 1e-6 * std::sqrt(exp.scale))
    {
      CHECK(std::abs(exp.norm - direct) <= 1e-6 * direct);
    }
  }
  // zero data and zero coefficients
  DiscreteProblem p = SourceProblem(6);
  p.f = Unit(ComplexVector::Zero(p.Size()));
  const TruthModel tz(p);
  BasisBuilder bz(tz);
  const auto rz = ResidualNormOnline(bz.Basis(), {3.0, 0.2}, ComplexVector(0));
  CHECK(rz.norm == 0.0);
}

TEST_CASE("direct residual is homogeneous")
{
  const DiscreteProblem p = SourceProblem(9);
  const TruthModel t(p);
  BasisBuilder b(t);
  b.Extend(t.Solve({2.5, 0.3}), {2.5, 0.3});
  const ParameterPoint mu{3.2, 0.3};
  const ComplexVector xi = OnlineSolve(b.Basis(), mu, &p);
  const double r1 = ResidualNormDirect(t, b.Basis().phi, mu, xi);

  DiscreteProblem q = p;
  for (auto &blk : q.a.blocks)
  {
    blk = blk.Scaled(2.0);
  }
  q.f.blocks[0] *= 2.0;
  const TruthModel t2(q);
  CHECK(ResidualNormDirect(t2, b.Basis().phi, mu, xi) == doctest::Approx(2.0 * r1).epsilon(1e-12));

  // complete coefficients: residual vanishes
  const ComplexVector u = t.Solve(mu);
  ComplexMatrix id(1, 1);
  CHECK(ResidualNormDirect(t, u, mu, ComplexVector::Ones(1)) <= 1e-10 * DataScale(t, mu));
}

TEST_CASE("estimator scaling leaves the greedy selection unchanged")
{
  const TruthModel t(SourceProblem(12));
  const auto train = KLine(15, 1.5, 3.5, 0.3);
  GreedyOptions a;
  a.tol = 1e-30;
  a.n_max = 6;
  GreedyOptions b = a;
  b.rbm.beta = 2.0;
  const auto ga = GreedyBuild(t, train, a);
  const auto gb = GreedyBuild(t, train, b);
  REQUIRE(ga.trace.size() == gb.trace.size());
  for (std::size_t i = 0; i < ga.trace.size(); ++i)
  {
    CHECK(ga.trace[i].mu == gb.trace[i].mu);
    CHECK(gb.trace[i].residuum == doctest::Approx(ga.trace[i].residuum / 2.0).epsilon(1e-12));
  }
  const ComplexVector xi = OnlineSolve(ga.basis, {3.1, 0.3}, &t.Problem());
  const double d1 = ErrorEstimator(ga.basis, {3.1, 0.3}, xi, 1.0);
  CHECK(d1 == ResidualNormOnline(ga.basis, {3.1, 0.3}, xi).norm);
  CHECK(ErrorEstimator(ga.basis, {3.1, 0.3}, xi, 2.0) == doctest::Approx(d1 / 2.0));
}

TEST_CASE("effectivity")
{
  SUBCASE("A equal to X gives unit effectivity")
  {
    const TruthModel t(XProblem(10));
    BasisBuilder b(t);
    b.Extend(t.Solve({2.0, 0.0}), {2.0, 0.0});
    for (double k : {2.5, 3.0, 7.0})
    {
      const auto e = ComputeEffectivity(b.Basis(), t, {k, 0.0});
      REQUIRE(e.eta.has_value());
      CHECK(*e.eta == doctest::Approx(1.0).epsilon(1e-8));
    }
    // the solution manifold is two dimensional: a second snapshot completes it
    b.Extend(t.Solve({4.0, 0.0}), {4.0, 0.0});
    const auto e = ComputeEffectivity(b.Basis(), t, {3.0, 0.0});
    CHECK_FALSE(e.eta.has_value());
    CHECK(e.error <= 1e-12 * e.truth_norm);
  }
  SUBCASE("held-out parameters")
  {
    const TruthModel t(SourceProblem(12));
    GreedyOptions o;
    o.n_max = 4;
    o.tol = 1e-30;
    const auto g = GreedyBuild(t, KLine(10, 1.5, 3.5, 0.3), o);
    for (double k : {1.55, 2.45, 3.45})
    {
      const auto e = ComputeEffectivity(g.basis, t, {k, 0.3});
      REQUIRE(e.eta.has_value());
      CHECK(*e.eta > 0.0);
      CHECK(std::isfinite(*e.eta));
    }
  }
}

TEST_CASE("greedy examples")
{
  const TruthModel t(SourceProblem(10));
  SUBCASE("single training parameter")
  {
    GreedyOptions o;
    o.tol = 1e-12;
    const ParameterPoint mu{3.0, 0.3};
    const auto g = GreedyBuild(t, {mu}, o);
    CHECK(g.basis.Dimension() == 1);
    REQUIRE(g.trace.size() == 1);
    CHECK(g.trace[0].residuum <= 1e-8 * DataScale(t, mu));
  }
  SUBCASE("tolerance above the first maximum")
  {
    GreedyOptions o;
    o.tol = 1e12;
    const auto g = GreedyBuild(t, KLine(9, 1.5, 3.5, 0.3), o);
    CHECK(g.basis.Dimension() == 1);
    CHECK(g.trace.size() == 1);
    CHECK(g.trace[0].mu == KLine(9, 1.5, 3.5, 0.3)[4]);
  }
  SUBCASE("trace is consistent and the maximum does not grow")
  {
    GreedyOptions o;
    o.tol = 1e-10;
    o.n_max = 10;
    const auto train = KLine(25, 1.5, 3.5, 0.3);
    const auto g = GreedyBuild(t, train, o);
    REQUIRE(!g.trace.empty());
    for (std::size_t i = 0; i < g.trace.size(); ++i)
    {
      CHECK(g.trace[i].iteration == static_cast<int>(i) + 1);
      CHECK(g.trace[i].dimension == static_cast<int>(i) + 1);
      if (i > 0)
      {
        CHECK(g.trace[i].residuum <= g.trace[i - 1].residuum + 1e-10);
        CHECK(g.trace[i].seconds >= g.trace[i - 1].seconds);
      }
    }
    CHECK(g.trace.back().residuum ==
          *std::max_element(g.final_delta.begin(), g.final_delta.end()));
    CHECK(OrthoDefect(t, g.basis.phi) <= 1e-10);
    CHECK(g.costs.Has("truth_solve"));
    CHECK(g.costs.Has("residual_sweep"));
  }
  SUBCASE("repeated parameters are rejected, not duplicated")
  {
    GreedyOptions o;
    o.tol = 1e-30;
    o.n_max = 5;
    const std::vector<ParameterPoint> train{{3.0, 0.3}, {3.0, 0.3}, {3.0, 0.3}};
    const auto g = GreedyBuild(t, train, o);
    CHECK(g.basis.Dimension() == 1);
    CHECK(g.rejected.size() >= 2);
  }
  SUBCASE("first index rules")
  {
    GreedyOptions o;
    CHECK(FirstGreedyIndex(40, o) == 19);
    CHECK(FirstGreedyIndex(1, o) == 0);
    o.first_index = 7;
    CHECK(FirstGreedyIndex(40, o) == 7);
    o.first_index = 40;
    CHECK_THROWS_AS(FirstGreedyIndex(40, o), InputError);
    o.first_index.reset();
    o.seed = 5;
    const int s = FirstGreedyIndex(40, o);
    CHECK(s == FirstGreedyIndex(40, o));
    CHECK(s >= 0);
    CHECK(s < 40);
    CHECK_THROWS_AS(FirstGreedyIndex(0, o), InputError);
  }
  SUBCASE("option errors")
  {
    GreedyOptions o;
    o.tol = 0.0;
    CHECK_THROWS_AS(GreedyBuild(t, {{3.0, 0.3}}, o), InputError);
    o.tol = 1e-6;
    o.n_max = 0;
    CHECK_THROWS_AS(GreedyBuild(t, {{3.0, 0.3}}, o), InputError);
  }
}

TEST_CASE("dual basis of a self-adjoint problem")
{
  const TruthModel t(SelfAdjointProblem(8));
  BasisBuilder b(t);
  for (double k : {1.0, 2.0, 3.5})
  {
    b.Extend(t.Solve({k, 0.0}), {k, 0.0});
  }
  const DualBasis d = DualBuild(t, b.Basis());
  REQUIRE(d.Dimension() == b.Basis().Dimension());
  // w = -u, so Gram-Schmidt produces the negated primal columns
  CHECK(MaxAbs(d.phi + b.Basis().phi) <= 1e-8);
  CHECK(OrthoDefect(t, d.phi) <= 1e-10);
}

TEST_CASE("dual basis and corrected output")
{
  const DiscreteProblem p = SourceProblem(10);
  const TruthModel t(p);
  GreedyOptions o;
  o.tol = 1e-30;
  o.n_max = 4;
  const auto g = GreedyBuild(t, KLine(12, 1.5, 3.5, 0.3), o);
  const DualBasis d = DualBuild(t, g.basis);
  CHECK(d.Dimension() <= g.basis.Dimension());
  CHECK(OrthoDefect(t, d.phi) <= 1e-10);

  SUBCASE("empty dual basis")
  {
    const ParameterPoint mu{2.3, 0.3};
    const ComplexVector xi = OnlineSolve(g.basis, mu, &p);
    const auto c = ComputeCorrectedOutput(g.basis, nullptr, mu, xi);
    CHECK(c.s_pd == c.s_n);
  }
  SUBCASE("snapshot parameters")
  {
    for (const auto &mu : g.basis.snapshot_params)
    {
      const ComplexVector xi = OnlineSolve(g.basis, mu, &p);
      const auto c = ComputeCorrectedOutput(g.basis, &d, mu, xi);
      const Complex s = t.Output(mu, t.Solve(mu));
      CHECK(std::abs(c.s_n - s) <= 1e-8 * std::abs(s));
      CHECK(std::abs(c.s_pd - s) <= 1e-8 * std::abs(s));
    }
  }
  SUBCASE("output identity at held-out parameters")
  {
    for (double k : {1.7, 2.6, 3.3})
    {
      const ParameterPoint mu{k, 0.3};
      const ComplexVector xi = OnlineSolve(g.basis, mu, &p);
      const auto c = ComputeCorrectedOutput(g.basis, &d, mu, xi);
      const ComplexVector u = t.Solve(mu);
      const ComplexVector e = u - g.basis.phi * xi;
      const ComplexVector w = d.phi * c.xi_du;
      const ComplexVector l = t.OutputVector(mu);
      const SparseMatrix a = t.Operator(mu);
      // r_du(v) = -L^H v - w^H A v
      const Complex rdu = -l.dot(e) - w.dot(a * e);
      const Complex s = t.Output(mu, u);
      CHECK(std::abs((s - c.s_pd) + rdu) <= 1e-10 * std::abs(s));
      CHECK(std::abs(c.s_n - l.dot(g.basis.phi * xi)) <= 1e-12 * std::abs(s));
    }
  }
}

TEST_CASE("output bound on a nine-vertex mesh")
{
  // walls left and right only: the middle column of three vertices is free
  const Mesh m = GenerateRectMesh({0, 1}, {0, 1}, 2, 2);
  DirichletData dd;
  dd.tags = {2, 4};
  const ComplexVector load = AssembleLoad(m, [](double x, double) { return Complex(1.0 + x); });
  ComplexVector out = ComplexVector::Zero(m.NumVertices());
  out[4] = Complex(1.0, 0.5);
  out[7] = 0.3;
  const DiscreteProblem p =
      ApplyDirichlet(m, AssembleAffineBounded(m), AssembleH1(m), load, dd, out);
  REQUIRE(p.Size() == 3);
  const TruthModel t(p);
  BasisBuilder b(t);
  b.Extend(t.Solve({2.0, 0.2}), {2.0, 0.2});
  const DualBasis d = DualBuild(t, b.Basis());
  REQUIRE(d.Dimension() == 1);

  const ComplexMatrix xd = p.x.ToDense();
  for (double k : {1.0, 3.0, 4.5})
  {
    const ParameterPoint mu{k, 0.35};
    const ComplexVector xi = OnlineSolve(b.Basis(), mu, &p);
    const auto c = ComputeCorrectedOutput(b.Basis(), &d, mu, xi);
    // dense full-order quantities
    const ComplexMatrix a = EvalOperator(p.a, mu).ToDense();
    const ComplexVector u = a.fullPivLu().solve(EvalVector(p.f, mu));
    const ComplexVector e = u - b.Basis().phi * xi;
    const ComplexVector l = EvalVector(*p.output, mu);
    const ComplexVector w = d.phi * c.xi_du;
    const ComplexVector g = -l - a.adjoint() * w;  // r_du(v) = g^H v
    const Complex s = l.dot(u);
    const double g_dual = std::sqrt(g.dot(xd.fullPivLu().solve(g)).real());
    const double e_x = std::sqrt(e.dot(xd * e).real());
    CHECK(std::abs((s - c.s_pd) + g.dot(e)) <= 1e-10 * std::abs(s));
    CHECK(std::abs(s - c.s_pd) <= g_dual * e_x * (1.0 + 1e-12));
  }
}

TEST_CASE("archive round trip")
{
  const DiscreteProblem p = SourceProblem(8);
  const TruthModel t(p);
  GreedyOptions o;
  o.tol = 1e-30;
  o.n_max = 3;
  const auto g = GreedyBuild(t, KLine(7, 1.5, 3.5, 0.3), o);
  ArchiveContents a;
  a.basis = g.basis;
  a.dual = DualBuild(t, g.basis);
  a.problem_kind = "bounded";
  const std::string bytes = SerializeArchive(a);
  const ArchiveContents r = DeserializeArchive(bytes);
  CHECK(r.problem_kind == "bounded");
  CHECK(r.basis.phi == a.basis.phi);
  CHECK(r.basis.gram == a.basis.gram);
  CHECK(r.basis.residual_factor == a.basis.residual_factor);
  REQUIRE(r.dual.has_value());
  CHECK(r.dual->phi == a.dual->phi);
  CHECK(SerializeArchive(r) == bytes);

  const ParameterPoint mu{3.7, 0.3};
  const ComplexVector x0 = OnlineSolve(a.basis, mu, &p);
  const ComplexVector x1 = OnlineSolve(r.basis, mu, &p);
  CHECK(x0 == x1);
  CHECK(ResidualNormOnline(a.basis, mu, x0).norm == ResidualNormOnline(r.basis, mu, x1).norm);

  const auto path = (std::filesystem::temp_directory_path() / "crbm_archive_test.bin").string();
  WriteArchive(path, a);
  CHECK(SerializeArchive(ReadArchive(path)) == bytes);
  std::remove(path.c_str());

  CHECK_THROWS_AS(DeserializeArchive("garbage"), InputError);
  CHECK_THROWS_AS(DeserializeArchive(bytes.substr(0, bytes.size() / 2)), InputError);
  CHECK_THROWS_AS(ReadArchive("/nonexistent/crbm.bin"), InputError);
}

TEST_CASE("coefficient families")
{
  const ParameterPoint mu{3.0, 0.4};
  CHECK(MakeCoefficients("bounded")(mu) == BoundedCoefficients(mu));
  CHECK(MakeCoefficients("unit")(mu) == std::vector<Complex>{1.0});
  const auto lifted = MakeCoefficients("lifted:bounded:u:2,3")(mu);
  REQUIRE(lifted.size() == 3);
  CHECK(lifted[0] == Complex(1.0));
  CHECK(lifted[1] == BoundedCoefficients(mu)[2]);
  CHECK(lifted[2] == BoundedCoefficients(mu)[3]);
  CHECK_THROWS_AS(MakeCoefficients("nope"), InputError);
  CHECK_THROWS_AS(MakeCoefficients("lifted:bounded:x"), InputError);
}

TEST_CASE("parallel for visits every index once")
{
  for (int threads : {0, 1, 3, 64})
  {
    std::vector<std::atomic<int>> hits(101);
    ParallelFor(101, threads, [&](int i) { hits[i]++; });
    for (auto &h : hits)
    {
      CHECK(h.load() == 1);
    }
  }
}

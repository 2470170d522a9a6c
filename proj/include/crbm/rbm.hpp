// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_RBM_HPP
#define CRBM_RBM_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crbm/assembly.hpp"
#include "crbm/common.hpp"
#include "crbm/costs.hpp"
#include "crbm/linsolve.hpp"

namespace crbm
{

struct RbmOptions
{
  double beta = 1.0;         // constant stability factor in the estimator
  double reject_tol = 1e-10;  // relative X-norm below which a snapshot is discarded
  int threads = 0;           // training-set sweeps; 0 picks the hardware count
};

//
// Full-order side of the method: the discrete problem plus a factorization of
// the X inner product, shared by every truth solve and Riesz representation.
//
class TruthModel
{
public:
  explicit TruthModel(DiscreteProblem problem);

  const DiscreteProblem &Problem() const { return problem_; }
  const HermitianSolver &XSolver() const { return *x_solver_; }
  const SparseMatrix &X() const { return problem_.x; }
  int Size() const { return problem_.Size(); }

  SparseMatrix Operator(const ParameterPoint &mu) const;
  ComplexVector Rhs(const ParameterPoint &mu) const { return problem_.Rhs(mu); }

  // A(mu) u = F(mu)
  ComplexVector Solve(const ParameterPoint &mu) const;

  // A(mu)^H w = -L(mu), the adjoint problem of the output functional.
  ComplexVector SolveDual(const ParameterPoint &mu) const;

  // F(mu) - A(mu) u
  ComplexVector Residual(const ParameterPoint &mu, const ComplexVector &u) const;

  // Dual norm of the residual, sqrt(Re(e^H r)) with e = X^{-1} r.
  double ResidualNorm(const ParameterPoint &mu, const ComplexVector &u) const;

  bool HasOutput() const { return problem_.output.has_value(); }
  // L(mu) such that s(u) = L(mu)^H u.
  ComplexVector OutputVector(const ParameterPoint &mu) const;
  Complex Output(const ParameterPoint &mu, const ComplexVector &u) const;

private:
  DiscreteProblem problem_;
  std::shared_ptr<HermitianSolver> x_solver_;
};

ComplexVector TruthSolve(const DiscreteProblem &problem, const ParameterPoint &mu);

// Coefficient functions by family name: "bounded", "pml", "unit" and the
// lifted right-hand sides produced by ApplyDirichlet.
CoefficientFn MakeCoefficients(const std::string &family);

//
// X-orthonormal reduced basis with everything the online stage needs.
// Riesz representers are indexed f_0..f_{Mf-1} followed by A_{m,j} at
// position Mf + j Ma + m, so extending the basis appends indices.
//
struct ReducedBasis
{
  ComplexMatrix phi;
  std::vector<ParameterPoint> snapshot_params;
  std::vector<ComplexMatrix> reduced_blocks;  // phi^H A_m phi
  std::vector<ComplexVector> reduced_rhs;     // phi^H F_m (affine rhs only)
  std::vector<ComplexVector> reduced_output;  // phi^H L_m
  ComplexMatrix gram;                         // (v_p, v_q)_X over all representers
  ComplexMatrix residual_factor;              // R with V = Q R, Q X-orthonormal

  int ma = 0, mf = 0, ml = 0;
  bool affine_rhs = true;
  std::string family_a, family_f, family_l;
  CoefficientFn theta_a, theta_f, theta_l;

  int Dimension() const { return static_cast<int>(phi.cols()); }
  int TruthSize() const { return static_cast<int>(phi.rows()); }
  int NumRepresenters() const { return mf + ma * Dimension(); }

  ComplexMatrix GramFF() const { return gram.topLeftCorner(mf, mf); }
  ComplexMatrix GramFA() const { return gram.topRightCorner(mf, ma * Dimension()); }
  ComplexMatrix GramAA() const
  {
    return gram.bottomRightCorner(ma * Dimension(), ma * Dimension());
  }
};

//
// Offline state for incremental basis construction. Keeps the 𝒩-sized data
// (A_m phi, representers, their X-orthonormal factor) that the archive drops.
//
class BasisBuilder
{
public:
  BasisBuilder(const TruthModel &truth, RbmOptions opts = {});

  // Gram-Schmidt in X with re-orthogonalization. Returns false and
  // leaves the basis untouched when the projected snapshot is negligible.
  bool Extend(const ComplexVector &snapshot, const ParameterPoint &mu);

  const ReducedBasis &Basis() const { return rb_; }
  ReducedBasis &MutableBasis() { return rb_; }
  Stopwatch &Costs() { return costs_; }

private:
  void AppendRepresenters(const ComplexMatrix &functionals);

  const TruthModel &truth_;
  RbmOptions opts_;
  ReducedBasis rb_;
  ComplexMatrix x_phi_;
  std::vector<ComplexMatrix> a_phi_;
  ComplexMatrix reps_;   // X^{-1} r_p
  ComplexMatrix funcs_;  // r_p
  ComplexMatrix q_;
  Stopwatch costs_;
};

// Projected right-hand side phi^H F(mu); non-affine data need the full problem.
ComplexVector ReducedRhs(const ReducedBasis &rb, const ParameterPoint &mu,
                         const DiscreteProblem *problem = nullptr);

// Dense Galerkin solve (sum theta_a B_m) xi = reduced rhs.
ComplexVector OnlineSolve(const ReducedBasis &rb, const ParameterPoint &mu,
                          const ComplexVector &reduced_rhs);
ComplexVector OnlineSolve(const ReducedBasis &rb, const ParameterPoint &mu,
                          const DiscreteProblem *problem = nullptr);

enum class ResidualForm
{
  Factored,   // ||R c||, stable down to machine precision
  Expansion,  // c^H G c, the quadruple sum over the Gram tensors
};

struct ResidualEvaluation
{
  double norm = 0.0;
  double raw = 0.0;    // Re(c^H G c) or ||R c||^2 before any clamping
  double scale = 0.0;  // (sum_p |c_p| ||v_p||_X)^2
  bool breach = false;  // expansion went negative beyond round-off
};

// Coefficient vector c = [theta_f, -theta_a,m xi_j].
ComplexVector ResidualCoefficients(const ReducedBasis &rb, const ParameterPoint &mu,
                                   const ComplexVector &xi);

ResidualEvaluation ResidualNormOnline(const ReducedBasis &rb, const ParameterPoint &mu,
                                      const ComplexVector &xi,
                                      ResidualForm form = ResidualForm::Factored);

double ResidualNormDirect(const TruthModel &truth, const ComplexMatrix &phi,
                          const ParameterPoint &mu, const ComplexVector &xi);

// Delta(mu) = ||e_hat||_X / beta, online when the rhs is affine, direct otherwise.
double ErrorEstimator(const ReducedBasis &rb, const ParameterPoint &mu, const ComplexVector &xi,
                      double beta = 1.0, const TruthModel *truth = nullptr);

struct Effectivity
{
  std::optional<double> eta;  // empty when the error is below threshold
  double delta = 0.0;
  double error = 0.0;          // ||u - u_N||_X
  double truth_norm = 0.0;     // ||u||_X
};

Effectivity ComputeEffectivity(const ReducedBasis &rb, const TruthModel &truth,
                               const ParameterPoint &mu, double beta = 1.0);

struct GreedyOptions
{
  double tol = 1e-6;
  int n_max = 20;
  std::optional<int> first_index;       // default: midpoint of the training set
  std::optional<std::uint64_t> seed;    // seeded random first parameter
  ResidualForm residual_form = ResidualForm::Factored;
  RbmOptions rbm;
};

struct GreedyRecord
{
  int iteration = 0;
  ParameterPoint mu;
  double residuum = 0.0;
  int dimension = 0;
  double seconds = 0.0;
};

struct GreedyResult
{
  ReducedBasis basis;
  std::vector<GreedyRecord> trace;
  std::vector<double> final_delta;  // estimator over the training set at the end
  std::vector<int> rejected;        // training indices whose snapshots were discarded
  Stopwatch costs;
};

GreedyResult GreedyBuild(const TruthModel &truth, const std::vector<ParameterPoint> &train,
                         const GreedyOptions &opts);

// Index of the first greedy parameter under the configured rule.
int FirstGreedyIndex(std::size_t n, const GreedyOptions &opts);

struct DualBasis
{
  ComplexMatrix phi;
  std::vector<ParameterPoint> snapshot_params;
  std::vector<ComplexMatrix> reduced_blocks;  // phi_du^H A_m phi_du
  std::vector<ComplexVector> reduced_output;  // phi_du^H L_m
  std::vector<ComplexVector> cross_rhs;       // phi_du^H F_m (affine rhs only)
  std::vector<ComplexMatrix> cross_blocks;    // phi_du^H A_m phi

  int Dimension() const { return static_cast<int>(phi.cols()); }
};

DualBasis DualBuild(const TruthModel &truth, const ReducedBasis &primal,
                    const RbmOptions &opts = {});

struct CorrectedOutput
{
  Complex s_n;
  Complex s_pd;
  ComplexVector xi_du;
};

// s_N = sum theta_l L_m^H phi xi and s_N^pd = s_N - w_N^H (F - A phi xi).
CorrectedOutput ComputeCorrectedOutput(const ReducedBasis &rb, const DualBasis *dual,
                                       const ParameterPoint &mu, const ComplexVector &xi,
                                       const DiscreteProblem *problem = nullptr);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void ParallelFor(int n, int threads, const std::function<void(int)> &fn);

// Archive of the online data (and optionally the dual basis); see archive.cpp.
struct ArchiveContents
{
  ReducedBasis basis;
  std::optional<DualBasis> dual;
  std::string problem_kind;
};

void WriteArchive(const std::string &path, const ArchiveContents &contents);
ArchiveContents ReadArchive(const std::string &path);
std::string SerializeArchive(const ArchiveContents &contents);
ArchiveContents DeserializeArchive(const std::string &bytes);

}  // namespace crbm

#endif  // CRBM_RBM_HPP

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <limits>
#include <random>

#include "crbm/rbm.hpp"

namespace crbm
{

int FirstGreedyIndex(std::size_t n, const GreedyOptions &opts)
{
  if (n == 0)
  {
    throw InputError("greedy: empty training set");
  }
  if (opts.first_index)
  {
    if (*opts.first_index < 0 || *opts.first_index >= static_cast<int>(n))
    {
      throw InputError("greedy: first index out of range");
    }
    return *opts.first_index;
  }
  if (opts.seed)
  {
    std::mt19937_64 rng(*opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    return static_cast<int>(pick(rng));
  }
  return static_cast<int>((n - 1) / 2);
}

GreedyResult GreedyBuild(const TruthModel &truth, const std::vector<ParameterPoint> &train,
                         const GreedyOptions &opts)
{
  if (!(opts.tol > 0.0))
  {
    throw InputError("greedy: tolerance must be positive");
  }
  if (opts.n_max < 1)
  {
    throw InputError("greedy: N_max must be at least 1");
  }
  for (const auto &mu : train)
  {
    mu.Validate();
  }
  const int n_train = static_cast<int>(train.size());
  int next = FirstGreedyIndex(train.size(), opts);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]
  { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  GreedyResult result;
  BasisBuilder builder(truth, opts.rbm);
  const bool affine = truth.Problem().affine_rhs;
  std::vector<char> excluded(n_train, 0);
  std::vector<double> delta(n_train, std::numeric_limits<double>::infinity());
  int iteration = 0;

  while (builder.Basis().Dimension() < opts.n_max)
  {
    const ParameterPoint mu = train[next];
    ComplexVector snapshot;
    {
      auto scope = result.costs.Start("truth_solve");
      snapshot = truth.Solve(mu);
    }
    bool accepted = false;
    {
      auto scope = result.costs.Start("extend");
      accepted = builder.Extend(snapshot, mu);
    }
    if (!accepted)
    {
      excluded[next] = 1;
      result.rejected.push_back(next);
      // pick the next candidate among the remaining ones
      int best = -1;
      for (int i = 0; i < n_train; ++i)
      {
        if (!excluded[i] && (best < 0 || delta[i] > delta[best]))
        {
          best = i;
        }
      }
      if (best < 0)
      {
        if (builder.Basis().Dimension() == 0)
        {
          throw NumericalError("greedy: every candidate snapshot was rejected");
        }
        break;
      }
      next = best;
      continue;
    }
    ++iteration;
    {
      auto scope = result.costs.Start("residual_sweep");
      const auto &rb = builder.Basis();
      ParallelFor(n_train, opts.rbm.threads,
                  [&](int i)
                  {
                    const ComplexVector xi = OnlineSolve(rb, train[i], &truth.Problem());
                    if (affine)
                    {
                      delta[i] = ResidualNormOnline(rb, train[i], xi, opts.residual_form).norm /
                                 opts.rbm.beta;
                    }
                    else
                    {
                      delta[i] = ResidualNormDirect(truth, rb.phi, train[i], xi) / opts.rbm.beta;
                    }
                  });
    }
    double residuum = 0.0;
    int best = -1;
    for (int i = 0; i < n_train; ++i)
    {
      residuum = std::max(residuum, delta[i]);
      if (!excluded[i] && (best < 0 || delta[i] > delta[best]))
      {
        best = i;
      }
    }
    result.trace.push_back({iteration, mu, residuum, builder.Basis().Dimension(), elapsed()});
    if (residuum < opts.tol || best < 0)
    {
      break;
    }
    next = best;
  }
  result.final_delta = delta;
  result.costs.Merge(builder.Costs());
  result.basis = builder.Basis();
  return result;
}

}  // namespace crbm

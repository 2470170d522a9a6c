// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_COSTS_HPP
#define CRBM_COSTS_HPP

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crbm
{

using OpCount = std::uint64_t;

// 3 Mf^2 + 8 Mf Ma N + 5 Ma^2 N^2
OpCount ResidualEvalCost(OpCount mf, OpCount ma, OpCount n);

// N C_truth + C_res + (Mf + Ma N) C_riesz + (Mf^2 + 2 Mf Ma N + Ma^2 N^2)(2 Ntruth - 1)
OpCount OfflineCostModel(OpCount n, OpCount n_truth, OpCount mf, OpCount ma, OpCount c_truth,
                         OpCount c_res, OpCount c_riesz);

// Smallest n >= 1 with n c_galerkin >= c_off + n c_on; empty when never profitable.
struct MarginalNumber
{
  std::optional<std::uint64_t> n;

  bool Never() const { return !n.has_value(); }
  std::string ToString() const;
};

MarginalNumber ComputeMarginalNumber(double c_off, double c_galerkin, double c_on);

//
// Wall-clock accumulation per label. Scopes may nest; each label reports
// total seconds and the number of closed scopes.
//
class Stopwatch
{
public:
  struct Entry
  {
    std::string label;
    double seconds = 0.0;
    int count = 0;
    OpCount ops = 0;
  };

  class Scope
  {
  public:
    Scope(Stopwatch &sw, std::string label);
    ~Scope();
    Scope(const Scope &) = delete;
    Scope &operator=(const Scope &) = delete;
    double Elapsed() const;

  private:
    Stopwatch &sw_;
    std::string label_;
    std::chrono::steady_clock::time_point start_;
  };

  Scope Start(std::string label) { return Scope(*this, std::move(label)); }
  void Add(const std::string &label, double seconds, OpCount ops = 0);
  void AddOps(const std::string &label, OpCount ops);
  double Seconds(const std::string &label) const;
  int Count(const std::string &label) const;
  bool Has(const std::string &label) const;
  const std::vector<Entry> &Entries() const { return entries_; }
  void Merge(const Stopwatch &other);

private:
  Entry &Get(const std::string &label);
  std::vector<Entry> entries_;
};

// phase,seconds,count,op_count
std::string CostCsv(const Stopwatch &sw);

// Seconds since an arbitrary epoch, monotonic.
double MonotonicSeconds();

}  // namespace crbm

#endif  // CRBM_COSTS_HPP

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/costs.hpp"

#include <algorithm>
#include <cmath>

#include "crbm/common.hpp"
#include "crbm/csv.hpp"

namespace crbm
{

OpCount ResidualEvalCost(OpCount mf, OpCount ma, OpCount n)
{
  return 3 * mf * mf + 8 * mf * ma * n + 5 * ma * ma * n * n;
}

OpCount OfflineCostModel(OpCount n, OpCount n_truth, OpCount mf, OpCount ma, OpCount c_truth,
                         OpCount c_res, OpCount c_riesz)
{
  const OpCount gram = mf * mf + 2 * mf * ma * n + ma * ma * n * n;
  const OpCount dot = n_truth == 0 ? 0 : 2 * n_truth - 1;
  return n * c_truth + c_res + (mf + ma * n) * c_riesz + gram * dot;
}

std::string MarginalNumber::ToString() const
{
  return n ? std::to_string(*n) : std::string("never");
}

MarginalNumber ComputeMarginalNumber(double c_off, double c_galerkin, double c_on)
{
  if (!(c_off >= 0.0) || !(c_galerkin >= 0.0) || !(c_on >= 0.0))
  {
    throw InputError("marginal number: costs must be nonnegative");
  }
  if (c_galerkin <= c_on)
  {
    return {};
  }
  const double ratio = c_off / (c_galerkin - c_on);
  auto n = static_cast<std::uint64_t>(std::ceil(ratio));
  // guard the ceiling against representation error of the ratio
  while (n > 1 && static_cast<double>(n - 1) * (c_galerkin - c_on) >= c_off)
  {
    --n;
  }
  while (static_cast<double>(n) * (c_galerkin - c_on) < c_off)
  {
    ++n;
  }
  return {std::max<std::uint64_t>(n, 1)};
}

Stopwatch::Scope::Scope(Stopwatch &sw, std::string label)
    : sw_(sw), label_(std::move(label)), start_(std::chrono::steady_clock::now())
{
}

Stopwatch::Scope::~Scope() { sw_.Add(label_, Elapsed()); }

double Stopwatch::Scope::Elapsed() const
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

Stopwatch::Entry &Stopwatch::Get(const std::string &label)
{
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry &e) { return e.label == label; });
  if (it == entries_.end())
  {
    entries_.push_back({label});
    return entries_.back();
  }
  return *it;
}

void Stopwatch::Add(const std::string &label, double seconds, OpCount ops)
{
  auto &e = Get(label);
  e.seconds += seconds;
  e.count += 1;
  e.ops += ops;
}

void Stopwatch::AddOps(const std::string &label, OpCount ops) { Get(label).ops += ops; }

double Stopwatch::Seconds(const std::string &label) const
{
  for (const auto &e : entries_)
  {
    if (e.label == label)
    {
      return e.seconds;
    }
  }
  return 0.0;
}

int Stopwatch::Count(const std::string &label) const
{
  for (const auto &e : entries_)
  {
    if (e.label == label)
    {
      return e.count;
    }
  }
  return 0;
}

bool Stopwatch::Has(const std::string &label) const
{
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry &e) { return e.label == label; });
}

void Stopwatch::Merge(const Stopwatch &other)
{
  for (const auto &e : other.entries_)
  {
    auto &mine = Get(e.label);
    mine.seconds += e.seconds;
    mine.count += e.count;
    mine.ops += e.ops;
  }
}

std::string CostCsv(const Stopwatch &sw)
{
  std::string out = "phase,seconds,count,op_count\n";
  for (const auto &e : sw.Entries())
  {
    out += e.label + "," + FormatDouble(e.seconds) + "," + std::to_string(e.count) + "," +
           std::to_string(e.ops) + "\n";
  }
  return out;
}

double MonotonicSeconds()
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace crbm

// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CRBM_CSV_HPP
#define CRBM_CSV_HPP

#include <string>
#include <vector>

namespace crbm
{

// Shortest representation that round-trips (at most 17 significant digits).
std::string FormatDouble(double v);

class CsvWriter
{
public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter &Row(const std::vector<std::string> &fields);
  const std::string &Str() const { return text_; }
  void WriteFile(const std::string &path) const;

private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace crbm

#endif  // CRBM_CSV_HPP

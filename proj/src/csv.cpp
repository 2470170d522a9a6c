// Copyright The crbm Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "crbm/common.hpp"

namespace crbm
{

std::string FormatDouble(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  if (std::isinf(v))
  {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size())
{
  Row(header);
}

CsvWriter &CsvWriter::Row(const std::vector<std::string> &fields)
{
  if (fields.size() != columns_)
  {
    throw InputError("csv: row has " + std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(columns_));
  }
  for (std::size_t i = 0; i < fields.size(); ++i)
  {
    if (i)
    {
      text_ += ',';
    }
    text_ += fields[i];
  }
  text_ += '\n';
  return *this;
}

void CsvWriter::WriteFile(const std::string &path) const
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw InputError("cannot write " + path);
  }
  out << text_;
}

}  // namespace crbm

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace splitsea {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column by name; throws ConfigError if absent.
  std::vector<double> column(const std::string &name) const;
};

/// Writes numbers with %.17g so they read back bit-identical.
void write_csv(std::ostream &out, const CsvTable &table);
void write_csv(const std::string &path, const CsvTable &table);

CsvTable read_csv(std::istream &in);
CsvTable read_csv(const std::string &path);

std::string format_double(double v);

} // namespace splitsea

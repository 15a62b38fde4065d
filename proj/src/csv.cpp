#include "splitsea/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "splitsea/errors.hpp"

namespace splitsea {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> CsvTable::column(const std::string &name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != name)
      continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &row : rows)
      out.push_back(row.at(c));
    return out;
  }
  throw ConfigError("CSV has no column '" + name + "'");
}

void write_csv(std::ostream &out, const CsvTable &table) {
  for (std::size_t c = 0; c < table.header.size(); ++c)
    out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto &row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_csv(const std::string &path, const CsvTable &table) {
  std::ofstream out(path);
  if (!out)
    throw ConfigError("cannot write " + path);
  write_csv(out, table);
}

CsvTable read_csv(std::istream &in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char *end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw ConfigError("non-numeric CSV cell '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw ConfigError("CSV row width does not match the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read " + path);
  return read_csv(in);
}

} // namespace splitsea

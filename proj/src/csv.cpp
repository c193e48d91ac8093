#include "orlicz/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orlicz::csv {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void emit_curves(const Table& table, const std::string& path) {
  if (table.header.empty())
    throw Error("emit_curves: empty header for " + path);
  for (const auto& row : table.rows)
    if (row.size() != table.header.size())
      throw Error("emit_curves: ragged row for " + path);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("emit_curves: cannot open " + path);
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error("emit_curves: write failed for " + path);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw Error("read_table: non-numeric cell '" + cell + "' in " + path);
  }
  while (pos < cell.size() &&
         (cell[pos] == ' ' || cell[pos] == '\r' || cell[pos] == '\t'))
    ++pos;
  if (pos != cell.size())
    throw Error("read_table: trailing junk in cell '" + cell + "' in " + path);
  return v;
}

}  // namespace

Table read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_table: cannot open " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line))
    throw Error("read_table: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw Error("read_table: ragged row in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_cell(cell, path));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_grid(const geometry::GridFunction& u, const std::string& path) {
  Table table;
  table.header.push_back("cell_index");
  for (int k = 1; k <= u.dim(); ++k)
    table.header.push_back("x" + std::to_string(k));
  table.header.push_back("value");
  table.rows.reserve(static_cast<size_t>(u.size()));
  for (Eigen::Index flat = 0; flat < u.size(); ++flat) {
    std::vector<double> row;
    row.reserve(static_cast<size_t>(u.dim()) + 2);
    row.push_back(static_cast<double>(flat));
    const Vector c = u.center(flat);
    for (int k = 0; k < u.dim(); ++k) row.push_back(c[k]);
    row.push_back(u.values()[flat]);
    table.rows.push_back(std::move(row));
  }
  emit_curves(table, path);
}

geometry::GridFunction read_grid(
    const std::string& path,
    const std::optional<geometry::Domain>& support) {
  const Table table = read_table(path);
  if (table.header.size() < 3)
    throw Error("read_grid: need cell_index, coordinates, value in " + path);
  const int dim = static_cast<int>(table.header.size()) - 2;
  if (dim > 3) throw Error("read_grid: dimension above 3 in " + path);
  const long total = static_cast<long>(table.rows.size());
  if (total < 2) throw Error("read_grid: need at least two cells in " + path);

  const int n =
      static_cast<int>(std::llround(std::pow(double(total), 1.0 / dim)));
  long check = 1;
  for (int k = 0; k < dim; ++k) check *= n;
  if (check != total)
    throw Error("read_grid: cell count is not a dim-th power in " + path);

  Array values = Array::Zero(total);
  Vector cmin = Vector::Constant(dim, std::numeric_limits<double>::infinity());
  Vector cmax = -cmin;
  std::vector<bool> seen(static_cast<size_t>(total), false);
  for (const auto& row : table.rows) {
    const long flat = std::llround(row[0]);
    if (flat < 0 || flat >= total || seen[static_cast<size_t>(flat)])
      throw Error("read_grid: bad or duplicate cell_index in " + path);
    seen[static_cast<size_t>(flat)] = true;
    for (int k = 0; k < dim; ++k) {
      cmin[k] = std::min(cmin[k], row[static_cast<size_t>(k) + 1]);
      cmax[k] = std::max(cmax[k], row[static_cast<size_t>(k) + 1]);
    }
    values[flat] = row[static_cast<size_t>(dim) + 1];
  }
  if (n < 2) throw Error("read_grid: need two cells per axis in " + path);

  // Centers span n-1 cell widths per axis.
  Vector lo(dim), hi(dim);
  for (int k = 0; k < dim; ++k) {
    const double h = (cmax[k] - cmin[k]) / (n - 1);
    if (!(h > 0.0))
      throw Error("read_grid: degenerate axis " + std::to_string(k + 1) +
                  " in " + path);
    lo[k] = cmin[k] - 0.5 * h;
    hi[k] = cmax[k] + 0.5 * h;
  }
  const geometry::Domain region =
      support ? *support : geometry::make_box(lo, hi);
  return geometry::GridFunction(region, lo, hi, n, std::move(values));
}

}  // namespace orlicz::csv

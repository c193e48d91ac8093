#pragma once

#include "orlicz/geometry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace orlicz::csv {

// Shortest decimal form that round-trips the double exactly (17 significant
// digits, C locale).
std::string format_double(double x);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Comma-separated values with a header row, LF line endings, numbers
// formatted by format_double. Every row must match the header's width.
// I/O failures carry the path.
void emit_curves(const Table& table, const std::string& path);

// Parses a file written by emit_curves (or any compatible numeric CSV).
Table read_table(const std::string& path);

// Grid snapshot: one row per cell, columns cell_index, x1..xN, value.
void write_grid(const geometry::GridFunction& u, const std::string& path);

// Rebuilds the grid from its snapshot. The box is recovered from the cell
// centers, so at least two cells per axis are required. The support region
// defaults to the grid box.
geometry::GridFunction read_grid(
    const std::string& path,
    const std::optional<geometry::Domain>& support = std::nullopt);

}  // namespace orlicz::csv

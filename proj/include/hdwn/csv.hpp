#ifndef HDWN_CSV_HPP
#define HDWN_CSV_HPP

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hdwn/error.hpp"

namespace hdwn::csv {

/// A numeric table read from CSV. `labels` holds the skipped leading column
/// (e.g. dates) when one was requested, otherwise it is empty.
struct Table {
  std::vector<std::string> header;
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
};

struct ReadOptions {
  bool has_header = false;
  bool leading_label_column = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Parses a numeric CSV. Every non-label cell must parse as a finite double;
/// the first offending cell is reported with 1-based row/column.
inline Table read(std::istream& in, const ReadOptions& opt, const std::string& source = "<stream>") {
  Table table;
  std::vector<double> flat;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  bool header_pending = opt.has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line);
    if (header_pending) {
      for (auto c : cells) table.header.emplace_back(c);
      header_pending = false;
      continue;
    }
    std::size_t first = 0;
    if (opt.leading_label_column) {
      table.labels.emplace_back(cells.front());
      first = 1;
    }
    const std::size_t width = cells.size() - first;
    if (rows == 0) {
      cols = width;
      if (cols == 0) fail(ErrorCode::InvalidData, source + ": row " + std::to_string(line_no) + " has no numeric columns");
    } else if (width != cols) {
      fail(ErrorCode::InvalidData, source + ": row " + std::to_string(line_no) + " has " + std::to_string(width) +
                                       " numeric columns, expected " + std::to_string(cols));
    }
    for (std::size_t j = first; j < cells.size(); ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j], v) || !std::isfinite(v)) {
        fail(ErrorCode::InvalidData, source + ": cannot parse '" + std::string(cells[j]) + "' at row " +
                                         std::to_string(line_no) + ", column " + std::to_string(j + 1));
      }
      flat.push_back(v);
    }
    ++rows;
  }
  table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * cols + c];
  return table;
}

inline Table read_file(const std::string& path, const ReadOptions& opt) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return read(in, opt, path);
}

/// Writes a matrix with full round-trip precision.
inline void write(std::ostream& out, const Eigen::MatrixXd& m, const std::vector<std::string>& header = {}) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
}

}  // namespace hdwn::csv

#endif  // HDWN_CSV_HPP

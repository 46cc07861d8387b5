#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace iontrap {

// Fixed "%.12g" formatting keeps CSV bodies byte-identical across runs and
// thread counts for the same seed.
inline std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    append_row_of_strings(header);
  }

  void add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt_num(v));
    append_row_of_strings(cells);
  }

  void add_row_mixed(const std::vector<std::string>& cells) { append_row_of_strings(cells); }

  const std::string& str() const { return body_; }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body_;
  }

 private:
  void append_row_of_strings(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
      throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }

  std::size_t columns_;
  std::string body_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Strict numeric CSV reader; parse failures carry the 1-based line number.
inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line_no == 1) {
      table.header = cells;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(c, &pos));
        if (pos != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw std::runtime_error("csv line " + std::to_string(line_no) +
                                 ": cannot parse number '" + c + "'");
      }
    }
    if (!table.header.empty() && row.size() != table.header.size())
      throw std::runtime_error("csv line " + std::to_string(line_no) +
                               ": expected " + std::to_string(table.header.size()) +
                               " columns, got " + std::to_string(row.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_csv(in);
}

}  // namespace iontrap

#include "fnl/records.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fnl {

void RecordTable::add_row(const std::vector<std::string>& values) {
  if (values.size() != columns.size())
    throw std::invalid_argument("RecordTable: row width does not match the schema");
  rows.push_back(ExperimentRecord{values});
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

std::string serialize(const RecordTable& table, RecordFormat format) {
  std::ostringstream out;
  if (format == RecordFormat::kCsv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ',';
      out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.values.size(); ++c) {
        if (c) out << ',';
        out << row.values[c];
      }
      out << '\n';
    }
  } else {
    out << "[\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      out << "  {";
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ", ";
        out << '"' << table.columns[c] << "\": \"" << table.rows[r].values[c] << '"';
      }
      out << (r + 1 < table.rows.size() ? "},\n" : "}\n");
    }
    out << "]\n";
  }
  return out.str();
}

RecordTable parse_csv(const std::string& text) {
  RecordTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (first) {
      table.columns = fields;
      first = false;
    } else {
      table.add_row(fields);
    }
  }
  return table;
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_atomic: cannot open " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write_atomic: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_atomic: rename failed for " + path);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out << "dim," << m.rows() << ',' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  write_atomic(path, out.str());
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_matrix_csv: cannot open " + path);
  std::string header;
  std::getline(in, header);
  long rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "dim,%ld,%ld", &rows, &cols) != 2)
    throw std::runtime_error("read_matrix_csv: malformed header");
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_matrix_csv: truncated file");
    std::istringstream ls(line);
    std::string field;
    for (long c = 0; c < cols; ++c) {
      if (!std::getline(ls, field, ',')) throw std::runtime_error("read_matrix_csv: short row");
      m(r, c) = std::stod(field);
    }
  }
  return m;
}

}  // namespace fnl

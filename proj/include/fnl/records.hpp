#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace fnl {

inline constexpr const char* kToolVersion = "0.1.0";

// Flat key -> value row; values serialized with 17 significant digits so a
// round trip is bit-exact. Schema (column order) is fixed per subcommand.
struct ExperimentRecord {
  std::vector<std::string> values;
};

struct RecordTable {
  std::vector<std::string> columns;
  std::vector<ExperimentRecord> rows;

  void add_row(const std::vector<std::string>& values);
};

std::string format_double(double v);
std::string format_int(long long v);

enum class RecordFormat { kCsv, kJson };

std::string serialize(const RecordTable& table, RecordFormat format);

// Parses the CSV form produced by serialize (no quoting; values never contain
// commas or newlines).
RecordTable parse_csv(const std::string& text);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partial file. path "-" writes to stdout.
void write_atomic(const std::string& path, const std::string& content);

// Row-major debug dump of a matrix: first line "dim,<rows>,<cols>", then one
// CSV line per row.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace fnl

#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fnl/records.hpp"

using namespace fnl;

TEST_CASE("csv round trip") {
  RecordTable table;
  table.columns = {"a", "b", "c"};
  table.add_row({format_double(1.0 / 3.0), format_int(42), "x"});
  table.add_row({format_double(-2.5e-17), format_int(-1), "y"});

  auto parsed = parse_csv(serialize(table, RecordFormat::kCsv));
  REQUIRE(parsed.columns == table.columns);
  REQUIRE(parsed.rows.size() == table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    CHECK(parsed.rows[r].values == table.rows[r].values);
}

TEST_CASE("doubles survive a text round trip bit-exactly") {
  for (double v : {1.0 / 3.0, 0.1000313730465949, -1e-300, 3.14159e17}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("json output shape") {
  RecordTable table;
  table.columns = {"k"};
  table.add_row({"1"});
  std::string json = serialize(table, RecordFormat::kJson);
  CHECK(json.find("\"k\": \"1\"") != std::string::npos);
  CHECK(json.front() == '[');
}

TEST_CASE("row width is validated") {
  RecordTable table;
  table.columns = {"a", "b"};
  CHECK_THROWS_AS(table.add_row({"1"}), std::invalid_argument);
}

TEST_CASE("atomic write leaves no temp file") {
  const std::string path = "/tmp/fnl_records_test.csv";
  write_atomic(path, "x,y\n1,2\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y");
  std::ifstream tmp(path + ".tmp");
  CHECK_FALSE(tmp.good());
  std::remove(path.c_str());
}

TEST_CASE("matrix csv round trip") {
  Eigen::MatrixXd m(2, 3);
  m << 1.5, -2.25, 1.0 / 3.0, 0.0, 1e-17, -4.0;
  const std::string path = "/tmp/fnl_matrix_test.csv";
  write_matrix_csv(path, m);
  Eigen::MatrixXd back = read_matrix_csv(path);
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

#include <unistd.h>

#include <filesystem>

#include "doctest.h"
#include "nlpsel/io.hpp"

using namespace nlpsel;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("nlpsel-io-" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("csv parsing") {
  const auto t = io::parse_csv("y,x1,x2\r\n1,0.5,-2\n\n0,1e-3,3.25\n", "t.csv");
  CHECK(t.header == std::vector<std::string>{"y", "x1", "x2"});
  CHECK(t.rows.size() == 2);
  CHECK(t.number(1, 1) == 1e-3);
  CHECK(*t.column("x2") == 2);
  CHECK_FALSE(t.column("x3").has_value());
  CHECK_THROWS_WITH_AS((void)io::parse_csv("a\nfoo\n", "b.csv").number(0, 0),
                       doctest::Contains("row 2, column 'a'"), io::ParseError);
  CHECK_THROWS_WITH_AS(io::parse_csv("a,b\n1\n", "c.csv"), doctest::Contains("row 2"), io::ParseError);
  CHECK_THROWS_AS(io::parse_csv(""), io::ParseError);
}

TEST_CASE("data round trip and validation") {
  TempDir dir;
  Matrix x(3, 2);
  x << 0.1, 1.0 / 3.0, -2.5, 1e-300, 7.0, -0.0;
  Vector y(3);
  y << 1, 0, 1;
  io::write_data(dir.path / "d.csv", x, y);
  const io::RawData back = io::read_data(dir.path / "d.csv");
  CHECK((back.x.array() == x.array()).all());
  CHECK((back.y.array() == y.array()).all());

  io::write_text(dir.path / "bad_y.csv", "x1,y\n0.5,1\n0.2,2\n");
  CHECK_THROWS_WITH_AS(io::read_data(dir.path / "bad_y.csv"), doctest::Contains("row 3, column 'y'"),
                       io::ParseError);
  io::write_text(dir.path / "bad_x.csv", "y,x1,x2\n1,0.5,abc\n");
  CHECK_THROWS_WITH_AS(io::read_data(dir.path / "bad_x.csv"), doctest::Contains("row 2, column 'x2'"),
                       io::ParseError);
  io::write_text(dir.path / "order.csv", "y,x2,x1\n1,0.5,1\n");
  CHECK_THROWS_AS(io::read_data(dir.path / "order.csv"), io::ParseError);

  io::write_text(dir.path / "design.csv", "x1,x2\n1,2\n3,4\n");
  io::write_text(dir.path / "resp.csv", "y\n0\n1\n");
  const io::RawData split = io::read_data(dir.path / "design.csv", dir.path / "resp.csv");
  CHECK(split.x(1, 1) == 4.0);
  CHECK(split.y[1] == 1.0);
  io::write_text(dir.path / "short.csv", "y\n0\n");
  CHECK_THROWS_AS(io::read_data(dir.path / "design.csv", dir.path / "short.csv"), io::ParseError);
  CHECK_THROWS_AS(io::read_data(dir.path / "missing.csv"), io::IoError);
}

TEST_CASE("coefficient files") {
  TempDir dir;
  io::write_text(dir.path / "c.csv", "name,beta\nintercept,0.25\nx1,1.5\nx2,0\n");
  const auto c = io::read_coefficients(dir.path / "c.csv");
  CHECK(c.intercept == 0.25);
  CHECK(c.beta.size() == 2);
  CHECK(c.beta[0] == 1.5);
  io::write_text(dir.path / "plain.csv", "beta\n1\n2\n3\n");
  CHECK(io::read_coefficients(dir.path / "plain.csv").beta.size() == 3);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  const double third = 1.0 / 3.0;
  CHECK(std::stod(io::format_double(third)) == third);
  CHECK_THROWS_AS(io::write_text("/nonexistent-dir/x.txt", "a"), io::IoError);
}

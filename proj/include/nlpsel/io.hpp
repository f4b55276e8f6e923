#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlpsel/types.hpp"

namespace nlpsel::io {

/// Malformed input file; the message names the file, 1-based row and column.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Could not read or write a path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Header row plus string cells. Rows are 1-based in messages, counting the header as row 1.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::optional<std::size_t> column(const std::string& name) const;
  [[nodiscard]] double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");

struct RawData {
  Matrix x;
  Vector y;
};

/// Reads a design (columns x1..xp, in order) and a response (column "y", 0/1).
/// With a single path the file must carry both; otherwise the response comes
/// from `response_path`.
RawData read_data(const std::filesystem::path& design_path,
                  const std::optional<std::filesystem::path>& response_path = std::nullopt);

/// Writes "y,x1,...,xp" rows.
void write_data(const std::filesystem::path& path, const Matrix& x, const Vector& y);

/// Reads a dense coefficient vector: a column named "beta" (one row per
/// covariate) and an optional "intercept" row label in column "name".
struct Coefficients {
  Vector beta;
  double intercept = 0.0;
};
Coefficients read_coefficients(const std::filesystem::path& path);

/// Shortest decimal that round-trips.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace nlpsel::io

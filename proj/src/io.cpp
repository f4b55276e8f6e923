#include "nlpsel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nlpsel::io {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    // trim spaces and stray quotes
    const auto first = cell.find_first_not_of(" \t\"");
    const auto last = cell.find_last_not_of(" \t\"");
    out.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(const CsvTable& t, std::size_t row, std::size_t col) {
  return t.source + ": row " + std::to_string(row + 2) + ", column '" +
         (col < t.header.size() ? t.header[col] : std::to_string(col + 1)) + "'";
}

}  // namespace

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& cell = rows.at(row).at(col);
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(where(*this, row, col) + ": '" + cell + "' is not a finite number");
  }
  return value;
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw ParseError(source + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " fields, header has " +
                       std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw ParseError(source + ": empty file (missing header row)");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path), path.string());
}

RawData read_data(const std::filesystem::path& design_path,
                  const std::optional<std::filesystem::path>& response_path) {
  const CsvTable design = read_csv(design_path);
  std::vector<std::size_t> xcols;
  for (std::size_t c = 0; c < design.header.size(); ++c) {
    const std::string& name = design.header[c];
    if (name == "y") continue;
    const std::string expected = "x" + std::to_string(xcols.size() + 1);
    if (name != expected) {
      throw ParseError(design.source + ": row 1, column '" + name + "': expected '" + expected + "'");
    }
    xcols.push_back(c);
  }
  if (xcols.empty()) throw ParseError(design.source + ": no covariate columns x1..xp");
  if (design.rows.empty()) throw ParseError(design.source + ": no data rows");

  RawData out;
  out.x.resize(static_cast<Eigen::Index>(design.rows.size()), static_cast<Eigen::Index>(xcols.size()));
  for (std::size_t r = 0; r < design.rows.size(); ++r) {
    for (std::size_t j = 0; j < xcols.size(); ++j) {
      out.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = design.number(r, xcols[j]);
    }
  }

  const CsvTable* response = &design;
  CsvTable separate;
  if (response_path) {
    separate = read_csv(*response_path);
    response = &separate;
  }
  const auto ycol = response->column("y");
  if (!ycol) throw ParseError(response->source + ": row 1: missing response column 'y'");
  if (response->rows.size() != design.rows.size()) {
    throw ParseError(response->source + ": " + std::to_string(response->rows.size()) +
                     " responses for " + std::to_string(design.rows.size()) + " design rows");
  }
  out.y.resize(static_cast<Eigen::Index>(response->rows.size()));
  for (std::size_t r = 0; r < response->rows.size(); ++r) {
    const double v = response->number(r, *ycol);
    if (v != 0.0 && v != 1.0) {
      throw ParseError(where(*response, r, *ycol) + ": response must be 0 or 1");
    }
    out.y[static_cast<Eigen::Index>(r)] = v;
  }
  return out;
}

void write_data(const std::filesystem::path& path, const Matrix& x, const Vector& y) {
  std::string text = "y";
  for (Eigen::Index j = 0; j < x.cols(); ++j) text += ",x" + std::to_string(j + 1);
  text += '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    text += format_double(y[i]);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      text += ',';
      text += format_double(x(i, j));
    }
    text += '\n';
  }
  write_text(path, text);
}

Coefficients read_coefficients(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto bcol = t.column("beta");
  if (!bcol) throw ParseError(t.source + ": row 1: missing column 'beta'");
  const auto ncol = t.column("name");
  Coefficients c;
  std::vector<double> beta;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double v = t.number(r, *bcol);
    if (ncol && t.rows[r][*ncol] == "intercept") {
      c.intercept = v;
    } else {
      beta.push_back(v);
    }
  }
  c.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  return c;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nlpsel::io

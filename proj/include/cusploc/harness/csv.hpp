#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace cusploc::harness {

using CsvField = std::variant<std::string, double, long long, unsigned long long>;

// Shortest round-trip-safe text for a double ("%.17g"); nan, inf and -inf spelled out.
std::string format_double(double x);

// RFC 4180: CRLF line ends, fields quoted only when they contain a comma, quote or line break.
std::string csv_escape(const std::string& field);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  // Throws DomainError if the row width differs from the header.
  void add_row(std::vector<CsvField> row);

  std::string str() const;
  // Throws IoError when the file cannot be written.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws DomainError when missing.
  std::size_t column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvDocument parse_csv(const std::string& text);
CsvDocument read_csv(const std::filesystem::path& path);

// Creates the directory (and parents); IoError if that fails or it is not writable.
void ensure_directory(const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace cusploc::harness

#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaflab {

/// Shortest round-trip decimal form ("0.1", "1e-08", "inf", "nan").
std::string format_double(double x);

/// Row-oriented CSV builder. Fields containing separators or quotes are
/// quoted; doubles go through format_double so output is byte-stable.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row(std::initializer_list<std::string> fields);
  CsvTable& row(std::vector<std::string> fields);

  std::size_t rows() const noexcept { return rows_; }
  const std::string& text() const noexcept { return text_; }

 private:
  void append(std::span<const std::string> fields);

  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

std::string csv_field(double x);
std::string csv_field(std::int64_t x);
std::string csv_field(std::size_t x);
std::string csv_field(bool x);
std::string csv_field(std::string_view x);

/// Writes via a sibling temp file and rename. Throws IoError naming the path.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace gaflab

#pragma once

// Bit-stable CSV output: fixed 17-significant-digit formatting, a header
// row, and a trailing "# checksum" line (FNV-1a 64 over the data rows).

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace vlab {

std::string format_number(double x);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 14695981039346656037ULL);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);

  template <class... Fields>
  void row(const Fields&... fields) {
    std::string line;
    bool first = true;
    (append(line, first, fields), ...);
    emit(line);
  }

  /// Writes the checksum line. Further rows are rejected.
  void finish();
  std::size_t rows() const { return rows_; }

 private:
  template <class F>
  static void append(std::string& line, bool& first, const F& f) {
    if (!first) line += ',';
    first = false;
    if constexpr (std::is_same_v<F, bool>) {
      line += f ? "true" : "false";
    } else if constexpr (std::is_integral_v<F>) {
      line += std::to_string(f);
    } else if constexpr (std::is_floating_point_v<F>) {
      line += format_number(static_cast<double>(f));
    } else {
      line += std::string_view(f);
    }
  }
  void emit(const std::string& line);

  std::ostream& os_;
  std::uint64_t hash_;
  std::size_t rows_ = 0;
  bool finished_ = false;
};

/// Recomputes the checksum of a CSV produced by CsvWriter; true when the
/// trailing line matches the data rows.
bool verify_csv_checksum(std::string_view contents);

}  // namespace vlab

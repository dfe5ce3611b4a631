#include "vlab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vlab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0 so outputs do not depend on signed zeros
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 1099511628211ULL;
  }
  return state;
}

namespace {

std::string checksum_line(std::uint64_t h, std::size_t rows) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "# checksum fnv1a64=%016llx rows=%zu",
                static_cast<unsigned long long>(h), rows);
  return buf;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), hash_(fnv1a64("")) {
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) line += ',';
    line += header[i];
  }
  os_ << line << '\n';
}

void CsvWriter::emit(const std::string& line) {
  if (finished_) throw std::logic_error("CsvWriter: row after finish()");
  hash_ = fnv1a64(line, hash_);
  hash_ = fnv1a64("\n", hash_);
  ++rows_;
  os_ << line << '\n';
}

void CsvWriter::finish() {
  if (finished_) return;
  finished_ = true;
  os_ << checksum_line(hash_, rows_) << '\n';
}

bool verify_csv_checksum(std::string_view contents) {
  std::size_t pos = contents.find('\n');
  if (pos == std::string_view::npos) return false;
  ++pos;
  std::uint64_t h = fnv1a64("");
  std::size_t rows = 0;
  while (pos < contents.size()) {
    const std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) return false;
    const std::string_view line = contents.substr(pos, end - pos);
    if (line.starts_with("# checksum")) {
      return line == checksum_line(h, rows) && end + 1 == contents.size();
    }
    h = fnv1a64(line, h);
    h = fnv1a64("\n", h);
    ++rows;
    pos = end + 1;
  }
  return false;
}

}  // namespace vlab

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gmc {

/// RFC-4180 CSV writer, UTF-8, '.' decimal separator, CRLF line ends.
/// Numeric cells are printed with %.17g so outputs round-trip and reruns
/// are byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& cells);
  void add_row_numeric(const std::vector<double>& cells);
  const std::string& buffer() const { return buf_; }
  void write(const std::filesystem::path& path) const;

  static std::string format_double(double v);
  static std::string escape(const std::string& cell);

 private:
  std::string buf_;
  size_t columns_ = 0;
};

/// Binary column format: 16-byte header (magic "GMCF", version u8, kind u8,
/// d u16 LE, point count u64 LE) followed by little-endian float64 data,
/// row-major with `point count` columns.
struct GmcfHeader {
  uint8_t version = 1;
  uint8_t kind = 0;  // 0 field, 1 BM path, 2 BES3 path
  uint16_t d = 1;
  uint64_t count = 0;
};

void write_gmcf(const std::filesystem::path& path, const GmcfHeader& header,
                const std::vector<double>& data);

struct GmcfFile {
  GmcfHeader header;
  std::vector<double> data;
};
GmcfFile read_gmcf(const std::filesystem::path& path);

}  // namespace gmc

#include "gmc/bessel.hpp"

namespace gmc {

/// Trajectory export: kind tag 1 (BM) or 2 (BES3), d = 1, count = number of
/// samples; the step size rides in front of the values.
void write_path_gmcf(const std::filesystem::path& path, const Path& p);
Path read_path_gmcf(const std::filesystem::path& path);

}  // namespace gmc

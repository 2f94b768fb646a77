#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fraclab/rat.hpp"

namespace fraclab {

// CSV emitter: header row, data rows, trailing metadata comment with seed
// and version. Reals are written as shortest round-trip decimals, exact
// rationals as num/den.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long v);
  CsvWriter& cell(const Rat& v);
  void end_row();

  std::string finish(std::uint64_t seed) const;
  void write_file(const std::string& path, std::uint64_t seed) const;

  static std::string format_double(double v);

 private:
  std::size_t width_;
  std::vector<std::string> rows_;
  std::vector<std::string> current_;
};

extern const char* kFraclabVersion;

}  // namespace fraclab

#include "fraclab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fraclab {

const char* kFraclabVersion = "fraclab 0.1.0";

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  std::string h;
  for (std::size_t i = 0; i < header.size(); ++i)
    h += (i ? "," : "") + header[i];
  rows_.push_back(h);
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  current_.push_back(s);
  return *this;
}

std::string CsvWriter::format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0.0
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
  }
  // Shortest representation that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = std::strtod(buf, nullptr);
    if (back == v) return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const Rat& v) { return cell(rat_str(v)); }

void CsvWriter::end_row() {
  if (current_.size() != width_)
    throw std::logic_error("CSV row width mismatch");
  std::string r;
  for (std::size_t i = 0; i < current_.size(); ++i)
    r += (i ? "," : "") + current_[i];
  rows_.push_back(r);
  current_.clear();
}

std::string CsvWriter::finish(std::uint64_t seed) const {
  std::string out;
  for (const auto& r : rows_) out += r + "\n";
  out += "# seed=" + std::to_string(seed) + " version=" + kFraclabVersion + "\n";
  return out;
}

void CsvWriter::write_file(const std::string& path, std::uint64_t seed) const {
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  f << finish(seed);
}

}  // namespace fraclab

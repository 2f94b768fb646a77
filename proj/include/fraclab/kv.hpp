#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fraclab/rat.hpp"

namespace fraclab {

// One `key = value` line; '#' starts a comment, blank lines ignored.
struct KvLine {
  std::string key;
  std::string value;
  int line_no;
};

std::vector<KvLine> parse_kv_text(const std::string& text);
std::vector<KvLine> parse_kv_file(const std::string& path);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

}  // namespace fraclab

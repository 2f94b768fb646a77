#include "fraclab/kv.hpp"

#include <fstream>
#include <sstream>

namespace fraclab {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<KvLine> parse_kv_text(const std::string& text) {
  std::vector<KvLine> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    auto colon = line.find(':');
    std::size_t sep = eq;
    // Accept `key: value` as well; prefer whichever separator comes first.
    if (colon != std::string::npos && (eq == std::string::npos || colon < eq))
      sep = colon;
    if (sep == std::string::npos)
      throw DomainError("line " + std::to_string(no) + ": expected key = value");
    KvLine kv;
    kv.key = trim(line.substr(0, sep));
    kv.value = trim(line.substr(sep + 1));
    kv.line_no = no;
    if (kv.key.empty())
      throw DomainError("line " + std::to_string(no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<KvLine> parse_kv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_kv_text(ss.str());
}

}  // namespace fraclab

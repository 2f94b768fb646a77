#include "fraclab/config.hpp"

#include <sstream>

#include "fraclab/csv.hpp"
#include "fraclab/kv.hpp"

namespace fraclab {

namespace {

std::vector<double> parse_double_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& piece : split(v, ','))
    if (!trim(piece).empty()) out.push_back(std::stod(trim(piece)));
  return out;
}

Word parse_word(const std::string& v) {
  Word w;
  for (const auto& piece : split(v, ','))
    if (!trim(piece).empty()) w.push_back(std::stoi(trim(piece)));
  return w;
}

}  // namespace

RunSpec parse_config_text(const std::string& text) {
  RunSpec spec;
  for (const auto& kv : parse_kv_text(text)) {
    const std::string& k = kv.key;
    const std::string& v = kv.value;
    auto fail = [&](const std::string& why) {
      throw DomainError("line " + std::to_string(kv.line_no) + ": key '" + k +
                        "': " + why);
    };
    try {
      if (k == "subcommand") spec.subcommand = v;
      else if (k == "ifs") spec.cfg.ifs_spec = v;
      else if (k == "psi") spec.cfg.psi_spec = v;
      else if (k == "n_lo") spec.cfg.n_lo = std::stol(v);
      else if (k == "n_hi") spec.cfg.n_hi = std::stol(v);
      else if (k == "t") spec.cfg.ts = parse_double_list(v);
      else if (k == "eps") spec.cfg.eps_list = parse_double_list(v);
      else if (k == "samples") spec.cfg.samples = std::stol(v);
      else if (k == "seed") spec.cfg.seed = std::stoull(v);
      else if (k == "threads") spec.cfg.threads = std::stoi(v);
      else if (k == "basepoint") spec.cfg.basepoint_word = parse_word(v);
      else if (k == "depth") spec.cfg.sample_depth = std::stoi(v);
      else if (k == "c_f") spec.cfg.c_f = std::stod(v);
      else if (k == "kappa_star") spec.cfg.kappa_star = std::stod(v);
      else if (k == "delta") spec.cfg.delta = std::stod(v);
      else if (k == "c_prime_d") spec.cfg.c_prime_d = std::stod(v);
      else if (k == "lebesgue") spec.cfg.lebesgue = v == "1" || v == "true";
      else if (k == "out") spec.out_dir = v;
      else fail("unknown key");
    } catch (const std::invalid_argument&) {
      fail("malformed value '" + v + "'");
    } catch (const std::out_of_range&) {
      fail("value out of range '" + v + "'");
    }
  }
  if (spec.cfg.samples < 100)
    throw DomainError("key 'samples': need N >= 100");
  if (spec.cfg.n_hi < spec.cfg.n_lo) throw DomainError("key 'n_hi': empty range");
  return spec;
}

RunSpec parse_config(const std::string& path) {
  std::ostringstream text;
  for (const auto& kv : parse_kv_file(path))
    text << kv.key << " = " << kv.value << "\n";
  return parse_config_text(text.str());
}

std::string RunSpec::serialize() const {
  std::ostringstream os;
  auto fd = CsvWriter::format_double;
  os << "subcommand = " << subcommand << "\n";
  if (!cfg.ifs_spec.empty()) os << "ifs = " << cfg.ifs_spec << "\n";
  if (!cfg.psi_spec.empty()) os << "psi = " << cfg.psi_spec << "\n";
  os << "n_lo = " << cfg.n_lo << "\n";
  os << "n_hi = " << cfg.n_hi << "\n";
  if (!cfg.ts.empty()) {
    os << "t = ";
    for (std::size_t i = 0; i < cfg.ts.size(); ++i)
      os << (i ? "," : "") << fd(cfg.ts[i]);
    os << "\n";
  }
  if (!cfg.eps_list.empty()) {
    os << "eps = ";
    for (std::size_t i = 0; i < cfg.eps_list.size(); ++i)
      os << (i ? "," : "") << fd(cfg.eps_list[i]);
    os << "\n";
  }
  os << "samples = " << cfg.samples << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "threads = " << cfg.threads << "\n";
  if (!cfg.basepoint_word.empty()) {
    os << "basepoint = ";
    for (std::size_t i = 0; i < cfg.basepoint_word.size(); ++i)
      os << (i ? "," : "") << cfg.basepoint_word[i];
    os << "\n";
  }
  os << "depth = " << cfg.sample_depth << "\n";
  os << "c_f = " << fd(cfg.c_f) << "\n";
  os << "kappa_star = " << fd(cfg.kappa_star) << "\n";
  os << "delta = " << fd(cfg.delta) << "\n";
  os << "c_prime_d = " << fd(cfg.c_prime_d) << "\n";
  os << "lebesgue = " << (cfg.lebesgue ? 1 : 0) << "\n";
  os << "out = " << out_dir << "\n";
  return os.str();
}

}  // namespace fraclab

#pragma once

#include <string>

#include "fraclab/experiments.hpp"

namespace fraclab {

// Parsed run description: subcommand plus the experiment configuration.
// Config files are `key = value` text with `#` comments; unknown keys are
// errors. Rational-valued keys require exact literals ("2/3", "0.25"),
// never truncated decimals for thirds and the like.
struct RunSpec {
  std::string subcommand;
  ExperimentConfig cfg;
  std::string out_dir = ".";

  std::string serialize() const;
};

RunSpec parse_config(const std::string& path);
RunSpec parse_config_text(const std::string& text);

}  // namespace fraclab

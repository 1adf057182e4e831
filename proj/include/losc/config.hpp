#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "losc/ppo.hpp"
#include "losc/scenario.hpp"

namespace losc {

/// Everything a run needs: the scenario, the trainer, benchmark size and seed.
struct Config {
  ScenarioConfig scenario;
  TrainerConfig trainer;
  int episodes = 5000;      // benchmark episodes
  std::uint64_t seed = 1;   // master seed
  std::string checkpoint;   // policy weights for pn-losc

  friend bool operator==(const Config&, const Config&) = default;
};

/// Parses YAML text. Keys absent from the text keep their defaults; unknown
/// keys are an error.
Config parse_config(const std::string& yaml_text);
Config load_config(const std::string& path);

/// Applies "dotted.key=value" overrides; the value is parsed as YAML.
void apply_overrides(Config& cfg, const std::vector<std::string>& overrides);

/// Full YAML dump; parse_config(dump_config(c)) == c.
std::string dump_config(const Config& cfg);

}  // namespace losc

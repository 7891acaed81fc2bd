#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "collapse/engine.hpp"

namespace collapse {

struct RecoveryConfig {
  std::vector<int> checkpoints = {2, 4, 6, 8};
  std::vector<RecoveryBudget> budgets = default_recovery_budgets();
  std::uint64_t source_seed = 0;
};

struct ExperimentConfig {
  std::vector<RunSpec> specs;  // one per seed
  RecoveryConfig recovery;
  double low_alpha = 0.5;      // fixed_low_alpha condition in sweeps
  unsigned threads = 0;
  bool tau_from_mtr = false;   // schedule.tau_source == "mtr"
};

// JSON config; unknown keys and out-of-range values fail with the field name.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration (all defaults), as pretty-printed JSON.
std::string resolved_config_json(const ExperimentConfig& cfg);

// "a..b" inclusive range or a single integer.
std::vector<std::uint64_t> expand_seed_range(const std::string& s);

}  // namespace collapse

#pragma once

#include "ddcsf/environment.hpp"
#include "ddcsf/features.hpp"
#include "ddcsf/policy.hpp"
#include "ddcsf/successor.hpp"
#include "ddcsf/wakesleep.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ddcsf {

inline constexpr const char* kConfigSchema = "ddcsf.config/1";

/// Value grids under the random-walk policy.
struct ValueGridConfig {
  int resolution = 20;
  /// Observations filtered at each probe point before reading V(mu)
  /// (inferred condition).
  int burn_in = 20;
  /// Independent burn-ins averaged per probe point.
  int burn_in_repeats = 4;

  void validate() const;
  bool operator==(const ValueGridConfig&) const = default;
};

struct ExperimentConfig {
  ExperimentConfig() { set_seed(0); }

  EnvironmentSpec environment;
  RewardField reward;
  BasisSpec basis;
  WakeSleepConfig wake_sleep;
  GpiConfig gpi;
  /// Back end for value grids under the random-walk policy.
  SfMethod sf_method = SfMethod::analytic;
  std::vector<Condition> conditions{Condition::latent, Condition::inferred, Condition::observed};
  ValueGridConfig value_grid;
  int export_resolution = 20;
  /// Length of the fresh rollout `filter` uses when no trajectory is given.
  long filter_steps = 5'000;
  /// Empty: DDCSF_OUTPUT_DIR, then the working directory.
  std::string output_dir;
  std::uint64_t seed = 0;

  /// Component seeds are not stored; they are derived from the master seed.
  void set_seed(std::uint64_t master);
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Serialised with the component seeds omitted.
std::string to_json(const ExperimentConfig& config);
/// Throws ConfigError on malformed JSON, a wrong schema, unknown keys or
/// invalid values. Missing keys keep their defaults.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Directory for outputs: explicit, then DDCSF_OUTPUT_DIR, then ".".
std::string resolve_output_dir(const std::string& explicit_dir);

}  // namespace ddcsf

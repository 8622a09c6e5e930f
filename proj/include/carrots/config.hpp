#pragma once

// Experiment configuration: a flat "key = value" file plus overrides.

#include "carrots/carrot_field.hpp"
#include "carrots/inequality.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace carrots {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Environment variable naming the default output directory.
inline constexpr const char* out_dir_env = "CARROTS_OUT_DIR";

struct ExperimentConfig {
  Precision precision = Precision::standard;
  int max_iterations = 2048;
  double escape_radius = 1e8;
  double tolerance = 1e-6;
  double h0 = 2.0;
  double h_min = std::ldexp(1.0, -30);
  int steps_per_halving = 8;
  double tip_floor = std::ldexp(1.0, -30);
  double stick = 0.5;
  int density = 0;  // 0: default_density of the stick
  int level_first = 3;
  int level_last = 12;
  double h_probe = 0.0625;
  int q_max = 7;
  int samples = 200;
  std::uint64_t seed = 1;
  int parallelism = 1;
  std::string out_dir;  // empty: $CARROTS_OUT_DIR, then "carrots-out"

  /// Applies one "key = value" assignment; unknown keys and bad values throw.
  void set(const std::string& key, const std::string& value);
  /// Reads a config file: one assignment per line, '#' starts a comment.
  void load(const std::string& path);
  void validate() const;

  /// Every key in sorted order; load(to_text()) reproduces the config.
  std::map<std::string, std::string> entries() const;
  std::string to_text() const;

  TraceOptions trace_options() const;
  CarrotOptions carrot_options() const;
  int effective_density() const;
  std::string resolved_out_dir() const;
};

}  // namespace carrots

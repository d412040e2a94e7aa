#pragma once

#include "pdav/dynamics.hpp"
#include "pdav/flow_explorer.hpp"
#include "pdav/integrator.hpp"
#include "pdav/reference.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pdav {

/// Malformed or invalid configuration. The message starts with the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigSchemaVersion = 1;

struct SeedSettings {
  SeedSpec saddle;  // angles ignored; see saddle_spec()
  int count = 10;
  double desired_epsilon = 1e-6;
  double desired_varsigma = 1e-7;

  /// The saddle spec with `count` evenly spaced angles.
  SeedSpec saddle_spec() const {
    SeedSpec s = saddle;
    s.angles = evenly_spaced_angles(count);
    return s;
  }
};

struct RunConfig {
  PlantParams plant;
  GainSet gains;
  TrajectoryConfig trajectory = default_maneuver();
  IntegratorConfig integrator{1e-5, 100, 10};
  SeedSettings seeds;
  std::string output_directory = "pdav_out";

  /// FNV-1a of the canonical serialization.
  std::uint64_t hash() const;
  /// Canonical JSON text (sorted keys, every field explicit).
  std::string canonical() const;
};

/// Parses a JSON document. Omitted fields take the defaults above.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// 16 lower-case hex digits.
std::string hash_hex(std::uint64_t h);

}  // namespace pdav

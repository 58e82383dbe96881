#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgf/control.hpp"
#include "tgf/identities.hpp"

namespace tgf::app {

/// Everything a command needs, with defaults for every key. The canonical
/// JSON form (to_json) is what gets hashed and echoed into manifests.
struct RunConfig {
  SimConfig sim;
  int samples = 16;
  std::string out = "out";

  std::string initial_kind = "random";  // random | zero
  double initial_amplitude = 1.0;
  double initial_slope = 1.5;

  std::string target_kind = "random";  // random | zero
  double target_amplitude = 0.5;
  double target_slope = 1.0;
  TrackingNorm tracking = TrackingNorm::l2;

  double lambda = 1e-2;
  double radius = 5.0;
  double control_amplitude = 0.0;  // initial control, 0 = none
  double psi_amplitude = 1.0;      // perturbation direction

  OptimizerOptions optimizer;
  int residual_directions = 64;

  std::vector<double> rhos{1e-1, 1e-2, 1e-3, 1e-4};
  double stability_p = 2.0;
  double epsilon = 1.0;
  std::vector<double> gap_scales{1.0, 0.5, 0.25, 0.125};
  double stop_rho0 = 1.0;
  std::string stop_direction = "random";  // random | initial (psi_n = y0 / |y0|_2)
  std::vector<double> stop_factors{1.0, 0.5, 0.25, 0.125};

  bool bsde = false;
  int bsde_samples = 1000;

  IdentityTolerances identity_tol;
  double g_star_tol = 1e-11;
  double duality_tol = 1e-10;
  double gradient_tol = 1e-4;
  double gradient_rho = 1e-4;
  int triples = 20;
  int g_star_triples = 50;
  int gradient_directions = 3;
  int duality_samples = 8;
  int technical_samples = 100;

  void validate() const;  // throws ConfigError
};

// Plain-text form: '#' or ';' comments, [section] headers, key = value
// lines. Values are numbers, true/false, comma-separated number lists or
// strings (optionally double-quoted). Text starting with '{' is read as JSON.
nlohmann::json parse_config_text(const std::string& text);
nlohmann::json load_config_file(const std::string& path);

RunConfig from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);
// Plain-text rendering of to_json(c); parse_config_text inverts it.
std::string to_text(const RunConfig& c);

// SHA-256 of the canonical JSON, excluding keys that cannot change results
// (run.out, run.workers).
std::string config_hash(const RunConfig& c);

// Independent seed for a named stream under the root seed.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace tgf::app

#pragma once

#include <string>
#include <vector>

#include "simplechar/harness.hpp"

namespace simplechar {

/// One study block of a run configuration.
struct StudySpec {
  std::string type;            ///< scaling | invariance | multiball | counterexample
  std::vector<double> params;  ///< parameter ladder (scaling) or A ladder
  std::vector<double> angles;  ///< rotation angles in radians (invariance)
  std::vector<std::vector<int>> shifts;  ///< whole-cell translations (invariance)
  double R = 64.0;             ///< observation radius (counterexample)
  int placements = 20;         ///< random receiver placements (verify)
};

/// Parsed and validated run configuration. Unknown keys are rejected.
struct RunConfig {
  std::string command;  ///< analyze | solve | verify | study | report
  Preset preset = Preset::Helmholtz;
  double param = 1.0;
  int resolution = 256;
  int n = 2;
  std::string symbol_text;  ///< custom preset only
  double eps = 0.0;
  double r0 = 0.0;
  QuadMode mode = QuadMode::Spectral;
  PoleRoute route = PoleRoute::Generic;
  uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 1;
  bool emit_pieces = false;
  StudySpec study;
};

Preset preset_from_name(const std::string& name);
std::string preset_name(Preset p);

/// Parses the JSON text of a config file; throws ConfigError on malformed
/// JSON, unknown keys, or out-of-range values.
RunConfig parse_runconfig(const std::string& json_text);

Scenario scenario_from_config(const RunConfig& rc);

/// JSON text of a solve report (stable key order, round-trippable numbers).
std::string report_to_json(const SolveReport& rep);

}  // namespace simplechar

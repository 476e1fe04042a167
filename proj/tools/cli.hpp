#pragma once

#include <cstdint>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "ladder/composite.hpp"
#include "ladder/dynamics.hpp"
#include "ladder/metrics.hpp"
#include "ladder/sweeps.hpp"

namespace ladder::cli {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalError = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  std::string integrator = "arrival";  // arrival | modes
  double l2_tolerance = 1e-2;
  double fidelity_tolerance = 2e-2;
  double absorption_threshold = 0.95;
  bool gate_fidelity = true;
  StepControl step;
};

struct RunConfig {
  EmitterParams emitter;
  GatePackets packets;
  QubitEncoding encoding;
  double delta_t = 0;
  std::string method = "analytic";
  GateOptions options;
  OracleConfig oracle;
  std::string sweep_kind = "contour";  // contour | detuning | custom
  SweepSpec sweep;
  CompositePair pair;
  double kappa = 1.0;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  json echo;  // resolved configuration, written next to results
};

// Reads a JSON document (empty object when path is empty) and applies
// KEY=VALUE overrides; keys are dotted paths, values parsed as JSON when
// possible and as strings otherwise.
json load_config(const std::string& path, const std::vector<std::string>& sets);
void apply_set(json& doc, const std::string& assignment);

// Validates the document (unknown keys, types, ranges) and resolves defaults.
RunConfig parse_config(const json& doc);

BackendMethod backend_for(const std::string& method);
SweepMethod sweep_method_for(const std::string& method);

// RFC-4180 field quoting and a matching reader.
std::string csv_field(const std::string& s);
std::string csv_number(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::string& path);

void write_json(const std::string& path, const json& doc);

// Subcommands return the exit code and write into cfg.out_dir.
int cmd_gate(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_oracle_check(const RunConfig& cfg);
int cmd_composite(const RunConfig& cfg);

int run(int argc, char** argv);

}  // namespace ladder::cli

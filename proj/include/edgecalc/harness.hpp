#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgecalc/sweep.hpp"

namespace edgecalc {

/// Thrown for malformed configs; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::string symbol_a;
  std::string symbol_b;
  double s_in = 0.0, s_out = 0.0;     // Sobolev pair
  double s = 0.0, g = 0.0;            // cone-space orders
  double weight_exponent = 0.0;       // nu~ for weight commutation
  double eta = 4.0;                   // frozen eta for non-sweep experiments
  int derivative_direction = 0;
  int n_modes = 8;
  int n_r = 512;
  double half_length = 32.0;
  std::vector<double> sweep;          // ascending positive magnitudes
  int leibniz_n = 3;
  long long seed = 0;
  std::string output = "edgecalc_out.csv";

  // bookkeeping: which keys the config actually set
  std::map<std::string, bool> provided;
  bool has(const std::string& key) const { return provided.count(key) > 0; }
};

/// Strict JSON parse: unknown keys rejected, diagnostics carry the field name.
ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig parse_config_file(const std::string& path);

struct RunResult {
  ExperimentConfig config;
  SweepReport report;            // primary sweep (see csv rows for all)
  bool pass = false;
  std::string detail;            // human-readable summary line
  // every CSV row emitted, in order
  struct CsvRow {
    std::string symbol_a, symbol_b;
    double param = 0.0;
    int leibniz_n = 0;
    int n_r_override = 0;  // nonzero for grid-doubling rows
    double value = 0.0;
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
  };
  std::vector<CsvRow> rows;
};

/// Runs the experiment, writes the CSV, returns the outcome. Deterministic
/// for a fixed config and seed.
RunResult run(const ExperimentConfig& config, int jobs = 1);

/// CSV text for a result (header + rows, 12 significant digits).
std::string csv_text(const RunResult& result);

}  // namespace edgecalc

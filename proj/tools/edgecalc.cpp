#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "edgecalc/acceptance.hpp"
#include "edgecalc/harness.hpp"
#include "edgecalc/sweep.hpp"
#include "edgecalc/symbols.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override, int jobs) {
  edgecalc::ExperimentConfig cfg = edgecalc::parse_config_file(config_path);
  if (!out_override.empty()) cfg.output = out_override;
  const edgecalc::RunResult result = edgecalc::run(cfg, jobs);
  std::cout << (result.pass ? "PASS" : "FAIL") << " " << cfg.experiment << ": " << result.detail
            << "\n";
  if (!cfg.output.empty()) std::cout << "wrote " << cfg.output << "\n";
  return result.pass ? 0 : 1;
}

int cmd_fit(const std::string& input_path) {
  std::ifstream in(input_path);
  if (!in) {
    std::cerr << "cannot open '" << input_path << "'\n";
    return 2;
  }
  std::string header;
  if (!std::getline(in, header)) {
    std::cerr << "empty csv\n";
    return 2;
  }
  // locate param/value columns
  std::vector<std::string> columns;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) columns.push_back(tok);
  }
  int param_col = -1, value_col = -1;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "param") param_col = static_cast<int>(i);
    if (columns[i] == "value") value_col = static_cast<int>(i);
  }
  if (param_col < 0 || value_col < 0) {
    std::cerr << "csv lacks 'param'/'value' columns\n";
    return 2;
  }
  std::vector<edgecalc::SweepRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    if (static_cast<int>(fields.size()) <= std::max(param_col, value_col)) continue;
    rows.push_back({std::stod(fields[static_cast<std::size_t>(param_col)]),
                    std::stod(fields[static_cast<std::size_t>(value_col)])});
  }
  const edgecalc::FitResult fit = edgecalc::fit_exponent(rows);
  std::cout << "exponent " << fit.exponent << " residual " << fit.residual << " rows "
            << fit.used_rows << "\n";
  return 0;
}

int cmd_list_symbols() {
  std::cout << "patterns:\n";
  for (const auto& [pattern, description] : edgecalc::registry_patterns())
    std::cout << "  " << pattern << "  " << description << "\n";
  std::cout << "canonical instances:\n";
  for (const auto& id : edgecalc::registry_canonical_ids()) std::cout << "  " << id << "\n";
  return 0;
}

int cmd_acceptance(int jobs) {
  const auto results = edgecalc::run_acceptance(jobs, std::cout);
  return edgecalc::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgecalc: parameter-dependent operator calculus on the infinite cylinder"};
  app.require_subcommand(1);

  std::string config_path, out_override, fit_input;
  int jobs = edgecalc::default_jobs();

  auto* run_cmd = app.add_subcommand("run", "run one experiment from a JSON config");
  run_cmd->add_option("--config", config_path, "path to the experiment config")->required();
  run_cmd->add_option("--out", out_override, "override the CSV output path");
  run_cmd->add_option("--jobs", jobs, "worker threads (default: EDGECALC_JOBS or hardware)");

  auto* fit_cmd = app.add_subcommand("fit", "fit a log-log exponent from a sweep CSV");
  fit_cmd->add_option("--input", fit_input, "CSV produced by `run`")->required();

  app.add_subcommand("list-symbols", "print the symbol registry");

  auto* acc_cmd = app.add_subcommand("acceptance", "run the full acceptance suite");
  acc_cmd->add_option("--jobs", jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("run")) return cmd_run(config_path, out_override, jobs);
    if (app.got_subcommand("fit")) return cmd_fit(fit_input);
    if (app.got_subcommand("list-symbols")) return cmd_list_symbols();
    if (app.got_subcommand("acceptance")) return cmd_acceptance(jobs);
  } catch (const edgecalc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

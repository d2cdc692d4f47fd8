#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "vidiag/error.hpp"
#include "vidiag_cli/commands.hpp"
#include "vidiag_cli/registry.hpp"

namespace {

using vidiag::cli::RunConfig;

// Raw flag values; applied on top of the run file after parsing.
struct Flags {
  std::optional<std::string> config, input, data, model, out, margins;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> s_draws, m_reps;
  std::optional<double> alpha, tol_rel_obj, eta;
  bool no_khat_reg = false, oracle = false, write_weights = false, write_draws = false;
  std::string demo;
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run file; flags override its keys");
  sub->add_option("--seed", f.seed, "Root seed (required)");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--tol-rel-obj", f.tol_rel_obj, "ADVI relative ELBO tolerance");
  sub->add_option("--eta", f.eta, "ADVI step size");
}

void add_model(CLI::App* sub, Flags& f) {
  std::string names;
  for (const auto& n : vidiag::cli::model_names()) names += (names.empty() ? "" : ", ") + n;
  sub->add_option("--model", f.model, "Built-in model: " + names);
  sub->add_option("--data", f.data, "Regression dataset CSV (x_1..x_K,y)");
}

RunConfig build_config(const std::string& command, const Flags& f) {
  RunConfig cfg;
  cfg.command = command;
  if (f.config) vidiag::cli::apply_run_file(vidiag::cli::load_json_file(*f.config), cfg);
  cfg.command = command;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.input) cfg.input = *f.input;
  if (f.data) cfg.data = *f.data;
  if (f.model) cfg.model = *f.model;
  if (f.s_draws) cfg.s_draws = *f.s_draws;
  if (f.m_reps) {
    cfg.m_reps = *f.m_reps;
    cfg.m_reps_given = true;
  }
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.margins) cfg.margins = split_commas(*f.margins);
  if (f.tol_rel_obj) cfg.vi.tol_rel_obj = *f.tol_rel_obj;
  if (f.eta) cfg.vi.eta = *f.eta;
  if (f.no_khat_reg) cfg.khat_reg = false;
  if (f.oracle) cfg.oracle = true;
  if (f.write_weights) cfg.write_weights = true;
  if (f.write_draws) cfg.write_draws = true;
  if (!f.demo.empty()) cfg.demo = f.demo;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diagnostics for variational inference: PSIS khat and VSBC"};
  app.set_version_flag("--version", std::string("vidiag ") + VIDIAG_VERSION);
  app.require_subcommand(1);
  Flags f;

  auto* psis = app.add_subcommand("psis", "PSIS khat diagnostic on a draws file or a built-in model fit");
  add_common(psis, f);
  add_model(psis, f);
  psis->add_option("--input", f.input, "Draws CSV with log_p, log_q and optional draw columns");
  psis->add_option("--s-draws", f.s_draws, "Draws from q for a model run");
  psis->add_flag("--no-khat-reg", f.no_khat_reg, "Report and smooth with the raw khat");
  psis->add_flag("--write-weights", f.write_weights, "Also write weights.csv");
  psis->add_flag("--write-draws", f.write_draws, "Model runs: also write the draws as draws.csv");
  psis->footer("Exit status: 0 Good/Ok, 1 usage or input error, 2 Bad (khat > 0.7), 3 VI divergence.");

  auto* vsbc = app.add_subcommand("vsbc", "Simulation-based calibration of a VI fit");
  add_common(vsbc, f);
  add_model(vsbc, f);
  vsbc->add_option("--m-reps", f.m_reps, "Replications");
  vsbc->add_option("--alpha", f.alpha, "Test level");
  vsbc->add_option("--margins", f.margins, "Comma-separated quantities to test (default: all)");
  vsbc->add_flag("--oracle", f.oracle, "Use the exact posterior instead of VI (conjugate models)");
  vsbc->footer("Exit status: 0 ok, 1 usage error, 3 more than 20% of replications failed.");

  auto* fit = app.add_subcommand("fit", "Mean-field ADVI fit; writes q.csv, trace.csv and fit.json");
  add_common(fit, f);
  add_model(fit, f);
  fit->footer("Exit status: 0 ok, 1 usage error, 3 divergence (trace.csv is kept).");

  auto* demo = app.add_subcommand("demo", "Desk-scale experiment bundle");
  add_common(demo, f);
  demo->add_option("name", f.demo, "linear-vsbc, linear-stopping, logistic-sweep, schools or horseshoe")->required();
  demo->add_option("--s-draws", f.s_draws, "Draws from q per khat");
  demo->add_option("--m-reps", f.m_reps, "VSBC replications (overrides the demo default)");
  demo->add_flag("--no-khat-reg", f.no_khat_reg, "Use the raw khat");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vidiag::cli::kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = build_config(app.get_subcommands().front()->get_name(), f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return vidiag::cli::kExitUsage;
  }
  return vidiag::cli::run_command(cfg, std::cerr, std::cerr);
}

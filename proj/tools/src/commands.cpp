#include "vidiag_cli/commands.hpp"

#include <ostream>
#include <sstream>

#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"
#include "vidiag_cli/ingest.hpp"
#include "vidiag_cli/registry.hpp"
#include "vidiag_cli/report.hpp"

namespace vidiag::cli {

namespace {

ViConfig resolved_vi(const RunConfig& cfg) {
  ViConfig vi = cfg.vi;
  if (!cfg.vi_seed_given) vi.seed = stream_seed(cfg, kViStream);
  return vi;
}

nlohmann::json base_report(const RunConfig& cfg, const char* kind) {
  nlohmann::json j;
  j["kind"] = kind;
  j["status"] = "ok";
  j["provenance"] = provenance(cfg);
  return j;
}

}  // namespace

CommandResult cmd_psis(const RunConfig& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.out);
  nlohmann::json report = base_report(cfg, "psis");
  DrawBatch batch;
  std::vector<std::string> names;

  if (cfg.input) {
    DrawFile f = read_draws_csv(*cfg.input);
    batch = std::move(f.batch);
    names = std::move(f.names);
    report["source"] = {{"type", "file"}, {"file", cfg.input->filename().string()}};
    report["vi"] = nullptr;
  } else {
    const auto model = make_model(cfg);
    const ViFit fit = advi_fit(*model, resolved_vi(cfg));
    Rng rng = make_rng(stream_seed(cfg, kDrawStream), 0);
    batch = make_draw_batch(*model, fit.q, cfg.s_draws, rng);
    names = model->param_names();
    report["source"] = {{"type", "model"}, {"model", cfg.model}};
    report["vi"] = vi_fit_json(fit);
    if (cfg.write_draws) {
      std::ostringstream text;
      write_draws_csv(text, batch, names);
      write_file_atomic(cfg.out / "draws.csv", text.str());
    }
  }

  if (batch.size() < static_cast<Eigen::Index>(kMinSmoothingDraws)) {
    throw InvalidParameter("too few draws: " + std::to_string(batch.size()) + " given, at least " +
                           std::to_string(kMinSmoothingDraws) + " needed");
  }
  batch.validate();

  const SmoothedWeights w = psis_smooth(log_ratios(batch).values, PsisOptions{cfg.khat_reg});
  report["psis"] = psis_json(w, batch, names);
  write_json(cfg.out / "report.json", report);
  if (cfg.write_weights) write_file_atomic(cfg.out / "weights.csv", weights_csv(w));

  log << "khat " << (w.khat_available() ? format_double(w.khat()) : std::string("n/a")) << " category "
      << to_string(w.category) << (w.constant_ratios ? " (constant ratios)" : "") << '\n';
  return {w.category == Category::Bad ? kExitBad : kExitOk, report};
}

CommandResult cmd_vsbc(const RunConfig& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.out);
  const auto model = make_model(cfg);
  nlohmann::json report = base_report(cfg, "vsbc");
  report["model"] = cfg.model;
  report["oracle"] = cfg.oracle;

  VsbcConfig vc;
  vc.replications = cfg.m_reps;
  vc.alpha = cfg.alpha;
  vc.margins = cfg.margins;
  vc.vi = cfg.vi;
  vc.oracle = cfg.oracle;

  VsbcReport r;
  try {
    r = vsbc_run(*model, vc, stream_seed(cfg, kVsbcStream));
  } catch (const VsbcAborted& e) {
    report["status"] = "aborted";
    report["vsbc"] = {{"replications", e.replications()}, {"failures", e.failures()}};
    write_json(cfg.out / "report.json", report);
    log << "vsbc aborted: " << e.failures() << " of " << e.replications() << " replications failed\n";
    return {kExitDiverged, report};
  }

  report["vsbc"] = vsbc_json(r);
  write_json(cfg.out / "report.json", report);
  write_file_atomic(cfg.out / "pvals.csv", pvals_csv(r));
  for (const auto& m : r.margins) {
    write_file_atomic(cfg.out / ("hist_" + file_stem(m.name) + ".csv"), histogram_csv(m.histogram));
    log << m.name << ": " << to_string(m.skew) << " (KS p " << format_double(m.two_sided.p_value) << ")\n";
  }
  return {kExitOk, report};
}

CommandResult cmd_fit(const RunConfig& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.out);
  const auto model = make_model(cfg);
  nlohmann::json report = base_report(cfg, "fit");
  report["model"] = cfg.model;
  const auto names = model->param_names();

  try {
    const ViFit fit = advi_fit(*model, resolved_vi(cfg));
    report["vi"] = vi_fit_json(fit);
    nlohmann::json q = nlohmann::json::array();
    for (Eigen::Index i = 0; i < fit.q.dim(); ++i) {
      q.push_back({{"name", names[static_cast<std::size_t>(i)]}, {"mu", number(fit.q.mu[i])}, {"omega", number(fit.q.omega[i])}});
    }
    report["q"] = q;
    write_file_atomic(cfg.out / "q.csv", q_csv(fit.q, names));
    write_file_atomic(cfg.out / "trace.csv", trace_csv(fit.trace));
    write_json(cfg.out / "fit.json", report);
    log << "fit " << (fit.converged ? "converged" : "reached max_iters") << " after " << fit.iterations << " iterations\n";
    return {kExitOk, report};
  } catch (const OptimizerDiverged& e) {
    report["status"] = "diverged";
    report["vi"] = {{"iterations", e.trace().empty() ? 0 : e.trace().back().iteration},
                    {"converged", false},
                    {"final_elbo", nullptr},
                    {"evaluations", e.trace().size()}};
    report["q"] = nullptr;
    report["message"] = e.what();
    write_file_atomic(cfg.out / "trace.csv", trace_csv(e.trace()));
    write_json(cfg.out / "fit.json", report);
    log << "fit diverged: " << e.what() << '\n';
    return {kExitDiverged, report};
  }
}

int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    cfg.validate();
    if (cfg.command == "psis") return cmd_psis(cfg, log).exit_code;
    if (cfg.command == "vsbc") return cmd_vsbc(cfg, log).exit_code;
    if (cfg.command == "fit") return cmd_fit(cfg, log).exit_code;
    if (cfg.command == "demo") return cmd_demo(cfg, log).exit_code;
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitUsage;
  } catch (const OptimizerDiverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const VsbcAborted& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace vidiag::cli

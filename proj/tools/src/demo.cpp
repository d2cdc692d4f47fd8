#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "vidiag/csv.hpp"
#include "vidiag/error.hpp"
#include "vidiag/reference.hpp"
#include "vidiag_cli/commands.hpp"
#include "vidiag_cli/report.hpp"

namespace vidiag::cli {

namespace {

namespace fs = std::filesystem;

struct DemoOutput {
  int exit_code = kExitOk;
  nlohmann::json summary;
  std::string expected;  // README text
  std::string observed;
};

RunConfig sub_config(const RunConfig& root, const std::string& command, const std::string& model, fs::path out,
                     std::uint64_t seed) {
  RunConfig c = root;
  c.command = command;
  c.model = model;
  c.model_options = nlohmann::json::object();
  c.input.reset();
  c.data.reset();
  c.out = std::move(out);
  c.seed = seed;
  c.vi_seed_given = false;
  c.write_weights = false;
  c.write_draws = false;
  c.oracle = false;
  c.demo.clear();
  return c;
}

std::uint64_t demo_seed(const RunConfig& root, std::uint64_t index) { return derive_seed(root.seed.value(), 1000 + index); }

std::size_t reps(const RunConfig& root, std::size_t fallback) { return root.m_reps_given ? root.m_reps : fallback; }

std::string two_digits(int i) { return (i < 10 ? "0" : "") + std::to_string(i); }

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double khat_of(const nlohmann::json& report) {
  const auto& k = report.at("psis").at("khat");
  return k.is_null() ? std::nan("") : k.get<double>();
}

// Skew per margin of a VSBC report, empty when it aborted.
nlohmann::json skews(const CommandResult& r) {
  nlohmann::json out = nlohmann::json::object();
  if (r.report.at("status") != "ok") return out;
  for (const auto& m : r.report.at("vsbc").at("margins")) out[m.at("name").get<std::string>()] = m.at("skew");
  return out;
}

std::string skew_lines(const nlohmann::json& s) {
  std::string text;
  for (const auto& [name, skew] : s.items()) text += "- " + name + ": " + skew.get<std::string>() + "\n";
  return text.empty() ? "- VSBC aborted (see report.json)\n" : text;
}

DemoOutput demo_linear_vsbc(const RunConfig& root, const fs::path& dir, std::ostream& log) {
  RunConfig c = sub_config(root, "vsbc", "linear-regression", dir, demo_seed(root, 0));
  c.model_options = {{"n", 500}, {"k", 5}};
  c.m_reps = reps(root, 300);
  c.margins = {"beta_1", "beta_2", "log_sigma"};
  c.vi.tol_rel_obj = 1e-4;
  c.vi.eta = 0.05;
  log << "linear-vsbc: " << c.m_reps << " replications\n";
  const CommandResult r = cmd_vsbc(c, log);

  DemoOutput d;
  d.exit_code = r.exit_code;
  d.summary = {{"skew", skews(r)}, {"replications", c.m_reps}};
  d.expected =
      "VSBC for Bayesian linear regression (n = 500, K = 5) with mean-field ADVI.\n\n"
      "Expected: the calibration probabilities of log_sigma are right-skewed (VI over-estimates\n"
      "sigma in most replications); the coefficient margins are close to symmetric.\n\n"
      "Files: report.json, pvals.csv, hist_<margin>.csv.\n";
  d.observed = skew_lines(d.summary["skew"]);
  return d;
}

DemoOutput demo_linear_stopping(const RunConfig& root, const fs::path& dir, std::ostream& log) {
  const std::vector<double> tols{1e-2, 1e-3, 1e-4, 1e-5};
  constexpr int kSeeds = 20;
  std::ostringstream csv;
  write_csv_header(csv, {"seed", "tol_rel_obj", "iterations", "converged", "khat_raw", "khat_reg"});
  std::map<double, std::vector<double>> khats;
  std::vector<double> loose, tight;
  log << "linear-stopping: " << kSeeds << " seeds x " << tols.size() << " tolerances\n";
  for (int s = 0; s < kSeeds; ++s) {
    Rng data_rng = make_rng(demo_seed(root, static_cast<std::uint64_t>(s)), kDataStream);
    const Eigen::VectorXd beta = standard_normal_vector(data_rng, 10);
    const auto model = linear_regression(1000, 10, beta, 2.0, data_rng);
    for (double tol : tols) {
      ViConfig vi = root.vi;
      vi.tol_rel_obj = tol;
      vi.eta = 1.0;
      vi.seed = derive_seed(demo_seed(root, static_cast<std::uint64_t>(s)), kViStream);
      const ViFit fit = advi_fit(*model, vi);
      Rng draw_rng = make_rng(demo_seed(root, static_cast<std::uint64_t>(s)), kDrawStream);
      const DrawBatch b = make_draw_batch(*model, fit.q, root.s_draws, draw_rng);
      const SmoothedWeights w = psis_smooth(log_ratios(b).values, PsisOptions{root.khat_reg});
      khats[tol].push_back(w.khat());
      if (tol == tols.front()) loose.push_back(w.khat());
      if (tol == tols.back()) tight.push_back(w.khat());
      write_csv_row(csv, {static_cast<double>(s), tol, static_cast<double>(fit.iterations), fit.converged ? 1.0 : 0.0,
                          w.khat_raw, w.khat_reg});
    }
  }
  write_file_atomic(dir / "stopping.csv", csv.str());

  int larger = 0;
  for (std::size_t i = 0; i < loose.size(); ++i) larger += loose[i] > tight[i];
  DemoOutput d;
  nlohmann::json med = nlohmann::json::array();
  for (double tol : tols) med.push_back({{"tol_rel_obj", tol}, {"median_khat", number(median(khats[tol]))}});
  d.summary = {{"median_khat", med}, {"seeds", kSeeds}, {"loose_above_tight", larger}};
  d.expected =
      "PSIS khat for linear regression (n = 1000, K = 10, sigma = 2) as a function of the\n"
      "ADVI relative-tolerance stopping rule, 20 seeds, step size 1.\n\n"
      "Expected: khat at tol 1e-2 exceeds khat at tol 1e-5 in a majority of seeds. khat drops\n"
      "as the tolerance tightens and levels off once the fit has converged.\n\nFiles: stopping.csv.\n";
  d.observed = "- khat(1e-2) > khat(1e-5) in " + std::to_string(larger) + " of " + std::to_string(kSeeds) + " seeds\n";
  for (const auto& row : med) {
    d.observed += "- median khat at tol " + format_double(row["tol_rel_obj"].get<double>()) + ": " + row["median_khat"].dump() + "\n";
  }
  return d;
}

DemoOutput demo_logistic_sweep(const RunConfig& root, const fs::path& dir, std::ostream& log) {
  const std::vector<double> rhos{0.0, 0.5, 0.9, 0.99};
  constexpr int kReps = 10;
  std::ostringstream csv;
  write_csv_header(csv, {"rho", "rep", "khat", "lpd_vi", "lpd_psis", "lpd_reference"});
  nlohmann::json table = nlohmann::json::array();
  log << "logistic-sweep: " << rhos.size() << " correlations x " << kReps << " replications\n";
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    const double rho = rhos[i];
    std::vector<double> kh, disc_vi, disc_psis;
    for (int r = 0; r < kReps; ++r) {
      const std::uint64_t seed = demo_seed(root, 100 * i + static_cast<std::uint64_t>(r));
      Rng rng = make_rng(seed, kDataStream);
      const Eigen::VectorXd beta = Eigen::VectorXd::Ones(2);
      const auto model = logistic_regression(100, 2, rho, beta, rng);
      RegressionData test{correlated_design(1000, 2, rho, rng), {}};
      test.y = simulate_logistic_response(test.x, beta, rng);
      ViConfig vi = root.vi;
      vi.tol_rel_obj = 1e-4;
      vi.seed = derive_seed(seed, kViStream);
      const ViFit fit = advi_fit(*model, vi);
      Rng draw_rng = make_rng(seed, kDrawStream);
      const DrawBatch b = make_draw_batch(*model, fit.q, root.s_draws, draw_rng);
      const SmoothedWeights w = psis_smooth(log_ratios(b).values, PsisOptions{root.khat_reg});
      Rng mcmc_rng = make_rng(seed, kReferenceStream);
      const McmcChain chain = metropolis_sample(*model, 20000, 5000, mcmc_rng);
      const double lpd_vi = logistic_log_predictive_density(b.draws, {}, test);
      const double lpd_psis = logistic_log_predictive_density(b.draws, w.weights, test);
      const double lpd_ref = logistic_log_predictive_density(chain.draws, {}, test);
      write_csv_row(csv, {rho, static_cast<double>(r), w.khat(), lpd_vi, lpd_psis, lpd_ref});
      kh.push_back(w.khat());
      disc_vi.push_back(std::abs(lpd_vi - lpd_ref));
      disc_psis.push_back(std::abs(lpd_psis - lpd_ref));
    }
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    table.push_back({{"rho", rho},
                     {"mean_khat", number(mean(kh))},
                     {"mean_lpd_discrepancy_vi", number(mean(disc_vi))},
                     {"mean_lpd_discrepancy_psis", number(mean(disc_psis))}});
  }
  write_file_atomic(dir / "sweep.csv", csv.str());

  bool monotone = true;
  for (std::size_t i = 2; i < table.size(); ++i) {
    monotone = monotone && table[i]["mean_khat"].get<double>() > table[i - 1]["mean_khat"].get<double>();
  }
  DemoOutput d;
  d.summary = {{"table", table}, {"monotone_from_rho_0.5", monotone}};
  d.expected =
      "Logistic regression (n = 100, K = 2, beta = (1, 1)) with correlated design, rho in\n"
      "{0, 0.5, 0.9, 0.99}, 10 replications each, ADVI tol 1e-4. The reference is a random-walk\n"
      "Metropolis chain; discrepancy is |lpd(VI) - lpd(reference)| on 1000 test points.\n\n"
      "Expected: mean khat increases with rho from 0.5 upward (not necessarily near 0), and\n"
      "the discrepancy grows sharply once khat passes 0.7.\n\nFiles: sweep.csv.\n";
  for (const auto& row : table) {
    d.observed += "- rho " + row["rho"].dump() + ": mean khat " + row["mean_khat"].dump() + ", discrepancy " +
                  row["mean_lpd_discrepancy_vi"].dump() + "\n";
  }
  return d;
}

// khat over matched seeds for the models in `models`, one PSIS report per run.
nlohmann::json khat_runs(const RunConfig& root, const fs::path& dir, const std::vector<std::string>& models,
                         const std::function<void(RunConfig&)>& tweak, int seeds, std::ostream& log) {
  std::ostringstream csv;
  std::vector<std::string> header{"seed"};
  header.insert(header.end(), models.begin(), models.end());
  write_csv_header(csv, header);
  nlohmann::json out = nlohmann::json::object();
  for (const auto& m : models) out[m] = nlohmann::json::array();
  std::ostringstream quiet;
  for (int s = 0; s < seeds; ++s) {
    std::vector<double> row{static_cast<double>(s)};
    for (const auto& m : models) {
      RunConfig c = sub_config(root, "psis", m, dir / m / ("seed_" + two_digits(s)), demo_seed(root, static_cast<std::uint64_t>(s)));
      tweak(c);
      const CommandResult r = cmd_psis(c, quiet);
      row.push_back(khat_of(r.report));
      out[m].push_back(number(row.back()));
    }
    write_csv_row(csv, row);
  }
  log << "  khat over " << seeds << " seeds written to khat.csv\n";
  write_file_atomic(dir / "khat.csv", csv.str());
  return out;
}

DemoOutput demo_schools(const RunConfig& root, const fs::path& dir, std::ostream& log) {
  const std::vector<std::string> models{"eight-schools-centered", "eight-schools-noncentered"};
  auto tweak = [](RunConfig& c) {
    c.vi.eta = 1.0;
    c.vi.tol_rel_obj = 1e-3;
  };
  log << "schools: khat\n";
  const nlohmann::json kh = khat_runs(root, dir, models, tweak, 10, log);
  int centered_higher = 0, centered_bad = 0;
  for (std::size_t s = 0; s < kh[models[0]].size(); ++s) {
    const auto& c = kh[models[0]][s];
    const auto& n = kh[models[1]][s];
    centered_higher += (!c.is_null() && !n.is_null() && c.get<double>() > n.get<double>());
    centered_bad += (!c.is_null() && c.get<double>() > 0.7);
  }

  DemoOutput d;
  nlohmann::json vsbc = nlohmann::json::object();
  for (const auto& m : models) {
    RunConfig c = sub_config(root, "vsbc", m, dir / ("vsbc-" + m.substr(m.rfind('-') + 1)), demo_seed(root, 50));
    tweak(c);
    c.m_reps = reps(root, 300);
    c.margins = {"log_tau"};
    log << "schools: VSBC " << m << ", " << c.m_reps << " replications\n";
    const CommandResult r = cmd_vsbc(c, log);
    d.exit_code = std::max(d.exit_code, r.exit_code);
    vsbc[m] = skews(r);
  }
  d.summary = {{"khat", kh}, {"centered_above_noncentered", centered_higher}, {"centered_above_0.7", centered_bad},
               {"vsbc_skew", vsbc}};
  d.expected =
      "Eight schools, centered and non-centered parametrizations, ADVI with step size 1 and\n"
      "tol 1e-3.\n\n"
      "Expected: the joint khat of the centered fit exceeds 0.7 and exceeds the non-centered\n"
      "khat on matched seeds. VSBC on log_tau is right-skewed for the centered form and\n"
      "left-skewed (tau under-estimated) for the non-centered form.\n\n"
      "Files: khat.csv, <model>/seed_XX/report.json, vsbc-centered/, vsbc-noncentered/.\n";
  d.observed = "- centered khat > non-centered khat in " + std::to_string(centered_higher) + " of 10 seeds\n" +
               "- centered khat > 0.7 in " + std::to_string(centered_bad) + " of 10 seeds\n";
  for (const auto& [m, s] : vsbc.items()) {
    for (const auto& [name, skew] : s.items()) d.observed += "- VSBC " + m + " " + name + ": " + skew.get<std::string>() + "\n";
  }
  return d;
}

DemoOutput demo_horseshoe(const RunConfig& root, const fs::path& dir, std::ostream& log) {
  log << "horseshoe: khat\n";
  const nlohmann::json kh = khat_runs(root, dir, {"horseshoe"}, [](RunConfig&) {}, 10, log);
  int bad = 0;
  for (const auto& k : kh["horseshoe"]) bad += (!k.is_null() && k.get<double>() > 0.7);

  RunConfig c = sub_config(root, "vsbc", "horseshoe", dir / "vsbc", demo_seed(root, 50));
  c.m_reps = reps(root, 300);
  c.margins = {"log_tau", "log_lambda_1"};
  log << "horseshoe: VSBC, " << c.m_reps << " replications\n";
  const CommandResult r = cmd_vsbc(c, log);

  DemoOutput d;
  d.exit_code = r.exit_code;
  d.summary = {{"khat", kh["horseshoe"]}, {"above_0.7", bad}, {"vsbc_skew", skews(r)}};
  d.expected =
      "Sparse logistic regression (n = 70, D = 100, 3 non-zero coefficients) with the\n"
      "regularized horseshoe prior.\n\n"
      "Expected: khat above 0.7 in most seeds, so the VI posterior is not reliable as a\n"
      "whole. VSBC flags log_tau as right-skewed. A left skew on log_lambda_1 may or may not\n"
      "appear at this replication budget.\n\n"
      "Files: khat.csv, horseshoe/seed_XX/report.json, vsbc/.\n";
  d.observed = "- khat > 0.7 in " + std::to_string(bad) + " of 10 seeds\n" + skew_lines(d.summary["vsbc_skew"]);
  return d;
}

}  // namespace

std::vector<std::string> demo_names() { return {"linear-vsbc", "linear-stopping", "logistic-sweep", "schools", "horseshoe"}; }

CommandResult cmd_demo(const RunConfig& cfg, std::ostream& log) {
  const fs::path dir = cfg.out / cfg.demo;
  fs::create_directories(dir);
  DemoOutput d;
  if (cfg.demo == "linear-vsbc") {
    d = demo_linear_vsbc(cfg, dir, log);
  } else if (cfg.demo == "linear-stopping") {
    d = demo_linear_stopping(cfg, dir, log);
  } else if (cfg.demo == "logistic-sweep") {
    d = demo_logistic_sweep(cfg, dir, log);
  } else if (cfg.demo == "schools") {
    d = demo_schools(cfg, dir, log);
  } else if (cfg.demo == "horseshoe") {
    d = demo_horseshoe(cfg, dir, log);
  } else {
    std::string known;
    for (const auto& n : demo_names()) known += (known.empty() ? "" : ", ") + n;
    throw InvalidParameter("unknown demo '" + cfg.demo + "'; known demos: " + known);
  }

  nlohmann::json report;
  report["kind"] = "demo";
  report["status"] = d.exit_code == kExitOk ? "ok" : "aborted";
  report["provenance"] = provenance(cfg);
  report["demo"] = cfg.demo;
  report["summary"] = d.summary;
  write_json(dir / "summary.json", report);
  write_file_atomic(dir / "README.md", "# " + cfg.demo + "\n\n" + d.expected + "\n## Observed\n\n" + d.observed);
  log << d.observed;
  return {d.exit_code, report};
}

}  // namespace vidiag::cli

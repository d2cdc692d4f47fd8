#include "vidiag_cli/run_config.hpp"

#include <fstream>

#include "vidiag/error.hpp"
#include "vidiag/random.hpp"

namespace vidiag::cli {

namespace {

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidParameter("run file key '" + key + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!seed) throw InvalidParameter("a seed is required (--seed or \"seed\" in the run file)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
  if (m_reps < 2) throw InvalidParameter("at least 2 VSBC replications are required");
  if (input && !std::filesystem::is_regular_file(*input)) {
    throw InvalidParameter("input file not found: " + input->string());
  }
  if (data && !std::filesystem::is_regular_file(*data)) {
    throw InvalidParameter("data file not found: " + data->string());
  }
  if (std::filesystem::exists(out) && !std::filesystem::is_directory(out)) {
    throw InvalidParameter("output path is not a directory: " + out.string());
  }
  vi.validate();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  if (!model.empty()) j["model"] = model;
  if (!model_options.empty()) j["model_options"] = model_options;
  if (input) j["input"] = input->filename().string();
  if (data) j["data"] = data->filename().string();
  if (!demo.empty()) j["demo"] = demo;
  j["s_draws"] = s_draws;
  j["m_reps"] = m_reps;
  j["alpha"] = alpha;
  j["margins"] = margins;
  j["khat_reg"] = khat_reg;
  j["oracle"] = oracle;
  j["write_weights"] = write_weights;
  j["write_draws"] = write_draws;
  j["vi"] = {{"tol_rel_obj", vi.tol_rel_obj}, {"eta", vi.eta},           {"n_mc_grad", vi.n_mc_grad},
             {"n_mc_elbo", vi.n_mc_elbo},     {"max_iters", vi.max_iters}, {"eval_every", vi.eval_every},
             {"seed", vi_seed_given || !seed ? vi.seed : stream_seed(*this, kViStream)}};
  return j;
}

void apply_run_file(const nlohmann::json& file, RunConfig& cfg) {
  if (!file.is_object()) throw InvalidParameter("run file must hold a JSON object");
  for (const auto& [key, value] : file.items()) {
    if (key == "seed") {
      cfg.seed = get_as<std::uint64_t>(value, key);
    } else if (key == "out") {
      cfg.out = get_as<std::string>(value, key);
    } else if (key == "input") {
      cfg.input = get_as<std::string>(value, key);
    } else if (key == "data") {
      cfg.data = get_as<std::string>(value, key);
    } else if (key == "model") {
      cfg.model = get_as<std::string>(value, key);
    } else if (key == "model_options") {
      if (!value.is_object()) throw InvalidParameter("run file key 'model_options' must be an object");
      cfg.model_options = value;
    } else if (key == "s_draws") {
      cfg.s_draws = get_as<std::size_t>(value, key);
    } else if (key == "m_reps") {
      cfg.m_reps = get_as<std::size_t>(value, key);
      cfg.m_reps_given = true;
    } else if (key == "alpha") {
      cfg.alpha = get_as<double>(value, key);
    } else if (key == "margins") {
      cfg.margins = get_as<std::vector<std::string>>(value, key);
    } else if (key == "khat_reg") {
      cfg.khat_reg = get_as<bool>(value, key);
    } else if (key == "oracle") {
      cfg.oracle = get_as<bool>(value, key);
    } else if (key == "write_weights") {
      cfg.write_weights = get_as<bool>(value, key);
    } else if (key == "write_draws") {
      cfg.write_draws = get_as<bool>(value, key);
    } else if (key == "vi") {
      if (!value.is_object()) throw InvalidParameter("run file key 'vi' must be an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "tol_rel_obj") {
          cfg.vi.tol_rel_obj = get_as<double>(v, k);
        } else if (k == "eta") {
          cfg.vi.eta = get_as<double>(v, k);
        } else if (k == "n_mc_grad") {
          cfg.vi.n_mc_grad = get_as<int>(v, k);
        } else if (k == "n_mc_elbo") {
          cfg.vi.n_mc_elbo = get_as<int>(v, k);
        } else if (k == "max_iters") {
          cfg.vi.max_iters = get_as<int>(v, k);
        } else if (k == "eval_every") {
          cfg.vi.eval_every = get_as<int>(v, k);
        } else if (k == "seed") {
          cfg.vi.seed = get_as<std::uint64_t>(v, k);
          cfg.vi_seed_given = true;
        } else {
          throw InvalidParameter("unknown key 'vi." + k + "' in run file");
        }
      }
    } else {
      throw InvalidParameter("unknown key '" + key + "' in run file");
    }
  }
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open run file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParameter("run file is not valid JSON: " + std::string(e.what()));
  }
}

std::uint64_t stream_seed(const RunConfig& cfg, std::uint64_t stream) { return derive_seed(cfg.seed.value(), stream); }

}  // namespace vidiag::cli

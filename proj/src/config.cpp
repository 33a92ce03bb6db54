#include "forgecast/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>

namespace forgecast {

using nlohmann::json;

const std::vector<std::string> kRegisteredMethods = {
    "stationary", "window", "grid_search_exp", "state_space", "grad_exp", "grad_mixed_decay"};

namespace {

void parse_optimizer(const json& j, OptimizerConfig& opt) {
  opt.step_size = j.value("step_size", opt.step_size);
  opt.momentum = j.value("momentum", opt.momentum);
  opt.epochs = j.value("epochs", opt.epochs);
  opt.batch_size = j.value("batch_size", opt.batch_size);
  opt.restarts = j.value("restarts", opt.restarts);
  opt.init_low = j.value("init_low", opt.init_low);
  opt.init_high = j.value("init_high", opt.init_high);
  opt.validate();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (experiment != "synthetic" && experiment != "real") {
    throw std::invalid_argument("config: experiment must be 'synthetic' or 'real'");
  }
  if (methods.empty()) {
    throw std::invalid_argument("config: no methods listed");
  }
  for (const MethodSpec& m : methods) {
    if (std::find(kRegisteredMethods.begin(), kRegisteredMethods.end(), m.name) ==
        kRegisteredMethods.end()) {
      throw std::invalid_argument("config: unknown method '" + m.name + "'");
    }
  }
  if (ridge_grid.empty()) {
    throw std::invalid_argument("config: empty ridge grid");
  }
  for (double v : ridge_grid) {
    if (!(v >= 0.0)) throw std::invalid_argument("config: ridge penalties must be >= 0");
  }
  if (experiment == "synthetic") {
    if (synthetic.runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    SeriesSpec probe{synthetic.kinds.empty() ? DgpKind::Stat : synthetic.kinds.front(),
                     synthetic.length, synthetic.noise_sd};
    probe.validate();
    if (synthetic.kinds.empty()) {
      throw std::invalid_argument("config: no synthetic dataset kinds listed");
    }
    if (synthetic.lags < 1 || synthetic.train_end <= synthetic.lags) {
      throw std::invalid_argument("config: train_end must exceed the lag depth");
    }
  } else {
    if (real.csv_path.empty()) throw std::invalid_argument("config: real.csv_path missing");
    if (real.task != "volatility" && real.task != "factor" && real.task != "raw_lags") {
      throw std::invalid_argument("config: unknown real task '" + real.task + "'");
    }
    if (real.series_columns.empty()) {
      throw std::invalid_argument("config: real.series_columns missing");
    }
    if (real.lags < 1) throw std::invalid_argument("config: real.lags must be >= 1");
    if (real.cv.initial_train_days < 1 || real.cv.valid_days < 1 || real.cv.test_days < 1 ||
        real.cv.step_days < 1) {
      throw std::invalid_argument("config: expanding cv window sizes must be >= 1");
    }
  }
  if (window_grid_count < 1) throw std::invalid_argument("config: window_grid_count >= 1");
  if (!(grid_tail_weight > 0.0 && grid_tail_weight < 1.0)) {
    throw std::invalid_argument("config: grid_tail_weight must lie in (0, 1)");
  }
  if (state_space_ratios.empty()) {
    throw std::invalid_argument("config: empty state_space_ratios");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("config: alpha must lie in (0, 1)");
  }
  optimizer.validate();
}

ExperimentConfig config_from_json_text(const std::string& text) {
  const json root = json::parse(text);
  ExperimentConfig cfg;

  cfg.experiment = root.value("experiment", cfg.experiment);
  cfg.output_dir = root.value("output_dir", cfg.output_dir);
  cfg.base_seed = root.value("base_seed", cfg.base_seed);
  cfg.parallelism = root.value("parallelism", cfg.parallelism);
  cfg.emit_traces = root.value("emit_traces", cfg.emit_traces);
  cfg.alpha = root.value("alpha", cfg.alpha);
  cfg.window_grid_count = root.value("window_grid_count", cfg.window_grid_count);
  cfg.grid_tail_weight = root.value("grid_tail_weight", cfg.grid_tail_weight);

  if (root.contains("emit_weights")) {
    const std::string mode = root["emit_weights"].get<std::string>();
    if (mode == "none") cfg.emit_weights = WeightsDump::None;
    else if (mode == "grad") cfg.emit_weights = WeightsDump::Grad;
    else if (mode == "all") cfg.emit_weights = WeightsDump::All;
    else throw std::invalid_argument("config: emit_weights must be none|grad|all");
  }
  if (root.contains("hessian_mode")) {
    cfg.hessian_mode = hessian_mode_from_string(root["hessian_mode"].get<std::string>());
  }
  if (root.contains("ridge_grid")) {
    cfg.ridge_grid = root["ridge_grid"].get<std::vector<double>>();
  }
  if (root.contains("state_space_ratios")) {
    cfg.state_space_ratios = root["state_space_ratios"].get<std::vector<double>>();
  }
  if (root.contains("optimizer")) {
    parse_optimizer(root["optimizer"], cfg.optimizer);
  }

  if (root.contains("methods")) {
    cfg.methods.clear();
    for (const json& item : root["methods"]) {
      MethodSpec spec;
      spec.optimizer = cfg.optimizer;
      if (item.is_string()) {
        spec.name = item.get<std::string>();
      } else {
        spec.name = item.at("name").get<std::string>();
        if (item.contains("optimizer")) parse_optimizer(item["optimizer"], spec.optimizer);
      }
      cfg.methods.push_back(std::move(spec));
    }
  }

  if (root.contains("synthetic")) {
    const json& s = root["synthetic"];
    if (s.contains("kinds")) {
      cfg.synthetic.kinds.clear();
      for (const json& k : s["kinds"]) {
        cfg.synthetic.kinds.push_back(dgp_from_string(k.get<std::string>()));
      }
    }
    cfg.synthetic.runs = s.value("runs", cfg.synthetic.runs);
    cfg.synthetic.length = s.value("length", cfg.synthetic.length);
    cfg.synthetic.noise_sd = s.value("noise_sd", cfg.synthetic.noise_sd);
    cfg.synthetic.train_end = s.value("train_end", cfg.synthetic.train_end);
    cfg.synthetic.valid_len = s.value("valid_len", cfg.synthetic.valid_len);
    cfg.synthetic.test_len = s.value("test_len", cfg.synthetic.test_len);
    cfg.synthetic.lags = s.value("lags", cfg.synthetic.lags);
  }

  if (root.contains("real")) {
    const json& r = root["real"];
    cfg.real.csv_path = r.value("csv_path", cfg.real.csv_path);
    cfg.real.task = r.value("task", cfg.real.task);
    cfg.real.lags = r.value("lags", cfg.real.lags);
    cfg.real.date_column = r.value("date_column", cfg.real.date_column);
    if (r.contains("series_columns")) {
      cfg.real.series_columns = r["series_columns"].get<std::vector<std::string>>();
    }
    if (r.contains("factor_columns")) {
      const json& f = r["factor_columns"];
      cfg.real.factors.mr = f.value("mr", cfg.real.factors.mr);
      cfg.real.factors.sb = f.value("sb", cfg.real.factors.sb);
      cfg.real.factors.hl = f.value("hl", cfg.real.factors.hl);
      cfg.real.factors.rf = f.value("rf", cfg.real.factors.rf);
    }
    if (r.contains("cv")) {
      const json& c = r["cv"];
      cfg.real.cv.initial_train_days = c.value("initial_train_days", cfg.real.cv.initial_train_days);
      cfg.real.cv.valid_days = c.value("valid_days", cfg.real.cv.valid_days);
      cfg.real.cv.test_days = c.value("test_days", cfg.real.cv.test_days);
      cfg.real.cv.step_days = c.value("step_days", cfg.real.cv.step_days);
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json_text(text);
}

}  // namespace forgecast

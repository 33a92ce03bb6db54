#include "forgecast/harness.hpp"

#include "forgecast/threading.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace forgecast {

namespace {

double segment_mse(const Dataset& data, Index begin, Index end, const Vector& theta) {
  const auto X = data.features().middleRows(begin, end - begin);
  const auto y = data.labels().segment(begin, end - begin);
  return (y - X * theta).squaredNorm() / static_cast<double>(end - begin);
}

std::string format_eta(const Vector& eta) {
  std::ostringstream oss;
  oss << "eta=[";
  for (Index i = 0; i < eta.size(); ++i) {
    if (i > 0) oss << ';';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", eta[i]);
    oss << buf;
  }
  oss << ']';
  return oss.str();
}

std::vector<double> sorted_ridge_grid(const ExperimentConfig& cfg) {
  std::vector<double> grid = cfg.ridge_grid;
  std::sort(grid.begin(), grid.end());  // ascending: ties keep the smallest penalty
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

MethodOutput run_baseline(const MethodSpec& method, const Dataset& data, const SplitSpec& split,
                          const ExperimentConfig& cfg) {
  const std::vector<double> grid = sorted_ridge_grid(cfg);
  const std::vector<Index> windows =
      method.name == "stationary" ? std::vector<Index>{}
                                  : window_grid(split.train_end, cfg.window_grid_count);

  MethodOutput out;
  bool found = false;
  double best_mse = std::numeric_limits<double>::infinity();
  std::string last_error;
  for (double penalty : grid) {
    SolverConfig solver{penalty, cfg.hessian_mode};
    try {
      BaselineFit fit;
      if (method.name == "stationary") {
        fit = fit_stationary(data, split, solver);
      } else if (method.name == "window") {
        fit = fit_window(data, split, solver, windows);
      } else {
        fit = fit_grid_exp(data, split, solver, windows, cfg.grid_tail_weight);
      }
      if (fit.valid_mse < best_mse) {
        best_mse = fit.valid_mse;
        out.test_mse = segment_mse(data, split.valid_end, split.test_end, fit.final_model.theta);
        out.chosen_ridge = penalty;
        if (method.name == "window") {
          out.window = static_cast<Index>(fit.chosen);
          out.detail = "window=" + std::to_string(static_cast<long long>(fit.chosen));
        } else if (method.name == "grid_search_exp") {
          char buf[48];
          std::snprintf(buf, sizeof buf, "eta1=%.6g", fit.chosen);
          out.detail = buf;
          out.learned = ForgettingParams::exponential(fit.chosen);
        }
        found = true;
      }
    } catch (const SingularMatrixError& e) {
      last_error = e.what();
    }
  }
  if (!found) {
    throw SingularMatrixError("method " + method.name +
                              ": every ridge candidate failed (last: " + last_error + ")");
  }
  out.valid_mse = best_mse;
  return out;
}

MethodOutput run_state_space(const Dataset& data, const SplitSpec& split,
                             const ExperimentConfig& cfg) {
  std::vector<StateSpaceConfig> grid;
  grid.reserve(cfg.state_space_ratios.size());
  for (double ratio : cfg.state_space_ratios) {
    grid.push_back(StateSpaceConfig{1.0, ratio, 1e6});
  }
  const KalmanFit fit = kalman_fit_predict(data, split, grid);
  const auto y = data.labels().segment(split.valid_end, split.test_size());

  MethodOutput out;
  out.test_mse =
      (y - fit.test_predictions).squaredNorm() / static_cast<double>(split.test_size());
  out.valid_mse = fit.valid_mse;
  out.chosen_ridge = std::numeric_limits<double>::quiet_NaN();
  char buf[48];
  std::snprintf(buf, sizeof buf, "q=%.6g", fit.chosen.state_var);
  out.detail = buf;
  return out;
}

MethodOutput run_gradient_method(const MethodSpec& method, const Dataset& data,
                                 const SplitSpec& split, const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
  const MechanismKind kind = method.name == "grad_exp" ? MechanismKind::Exponential
                                                       : MechanismKind::MixedDecay;
  const std::vector<double> grid = sorted_ridge_grid(cfg);

  MethodOutput out;
  bool found = false;
  double best_mse = std::numeric_limits<double>::infinity();
  std::string last_error;
  for (double penalty : grid) {
    SolverConfig solver{penalty, cfg.hessian_mode};
    OptimizerConfig opt = method.optimizer;
    opt.rng_seed = seed;  // identical restart initializations across penalties
    try {
      BilevelResult result = fit(data, split, kind, solver, opt);
      const double valid_mse = result.best_valid_loss / static_cast<double>(split.valid_size());
      if (valid_mse < best_mse) {
        best_mse = valid_mse;
        out.test_mse =
            segment_mse(data, split.valid_end, split.test_end, result.final_model.theta);
        out.chosen_ridge = penalty;
        out.detail = format_eta(result.best_eta.eta);
        out.learned = result.best_eta;
        out.traces = std::move(result.restart_traces);
        found = true;
      }
    } catch (const std::runtime_error& e) {
      last_error = e.what();  // singular solves or all restarts failed
    }
  }
  if (!found) {
    throw std::runtime_error("method " + method.name +
                             ": every ridge candidate failed (last: " + last_error + ")");
  }
  out.valid_mse = best_mse;
  return out;
}

}  // namespace

MethodOutput run_method_on_split(const MethodSpec& method, const Dataset& data,
                                 const SplitSpec& split, const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
  if (method.name == "stationary" || method.name == "window" ||
      method.name == "grid_search_exp") {
    return run_baseline(method, data, split, cfg);
  }
  if (method.name == "state_space") {
    return run_state_space(data, split, cfg);
  }
  if (method.name == "grad_exp" || method.name == "grad_mixed_decay") {
    return run_gradient_method(method, data, split, cfg, seed);
  }
  throw std::invalid_argument("unknown method '" + method.name + "'");
}

namespace {

struct WorkItem {
  std::string dataset;
  std::int64_t run = 0;
  const Dataset* data = nullptr;
  SplitSpec split;
  std::uint64_t seed = 0;
};

struct SlotResult {
  std::vector<std::optional<MethodOutput>> outputs;
  std::vector<std::string> errors;
};

ExperimentArtifacts collect(const ExperimentConfig& cfg, const std::vector<WorkItem>& items,
                            std::vector<SlotResult>&& slots) {
  ExperimentArtifacts artifacts;

  // A failed method excludes its run for every method (pairing), per dataset.
  std::set<std::pair<std::string, std::int64_t>> excluded;
  std::map<std::string, std::int64_t> per_dataset_total;
  std::map<std::string, std::int64_t> per_dataset_failed;
  for (std::size_t i = 0; i < items.size(); ++i) {
    per_dataset_total[items[i].dataset] += 1;
    bool failed = false;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      if (!slots[i].errors[mi].empty()) {
        failed = true;
        artifacts.failures.push_back(RunFailure{items[i].dataset, cfg.methods[mi].name,
                                                items[i].run, slots[i].errors[mi]});
      }
    }
    if (failed) {
      excluded.emplace(items[i].dataset, items[i].run);
      per_dataset_failed[items[i].dataset] += 1;
    }
  }
  for (const auto& [dataset, failed] : per_dataset_failed) {
    const std::int64_t total = per_dataset_total[dataset];
    if (static_cast<double>(failed) > 0.05 * static_cast<double>(total)) {
      throw std::runtime_error(
          "dataset " + dataset + ": " + std::to_string(failed) + " of " + std::to_string(total) +
          " runs failed (>5%); first failure: " + artifacts.failures.front().message);
    }
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    const WorkItem& item = items[i];
    if (excluded.count({item.dataset, item.run})) continue;
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const MethodSpec& method = cfg.methods[mi];
      MethodOutput& output = *slots[i].outputs[mi];
      artifacts.runs.push_back(RunResult{method.name, item.dataset, item.run, output.test_mse});
      artifacts.diagnostics.push_back(Diagnostic{method.name, item.dataset, item.run,
                                                 output.valid_mse, output.chosen_ridge,
                                                 output.detail});
      const bool grad = method.name == "grad_exp" || method.name == "grad_mixed_decay";
      if (cfg.emit_traces && grad && !output.traces.empty()) {
        artifacts.traces.push_back(
            TraceDump{item.dataset, method.name, item.run, std::move(output.traces)});
      }
      const bool want_curve =
          cfg.emit_weights == WeightsDump::All ||
          (cfg.emit_weights == WeightsDump::Grad && grad);
      if (want_curve && method.name != "state_space") {
        WeightCurveDump curve;
        curve.dataset = item.dataset;
        curve.method = method.name;
        curve.run = item.run;
        curve.max_age = item.split.train_end;
        if (output.learned) {
          curve.kind = WeightCurveDump::Kind::Mechanism;
          curve.params = *output.learned;
        } else if (output.window) {
          curve.kind = WeightCurveDump::Kind::Window;
          curve.window = *output.window;
        } else {
          curve.kind = WeightCurveDump::Kind::Uniform;
        }
        artifacts.weight_curves.push_back(std::move(curve));
      }
    }
  }

  artifacts.table = build_table(artifacts.runs, cfg.alpha);
  return artifacts;
}

std::vector<SlotResult> execute(const ExperimentConfig& cfg, const std::vector<WorkItem>& items) {
  std::vector<SlotResult> slots(items.size());
  for (SlotResult& slot : slots) {
    slot.outputs.resize(cfg.methods.size());
    slot.errors.resize(cfg.methods.size());
  }
  const int threads = effective_threads(cfg.parallelism);
  parallel_for(static_cast<Index>(items.size()), threads, [&](Index i) {
    const WorkItem& item = items[static_cast<std::size_t>(i)];
    SlotResult& slot = slots[static_cast<std::size_t>(i)];
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      try {
        slot.outputs[mi] = run_method_on_split(cfg.methods[mi], *item.data, item.split, cfg,
                                               derive_seed(item.seed, cfg.methods[mi].name));
      } catch (const std::exception& e) {
        slot.errors[mi] = e.what();
      }
    }
  });
  return slots;
}

}  // namespace

ExperimentArtifacts run_synthetic(const ExperimentConfig& cfg) {
  cfg.validate();
  const SyntheticSpec& spec = cfg.synthetic;

  // Generate every (kind, run) dataset up front; items hold pointers.
  std::vector<std::unique_ptr<Dataset>> datasets;
  std::vector<WorkItem> items;
  datasets.reserve(spec.kinds.size() * static_cast<std::size_t>(spec.runs));
  items.reserve(datasets.capacity());

  const int threads = effective_threads(cfg.parallelism);
  const auto total = static_cast<Index>(spec.kinds.size()) * spec.runs;
  std::vector<std::unique_ptr<Dataset>> slots_data(static_cast<std::size_t>(total));
  parallel_for(total, threads, [&](Index i) {
    const std::size_t kind_idx = static_cast<std::size_t>(i) / spec.runs;
    const std::int64_t run = static_cast<std::int64_t>(i % spec.runs);
    const SeriesSpec sspec{spec.kinds[kind_idx], spec.length, spec.noise_sd};
    const RawSeries series = generate(sspec, cfg.base_seed + static_cast<std::uint64_t>(run));
    slots_data[static_cast<std::size_t>(i)] =
        std::make_unique<Dataset>(make_lag_dataset(series.y, spec.lags));
  });

  for (Index i = 0; i < total; ++i) {
    const std::size_t kind_idx = static_cast<std::size_t>(i) / spec.runs;
    const std::int64_t run = static_cast<std::int64_t>(i % spec.runs);
    datasets.push_back(std::move(slots_data[static_cast<std::size_t>(i)]));
    WorkItem item;
    item.dataset = std::string(to_string(spec.kinds[kind_idx]));
    item.run = run;
    item.data = datasets.back().get();
    // Split boundaries anchor on the raw series axis; the supervised set
    // starts after the lag burn-in.
    item.split = make_split(item.data->size(), spec.train_end - spec.lags, spec.valid_len,
                            spec.test_len);
    item.seed = cfg.base_seed + static_cast<std::uint64_t>(run);
    items.push_back(std::move(item));
  }

  auto slots = execute(cfg, items);
  return collect(cfg, items, std::move(slots));
}

ExperimentArtifacts run_expanding_cv(const ExperimentConfig& cfg) {
  cfg.validate();
  const RealSpec& spec = cfg.real;

  std::vector<std::string> columns = spec.series_columns;
  if (spec.task == "factor") {
    columns.push_back(spec.factors.mr);
    columns.push_back(spec.factors.sb);
    columns.push_back(spec.factors.hl);
    columns.push_back(spec.factors.rf);
  }
  const std::vector<Series> loaded = load_returns_csv(spec.csv_path, spec.date_column, columns);

  const Index offset = spec.task == "factor" ? 0 : spec.lags;
  std::vector<std::unique_ptr<Dataset>> datasets;
  std::vector<WorkItem> items;

  for (std::size_t si = 0; si < spec.series_columns.size(); ++si) {
    Index raw_days = 0;
    std::unique_ptr<Dataset> ds;
    if (spec.task == "factor") {
      const std::size_t base = spec.series_columns.size();
      const std::vector<Series> aligned =
          align_series({loaded[si], loaded[base], loaded[base + 1], loaded[base + 2],
                        loaded[base + 3]});
      raw_days = static_cast<Index>(aligned[0].values.size());
      ds = std::make_unique<Dataset>(
          build_factor_dataset(aligned[0], aligned[1], aligned[2], aligned[3], aligned[4]));
    } else {
      raw_days = static_cast<Index>(loaded[si].values.size());
      ds = std::make_unique<Dataset>(
          build_lag_features(loaded[si], spec.lags, spec.task == "volatility"));
    }

    const Index needed = spec.cv.initial_train_days + spec.cv.valid_days + spec.cv.test_days;
    if (raw_days < needed) {
      throw std::runtime_error("series '" + spec.series_columns[si] + "' has " +
                               std::to_string(raw_days) + " days; expanding cv needs at least " +
                               std::to_string(needed));
    }
    datasets.push_back(std::move(ds));
    const Dataset* data = datasets.back().get();

    std::int64_t fold = 0;
    for (Index k = spec.cv.initial_train_days; k + spec.cv.valid_days + spec.cv.test_days <= raw_days;
         k += spec.cv.step_days, ++fold) {
      if (fold >= 1000) {
        throw std::runtime_error("expanding cv: more than 1000 folds per series unsupported");
      }
      WorkItem item;
      item.dataset = spec.task;
      item.run = static_cast<std::int64_t>(si) * 1000 + fold;
      item.data = data;
      item.split = make_split(data->size(), k - offset, spec.cv.valid_days, spec.cv.test_days);
      item.seed = cfg.base_seed + static_cast<std::uint64_t>(item.run);
      items.push_back(std::move(item));
    }
  }

  auto slots = execute(cfg, items);
  ExperimentArtifacts artifacts = collect(cfg, items, std::move(slots));
  artifacts.table.notes.push_back(
      "paired Wilcoxon stars assume independent runs; correlated series violate this "
      "in real-data reports");
  return artifacts;
}

namespace {

void write_diagnostics_csv(const std::vector<Diagnostic>& diagnostics,
                           const std::filesystem::path& path) {
  std::vector<Diagnostic> sorted = diagnostics;
  std::sort(sorted.begin(), sorted.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.dataset, a.method, a.run) < std::tie(b.dataset, b.method, b.run);
  });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "method,dataset,run,valid_mse,chosen_ridge,detail\n";
  char buf[40];
  for (const Diagnostic& d : sorted) {
    std::snprintf(buf, sizeof buf, "%.17g", d.valid_mse);
    out << d.method << ',' << d.dataset << ',' << d.run << ',' << buf << ',';
    if (std::isfinite(d.chosen_ridge)) {
      std::snprintf(buf, sizeof buf, "%.17g", d.chosen_ridge);
      out << buf;
    }
    out << ',' << d.detail << '\n';
  }
}

void write_trace_files(const std::vector<TraceDump>& traces,
                       const std::filesystem::path& dir) {
  for (const TraceDump& dump : traces) {
    const std::filesystem::path subdir = dir / dump.dataset;
    std::filesystem::create_directories(subdir);
    const std::filesystem::path path =
        subdir / (dump.method + "_" + std::to_string(dump.run) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "restart,epoch,valid_loss\n";
    char buf[40];
    for (std::size_t r = 0; r < dump.traces.size(); ++r) {
      const RestartTrace& trace = dump.traces[r];
      for (std::size_t e = 0; e < trace.valid_loss.size(); ++e) {
        std::snprintf(buf, sizeof buf, "%.17g", trace.valid_loss[e]);
        out << r << ',' << (e + 1) << ',' << buf << '\n';
      }
    }
  }
}

void write_weight_files(const std::vector<WeightCurveDump>& curves,
                        const std::filesystem::path& dir) {
  for (const WeightCurveDump& curve : curves) {
    const std::filesystem::path subdir = dir / curve.dataset;
    std::filesystem::create_directories(subdir);
    const std::filesystem::path path =
        subdir / ("weights_" + curve.method + "_" + std::to_string(curve.run) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "age,weight\n";
    char buf[40];
    for (Index age = 0; age < curve.max_age; ++age) {
      double w = 1.0;
      switch (curve.kind) {
        case WeightCurveDump::Kind::Mechanism:
          w = weight(curve.params, static_cast<double>(age));
          break;
        case WeightCurveDump::Kind::Window:
          w = age < curve.window ? 1.0 : 0.0;
          break;
        case WeightCurveDump::Kind::Uniform:
          w = 1.0;
          break;
      }
      std::snprintf(buf, sizeof buf, "%.17g", w);
      out << age << ',' << buf << '\n';
    }
  }
}

std::string sanitize_csv_field(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

}  // namespace

void write_artifact_files(const ExperimentConfig& cfg, const ExperimentArtifacts& artifacts) {
  const std::filesystem::path dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  write_runs_csv(artifacts.runs, dir / "runs.csv");
  write_table_csv(artifacts.table, dir / "table.csv");
  {
    std::ofstream out(dir / "table.txt");
    if (!out) throw std::runtime_error("cannot write table.txt");
    out << format_table_text(artifacts.table);
  }
  write_diagnostics_csv(artifacts.diagnostics, dir / "diagnostics.csv");
  if (!artifacts.failures.empty()) {
    std::ofstream out(dir / "failures.csv");
    if (!out) throw std::runtime_error("cannot write failures.csv");
    out << "dataset,method,run,message\n";
    for (const RunFailure& f : artifacts.failures) {
      out << f.dataset << ',' << f.method << ',' << f.run << ','
          << sanitize_csv_field(f.message) << '\n';
    }
  }
  if (!artifacts.traces.empty()) write_trace_files(artifacts.traces, dir / "traces");
  if (!artifacts.weight_curves.empty()) {
    write_weight_files(artifacts.weight_curves, dir / "plotdata");
  }
}

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg) {
  ExperimentArtifacts artifacts =
      cfg.experiment == "synthetic" ? run_synthetic(cfg) : run_expanding_cv(cfg);
  for (const RunFailure& f : artifacts.failures) {
    std::cerr << "WARNING: " << f.dataset << " run " << f.run << ": method " << f.method
              << " failed and the run was excluded pairwise: " << f.message << '\n';
  }
  write_artifact_files(cfg, artifacts);
  return artifacts;
}

}  // namespace forgecast

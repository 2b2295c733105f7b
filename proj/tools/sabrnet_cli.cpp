#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_config.hpp"
#include "sabrnet/csv.hpp"
#include "sabrnet/datagen.hpp"
#include "sabrnet/errors.hpp"
#include "sabrnet/evaluation.hpp"
#include "sabrnet/hagan.hpp"
#include "sabrnet/hash.hpp"
#include "sabrnet/mc_engine.hpp"
#include "sabrnet/nn/model_io.hpp"
#include "sabrnet/nn/trainer.hpp"
#include "sabrnet/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::uint64_t seed = 42;
  std::size_t paths = 100000;
  double steps_per_year = 50.0;
  unsigned workers = sabrnet::default_workers();
  std::string cv_vol = "paper-alpha";
  std::string sigma_scheme = "log-exact";
  std::string hagan_bracket = "numerator";
  std::string out = ".";
  std::string arch = "georesnn";
};

struct Params {
  double T = 1.0, F0 = 1.0, K = 1.0, alpha = 0.2, beta = 0.5, rho = -0.8, nu = 1.2;
  [[nodiscard]] sabrnet::SabrPoint point() const { return {T, F0, K, alpha, beta, rho, nu}; }
};

void add_params(CLI::App* cmd, Params& p, bool with_strike) {
  cmd->add_option("--T", p.T, "maturity in years")->capture_default_str();
  cmd->add_option("--F0", p.F0, "forward")->capture_default_str();
  if (with_strike) cmd->add_option("--K", p.K, "strike")->capture_default_str();
  cmd->add_option("--alpha", p.alpha)->capture_default_str();
  cmd->add_option("--beta", p.beta)->capture_default_str();
  cmd->add_option("--rho", p.rho)->capture_default_str();
  cmd->add_option("--nu", p.nu)->capture_default_str();
}

sabrnet::McConfig mc_config(const Common& c) {
  sabrnet::McConfig mc;
  mc.paths = c.paths;
  mc.steps_per_year = c.steps_per_year;
  mc.base_seed = c.seed;
  mc.workers = c.workers;
  mc.cv_vol_mode = sabrnet::cv_vol_mode_from_string(c.cv_vol);
  mc.sigma_scheme = sabrnet::sigma_scheme_from_string(c.sigma_scheme);
  mc.validate();
  return mc;
}

sabrnet::HaganOptions hagan_options(const Common& c) {
  return {sabrnet::hagan_bracket_from_string(c.hagan_bracket)};
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw sabrnet::ConfigError("cannot create output directory " + dir);
  return p;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw sabrnet::ConfigError("no such file: " + path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sabrnet::ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw sabrnet::ConfigError("write failed for " + path.string());
}

std::string short_hash(const std::string& sha) { return sha.substr(0, 12); }

// ---- smile ----------------------------------------------------------------

struct SmileArgs {
  Params p;
  double k_min = 0.5, k_max = 2.0, k_step = 0.1;
};

int run_smile(const Common& c, const SmileArgs& a) {
  const sabrnet::SabrPoint base = a.p.point().with_strike(a.p.F0);
  base.validate();
  if (!(a.k_step > 0.0) || !(a.k_min > 0.0) || a.k_max < a.k_min)
    throw sabrnet::ConfigError("smile: invalid strike range");
  const auto out_dir = prepare_out_dir(c.out);
  const auto mc = mc_config(c);
  const auto hagan = hagan_options(c);

  std::vector<double> strikes;
  const auto count = static_cast<std::size_t>(std::floor((a.k_max - a.k_min) / a.k_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) strikes.push_back(a.p.F0 * (a.k_min + a.k_step * i));

  const auto term = sabrnet::simulate_terminals(base, mc);
  std::string csv = "K,sigma_hagan,sigma_mc,std_error\n";
  std::printf("%10s %12s %12s %10s\n", "K", "Hagan", "MC", "MC s.e.");
  for (double K : strikes) {
    const double h = sabrnet::hagan_vol(base.with_strike(K), hagan);
    const auto v = sabrnet::mc_implied_vol(term, K);
    std::printf("%10.4f %12.6f %12.6f %10.6f\n", K, h, v.sigma, v.std_error);
    csv += sabrnet::csv::format12(K) + ',' + sabrnet::csv::format12(h) + ',' +
           sabrnet::csv::format12(v.sigma) + ',' + sabrnet::csv::format12(v.std_error) + '\n';
  }
  write_text(out_dir / "smile.csv", csv);
  const json manifest = {{"seed", c.seed},
                         {"params", {{"T", base.T}, {"F0", base.F0}, {"alpha", base.alpha},
                                     {"beta", base.beta}, {"rho", base.rho}, {"nu", base.nu}}},
                         {"strikes", strikes},
                         {"mc", sabrnet::to_json(mc)},
                         {"hagan_bracket", c.hagan_bracket}};
  write_text(out_dir / "smile_manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

// ---- generate -------------------------------------------------------------

struct GenerateArgs {
  std::size_t configs = 10;
  std::string split_mode = "by-row";
};

int run_generate(const Common& c, const GenerateArgs& a) {
  if (a.configs == 0) throw sabrnet::ConfigError("generate: --configs must be > 0");
  sabrnet::DatagenConfig cfg;
  cfg.num_configs = a.configs;
  cfg.mc = mc_config(c);
  cfg.seed = c.seed;
  cfg.hagan = hagan_options(c);
  cfg.workers = c.workers;
  if (a.split_mode == "by-row" || a.split_mode == "by_row") {
    cfg.split_mode = sabrnet::SplitMode::by_row;
  } else if (a.split_mode == "by-config" || a.split_mode == "by_config") {
    cfg.split_mode = sabrnet::SplitMode::by_config;
  } else {
    throw sabrnet::ConfigError("generate: unknown split mode " + a.split_mode);
  }
  const auto out_dir = prepare_out_dir(c.out);

  auto rows = sabrnet::build_dataset(cfg);
  sabrnet::DatasetStats stats;
  stats.rows = rows.size();
  for (const auto& r : rows) stats.failed += r.valid ? 0 : 1;
  if (stats.failed == stats.rows) {
    std::fprintf(stderr, "generate: every row failed\n");
    return kExitNumeric;
  }
  stats.filtered = sabrnet::filter_outliers(rows);
  stats.counts = sabrnet::split(rows, c.seed, cfg.split_mode);
  for (const auto& r : rows) stats.valid += r.valid ? 1 : 0;

  const std::string csv = sabrnet::dataset_csv(rows);
  write_text(out_dir / "dataset.csv", csv);
  const std::string sha = sabrnet::sha256_hex(csv);
  write_text(out_dir / "dataset_manifest.json",
             sabrnet::dataset_manifest(cfg, stats, sha).dump(2) + "\n");

  const double frac = static_cast<double>(stats.valid) / static_cast<double>(stats.rows);
  std::printf("rows %zu valid %zu failed %zu filtered %zu (train %zu val %zu test %zu)\n", stats.rows,
              stats.valid, stats.failed, stats.filtered, stats.counts.train, stats.counts.val,
              stats.counts.test);
  std::printf("sha256 %s\n", sha.c_str());
  if (frac < 0.99) {
    std::fprintf(stderr, "generate: only %.2f%% of rows valid\n", 100.0 * frac);
    return kExitNumeric;
  }
  return kExitOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  double lr0 = 4e-3;
  bool quiet = false;
};

std::vector<sabrnet::Sample> rows_with(const std::vector<sabrnet::Sample>& rows, sabrnet::Split s) {
  std::vector<sabrnet::Sample> out;
  for (const auto& r : rows)
    if (r.valid && r.split == s) out.push_back(r);
  return out;
}

int run_train(const Common& c, const TrainArgs& a) {
  require_file(a.data);
  const auto arch = sabrnet::nn::arch_from_string(c.arch);
  const auto out_dir = prepare_out_dir(c.out);
  sabrnet::nn::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.lr0 = a.lr0;
  cfg.init_seed = c.seed;
  cfg.shuffle_seed = c.seed;
  cfg.validate();

  const auto rows = sabrnet::read_dataset_csv(a.data);
  const auto train_rows = rows_with(rows, sabrnet::Split::train);
  const auto val_rows = rows_with(rows, sabrnet::Split::val);
  if (train_rows.empty() || val_rows.empty())
    throw sabrnet::ConfigError("train: dataset has no train or val rows");

  auto bundle = sabrnet::nn::make_bundle(arch, cfg.init_seed, cfg.hidden);
  bundle.hagan = hagan_options(c);
  auto result = sabrnet::nn::train(std::move(bundle), train_rows, val_rows, cfg,
                                   [&](const sabrnet::nn::EpochRecord& r) {
                                     if (!a.quiet)
                                       std::printf("epoch %3zu train %.6e val %.6e lr %.3e\n", r.epoch,
                                                   r.train_loss, r.val_loss, r.lr);
                                   });
  auto& m = result.bundle.manifest;
  m["arch"] = c.arch;
  m["seed"] = c.seed;
  m["dataset_sha256"] = sabrnet::sha256_file(a.data);

  const std::string name(sabrnet::nn::to_string(arch));
  sabrnet::nn::save_model(out_dir / ("model_" + name + ".json"), result.bundle);
  std::string hist = "epoch,train_loss,val_loss,lr,best_val\n";
  for (const auto& r : result.history) {
    hist += std::to_string(r.epoch) + ',' + sabrnet::csv::format17(r.train_loss) + ',' +
            sabrnet::csv::format17(r.val_loss) + ',' + sabrnet::csv::format17(r.lr) + ',' +
            sabrnet::csv::format17(r.best_val) + '\n';
  }
  write_text(out_dir / ("history_" + name + ".csv"), hist);
  std::printf("best epoch %zu val loss %.6e\n", result.best_epoch, result.best_val_loss);
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> models;
  std::string data;
  bool stress = false;
  bool sweep = false;
  bool literal_moneyness = false;
  std::size_t latency_points = 0;
};

int run_evaluate(const Common& c, const EvaluateArgs& a) {
  require_file(a.data);
  for (const auto& m : a.models) require_file(m);
  const auto out_dir = prepare_out_dir(c.out);
  const auto mc = mc_config(c);
  if (a.latency_points != 0 && a.latency_points < sabrnet::kLatencyMinPoints)
    throw sabrnet::ConfigError("evaluate: --latency needs at least 10000 points");

  const auto rows = sabrnet::read_dataset_csv(a.data);
  const auto test = rows_with(rows, sabrnet::Split::test);
  if (test.empty()) throw sabrnet::ConfigError("evaluate: dataset has no test rows");
  const std::string data_sha = sabrnet::sha256_file(a.data);
  const auto rule = a.literal_moneyness ? sabrnet::RegionRule::literal_moneyness
                                        : sabrnet::RegionRule::grid_sign;

  json all = json::array();
  for (const auto& path : a.models) {
    const auto bundle = sabrnet::nn::load_model(path);
    const std::string arch(sabrnet::nn::to_string(bundle.arch));
    const std::string stem = arch + "_" + short_hash(data_sha);
    auto metrics = sabrnet::evaluate_model(bundle, test, rule);
    json report = {{"model", path}, {"dataset", a.data}, {"dataset_sha256", data_sha},
                   {"seed", c.seed}, {"mc", sabrnet::to_json(mc)},
                   {"region_rule", a.literal_moneyness ? "literal-moneyness" : "grid-sign"}};
    if (a.latency_points) {
      const auto lat = sabrnet::latency_bench(bundle, a.latency_points,
                                              sabrnet::SabrPoint{1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2},
                                              c.seed, mc);
      metrics.latency_us_per_point = lat.median_us;
      metrics.speedup_vs_mc = lat.speedup;
      report["latency"] = sabrnet::to_json(lat);
    }
    report["metrics"] = sabrnet::to_json(metrics);
    if (a.stress) {
      sabrnet::McConfig smc = mc;
      smc.paths = sabrnet::kStressPaths;
      json stress = json::array();
      for (const auto& rec : sabrnet::stress_suite(bundle, smc)) {
        sabrnet::write_slice_csv(out_dir / (stem + "_stress_" + rec.slice.label + ".csv"), rec.slice);
        stress.push_back(sabrnet::to_json(rec));
      }
      report["stress"] = stress;
    }
    if (a.sweep) {
      json sweep = json::array();
      const auto slices = sabrnet::maturity_sweep(bundle, sabrnet::default_sweep_params(),
                                                  sabrnet::default_sweep_maturities(), mc);
      for (const auto& s : slices) {
        sabrnet::write_slice_csv(out_dir / (stem + "_sweep_" + s.label + ".csv"), s);
        auto j = sabrnet::to_json(s);
        j["rmse_rel"] = sabrnet::slice_rmse_rel(s);
        sweep.push_back(j);
      }
      report["maturity_sweep"] = sweep;
    }
    write_text(out_dir / ("report_" + stem + ".json"), report.dump(2) + "\n");
    std::printf("%-9s R2 %.4f (itm %.4f atm %.4f otm %.4f) rmse_rel %.4e\n", arch.c_str(),
                metrics.r2_global, metrics.r2_itm, metrics.r2_atm, metrics.r2_otm, metrics.rmse_rel);
    all.push_back(report["metrics"]);
  }
  write_text(out_dir / ("metrics_" + short_hash(data_sha) + ".json"), all.dump(2) + "\n");
  return kExitOk;
}

// ---- price / bench --------------------------------------------------------

int run_price(const std::string& model, const Params& p) {
  require_file(model);
  const auto bundle = sabrnet::nn::load_model(model);
  const double v = sabrnet::nn::predict_vol(bundle, p.point());
  std::printf("%.17g\n", v);
  return kExitOk;
}

int run_bench(const Common& c, const std::string& model, std::size_t points) {
  require_file(model);
  const auto out_dir = prepare_out_dir(c.out);
  const auto bundle = sabrnet::nn::load_model(model);
  const auto mc = mc_config(c);
  const auto lat = sabrnet::latency_bench(bundle, points,
                                          sabrnet::SabrPoint{1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2},
                                          c.seed, mc);
  json j = sabrnet::to_json(lat);
  j["model"] = model;
  j["seed"] = c.seed;
  j["mc"] = sabrnet::to_json(mc);
  std::printf("%s\n", j.dump(2).c_str());
  write_text(out_dir / ("bench_" + std::string(sabrnet::nn::to_string(bundle.arch)) + ".json"),
             j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SABR implied volatility: Monte Carlo, Hagan and residual networks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<sabrnet::cli::JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags win");

  Common c;
  app.add_option("--seed", c.seed, "base seed")->capture_default_str();
  app.add_option("--paths", c.paths, "Monte Carlo paths")->capture_default_str();
  app.add_option("--steps-per-year", c.steps_per_year)->capture_default_str();
  app.add_option("--workers", c.workers, "worker threads")->capture_default_str();
  app.add_option("--cv-vol", c.cv_vol)
      ->check(CLI::IsMember({"paper-alpha", "effective-atm"}))
      ->capture_default_str();
  app.add_option("--sigma-scheme", c.sigma_scheme)
      ->check(CLI::IsMember({"log-exact", "euler-strict"}))
      ->capture_default_str();
  app.add_option("--hagan-bracket", c.hagan_bracket)
      ->check(CLI::IsMember({"numerator", "denominator"}))
      ->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--arch", c.arch)
      ->check(CLI::IsMember({"ndn", "geonn", "resnn", "georesnn"}, CLI::ignore_case))
      ->capture_default_str();

  SmileArgs smile;
  auto* smile_cmd = app.add_subcommand("smile", "Hagan vs Monte Carlo smile for one configuration");
  add_params(smile_cmd, smile.p, false);
  smile_cmd->add_option("--k-min", smile.k_min, "lowest strike as a multiple of F0")->capture_default_str();
  smile_cmd->add_option("--k-max", smile.k_max)->capture_default_str();
  smile_cmd->add_option("--k-step", smile.k_step)->capture_default_str();

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a labelled dataset");
  gen_cmd->add_option("--configs", gen.configs, "number of parameter configurations")->capture_default_str();
  gen_cmd->add_option("--split-mode", gen.split_mode)
      ->check(CLI::IsMember({"by-row", "by-config"}))
      ->capture_default_str();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train one architecture on a dataset");
  train_cmd->add_option("--data", tr.data, "dataset CSV")->required();
  train_cmd->add_option("--epochs", tr.epochs)->capture_default_str();
  train_cmd->add_option("--batch-size", tr.batch_size)->capture_default_str();
  train_cmd->add_option("--lr0", tr.lr0)->capture_default_str();
  train_cmd->add_flag("--quiet", tr.quiet, "no per-epoch output");

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Metrics, stress suite and maturity sweep");
  eval_cmd->add_option("--model", ev.models, "model JSON (repeatable)")->required();
  eval_cmd->add_option("--data", ev.data, "dataset CSV")->required();
  eval_cmd->add_flag("--stress", ev.stress, "run the stress scenarios");
  eval_cmd->add_flag("--sweep", ev.sweep, "run the maturity sweep");
  eval_cmd->add_flag("--literal-moneyness", ev.literal_moneyness, "regions by K/F0 bands");
  eval_cmd->add_option("--latency", ev.latency_points, "latency benchmark points (>= 10000)");

  std::string price_model;
  Params price_p;
  auto* price_cmd = app.add_subcommand("price", "Corrected implied vol for one point");
  price_cmd->add_option("--model", price_model)->required();
  add_params(price_cmd, price_p, true);

  std::string bench_model;
  std::size_t bench_points = sabrnet::kLatencyMinPoints;
  auto* bench_cmd = app.add_subcommand("bench", "Inference latency vs Monte Carlo");
  bench_cmd->add_option("--model", bench_model)->required();
  bench_cmd->add_option("--points", bench_points)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*smile_cmd) return run_smile(c, smile);
    if (*gen_cmd) return run_generate(c, gen);
    if (*train_cmd) return run_train(c, tr);
    if (*eval_cmd) return run_evaluate(c, ev);
    if (*price_cmd) return run_price(price_model, price_p);
    if (*bench_cmd) return run_bench(c, bench_model, bench_points);
  } catch (const sabrnet::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const sabrnet::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const sabrnet::ShapeMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumeric;
  }
  return kExitUsage;
}

#include "sabrnet/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "sabrnet/csv.hpp"
#include "sabrnet/errors.hpp"
#include "sabrnet/hagan.hpp"
#include "sabrnet/parallel.hpp"

namespace sabrnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw ShapeMismatch(std::string(what) + ": length mismatch");
  if (a.empty()) throw ShapeMismatch(std::string(what) + ": empty input");
}

}  // namespace

double r2(std::span<const double> predicted, std::span<const double> reference) {
  check_pair(predicted, reference, "r2");
  const double n = static_cast<double>(reference.size());
  double mean = 0.0;
  for (double r : reference) mean += r;
  mean /= n;
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - mean;
    const double e = reference[i] - predicted[i];
    ss_tot += d * d;
    ss_res += e * e;
  }
  if (ss_tot / n < 1e-18) throw DegenerateReference("r2: reference variance below 1e-18");
  return 1.0 - ss_res / ss_tot;
}

double rmse_rel(std::span<const double> predicted, std::span<const double> reference) {
  check_pair(predicted, reference, "rmse_rel");
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] == 0.0) throw DomainError("rmse_rel: zero reference value");
    const double e = (predicted[i] - reference[i]) / reference[i];
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(reference.size()));
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::itm: return "itm";
    case Region::atm: return "atm";
    case Region::otm: return "otm";
  }
  return "?";
}

Region region_of(const Sample& s, RegionRule rule) {
  if (rule == RegionRule::grid_sign) {
    if (s.n < 0.0) return Region::itm;
    return s.n > 0.0 ? Region::otm : Region::atm;
  }
  const double m = s.x.K / s.x.F0;
  if (m < 0.975) return Region::itm;
  return m > 1.025 ? Region::otm : Region::atm;
}

RegionalReport regional_metrics(std::span<const Sample> rows, std::span<const double> predicted,
                                RegionRule rule) {
  if (rows.size() != predicted.size()) throw ShapeMismatch("regional_metrics: length mismatch");
  std::vector<double> pred[3], ref[3];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto k = static_cast<std::size_t>(region_of(rows[i], rule));
    pred[k].push_back(predicted[i]);
    ref[k].push_back(rows[i].sigma_mc);
  }
  auto metrics = [&](Region r) {
    const auto k = static_cast<std::size_t>(r);
    if (ref[k].empty())
      throw EmptyRegion("regional_metrics: no rows in region " + std::string(to_string(r)));
    return RegionMetrics{ref[k].size(), r2(pred[k], ref[k]), rmse_rel(pred[k], ref[k])};
  };
  return {metrics(Region::itm), metrics(Region::atm), metrics(Region::otm)};
}

RegionalReport regional_metrics(std::span<const Sample> rows, const nn::ModelBundle& bundle,
                                RegionRule rule) {
  const auto pred = nn::predict_rows(bundle, rows);
  return regional_metrics(rows, pred, rule);
}

ModelMetrics evaluate_model(const nn::ModelBundle& bundle, std::span<const Sample> test,
                            RegionRule rule) {
  const auto pred = nn::predict_rows(bundle, test);
  std::vector<double> ref;
  ref.reserve(test.size());
  for (const auto& s : test) ref.push_back(s.sigma_mc);

  ModelMetrics m;
  m.arch = std::string(nn::to_string(bundle.arch));
  m.test_rows = test.size();
  m.r2_global = r2(pred, ref);
  m.rmse_rel = rmse_rel(pred, ref);
  const auto regional = regional_metrics(test, pred, rule);
  m.r2_itm = regional.itm.r2;
  m.r2_atm = regional.atm.r2;
  m.r2_otm = regional.otm.r2;
  m.val_loss_final = bundle.manifest.value("best_val_loss", kNaN);
  m.min_prediction = *std::min_element(pred.begin(), pred.end());
  return m;
}

SliceRecord evaluate_slice(const nn::ModelBundle& bundle, std::string label, const SabrPoint& params,
                           std::span<const double> strikes, const McConfig& mc,
                           std::uint64_t config_index) {
  SliceRecord s;
  s.label = std::move(label);
  s.params = params.with_strike(params.F0);
  s.strikes.assign(strikes.begin(), strikes.end());
  const std::size_t k = strikes.size();
  s.n.resize(k);
  s.sigma_mc.assign(k, kNaN);
  s.sigma_hagan.assign(k, kNaN);
  s.sigma_model.assign(k, kNaN);
  auto note = [&](const std::exception& e) {
    if (s.error.empty()) s.error = e.what();
  };
  const double scale = params.alpha * std::sqrt(params.T);
  for (std::size_t i = 0; i < k; ++i) s.n[i] = std::log(strikes[i] / params.F0) / scale;

  std::optional<Terminals> term;
  try {
    term = simulate_terminals(s.params, mc, config_index);
  } catch (const Error& e) {
    note(e);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const SabrPoint p = params.with_strike(strikes[i]);
    if (term) {
      try {
        s.sigma_mc[i] = mc_implied_vol(*term, strikes[i]).sigma;
      } catch (const Error& e) {
        note(e);
      }
    }
    try {
      s.sigma_hagan[i] = hagan_vol(p, bundle.hagan);
    } catch (const Error& e) {
      note(e);
    }
    try {
      s.sigma_model[i] = nn::predict_vol(bundle, p);
    } catch (const Error& e) {
      note(e);
    }
  }
  return s;
}

std::string slice_csv(const SliceRecord& s) {
  std::string out = "T,K,n,sigma_mc,sigma_hagan,sigma_model\n";
  for (std::size_t i = 0; i < s.strikes.size(); ++i) {
    out += csv::format12(s.params.T) + ',' + csv::format12(s.strikes[i]) + ',' +
           csv::format12(s.n[i]) + ',' + csv::format12(s.sigma_mc[i]) + ',' +
           csv::format12(s.sigma_hagan[i]) + ',' + csv::format12(s.sigma_model[i]) + '\n';
  }
  return out;
}

void write_slice_csv(const std::filesystem::path& path, const SliceRecord& slice) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << slice_csv(slice);
}

std::vector<StressScenario> stress_scenarios() {
  const auto& buckets = tenor_buckets();
  auto find = [&](std::string_view name) -> const TenorBucket& {
    for (const auto& b : buckets)
      if (b.name == name) return b;
    throw ConfigError("unknown bucket");
  };
  auto medians = [](const TenorBucket& b) {
    SabrPoint p;
    p.T = b.tenors.back().years;
    p.F0 = b.f0.mid();
    p.K = p.F0;
    p.alpha = b.alpha.mid();
    p.beta = b.beta.mid();
    p.rho = b.rho.mid();
    p.nu = b.nu.mid();
    return p;
  };
  auto grid = [](const SabrPoint& p) {
    const auto k = strike_grid(p.F0, p.alpha, p.T);
    return std::vector<double>(k.begin(), k.end());
  };

  std::vector<StressScenario> out;

  SabrPoint smile{1.0, 1.0, 1.0, 0.2, 0.5, -0.8, 1.2};
  std::vector<double> smile_strikes;
  for (int i = 5; i <= 20; ++i) smile_strikes.push_back(i / 10.0);
  out.push_back({"reference_smile", smile, smile_strikes});

  const TenorBucket& mid = find("9M_1Y");
  SabrPoint high_nu = medians(mid);
  high_nu.nu = 1.5 * mid.nu.hi;
  out.push_back({"high_nu", high_nu, grid(high_nu)});

  SabrPoint extreme_rho = medians(find("4Y_5Y"));
  extreme_rho.rho = -0.9;
  out.push_back({"extreme_rho", extreme_rho, grid(extreme_rho)});

  SabrPoint beta_zero = medians(find("1W_1M"));
  beta_zero.beta = 0.0;
  out.push_back({"beta_zero", beta_zero, grid(beta_zero)});

  SabrPoint lognormal = medians(mid);
  lognormal.beta = 1.0;
  lognormal.nu = 0.0;
  out.push_back({"lognormal_sanity", lognormal, grid(lognormal)});

  SabrPoint high_alpha = medians(mid);
  high_alpha.alpha = 2.0 * mid.alpha.hi;
  out.push_back({"high_alpha", high_alpha, grid(high_alpha)});

  return out;
}

namespace {

double max_abs_error(const std::vector<double>& a, const std::vector<double>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (std::isfinite(a[i]) && std::isfinite(ref[i])) worst = std::max(worst, std::abs(a[i] - ref[i]));
  return worst;
}

}  // namespace

std::vector<StressRecord> stress_suite(const nn::ModelBundle& bundle, const McConfig& mc,
                                       std::span<const StressScenario> scenarios) {
  std::vector<StressRecord> out(scenarios.size());
  McConfig job_cfg = mc;
  job_cfg.workers = 1;
  parallel_for(scenarios.size(), mc.workers, [&](std::size_t i) {
    const auto& sc = scenarios[i];
    StressRecord rec;
    rec.slice = evaluate_slice(bundle, sc.id, sc.params, sc.strikes, job_cfg, i);
    rec.max_err_model = max_abs_error(rec.slice.sigma_model, rec.slice.sigma_mc);
    rec.max_err_hagan = max_abs_error(rec.slice.sigma_hagan, rec.slice.sigma_mc);
    out[i] = std::move(rec);
  });
  return out;
}

std::vector<StressRecord> stress_suite(const nn::ModelBundle& bundle, const McConfig& mc) {
  const auto scenarios = stress_scenarios();
  return stress_suite(bundle, mc, scenarios);
}

SabrPoint default_sweep_params() {
  const auto& b = tenor_buckets()[2];
  return {1.0, b.f0.mid(), b.f0.mid(), b.alpha.mid(), b.beta.mid(), b.rho.mid(), b.nu.mid()};
}

const std::vector<double>& default_sweep_maturities() {
  static const std::vector<double> mats{0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  return mats;
}

std::vector<SliceRecord> maturity_sweep(const nn::ModelBundle& bundle, const SabrPoint& params,
                                        std::span<const double> maturities, const McConfig& mc) {
  for (double T : maturities)
    if (!(T >= 0.25 && T <= 5.0)) throw ConfigError("maturity_sweep: T outside [0.25, 5]");
  std::vector<SliceRecord> out(maturities.size());
  McConfig job_cfg = mc;
  job_cfg.workers = 1;
  parallel_for(maturities.size(), mc.workers, [&](std::size_t i) {
    SabrPoint p = params;
    p.T = maturities[i];
    const auto k = strike_grid(p.F0, p.alpha, p.T);
    out[i] = evaluate_slice(bundle, "T=" + csv::format12(p.T), p, k, job_cfg, i);
  });
  return out;
}

double slice_rmse_rel(const SliceRecord& s) {
  std::vector<double> pred, ref;
  for (std::size_t i = 0; i < s.strikes.size(); ++i)
    if (std::isfinite(s.sigma_model[i]) && std::isfinite(s.sigma_mc[i])) {
      pred.push_back(s.sigma_model[i]);
      ref.push_back(s.sigma_mc[i]);
    }
  if (ref.empty()) return kNaN;
  return rmse_rel(pred, ref);
}

LatencyStats latency_bench(const nn::ModelBundle& bundle, std::size_t n_points,
                           const SabrPoint& mc_point, std::uint64_t seed, const McConfig& mc) {
  using clock = std::chrono::steady_clock;
  if (n_points < kLatencyMinPoints) throw ConfigError("latency_bench: need at least 1e4 points");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kStrikesPerConfig - 1);
  std::vector<SabrPoint> points;
  points.reserve(n_points + kLatencyWarmup);
  for (std::size_t i = 0; i < n_points + kLatencyWarmup; ++i) {
    const ConfigDraw d = sample_config(rng);
    points.push_back(d.point(strike_grid(d.F0, d.alpha, d.T)[pick(rng)]));
  }

  volatile double sink = 0.0;
  std::vector<double> us;
  us.reserve(n_points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto t0 = clock::now();
    const double v = nn::predict_vol(bundle, points[i]);
    const auto t1 = clock::now();
    sink = sink + v;
    if (i >= kLatencyWarmup) us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }

  LatencyStats s;
  s.points = n_points;
  s.warmup = kLatencyWarmup;
  double total = 0.0;
  for (double u : us) total += u;
  s.mean_us = total / static_cast<double>(us.size());
  std::sort(us.begin(), us.end());
  const std::size_t mid = us.size() / 2;
  s.median_us = us.size() % 2 ? us[mid] : 0.5 * (us[mid - 1] + us[mid]);
  s.p99_us = us[std::min(us.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * us.size())) - 1)];

  McConfig mc_cfg = mc;
  mc_cfg.paths = kLatencyMcPaths;
  const auto t0 = clock::now();
  const McVol v = mc_implied_vol(mc_point, mc_cfg);
  const auto t1 = clock::now();
  sink = sink + v.sigma;
  s.mc_us_per_point = std::chrono::duration<double, std::micro>(t1 - t0).count();
  s.speedup = s.mc_us_per_point / s.median_us;
  return s;
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json finite_array(const std::vector<double>& v) {
  auto arr = nlohmann::json::array();
  for (double x : v) arr.push_back(finite_or_null(x));
  return arr;
}

}  // namespace

nlohmann::json to_json(const ModelMetrics& m) {
  nlohmann::json j = {{"arch", m.arch},
                      {"test_rows", m.test_rows},
                      {"r2_global", m.r2_global},
                      {"r2_atm", m.r2_atm},
                      {"r2_itm", m.r2_itm},
                      {"r2_otm", m.r2_otm},
                      {"rmse_rel", m.rmse_rel},
                      {"val_loss_final", finite_or_null(m.val_loss_final)},
                      {"min_prediction", m.min_prediction}};
  j["latency_us_per_point"] = m.latency_us_per_point ? nlohmann::json(*m.latency_us_per_point) : nullptr;
  j["speedup_vs_mc"] = m.speedup_vs_mc ? nlohmann::json(*m.speedup_vs_mc) : nullptr;
  return j;
}

nlohmann::json to_json(const LatencyStats& s) {
  return {{"points", s.points},         {"warmup", s.warmup},
          {"median_us", s.median_us},   {"p99_us", s.p99_us},
          {"mean_us", s.mean_us},       {"mc_us_per_point", s.mc_us_per_point},
          {"speedup", s.speedup}};
}

nlohmann::json to_json(const SliceRecord& s) {
  return {{"label", s.label},
          {"T", s.params.T},
          {"F0", s.params.F0},
          {"alpha", s.params.alpha},
          {"beta", s.params.beta},
          {"rho", s.params.rho},
          {"nu", s.params.nu},
          {"strikes", s.strikes},
          {"n", s.n},
          {"sigma_mc", finite_array(s.sigma_mc)},
          {"sigma_hagan", finite_array(s.sigma_hagan)},
          {"sigma_model", finite_array(s.sigma_model)},
          {"error", s.error}};
}

nlohmann::json to_json(const StressRecord& s) {
  auto j = to_json(s.slice);
  j["max_err_model"] = s.max_err_model;
  j["max_err_hagan"] = s.max_err_hagan;
  return j;
}

}  // namespace sabrnet

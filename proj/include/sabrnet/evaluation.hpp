#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sabrnet/datagen.hpp"
#include "sabrnet/mc_engine.hpp"
#include "sabrnet/nn/model.hpp"
#include "sabrnet/sabr_point.hpp"

namespace sabrnet {

/// 1 - SS_res / SS_tot with SS_tot about mean(reference).
/// Throws ShapeMismatch on length mismatch, DegenerateReference when the
/// reference variance is below 1e-18.
double r2(std::span<const double> predicted, std::span<const double> reference);
/// sqrt(mean(((p - r) / r)^2)).
double rmse_rel(std::span<const double> predicted, std::span<const double> reference);

enum class Region { itm, atm, otm };
/// grid_sign: n < 0 / n = 0 / n > 0. literal_moneyness: K/F0 below 0.975,
/// within [0.975, 1.025], above 1.025.
enum class RegionRule { grid_sign, literal_moneyness };

std::string_view to_string(Region r);
Region region_of(const Sample& s, RegionRule rule);

struct RegionMetrics {
  std::size_t count = 0;
  double r2 = 0.0;
  double rmse_rel = 0.0;
};

struct RegionalReport {
  RegionMetrics itm, atm, otm;
};

/// Throws EmptyRegion when a region has no rows.
RegionalReport regional_metrics(std::span<const Sample> rows, std::span<const double> predicted,
                                RegionRule rule = RegionRule::grid_sign);
RegionalReport regional_metrics(std::span<const Sample> rows, const nn::ModelBundle& bundle,
                                RegionRule rule = RegionRule::grid_sign);

struct ModelMetrics {
  std::string arch;
  std::size_t test_rows = 0;
  double r2_global = 0.0;
  double r2_atm = 0.0;
  double r2_itm = 0.0;
  double r2_otm = 0.0;
  double rmse_rel = 0.0;
  double val_loss_final = 0.0;
  double min_prediction = 0.0;
  std::optional<double> latency_us_per_point;
  std::optional<double> speedup_vs_mc;
};

/// Global and regional metrics of `bundle` on `test` against sigma_mc.
/// val_loss_final comes from the bundle manifest's best_val_loss.
ModelMetrics evaluate_model(const nn::ModelBundle& bundle, std::span<const Sample> test,
                            RegionRule rule = RegionRule::grid_sign);

/// One smile: strikes with Monte Carlo reference, Hagan and model vols.
/// Monte Carlo or Hagan failures leave NaN in the affected entry.
struct SliceRecord {
  std::string label;
  SabrPoint params;  // strike ignored
  std::vector<double> strikes;
  std::vector<double> n;
  std::vector<double> sigma_mc;
  std::vector<double> sigma_hagan;
  std::vector<double> sigma_model;
  std::string error;  // first failure message, empty when clean
};

/// Prices every strike from one set of terminals.
SliceRecord evaluate_slice(const nn::ModelBundle& bundle, std::string label, const SabrPoint& params,
                           std::span<const double> strikes, const McConfig& mc,
                           std::uint64_t config_index);

void write_slice_csv(const std::filesystem::path& path, const SliceRecord& slice);
std::string slice_csv(const SliceRecord& slice);

struct StressScenario {
  std::string id;
  SabrPoint params;  // strike ignored
  std::vector<double> strikes;
};

/// The six fixed stress configurations.
std::vector<StressScenario> stress_scenarios();

inline constexpr std::size_t kStressPaths = 200000;

struct StressRecord {
  SliceRecord slice;
  double max_err_model = 0.0;  // max |sigma_model - sigma_mc| over finite entries
  double max_err_hagan = 0.0;
};

/// Fresh Monte Carlo ground truth per scenario; scenarios run as parallel
/// jobs on mc.workers threads. A failing scenario is recorded, not thrown.
std::vector<StressRecord> stress_suite(const nn::ModelBundle& bundle, const McConfig& mc,
                                       std::span<const StressScenario> scenarios);
std::vector<StressRecord> stress_suite(const nn::ModelBundle& bundle, const McConfig& mc);

/// 9M_1Y bucket medians at T = 1.
SabrPoint default_sweep_params();
const std::vector<double>& default_sweep_maturities();

/// One 11-strike grid slice per maturity (T must lie in [0.25, 5]).
std::vector<SliceRecord> maturity_sweep(const nn::ModelBundle& bundle, const SabrPoint& params,
                                        std::span<const double> maturities, const McConfig& mc);

/// sqrt(mean(((model - mc) / mc)^2)) over finite entries of a slice.
double slice_rmse_rel(const SliceRecord& slice);

struct LatencyStats {
  std::size_t points = 0;
  std::size_t warmup = 0;
  double median_us = 0.0;
  double p99_us = 0.0;
  double mean_us = 0.0;
  double mc_us_per_point = 0.0;
  double speedup = 0.0;
};

inline constexpr std::size_t kLatencyWarmup = 100;
inline constexpr std::size_t kLatencyMinPoints = 10000;
inline constexpr std::size_t kLatencyMcPaths = 100000;

/// Times n_points single-point predict_vol calls on random domain points
/// (after kLatencyWarmup untimed calls) and one Monte Carlo implied vol at
/// kLatencyMcPaths paths on `mc_point`. Throws ConfigError if n_points < 1e4.
LatencyStats latency_bench(const nn::ModelBundle& bundle, std::size_t n_points,
                           const SabrPoint& mc_point, std::uint64_t seed = 42,
                           const McConfig& mc = {});

nlohmann::json to_json(const ModelMetrics& m);
nlohmann::json to_json(const LatencyStats& s);
nlohmann::json to_json(const SliceRecord& s);
nlohmann::json to_json(const StressRecord& s);

}  // namespace sabrnet

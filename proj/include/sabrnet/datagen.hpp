#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sabrnet/geometry.hpp"
#include "sabrnet/hagan.hpp"
#include "sabrnet/mc_engine.hpp"
#include "sabrnet/sabr_point.hpp"

namespace sabrnet {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
};

/// Maturity label with its year fraction (weeks 7w/365, months m/12, years y).
struct Tenor {
  std::string label;
  double years = 0.0;
};

struct TenorBucket {
  std::string name;
  std::vector<Tenor> tenors;
  Range f0, alpha, beta, rho, nu;
};

/// The five sampling buckets, 1W_1M through 4Y_5Y.
const std::vector<TenorBucket>& tenor_buckets();
/// 1W, 2W, 3W, 4W, 2M ... 6M, 9M, 1Y ... 5Y, in that order.
const std::vector<Tenor>& default_maturities();
/// Bucket owning maturity T (matched against the tenor year fractions).
const TenorBucket& bucket_for(double T);

/// One draw of (T, F0, alpha, beta, rho, nu) before strikes are attached.
struct ConfigDraw {
  std::string tenor;
  std::string bucket;
  double T = 0.0;
  double F0 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double nu = 0.0;

  [[nodiscard]] SabrPoint point(double strike) const { return {T, F0, strike, alpha, beta, rho, nu}; }
};

ConfigDraw sample_config(std::mt19937_64& rng);

inline constexpr std::size_t kStrikesPerConfig = 11;
/// n = -2.5, -2.0, ..., 2.5
const std::array<double, kStrikesPerConfig>& grid_indices();
/// K = F0 exp(n alpha sqrt(T)) for every grid index.
std::array<double, kStrikesPerConfig> strike_grid(double F0, double alpha, double T);

enum class Split { train, val, test, none };
std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

enum class SplitMode { by_row, by_config };

struct Sample {
  SabrPoint x;
  double sigma_hagan = 0.0;
  double sigma_mc = 0.0;
  GeomFeatures features;
  double n = 0.0;
  std::size_t config_index = 0;
  Split split = Split::none;
  bool valid = false;
};

struct DatagenConfig {
  std::size_t num_configs = 1;
  McConfig mc;
  std::uint64_t seed = 42;
  HaganOptions hagan;
  unsigned workers = 1;
  SplitMode split_mode = SplitMode::by_row;
};

/// Optional hook replacing sampled configurations (tests force degenerate draws).
using DrawOverride = void (*)(ConfigDraw&);

/// Samples num_configs configurations and prices all 11 strikes of each from
/// one set of terminals. Rows are ordered by (config index, n); rows whose
/// Hagan or Monte Carlo evaluation fails are kept with valid = false.
std::vector<Sample> build_dataset(const DatagenConfig& cfg, DrawOverride override = nullptr);

/// Marks rows with |sigma_mc - sigma_hagan| > 10 std (population std of the
/// residual over valid rows) invalid; returns how many rows it removed.
/// std < 1e-12 disables the filter. Throws ConfigError if no row is valid.
std::size_t filter_outliers(std::vector<Sample>& rows);

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

/// Largest-remainder allocation of `total` in the ratio 110:55:22.
SplitCounts split_quota(std::size_t total);

/// Shuffles the valid rows (or configurations) with `seed` and tags them
/// train/val/test in the 110:55:22 ratio. Invalid rows get Split::none.
SplitCounts split(std::vector<Sample>& rows, std::uint64_t seed = 42,
                  SplitMode mode = SplitMode::by_row);

inline constexpr std::string_view kDatasetHeader =
    "T,F0,K,alpha,beta,rho,nu,sigma_hagan,sigma_mc,q,sigma_min,d_h,sigma0,n,split,valid";

std::string dataset_csv(const std::vector<Sample>& rows);
void write_dataset_csv(const std::filesystem::path& path, const std::vector<Sample>& rows);
std::vector<Sample> read_dataset_csv(const std::filesystem::path& path);

struct DatasetStats {
  std::size_t rows = 0;
  std::size_t valid = 0;
  std::size_t failed = 0;    // Hagan or inversion failures
  std::size_t filtered = 0;  // outlier filter
  SplitCounts counts;
};

nlohmann::json dataset_manifest(const DatagenConfig& cfg, const DatasetStats& stats,
                                const std::string& csv_sha256);

nlohmann::json to_json(const McConfig& mc);
McConfig mc_config_from_json(const nlohmann::json& j);

}  // namespace sabrnet

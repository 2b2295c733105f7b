#include "sabrnet/datagen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sabrnet/csv.hpp"
#include "sabrnet/errors.hpp"
#include "sabrnet/parallel.hpp"
#include "sabrnet/simd/isa.hpp"

namespace sabrnet {

namespace {

Tenor weeks(int w) { return {std::to_string(w) + "W", 7.0 * w / 365.0}; }
Tenor months(int m) { return {std::to_string(m) + "M", m / 12.0}; }
Tenor years(int y) { return {std::to_string(y) + "Y", static_cast<double>(y)}; }

}  // namespace

const std::vector<TenorBucket>& tenor_buckets() {
  static const std::vector<TenorBucket> buckets{
      {"1W_1M", {weeks(1), weeks(2), weeks(3), weeks(4)},
       {0.005, 0.03}, {0.005, 0.02}, {0.00, 0.30}, {-0.20, 0.20}, {0.05, 0.20}},
      {"2M_6M", {months(2), months(3), months(4), months(5), months(6)},
       {0.005, 0.04}, {0.01, 0.03}, {0.20, 0.50}, {-0.30, 0.10}, {0.10, 0.30}},
      {"9M_1Y", {months(9), years(1)},
       {0.01, 0.05}, {0.02, 0.04}, {0.30, 0.70}, {-0.40, 0.00}, {0.20, 0.40}},
      {"2Y_3Y", {years(2), years(3)},
       {0.015, 0.06}, {0.03, 0.05}, {0.40, 0.80}, {-0.50, -0.10}, {0.30, 0.50}},
      {"4Y_5Y", {years(4), years(5)},
       {0.02, 0.07}, {0.04, 0.06}, {0.50, 1.00}, {-0.60, -0.20}, {0.40, 0.60}},
  };
  return buckets;
}

const std::vector<Tenor>& default_maturities() {
  static const std::vector<Tenor> mats = [] {
    std::vector<Tenor> out;
    for (const auto& b : tenor_buckets()) out.insert(out.end(), b.tenors.begin(), b.tenors.end());
    return out;
  }();
  return mats;
}

const TenorBucket& bucket_for(double T) {
  for (const auto& b : tenor_buckets())
    for (const auto& t : b.tenors)
      if (std::abs(t.years - T) < 1e-12) return b;
  throw ConfigError("maturity " + std::to_string(T) + " is not a default tenor");
}

ConfigDraw sample_config(std::mt19937_64& rng) {
  const auto& mats = default_maturities();
  std::uniform_int_distribution<std::size_t> pick(0, mats.size() - 1);
  const Tenor& tenor = mats[pick(rng)];
  const TenorBucket& bucket = bucket_for(tenor.years);
  auto draw = [&](const Range& r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };

  ConfigDraw d;
  d.tenor = tenor.label;
  d.bucket = bucket.name;
  d.T = tenor.years;
  d.F0 = draw(bucket.f0);
  d.alpha = draw(bucket.alpha);
  d.beta = std::clamp(draw(bucket.beta), 0.0, 1.0);
  d.rho = std::clamp(draw(bucket.rho), -SabrPoint::kRhoBound, SabrPoint::kRhoBound);
  d.nu = draw(bucket.nu);
  return d;
}

const std::array<double, kStrikesPerConfig>& grid_indices() {
  static const std::array<double, kStrikesPerConfig> idx{-2.5, -2.0, -1.5, -1.0, -0.5, 0.0,
                                                         0.5,  1.0,  1.5,  2.0,  2.5};
  return idx;
}

std::array<double, kStrikesPerConfig> strike_grid(double F0, double alpha, double T) {
  if (!(F0 > 0.0 && alpha > 0.0 && T > 0.0)) throw DomainError("strike_grid: inputs must be > 0");
  std::array<double, kStrikesPerConfig> out{};
  const double width = alpha * std::sqrt(T);
  for (std::size_t i = 0; i < kStrikesPerConfig; ++i) {
    const double n = grid_indices()[i];
    out[i] = n == 0.0 ? F0 : F0 * std::exp(n * width);
  }
  return out;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
    case Split::none: return "none";
  }
  return "none";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  if (s == "none") return Split::none;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

std::vector<Sample> build_dataset(const DatagenConfig& cfg, DrawOverride override) {
  if (cfg.num_configs < 1) throw ConfigError("build_dataset: num_configs must be >= 1");
  cfg.mc.validate();

  std::mt19937_64 rng(cfg.seed);
  std::vector<ConfigDraw> draws(cfg.num_configs);
  for (auto& d : draws) {
    d = sample_config(rng);
    if (override) override(d);
  }

  std::vector<Sample> rows(cfg.num_configs * kStrikesPerConfig);
  McConfig mc = cfg.mc;
  mc.base_seed = cfg.seed;
  mc.workers = 1;

  parallel_for(cfg.num_configs, cfg.workers, [&](std::size_t c) {
    const ConfigDraw& d = draws[c];
    const auto strikes = strike_grid(d.F0, d.alpha, d.T);
    const Terminals terminals = simulate_terminals(d.point(d.F0), mc, c);
    for (std::size_t j = 0; j < kStrikesPerConfig; ++j) {
      Sample& s = rows[c * kStrikesPerConfig + j];
      s.x = d.point(strikes[j]);
      s.n = grid_indices()[j];
      s.config_index = c;
      s.valid = true;
      try {
        s.sigma_hagan = hagan_vol(s.x, cfg.hagan);
        s.features = features(s.x);
      } catch (const Error&) {
        s.sigma_hagan = std::numeric_limits<double>::quiet_NaN();
        s.valid = false;
      }
      try {
        s.sigma_mc = mc_implied_vol(terminals, strikes[j]).sigma;
      } catch (const Error&) {
        s.sigma_mc = std::numeric_limits<double>::quiet_NaN();
        s.valid = false;
      }
    }
  });
  return rows;
}

std::size_t filter_outliers(std::vector<Sample>& rows) {
  std::vector<double> residuals;
  for (const auto& r : rows)
    if (r.valid) residuals.push_back(r.sigma_mc - r.sigma_hagan);
  if (residuals.empty()) throw ConfigError("filter_outliers: no valid rows");

  const double n = static_cast<double>(residuals.size());
  const double mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : residuals) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / n);
  if (sd < 1e-12) return 0;

  const double threshold = 10.0 * sd;
  std::size_t removed = 0;
  for (auto& r : rows) {
    if (r.valid && std::abs(r.sigma_mc - r.sigma_hagan) > threshold) {
      r.valid = false;
      r.split = Split::none;
      ++removed;
    }
  }
  return removed;
}

SplitCounts split_quota(std::size_t total) {
  constexpr std::array<std::size_t, 3> weights{110, 55, 22};
  constexpr std::size_t denom = 187;
  std::array<std::size_t, 3> counts{};
  std::array<std::size_t, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    counts[i] = total * weights[i] / denom;
    remainders[i] = total * weights[i] % denom;
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++counts[order[i % 3]];
  return {counts[0], counts[1], counts[2]};
}

SplitCounts split(std::vector<Sample>& rows, std::uint64_t seed, SplitMode mode) {
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].split = Split::none;
    if (rows[i].valid) valid.push_back(i);
  }
  if (valid.size() < 10) throw ConfigError("split: need at least 10 valid rows");
  const SplitCounts quota = split_quota(valid.size());
  std::mt19937_64 rng(seed);

  if (mode == SplitMode::by_row) {
    std::shuffle(valid.begin(), valid.end(), rng);
    for (std::size_t k = 0; k < valid.size(); ++k) {
      Split s = k < quota.train ? Split::train
                : k < quota.train + quota.val ? Split::val
                                              : Split::test;
      rows[valid[k]].split = s;
    }
    return quota;
  }

  // by configuration: whole configurations fill train, then val, then test
  std::vector<std::size_t> configs;
  for (std::size_t i : valid) configs.push_back(rows[i].config_index);
  configs.erase(std::unique(configs.begin(), configs.end()), configs.end());
  std::shuffle(configs.begin(), configs.end(), rng);
  std::vector<Split> assign_of(rows.empty() ? 0 : rows.back().config_index + 1, Split::none);
  SplitCounts got;
  std::vector<std::size_t> per_config(assign_of.size(), 0);
  for (std::size_t i : valid) ++per_config[rows[i].config_index];
  for (std::size_t c : configs) {
    if (got.train < quota.train) {
      assign_of[c] = Split::train;
      got.train += per_config[c];
    } else if (got.val < quota.val) {
      assign_of[c] = Split::val;
      got.val += per_config[c];
    } else {
      assign_of[c] = Split::test;
      got.test += per_config[c];
    }
  }
  for (std::size_t i : valid) rows[i].split = assign_of[rows[i].config_index];
  return got;
}

std::string dataset_csv(const std::vector<Sample>& rows) {
  using csv::format12;
  std::string out(kDatasetHeader);
  out += '\n';
  for (const auto& r : rows) {
    const double fields[] = {r.x.T,          r.x.F0,      r.x.K,          r.x.alpha,
                             r.x.beta,       r.x.rho,     r.x.nu,         r.sigma_hagan,
                             r.sigma_mc,     r.features.q, r.features.sigma_min,
                             r.features.d_h, r.features.sigma0, r.n};
    for (double v : fields) {
      out += format12(v);
      out += ',';
    }
    out += to_string(r.split);
    out += r.valid ? ",1\n" : ",0\n";
  }
  return out;
}

void write_dataset_csv(const std::filesystem::path& path, const std::vector<Sample>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << dataset_csv(rows);
}

std::vector<Sample> read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset " + path.string());
  std::string line;
  if (!std::getline(in, line) || csv::split_line(line) != csv::split_line(kDatasetHeader))
    throw ConfigError("dataset header mismatch in " + path.string());
  std::vector<Sample> rows;
  std::size_t config = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 16) throw ConfigError("dataset row with " + std::to_string(f.size()) + " fields");
    Sample s;
    s.x = {csv::parse_double(f[0]), csv::parse_double(f[1]), csv::parse_double(f[2]),
           csv::parse_double(f[3]), csv::parse_double(f[4]), csv::parse_double(f[5]),
           csv::parse_double(f[6])};
    s.sigma_hagan = csv::parse_double(f[7]);
    s.sigma_mc = csv::parse_double(f[8]);
    s.features = {csv::parse_double(f[9]), csv::parse_double(f[10]), csv::parse_double(f[11]),
                  csv::parse_double(f[12])};
    s.n = csv::parse_double(f[13]);
    s.split = split_from_string(f[14]);
    s.valid = f[15] == "1";
    // rows are persisted in (config, n) order; n = -2.5 opens a configuration
    if (!rows.empty() && s.n <= rows.back().n) ++config;
    s.config_index = config;
    rows.push_back(s);
  }
  return rows;
}

nlohmann::json to_json(const McConfig& mc) {
  return {{"paths", mc.paths},
          {"steps_per_year", mc.steps_per_year},
          {"min_steps", mc.min_steps},
          {"cv_vol_mode", to_string(mc.cv_vol_mode)},
          {"sigma_scheme", to_string(mc.sigma_scheme)},
          {"base_seed", mc.base_seed}};
}

McConfig mc_config_from_json(const nlohmann::json& j) {
  McConfig mc;
  mc.paths = j.value("paths", mc.paths);
  mc.steps_per_year = j.value("steps_per_year", mc.steps_per_year);
  mc.min_steps = j.value("min_steps", mc.min_steps);
  mc.cv_vol_mode = cv_vol_mode_from_string(j.value("cv_vol_mode", std::string("paper-alpha")));
  mc.sigma_scheme = sigma_scheme_from_string(j.value("sigma_scheme", std::string("log-exact")));
  mc.base_seed = j.value("base_seed", mc.base_seed);
  return mc;
}

nlohmann::json dataset_manifest(const DatagenConfig& cfg, const DatasetStats& stats,
                                const std::string& csv_sha256) {
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : tenor_buckets()) {
    nlohmann::json tenors = nlohmann::json::array();
    for (const auto& t : b.tenors) tenors.push_back({{"label", t.label}, {"years", t.years}});
    auto range = [](const Range& r) { return nlohmann::json::array({r.lo, r.hi}); };
    buckets.push_back({{"name", b.name},
                       {"tenors", tenors},
                       {"F0", range(b.f0)},
                       {"alpha", range(b.alpha)},
                       {"beta", range(b.beta)},
                       {"rho", range(b.rho)},
                       {"nu", range(b.nu)}});
  }
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();

  McConfig mc = cfg.mc;
  mc.base_seed = cfg.seed;
  return {{"seed", cfg.seed},
          {"num_configs", cfg.num_configs},
          {"strikes_per_config", kStrikesPerConfig},
          {"grid_indices", grid_indices()},
          {"strike_rule", "K = F0 exp(n alpha sqrt(T))"},
          {"maturity_convention", "weeks 7w/365, months m/12, years y"},
          {"mc", to_json(mc)},
          {"hagan_bracket", to_string(cfg.hagan.bracket)},
          {"split_mode", cfg.split_mode == SplitMode::by_row ? "by-row" : "by-config"},
          {"simd_isa", simd::to_string(simd::active_isa())},
          {"buckets", buckets},
          {"rows",
           {{"total", stats.rows},
            {"valid", stats.valid},
            {"failed", stats.failed},
            {"filtered", stats.filtered},
            {"train", stats.counts.train},
            {"val", stats.counts.val},
            {"test", stats.counts.test}}},
          {"generated_at_unix", secs},
          {"csv_sha256", csv_sha256}};
}

}  // namespace sabrnet

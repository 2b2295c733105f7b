#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sabrnet/datagen.hpp"
#include "sabrnet/hagan.hpp"
#include "sabrnet/nn/network.hpp"
#include "sabrnet/sabr_point.hpp"

namespace sabrnet::nn {

enum class Arch { ndn, geonn, resnn, georesnn };
enum class TargetMode { direct, residual_ratio };

std::string_view to_string(Arch a);
std::string_view to_string(TargetMode m);
/// Accepts ndn|geonn|resnn|georesnn, case-insensitive.
Arch arch_from_string(std::string_view s);
TargetMode target_mode_from_string(std::string_view s);

inline constexpr Arch kAllArchs[] = {Arch::ndn, Arch::geonn, Arch::resnn, Arch::georesnn};

[[nodiscard]] constexpr bool uses_geometry(Arch a) { return a == Arch::geonn || a == Arch::georesnn; }
[[nodiscard]] constexpr std::size_t input_width(Arch a) { return uses_geometry(a) ? 11 : 7; }
[[nodiscard]] constexpr TargetMode target_mode(Arch a) {
  return a == Arch::resnn || a == Arch::georesnn ? TargetMode::residual_ratio : TargetMode::direct;
}

inline const std::vector<std::size_t> kDefaultHidden = {64, 64, 32};

/// Per-feature z-score; a zero std is stored as 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> std;

  static Standardizer fit(const Matrix& x);
  static Standardizer identity(std::size_t width);
  void apply(Matrix& x) const;
};

struct ModelBundle {
  Arch arch = Arch::georesnn;
  TargetMode target = TargetMode::residual_ratio;
  Network net;
  Standardizer scaler;
  HaganOptions hagan;
  nlohmann::json manifest = nlohmann::json::object();

  /// Throws ShapeMismatch when the network, scaler and arch disagree.
  void validate() const;
};

/// Freshly initialised bundle with identity standardisation.
ModelBundle make_bundle(Arch arch, std::uint64_t init_seed,
                        const std::vector<std::size_t>& hidden = kDefaultHidden,
                        bool batch_norm = true);

/// Unscaled input row: T, F0, K, alpha, beta, rho, nu and, for geometric
/// archs, q, sigma_min, d_h, sigma0.
std::vector<double> input_row(Arch arch, const SabrPoint& p, const GeomFeatures& g);
std::vector<double> input_row(Arch arch, const SabrPoint& p);
/// Unscaled design matrix from stored dataset rows.
Matrix design_matrix(Arch arch, std::span<const Sample> rows);

/// sigma_mc / sigma_hagan - 1 or sigma_mc, depending on the mode.
double training_target(TargetMode mode, const Sample& s);
std::vector<double> training_targets(TargetMode mode, std::span<const Sample> rows);

/// Mean squared error of raw outputs against the per-mode targets.
double loss(std::span<const double> outputs, std::span<const Sample> rows, TargetMode mode);

/// Raw network output (Delta for residual modes) for already-built inputs.
std::vector<double> raw_outputs(const ModelBundle& b, Matrix inputs);

/// Residual modes: sigma_hagan(x) (1 + Delta); direct modes: network output.
double predict_vol(const ModelBundle& b, const SabrPoint& p);
std::vector<double> predict_vols(const ModelBundle& b, std::span<const SabrPoint> points);
/// Batch prediction over dataset rows, reusing their stored features and
/// Hagan vols.
std::vector<double> predict_rows(const ModelBundle& b, std::span<const Sample> rows);

}  // namespace sabrnet::nn

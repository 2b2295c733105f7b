#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "sabrnet/nn/adam.hpp"
#include "sabrnet/nn/model.hpp"

namespace sabrnet::nn {

struct TrainConfig {
  double lr0 = 4e-3;
  AdamConfig adam;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  double plateau_factor = 0.5;
  std::size_t plateau_patience = 5;
  double plateau_threshold = 1e-6;
  std::uint64_t shuffle_seed = 42;
  std::uint64_t init_seed = 42;
  std::vector<std::size_t> hidden = kDefaultHidden;

  /// Throws ConfigError on non-positive sizes or rates.
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
/// Overlays the keys present in `j` onto `base`.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;        // rate used during this epoch
  double best_val = 0.0;  // running best after this epoch
};

struct TrainResult {
  ModelBundle bundle;  // best-validation snapshot
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Fits the standardizer on `train_rows`, then runs mini-batch Adam with the
/// plateau schedule. Throws Diverged when a validation loss is non-finite.
TrainResult train(ModelBundle bundle, std::span<const Sample> train_rows,
                  std::span<const Sample> val_rows, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Convenience: make_bundle(arch, cfg.init_seed, cfg.hidden) then train.
TrainResult train(Arch arch, std::span<const Sample> train_rows, std::span<const Sample> val_rows,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace sabrnet::nn

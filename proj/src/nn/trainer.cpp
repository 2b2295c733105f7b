#include "sabrnet/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sabrnet/errors.hpp"
#include "sabrnet/nn/plateau.hpp"

namespace sabrnet::nn {

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw ConfigError("train: lr0 must be > 0");
  if (batch_size == 0) throw ConfigError("train: batch size must be > 0");
  if (epochs == 0) throw ConfigError("train: epochs must be > 0");
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
    throw ConfigError("train: plateau factor must be in (0,1)");
  if (plateau_patience == 0) throw ConfigError("train: patience must be > 0");
  for (std::size_t h : hidden)
    if (h == 0) throw ConfigError("train: hidden widths must be > 0");
}

nlohmann::json to_json(const TrainConfig& cfg) {
  return {{"lr0", cfg.lr0},
          {"beta1", cfg.adam.beta1},
          {"beta2", cfg.adam.beta2},
          {"eps", cfg.adam.eps},
          {"weight_decay", cfg.adam.weight_decay},
          {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"plateau_factor", cfg.plateau_factor},
          {"plateau_patience", cfg.plateau_patience},
          {"plateau_threshold", cfg.plateau_threshold},
          {"shuffle_seed", cfg.shuffle_seed},
          {"init_seed", cfg.init_seed},
          {"hidden", cfg.hidden}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig cfg) {
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("lr0", cfg.lr0);
    get("beta1", cfg.adam.beta1);
    get("beta2", cfg.adam.beta2);
    get("eps", cfg.adam.eps);
    get("weight_decay", cfg.adam.weight_decay);
    get("batch_size", cfg.batch_size);
    get("epochs", cfg.epochs);
    get("plateau_factor", cfg.plateau_factor);
    get("plateau_patience", cfg.plateau_patience);
    get("plateau_threshold", cfg.plateau_threshold);
    get("shuffle_seed", cfg.shuffle_seed);
    get("init_seed", cfg.init_seed);
    get("hidden", cfg.hidden);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  return cfg;
}

namespace {

Matrix gather(const Matrix& x, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), x.cols);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = x.row(idx[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

TrainResult train(ModelBundle bundle, std::span<const Sample> train_rows,
                  std::span<const Sample> val_rows, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_rows.empty() || val_rows.empty()) throw ConfigError("train: empty split");
  bundle.target = target_mode(bundle.arch);

  Matrix x_train = design_matrix(bundle.arch, train_rows);
  Matrix x_val = design_matrix(bundle.arch, val_rows);
  bundle.scaler = Standardizer::fit(x_train);
  bundle.validate();
  bundle.scaler.apply(x_train);
  bundle.scaler.apply(x_val);
  const auto y_train = training_targets(bundle.target, train_rows);
  const auto y_val = training_targets(bundle.target, val_rows);

  Network& net = bundle.net;
  Adam adam(cfg.adam, net.parameter_sizes());
  PlateauScheduler sched(cfg.lr0, cfg.plateau_factor, cfg.plateau_patience, cfg.plateau_threshold);
  std::mt19937_64 shuffle_rng(cfg.shuffle_seed);

  std::vector<std::size_t> order(train_rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  Network best_net = net;
  ForwardCache cache;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const double lr = sched.lr();
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t m = std::min(cfg.batch_size, order.size() - start);
      const std::span<const std::size_t> idx(order.data() + start, m);
      const Matrix xb = gather(x_train, idx);
      const Matrix out = net.forward(xb, Mode::training, &cache);
      Matrix d_out(m, 1);
      for (std::size_t r = 0; r < m; ++r) {
        const double diff = out.data[r] - y_train[idx[r]];
        loss_sum += diff * diff;
        d_out.data[r] = 2.0 * diff / static_cast<double>(m);
      }
      adam.step(net.parameters(), net.backward(cache, d_out), lr);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    const Matrix val_out = net.predict(x_val);
    double val_sum = 0.0;
    for (std::size_t r = 0; r < y_val.size(); ++r) {
      const double diff = val_out.data[r] - y_val[r];
      val_sum += diff * diff;
    }
    rec.val_loss = val_sum / static_cast<double>(y_val.size());
    if (!std::isfinite(rec.val_loss) || !std::isfinite(rec.train_loss))
      throw Diverged("train: non-finite loss at epoch " + std::to_string(epoch));

    if (rec.val_loss < result.best_val_loss) {
      result.best_val_loss = rec.val_loss;
      result.best_epoch = epoch;
      best_net = net;
    }
    rec.best_val = result.best_val_loss;
    sched.step(rec.val_loss);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  bundle.net = std::move(best_net);
  bundle.manifest["train_config"] = to_json(cfg);
  bundle.manifest["best_epoch"] = result.best_epoch;
  bundle.manifest["best_val_loss"] = result.best_val_loss;
  bundle.manifest["epochs_run"] = result.history.size();
  bundle.manifest["train_rows"] = train_rows.size();
  bundle.manifest["val_rows"] = val_rows.size();
  result.bundle = std::move(bundle);
  return result;
}

TrainResult train(Arch arch, std::span<const Sample> train_rows, std::span<const Sample> val_rows,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  return train(make_bundle(arch, cfg.init_seed, cfg.hidden), train_rows, val_rows, cfg, on_epoch);
}

}  // namespace sabrnet::nn

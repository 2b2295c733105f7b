#pragma once

#include <cstddef>
#include <limits>

namespace sabrnet::nn {

/// Reduce-on-plateau on a minimised metric. An epoch improves when
/// value < best * (1 - threshold); after `patience` consecutive
/// non-improving epochs the rate is multiplied by `factor` and the
/// counter resets.
class PlateauScheduler {
 public:
  PlateauScheduler(double lr, double factor = 0.5, std::size_t patience = 5,
                   double threshold = 1e-6);

  /// Records one epoch; returns true when the rate was reduced.
  bool step(double value);

  [[nodiscard]] double lr() const { return lr_; }
  [[nodiscard]] double best() const { return best_; }
  [[nodiscard]] std::size_t bad_epochs() const { return bad_; }

 private:
  double lr_;
  double factor_;
  std::size_t patience_;
  double threshold_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t bad_ = 0;
};

}  // namespace sabrnet::nn

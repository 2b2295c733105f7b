#include "sabrnet/nn/plateau.hpp"

#include "sabrnet/errors.hpp"

namespace sabrnet::nn {

PlateauScheduler::PlateauScheduler(double lr, double factor, std::size_t patience,
                                   double threshold)
    : lr_(lr), factor_(factor), patience_(patience), threshold_(threshold) {
  if (!(lr > 0.0) || !(factor > 0.0 && factor < 1.0) || patience == 0 || !(threshold >= 0.0))
    throw ConfigError("plateau scheduler: invalid settings");
}

bool PlateauScheduler::step(double value) {
  if (value < best_ * (1.0 - threshold_)) {
    best_ = value;
    bad_ = 0;
    return false;
  }
  if (++bad_ >= patience_) {
    lr_ *= factor_;
    bad_ = 0;
    return true;
  }
  return false;
}

}  // namespace sabrnet::nn

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sabrnet::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Bias-corrected Adam over a fixed list of parameter tensors.
class Adam {
 public:
  Adam(AdamConfig cfg, const std::vector<std::size_t>& sizes);

  /// In-place update of `params` (same order and sizes as construction).
  void step(const std::vector<std::span<double>>& params,
            const std::vector<std::vector<double>>& grads, double lr);

  [[nodiscard]] std::size_t steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace sabrnet::nn

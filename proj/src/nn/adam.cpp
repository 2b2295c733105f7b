#include "sabrnet/nn/adam.hpp"

#include <cmath>

#include "sabrnet/errors.hpp"

namespace sabrnet::nn {

Adam::Adam(AdamConfig cfg, const std::vector<std::size_t>& sizes) : cfg_(cfg) {
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) ||
      !(cfg.eps > 0.0) || !(cfg.weight_decay >= 0.0))
    throw ConfigError("adam: invalid hyperparameters");
  for (std::size_t n : sizes) {
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

void Adam::step(const std::vector<std::span<double>>& params,
                const std::vector<std::vector<double>>& grads, double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw ShapeMismatch("adam: tensor count mismatch");
  for (std::size_t k = 0; k < m_.size(); ++k)
    if (params[k].size() != m_[k].size() || grads[k].size() != m_[k].size())
      throw ShapeMismatch("adam: tensor size mismatch");

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < m_.size(); ++k) {
    auto& m = m_[k];
    auto& v = v_[k];
    const auto& g = grads[k];
    auto p = params[k];
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double gi = g[i] + cfg_.weight_decay * p[i];
      if (!std::isfinite(gi)) throw NonFinite("adam: non-finite gradient");
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
  }
}

}  // namespace sabrnet::nn

#include "sabrnet/nn/network.hpp"

#include <cmath>
#include <random>

#include "sabrnet/errors.hpp"
#include "sabrnet/simd/dense_kernels.hpp"

namespace sabrnet::nn {

Network Network::make(std::size_t input_width, const std::vector<std::size_t>& hidden,
                      std::uint64_t seed, bool batch_norm) {
  if (input_width == 0) throw ShapeMismatch("network: zero input width");
  Network net;
  net.batch_norm_ = batch_norm;
  std::mt19937_64 rng(seed);
  std::size_t in = input_width;
  auto add_layer = [&](std::size_t out) {
    DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : layer.weight) w = dist(rng);
    net.layers_.push_back(std::move(layer));
    in = out;
  };
  for (std::size_t width : hidden) {
    add_layer(width);
    if (batch_norm) {
      net.norms_.push_back(BatchNorm{width, std::vector<double>(width, 1.0),
                                     std::vector<double>(width, 0.0),
                                     std::vector<double>(width, 0.0),
                                     std::vector<double>(width, 1.0)});
    }
  }
  add_layer(1);
  return net;
}

void Network::set_layers(std::vector<DenseLayer> layers, std::vector<BatchNorm> norms,
                         bool batch_norm) {
  if (layers.empty()) throw ShapeMismatch("network: no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    if (L.weight.size() != L.in * L.out || L.bias.size() != L.out)
      throw ShapeMismatch("network: layer tensor sizes");
    if (l > 0 && layers[l - 1].out != L.in) throw ShapeMismatch("network: layer chain");
  }
  if (layers.back().out != 1) throw ShapeMismatch("network: output width must be 1");
  if (batch_norm) {
    if (norms.size() + 1 != layers.size()) throw ShapeMismatch("network: batch-norm count");
    for (std::size_t l = 0; l < norms.size(); ++l) {
      const auto& n = norms[l];
      if (n.width != layers[l].out || n.gamma.size() != n.width || n.shift.size() != n.width ||
          n.running_mean.size() != n.width || n.running_var.size() != n.width)
        throw ShapeMismatch("network: batch-norm sizes");
      for (double v : n.running_var)
        if (!(v > 0.0)) throw ShapeMismatch("network: running variance must be > 0");
    }
  } else if (!norms.empty()) {
    throw ShapeMismatch("network: batch-norm params without batch norm");
  }
  layers_ = std::move(layers);
  norms_ = std::move(norms);
  batch_norm_ = batch_norm;
}

std::vector<std::size_t> Network::layer_dims() const {
  std::vector<std::size_t> dims;
  if (layers_.empty()) return dims;
  dims.push_back(layers_.front().in);
  for (const auto& l : layers_) dims.push_back(l.out);
  return dims;
}

std::vector<std::span<double>> Network::parameters() {
  std::vector<std::span<double>> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.emplace_back(layers_[l].weight);
    out.emplace_back(layers_[l].bias);
    if (batch_norm_ && l + 1 < layers_.size()) {
      out.emplace_back(norms_[l].gamma);
      out.emplace_back(norms_[l].shift);
    }
  }
  return out;
}

std::vector<std::size_t> Network::parameter_sizes() const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.push_back(layers_[l].weight.size());
    out.push_back(layers_[l].bias.size());
    if (batch_norm_ && l + 1 < layers_.size()) {
      out.push_back(norms_[l].width);
      out.push_back(norms_[l].width);
    }
  }
  return out;
}

namespace {

Matrix affine(const Matrix& x, const DenseLayer& layer) {
  Matrix z(x.rows, layer.out);
  simd::dense_kernels().gemm_nt(x.rows, layer.out, layer.in, x.data.data(), layer.weight.data(),
                                z.data.data(), false);
  for (std::size_t r = 0; r < z.rows; ++r)
    for (std::size_t j = 0; j < z.cols; ++j) z(r, j) += layer.bias[j];
  return z;
}

}  // namespace

Matrix Network::run(const Matrix& x, Mode mode, ForwardCache* cache, bool update_running) {
  if (layers_.empty()) throw ShapeMismatch("network: empty");
  if (x.cols != input_width()) throw ShapeMismatch("network: input width mismatch");
  if (x.rows == 0) throw ShapeMismatch("network: empty batch");
  if (cache) cache->hidden.clear();

  Matrix h = x;
  const std::size_t m = x.rows;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Matrix z = affine(h, layers_[l]);
    LayerCache lc;
    if (batch_norm_) {
      BatchNorm& bn = norms_[l];
      std::vector<double> mean(bn.width), var(bn.width);
      if (mode == Mode::training) {
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t j = 0; j < bn.width; ++j) mean[j] += z(r, j);
        for (auto& v : mean) v /= static_cast<double>(m);
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t j = 0; j < bn.width; ++j) {
            const double d = z(r, j) - mean[j];
            var[j] += d * d;
          }
        for (std::size_t j = 0; j < bn.width; ++j) {
          const double biased = var[j] / static_cast<double>(m);
          if (update_running) {
            const double unbiased = m > 1 ? var[j] / static_cast<double>(m - 1) : biased;
            bn.running_mean[j] = (1.0 - bn.momentum) * bn.running_mean[j] + bn.momentum * mean[j];
            bn.running_var[j] = (1.0 - bn.momentum) * bn.running_var[j] + bn.momentum * unbiased;
          }
          var[j] = biased;
        }
      } else {
        mean = bn.running_mean;
        var = bn.running_var;
      }
      lc.inv_std.resize(bn.width);
      for (std::size_t j = 0; j < bn.width; ++j) lc.inv_std[j] = 1.0 / std::sqrt(var[j] + bn.eps);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < bn.width; ++j) z(r, j) = (z(r, j) - mean[j]) * lc.inv_std[j];
      if (cache) lc.xhat = z;
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < bn.width; ++j) z(r, j) = bn.gamma[j] * z(r, j) + bn.shift[j];
    } else if (cache) {
      lc.xhat = z;
    }
    for (auto& v : z.data) v = v > 0.0 ? v : 0.0;
    if (cache) {
      lc.input = std::move(h);
      lc.activated = z;
      cache->hidden.push_back(std::move(lc));
    }
    h = std::move(z);
  }
  Matrix out = affine(h, layers_.back());
  if (cache) cache->last_hidden = std::move(h);
  return out;
}

Matrix Network::forward(const Matrix& x, Mode mode, ForwardCache* cache) {
  return run(x, mode, mode == Mode::training ? cache : nullptr, mode == Mode::training);
}

Matrix Network::predict(const Matrix& x) const {
  // inference never mutates state
  return const_cast<Network*>(this)->run(x, Mode::inference, nullptr, false);
}

Gradients Network::backward(const ForwardCache& cache, const Matrix& d_out) const {
  const auto& kernels = simd::dense_kernels();
  const std::size_t m = d_out.rows;
  const std::size_t hidden = layers_.size() - 1;
  if (cache.hidden.size() != hidden) throw ShapeMismatch("backward: cache from another network");

  // gradients per layer: weight, bias, (gamma, shift)
  std::vector<std::vector<double>> g_weight(layers_.size()), g_bias(layers_.size());
  std::vector<std::vector<double>> g_gamma(hidden), g_shift(hidden);

  Matrix delta = d_out;  // d loss / d (layer output), m x out
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const DenseLayer& layer = layers_[idx];
    const Matrix& input = idx == hidden ? cache.last_hidden : cache.hidden[idx].input;

    g_weight[idx].assign(layer.out * layer.in, 0.0);
    kernels.gemm_tn(layer.out, layer.in, m, delta.data.data(), input.data.data(),
                    g_weight[idx].data(), false);
    g_bias[idx].assign(layer.out, 0.0);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t j = 0; j < layer.out; ++j) g_bias[idx][j] += delta(r, j);

    if (idx == 0) break;

    // gradient w.r.t. the previous hidden block's activated output
    const std::size_t prev = idx - 1;
    const LayerCache& lc = cache.hidden[prev];
    Matrix d_act(m, layer.in);
    kernels.gemm_nn(m, layer.in, layer.out, delta.data.data(), layer.weight.data(),
                    d_act.data.data(), false);
    for (std::size_t k = 0; k < d_act.data.size(); ++k)
      if (!(lc.activated.data[k] > 0.0)) d_act.data[k] = 0.0;

    const std::size_t width = layer.in;
    Matrix d_z(m, width);
    if (batch_norm_) {
      const BatchNorm& bn = norms_[prev];
      g_gamma[prev].assign(width, 0.0);
      g_shift[prev].assign(width, 0.0);
      std::vector<double> sum_dxhat(width, 0.0), sum_dxhat_xhat(width, 0.0);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < width; ++j) {
          const double dy = d_act(r, j);
          g_gamma[prev][j] += dy * lc.xhat(r, j);
          g_shift[prev][j] += dy;
          const double dxhat = dy * bn.gamma[j];
          sum_dxhat[j] += dxhat;
          sum_dxhat_xhat[j] += dxhat * lc.xhat(r, j);
        }
      const double mm = static_cast<double>(m);
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t j = 0; j < width; ++j) {
          const double dxhat = d_act(r, j) * bn.gamma[j];
          d_z(r, j) = lc.inv_std[j] / mm *
                      (mm * dxhat - sum_dxhat[j] - lc.xhat(r, j) * sum_dxhat_xhat[j]);
        }
    } else {
      d_z = std::move(d_act);
    }
    delta = std::move(d_z);
  }

  Gradients out;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    out.push_back(std::move(g_weight[l]));
    out.push_back(std::move(g_bias[l]));
    if (batch_norm_ && l < hidden) {
      out.push_back(std::move(g_gamma[l]));
      out.push_back(std::move(g_shift[l]));
    }
  }
  return out;
}

double mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty()) throw ShapeMismatch("mse: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  const double out = acc / static_cast<double>(pred.size());
  if (!std::isfinite(out)) throw NonFinite("mse: non-finite loss");
  return out;
}

}  // namespace sabrnet::nn

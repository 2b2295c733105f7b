#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sabrnet/nn/matrix.hpp"

namespace sabrnet::nn {

/// y = x W^T + b with W stored out x in, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;
};

struct BatchNorm {
  std::size_t width = 0;
  std::vector<double> gamma;
  std::vector<double> shift;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;
};

enum class Mode { training, inference };

/// Per-hidden-layer values kept by a training forward pass for backprop.
struct LayerCache {
  Matrix input;      // layer input
  Matrix xhat;       // normalised pre-activation (or raw pre-activation without BN)
  Matrix activated;  // post-ReLU output
  std::vector<double> inv_std;
};

struct ForwardCache {
  std::vector<LayerCache> hidden;
  Matrix last_hidden;  // input of the output layer
};

/// Gradients in the order of Network::parameters().
using Gradients = std::vector<std::vector<double>>;

/// MLP: [Linear -> BatchNorm -> ReLU] x hidden, then Linear -> 1 output.
/// With batch_norm = false the hidden blocks are Linear -> ReLU.
class Network {
 public:
  Network() = default;

  /// He-uniform weights (U(-sqrt(6/fan_in), sqrt(6/fan_in))), zero biases,
  /// gamma = 1, shift = 0, running stats (0, 1).
  static Network make(std::size_t input_width, const std::vector<std::size_t>& hidden,
                      std::uint64_t seed, bool batch_norm = true);

  [[nodiscard]] std::size_t input_width() const { return layers_.empty() ? 0 : layers_.front().in; }
  [[nodiscard]] bool batch_norm() const { return batch_norm_; }
  [[nodiscard]] std::vector<std::size_t> layer_dims() const;

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<BatchNorm>& norms() { return norms_; }
  const std::vector<BatchNorm>& norms() const { return norms_; }

  /// Training mode normalises with batch statistics and updates running
  /// statistics; `cache` (training only) receives what backward() needs.
  Matrix forward(const Matrix& x, Mode mode, ForwardCache* cache = nullptr);
  /// Inference only; never touches running statistics.
  [[nodiscard]] Matrix predict(const Matrix& x) const;

  /// d(loss)/d(params) given d(loss)/d(output) for the batch cached by forward().
  [[nodiscard]] Gradients backward(const ForwardCache& cache, const Matrix& d_out) const;

  /// Views over trainable tensors: per layer weight, bias, then gamma and
  /// shift for hidden layers with batch norm.
  std::vector<std::span<double>> parameters();
  [[nodiscard]] std::vector<std::size_t> parameter_sizes() const;

  void set_layers(std::vector<DenseLayer> layers, std::vector<BatchNorm> norms, bool batch_norm);

 private:
  Matrix run(const Matrix& x, Mode mode, ForwardCache* cache, bool update_running);

  std::vector<DenseLayer> layers_;
  std::vector<BatchNorm> norms_;
  bool batch_norm_ = true;
};

/// mean((pred - target)^2); throws NonFinite on overflow.
double mse(std::span<const double> pred, std::span<const double> target);

}  // namespace sabrnet::nn

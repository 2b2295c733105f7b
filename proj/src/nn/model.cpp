#include "sabrnet/nn/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "sabrnet/errors.hpp"
#include "sabrnet/geometry.hpp"

namespace sabrnet::nn {

std::string_view to_string(Arch a) {
  switch (a) {
    case Arch::ndn: return "ndn";
    case Arch::geonn: return "geonn";
    case Arch::resnn: return "resnn";
    case Arch::georesnn: return "georesnn";
  }
  return "?";
}

std::string_view to_string(TargetMode m) {
  return m == TargetMode::direct ? "direct" : "residual_ratio";
}

Arch arch_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Arch a : kAllArchs)
    if (lower == to_string(a)) return a;
  throw ConfigError("unknown arch '" + std::string(s) + "'");
}

TargetMode target_mode_from_string(std::string_view s) {
  if (s == "direct") return TargetMode::direct;
  if (s == "residual_ratio") return TargetMode::residual_ratio;
  throw ConfigError("unknown target mode '" + std::string(s) + "'");
}

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows == 0) throw ShapeMismatch("standardizer: empty matrix");
  Standardizer s{std::vector<double>(x.cols, 0.0), std::vector<double>(x.cols, 0.0)};
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) s.mean[c] += x(r, c);
  for (auto& m : s.mean) m /= static_cast<double>(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double d = x(r, c) - s.mean[c];
      s.std[c] += d * d;
    }
  for (auto& v : s.std) {
    v = std::sqrt(v / static_cast<double>(x.rows));
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t width) {
  return {std::vector<double>(width, 0.0), std::vector<double>(width, 1.0)};
}

void Standardizer::apply(Matrix& x) const {
  if (x.cols != mean.size()) throw ShapeMismatch("standardizer: width mismatch");
  for (std::size_t r = 0; r < x.rows; ++r)
    for (std::size_t c = 0; c < x.cols; ++c) x(r, c) = (x(r, c) - mean[c]) / std[c];
}

void ModelBundle::validate() const {
  const std::size_t w = input_width(arch);
  if (net.input_width() != w) throw ShapeMismatch("bundle: network input width vs arch");
  if (scaler.mean.size() != w || scaler.std.size() != w)
    throw ShapeMismatch("bundle: standardizer width vs arch");
  for (double s : scaler.std)
    if (!(s > 0.0)) throw ShapeMismatch("bundle: standardizer std must be > 0");
  if (target != target_mode(arch)) throw ShapeMismatch("bundle: target mode vs arch");
}

ModelBundle make_bundle(Arch arch, std::uint64_t init_seed, const std::vector<std::size_t>& hidden,
                        bool batch_norm) {
  ModelBundle b;
  b.arch = arch;
  b.target = target_mode(arch);
  b.net = Network::make(input_width(arch), hidden, init_seed, batch_norm);
  b.scaler = Standardizer::identity(input_width(arch));
  return b;
}

std::vector<double> input_row(Arch arch, const SabrPoint& p, const GeomFeatures& g) {
  std::vector<double> row = {p.T, p.F0, p.K, p.alpha, p.beta, p.rho, p.nu};
  if (uses_geometry(arch)) {
    row.push_back(g.q);
    row.push_back(g.sigma_min);
    row.push_back(g.d_h);
    row.push_back(g.sigma0);
  }
  return row;
}

std::vector<double> input_row(Arch arch, const SabrPoint& p) {
  return input_row(arch, p, uses_geometry(arch) ? features(p) : GeomFeatures{});
}

Matrix design_matrix(Arch arch, std::span<const Sample> rows) {
  Matrix x(rows.size(), input_width(arch));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto row = input_row(arch, rows[r].x, rows[r].features);
    std::copy(row.begin(), row.end(), x.row(r).begin());
  }
  return x;
}

double training_target(TargetMode mode, const Sample& s) {
  if (mode == TargetMode::direct) return s.sigma_mc;
  if (!(s.sigma_hagan > 0.0)) throw DomainError("residual target needs sigma_hagan > 0");
  return s.sigma_mc / s.sigma_hagan - 1.0;
}

std::vector<double> training_targets(TargetMode mode, std::span<const Sample> rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& s : rows) out.push_back(training_target(mode, s));
  return out;
}

double loss(std::span<const double> outputs, std::span<const Sample> rows, TargetMode mode) {
  if (outputs.size() != rows.size()) throw ShapeMismatch("loss: size mismatch");
  return mse(outputs, training_targets(mode, rows));
}

std::vector<double> raw_outputs(const ModelBundle& b, Matrix inputs) {
  b.scaler.apply(inputs);
  return b.net.predict(inputs).data;
}

namespace {

double combine(const ModelBundle& b, double raw, double sigma_hagan) {
  return b.target == TargetMode::residual_ratio ? sigma_hagan * (1.0 + raw) : raw;
}

}  // namespace

double predict_vol(const ModelBundle& b, const SabrPoint& p) {
  const SabrPoint one[] = {p};
  return predict_vols(b, one).front();
}

std::vector<double> predict_vols(const ModelBundle& b, std::span<const SabrPoint> points) {
  const bool residual = b.target == TargetMode::residual_ratio;
  Matrix x(points.size(), input_width(b.arch));
  std::vector<double> hagan(points.size(), 0.0);
  for (std::size_t r = 0; r < points.size(); ++r) {
    points[r].validate();
    const auto row = input_row(b.arch, points[r]);
    std::copy(row.begin(), row.end(), x.row(r).begin());
    if (residual) hagan[r] = hagan_vol(points[r], b.hagan);
  }
  auto raw = raw_outputs(b, std::move(x));
  for (std::size_t r = 0; r < raw.size(); ++r) raw[r] = combine(b, raw[r], hagan[r]);
  return raw;
}

std::vector<double> predict_rows(const ModelBundle& b, std::span<const Sample> rows) {
  auto raw = raw_outputs(b, design_matrix(b.arch, rows));
  for (std::size_t r = 0; r < raw.size(); ++r) raw[r] = combine(b, raw[r], rows[r].sigma_hagan);
  return raw;
}

}  // namespace sabrnet::nn

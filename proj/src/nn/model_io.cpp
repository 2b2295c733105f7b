#include "sabrnet/nn/model_io.hpp"

#include <fstream>
#include <sstream>

#include "sabrnet/errors.hpp"

namespace sabrnet::nn {

using nlohmann::json;

json to_json(const ModelBundle& b) {
  json layers = json::array();
  const auto& L = b.net.layers();
  for (std::size_t l = 0; l < L.size(); ++l) {
    json layer = {{"in", L[l].in}, {"out", L[l].out}, {"weight", L[l].weight}, {"bias", L[l].bias}};
    if (b.net.batch_norm() && l + 1 < L.size()) {
      const auto& bn = b.net.norms()[l];
      layer["batch_norm"] = {{"gamma", bn.gamma},
                             {"shift", bn.shift},
                             {"running_mean", bn.running_mean},
                             {"running_var", bn.running_var},
                             {"momentum", bn.momentum},
                             {"eps", bn.eps}};
    }
    layers.push_back(std::move(layer));
  }
  return {{"format_version", kModelFormatVersion},
          {"arch", to_string(b.arch)},
          {"target_mode", to_string(b.target)},
          {"layer_dims", b.net.layer_dims()},
          {"batch_norm", b.net.batch_norm()},
          {"layers", std::move(layers)},
          {"standardization", {{"mean", b.scaler.mean}, {"std", b.scaler.std}}},
          {"hagan_bracket", to_string(b.hagan.bracket)},
          {"manifest", b.manifest}};
}

ModelBundle bundle_from_json(const json& j) {
  ModelBundle b;
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion)
      throw ConfigError("model: unsupported format_version");
    b.arch = arch_from_string(j.at("arch").get<std::string>());
    b.target = target_mode_from_string(j.at("target_mode").get<std::string>());
    const bool batch_norm = j.at("batch_norm").get<bool>();
    std::vector<DenseLayer> layers;
    std::vector<BatchNorm> norms;
    const auto& jl = j.at("layers");
    for (std::size_t l = 0; l < jl.size(); ++l) {
      const auto& e = jl[l];
      layers.push_back(DenseLayer{e.at("in").get<std::size_t>(), e.at("out").get<std::size_t>(),
                                  e.at("weight").get<std::vector<double>>(),
                                  e.at("bias").get<std::vector<double>>()});
      if (batch_norm && l + 1 < jl.size()) {
        const auto& n = e.at("batch_norm");
        norms.push_back(BatchNorm{layers.back().out, n.at("gamma").get<std::vector<double>>(),
                                  n.at("shift").get<std::vector<double>>(),
                                  n.at("running_mean").get<std::vector<double>>(),
                                  n.at("running_var").get<std::vector<double>>(),
                                  n.at("momentum").get<double>(), n.at("eps").get<double>()});
      }
    }
    b.net.set_layers(std::move(layers), std::move(norms), batch_norm);
    if (b.net.layer_dims() != j.at("layer_dims").get<std::vector<std::size_t>>())
      throw ShapeMismatch("model: layer_dims disagree with layers");
    const auto& st = j.at("standardization");
    b.scaler.mean = st.at("mean").get<std::vector<double>>();
    b.scaler.std = st.at("std").get<std::vector<double>>();
    b.hagan.bracket = hagan_bracket_from_string(j.at("hagan_bracket").get<std::string>());
    b.manifest = j.value("manifest", json::object());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  b.validate();
  return b;
}

std::string model_json(const ModelBundle& b) { return to_json(b).dump(1) + "\n"; }

void save_model(const std::filesystem::path& path, const ModelBundle& b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file " + path.string());
  out << model_json(b);
  if (!out) throw ConfigError("write failed for " + path.string());
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read model file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("model " + path.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

}  // namespace sabrnet::nn

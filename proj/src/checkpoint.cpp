#include "advmod/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

namespace advmod {

namespace {

using nlohmann::json;

json activation_to_json(const ActivationKind& kind) {
  json j;
  j["fn"] = kind.name();
  if (kind.fn == ActivationKind::Fn::tanh_discrete) j["levels"] = kind.levels;
  return j;
}

ActivationKind activation_from_json(const json& j) {
  const std::string fn = j.at("fn").get<std::string>();
  if (fn == "sigmoid") return ActivationKind::sigmoid();
  if (fn == "tanh") return ActivationKind::tanh();
  if (fn == "relu") return ActivationKind::relu();
  if (fn == "tanh_discrete")
    return ActivationKind::tanh_discrete(j.at("levels").get<int>());
  throw CheckpointError("unknown activation: " + fn);
}

json layer_to_json(const Layer& layer) {
  json j;
  j["kind"] = layer.kind();
  if (const auto* fc = dynamic_cast<const FcLayer*>(&layer)) {
    j["d_in"] = fc->weights().shape[0];
    j["d_out"] = fc->weights().shape[1];
    j["weights"] = fc->weights().data;
    j["bias"] = fc->bias().data;
  } else if (const auto* conv = dynamic_cast<const Conv1dLayer*>(&layer)) {
    j["window"] = conv->spec().window;
    j["d_in"] = conv->spec().d_in;
    j["d_out"] = conv->spec().d_out;
    j["stride"] = conv->spec().stride;
    j["kernel"] = conv->kernel().data;
    j["bias"] = conv->bias().data;
  } else if (const auto* act = dynamic_cast<const ActivationLayer*>(&layer)) {
    if (act->activation().fn == ActivationKind::Fn::tanh_discrete)
      j["levels"] = act->activation().levels;
  } else if (const auto* rs = dynamic_cast<const ReshapeLayer*>(&layer)) {
    j["mode"] =
        rs->mode() == ReshapeLayer::Mode::expand_depth ? "expand" : "squeeze";
  }
  return j;
}

std::unique_ptr<Layer> layer_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fc") {
    const auto d_in = j.at("d_in").get<std::size_t>();
    const auto d_out = j.at("d_out").get<std::size_t>();
    Tensor w({d_in, d_out}, j.at("weights").get<std::vector<double>>());
    Tensor b({d_out}, j.at("bias").get<std::vector<double>>());
    return std::make_unique<FcLayer>(std::move(w), std::move(b));
  }
  if (kind == "conv1d") {
    ConvSpec spec{j.at("window").get<std::size_t>(), j.at("d_in").get<std::size_t>(),
                  j.at("d_out").get<std::size_t>(), j.at("stride").get<std::size_t>()};
    Tensor k({spec.window, spec.d_in, spec.d_out},
             j.at("kernel").get<std::vector<double>>());
    Tensor b({spec.d_out}, j.at("bias").get<std::vector<double>>());
    return std::make_unique<Conv1dLayer>(spec, std::move(k), std::move(b));
  }
  if (kind == "sigmoid" || kind == "tanh" || kind == "relu" ||
      kind == "tanh_discrete") {
    json act = j;
    act["fn"] = kind;
    return std::make_unique<ActivationLayer>(activation_from_json(act));
  }
  if (kind == "reshape") {
    const std::string mode = j.at("mode").get<std::string>();
    return std::make_unique<ReshapeLayer>(mode == "expand"
                                              ? ReshapeLayer::Mode::expand_depth
                                              : ReshapeLayer::Mode::squeeze_depth);
  }
  throw CheckpointError("unknown layer kind: " + kind);
}

}  // namespace

std::string network_to_json(const Network& net) {
  json j;
  j["format"] = "advmod-checkpoint-v1";
  j["role"] = role_name(net.role);
  j["block_len"] = net.block_len;
  j["output_activation"] = activation_to_json(net.output_activation);
  j["layers"] = json::array();
  for (const auto& layer : net.layers) j["layers"].push_back(layer_to_json(*layer));
  return j.dump(2);
}

Network network_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint parse error: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "advmod-checkpoint-v1") {
      throw CheckpointError("unsupported checkpoint format");
    }
    Network net;
    net.role = role_from_name(j.at("role").get<std::string>());
    net.block_len = j.at("block_len").get<std::size_t>();
    net.output_activation = activation_from_json(j.at("output_activation"));
    for (const auto& lj : j.at("layers")) net.layers.push_back(layer_from_json(lj));
    return net;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << network_to_json(net) << '\n';
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return network_from_json(text);
}

}  // namespace advmod

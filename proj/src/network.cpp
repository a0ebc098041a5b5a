#include "scdram/network.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scdram/error.hpp"

namespace scdram {

using nlohmann::json;

std::string Shape::to_string() const {
  return std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w);
}

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::FullyConnected: return "fc";
    case LayerKind::MaxPool: return "maxpool";
    case LayerKind::ReLU: return "relu";
  }
  return "?";
}

Shape LayerSpec::output() const {
  auto fail = [this](const std::string& why) { throw ValidationError("layer '" + name + "': " + why); };
  if (!input.positive()) fail("input shape " + input.to_string() + " must be positive");
  switch (kind) {
    case LayerKind::Conv: {
      if (out_channels <= 0 || kernel_h <= 0 || kernel_w <= 0 || stride <= 0 || padding < 0) {
        fail("conv parameters must be positive");
      }
      const std::int64_t hp = input.h + 2 * padding - kernel_h;
      const std::int64_t wp = input.w + 2 * padding - kernel_w;
      if (hp < 0 || wp < 0) fail("kernel larger than padded input");
      return {out_channels, hp / stride + 1, wp / stride + 1};
    }
    case LayerKind::FullyConnected:
      if (out_features <= 0) fail("fc output count must be positive");
      return {out_features, 1, 1};
    case LayerKind::MaxPool: {
      if (window <= 0 || stride <= 0 || padding < 0) fail("pool parameters must be positive");
      const std::int64_t hp = input.h + 2 * padding - window;
      const std::int64_t wp = input.w + 2 * padding - window;
      if (hp < 0 || wp < 0) fail("pool window larger than padded input");
      return {input.c, hp / stride + 1, wp / stride + 1};
    }
    case LayerKind::ReLU:
      return input;
  }
  return input;
}

std::int64_t LayerSpec::dot_length() const {
  switch (kind) {
    case LayerKind::Conv: return input.c * kernel_h * kernel_w;
    case LayerKind::FullyConnected: return input.elements();
    default: return 0;
  }
}

std::int64_t LayerSpec::dot_products() const {
  switch (kind) {
    case LayerKind::Conv:
    case LayerKind::FullyConnected: return output().elements();
    default: return 0;
  }
}

std::uint64_t count_macs(const LayerSpec& layer) {
  return static_cast<std::uint64_t>(layer.dot_length()) * static_cast<std::uint64_t>(layer.dot_products());
}

std::uint64_t NetworkSpec::total_macs() const {
  std::uint64_t n = 0;
  for (const auto& l : layers) n += count_macs(l);
  return n;
}

void NetworkSpec::validate() const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Shape out = layers[i].output();
    (void)out;
    if (i > 0 && !layers[i].branch && !(layers[i].input == layers[i - 1].output())) {
      throw ValidationError("layer '" + layers[i].name + "' expects input " + layers[i].input.to_string() +
                            " but the previous layer produces " + layers[i - 1].output().to_string());
    }
  }
}

namespace {

std::int64_t get_int(const json& j, const char* key, std::int64_t fallback, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw ValidationError(where + ": '" + key + "' must be an integer");
  return it->get<std::int64_t>();
}

Shape get_shape(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number_integer() || !v[1].is_number_integer() ||
      !v[2].is_number_integer()) {
    throw ValidationError(where + ": shape must be [C,H,W] integers");
  }
  return {v[0].get<std::int64_t>(), v[1].get<std::int64_t>(), v[2].get<std::int64_t>()};
}

LayerKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "conv") return LayerKind::Conv;
  if (s == "fc") return LayerKind::FullyConnected;
  if (s == "maxpool" || s == "pool") return LayerKind::MaxPool;
  if (s == "relu") return LayerKind::ReLU;
  throw ValidationError(where + ": unknown layer kind '" + s + "'");
}

}  // namespace

NetworkSpec parse_network(std::string_view json_text, std::string_view origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // Report a line number for the byte offset nlohmann gives us.
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < json_text.size(); ++i) line += json_text[i] == '\n';
    throw ParseError(std::string(origin) + ": " + e.what(), line);
  }
  const std::string where(origin);
  if (!j.is_object()) throw ValidationError(where + ": network must be a JSON object");
  NetworkSpec net;
  net.name = j.value("name", std::string("unnamed"));
  if (!j.contains("input")) throw ValidationError(where + ": missing 'input'");
  Shape current = get_shape(j["input"], where + ": input");
  if (!j.contains("layers") || !j["layers"].is_array()) throw ValidationError(where + ": missing 'layers' array");

  std::size_t index = 0;
  for (const auto& lj : j["layers"]) {
    const std::string lw = where + ": layers[" + std::to_string(index) + "]";
    if (!lj.is_object() || !lj.contains("kind") || !lj["kind"].is_string()) {
      throw ValidationError(lw + ": needs a string 'kind'");
    }
    LayerSpec l;
    l.kind = parse_kind(lj["kind"].get<std::string>(), lw);
    l.name = lj.value("name", std::string(to_string(l.kind)) + std::to_string(index));
    l.branch = lj.value("branch", false);
    l.input = lj.contains("input") ? get_shape(lj["input"], lw + ".input") : current;
    l.stride = get_int(lj, "stride", 1, lw);
    l.padding = get_int(lj, "padding", 0, lw);
    switch (l.kind) {
      case LayerKind::Conv: {
        l.out_channels = get_int(lj, "out_channels", 0, lw);
        auto k = lj.find("kernel");
        if (k == lj.end()) throw ValidationError(lw + ": conv needs 'kernel'");
        if (k->is_array() && k->size() == 2) {
          l.kernel_h = (*k)[0].get<std::int64_t>();
          l.kernel_w = (*k)[1].get<std::int64_t>();
        } else if (k->is_number_integer()) {
          l.kernel_h = l.kernel_w = k->get<std::int64_t>();
        } else {
          throw ValidationError(lw + ": 'kernel' must be an integer or [R,S]");
        }
        break;
      }
      case LayerKind::FullyConnected:
        l.out_features = get_int(lj, "out", 0, lw);
        break;
      case LayerKind::MaxPool:
        l.window = get_int(lj, "window", 0, lw);
        l.stride = get_int(lj, "stride", l.window, lw);
        break;
      case LayerKind::ReLU:
        break;
    }
    if (lj.contains("input") && !l.branch && index > 0 && !(l.input == current)) {
      throw ValidationError(lw + ": explicit input " + l.input.to_string() + " differs from the previous output " +
                            current.to_string() + " without \"branch\": true");
    }
    current = l.output();
    net.layers.push_back(std::move(l));
    ++index;
  }
  net.validate();
  return net;
}

NetworkSpec load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open network " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str(), path.filename().string());
}

}  // namespace scdram

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scdram {

struct Shape {
  std::int64_t c = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  std::int64_t elements() const noexcept { return c * h * w; }
  bool positive() const noexcept { return c > 0 && h > 0 && w > 0; }
  std::string to_string() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

enum class LayerKind { Conv, FullyConnected, MaxPool, ReLU };

std::string_view to_string(LayerKind kind) noexcept;

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  Shape input;
  // Conv
  std::int64_t out_channels = 0;
  std::int64_t kernel_h = 1;
  std::int64_t kernel_w = 1;
  // Conv and MaxPool
  std::int64_t stride = 1;
  std::int64_t padding = 0;
  // FullyConnected (input is flattened)
  std::int64_t out_features = 0;
  // MaxPool: square window side
  std::int64_t window = 0;
  /// Input taken from an earlier tensor rather than the previous layer
  /// (inception branches, residual projections).
  bool branch = false;

  /// Throws ValidationError on non-positive or inconsistent shapes.
  Shape output() const;
  /// Length of each dot product (C*R*S for Conv, C*H*W for FC; 0 otherwise).
  std::int64_t dot_length() const;
  /// Number of dot products (output elements of Conv/FC; 0 otherwise).
  std::int64_t dot_products() const;
};

/// MACs of one layer: K*C*R*S*H_out*W_out for Conv, in*out for FC, 0 for
/// pooling and ReLU.
std::uint64_t count_macs(const LayerSpec& layer);

struct NetworkSpec {
  std::string name;
  std::vector<LayerSpec> layers;

  std::uint64_t total_macs() const;
  /// Checks every layer shape and that each non-branch layer consumes the
  /// previous layer's output.
  void validate() const;
};

/// JSON schema:
///   {"name": str, "input": [C,H,W], "layers": [
///      {"name": str, "kind": "conv", "out_channels": K, "kernel": [R,S] | R,
///       "stride": s, "padding": p},
///      {"kind": "fc", "out": N},
///      {"kind": "maxpool", "window": k, "stride": s, "padding": p},
///      {"kind": "relu"}, ...]}
/// A layer may carry "input": [C,H,W] together with "branch": true to read a
/// tensor other than its predecessor's output.
NetworkSpec parse_network(std::string_view json_text, std::string_view origin = "<string>");
NetworkSpec load_network(const std::filesystem::path& path);

}  // namespace scdram

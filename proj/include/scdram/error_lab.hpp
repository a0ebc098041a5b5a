#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "scdram/network.hpp"
#include "scdram/processing_element.hpp"

namespace scdram {

/// Where the absolute error is measured for a fan-in-F accumulation.
///  ScaledOutput: on the MUX output itself, sum / F, a value in [0, 1].
///  UnscaledSum:  on F times that, i.e. on the sum of products.
enum class ApeConvention { ScaledOutput, UnscaledSum };

std::string_view to_string(ApeConvention c) noexcept;
ApeConvention parse_convention(std::string_view text);  // "scaled" | "unscaled"

/// Factor converting a ScaledOutput APE to the given convention.
constexpr double convention_factor(ApeConvention c, unsigned fanin) noexcept {
  return c == ApeConvention::UnscaledSum ? static_cast<double>(fanin) : 1.0;
}

struct OperandPair {
  double a = 0.0;
  double b = 0.0;
};

struct ApeStats {
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
  double p99 = 0.0;
  std::uint64_t trials = 0;
  std::size_t length = 0;
  unsigned fanin = 16;
  ApeConvention convention = ApeConvention::UnscaledSum;
};

/// One accumulation trial. `a` values are encoded Thermometer and `b` values
/// ClockDivision, each with round(x * length) set bits; products go through
/// sc_mul and, for fan-in 16, sc_acc16 with gen_rnd_selects(rnd_seed, length).
/// With fan-in 1 the single product is decoded directly. Returns
/// |observed - expected| under `convention`. Throws InvalidArgument for values
/// outside [0, 1], a pair count other than 1 or 16, or a length that is not a
/// positive multiple of 64.
double ape_trial(std::span<const OperandPair> pairs, std::size_t length, std::uint64_t rnd_seed,
                 ApeConvention convention = ApeConvention::UnscaledSum);

enum class OperandDistribution { Uniform };

struct SweepOptions {
  std::vector<std::size_t> lengths{64, 128, 256, 512, 1024};
  unsigned fanin = 16;
  std::uint64_t trials = 100000;
  OperandDistribution distribution = OperandDistribution::Uniform;
  ApeConvention convention = ApeConvention::UnscaledSum;
  std::uint64_t seed = 1;
  unsigned parallel = 1;
};

/// Trial t draws its operands from derive_seed(seed, kStreamOperands, t), so
/// every length sees the same operands; its selects come from
/// derive_seed(seed, kStreamRnd, t) mixed with the length. Output does not
/// depend on `parallel`. Throws InvalidArgument when trials == 0.
std::vector<ApeStats> ape_sweep(const SweepOptions& options);

/// CSV header: format_version,length,fanin,convention,trials,mean,stddev,stderr,p99
void write_sweep_csv(std::ostream& os, std::span<const ApeStats> rows);

// ---------------------------------------------------------------------------
// Small-network fidelity

/// A small CNN with 8-bit weights. Activations are unsigned codes in
/// [0, 255] standing for code / 256; weights are sign-magnitude integers with
/// |w| <= 255 standing for w / 256.
struct SmallCnn {
  NetworkSpec spec;
  /// Per layer: weights laid out [out][in] for FC and [K][C][R][S] for Conv;
  /// empty for pooling and ReLU layers.
  std::vector<std::vector<std::int32_t>> weights;
  /// Per layer: power-of-two divisor applied to the dot product before ReLU
  /// re-quantization.
  std::vector<int> output_shift;
};

/// Deterministic random 2-layer network: conv 4x6x6 -> 8 (3x3), ReLU,
/// fc 128 -> 10 (5 888 MACs).
SmallCnn make_random_small_cnn(std::uint64_t seed);
/// Random input codes for `shape`.
std::vector<std::int32_t> make_random_input(const Shape& shape, std::uint64_t seed);

struct LayerFidelity {
  std::size_t layer_index = 0;
  std::size_t outputs = 0;
  /// max |stochastic - exact| of the dot products, where the exact value is
  /// computed in double from the same (quantized) layer inputs.
  double max_local_error = 0.0;
  /// Largest groups * per_group_bound over the layer's outputs.
  double max_bound = 0.0;
  std::size_t violations = 0;
  std::size_t max_groups = 0;
};

struct FidelityReport {
  std::vector<LayerFidelity> layers;
  std::vector<double> stochastic_outputs;
  std::vector<double> float_outputs;
  /// max |stochastic - float| at the network output, where the float oracle
  /// runs the whole network without quantization.
  double max_output_error = 0.0;
  /// Per-output composition bound: local group bounds plus input error
  /// propagated through |weights|, ReLU rounding (half a code) and pooling.
  std::vector<double> output_bounds;
  std::size_t output_violations = 0;
  std::size_t violations() const noexcept;
};

/// Runs the full PE pipeline (B-to-S, F_MAC groups, pop count, binary
/// accumulation, ReLU, re-encode) next to a double-precision oracle.
/// `per_group_bound` is the per-group APE bound in sum units (typically the
/// 99th percentile from ape_sweep). Supports Conv, FC, ReLU and MaxPool.
FidelityReport small_cnn_fidelity(const SmallCnn& net, std::span<const std::int32_t> input, ProcessingElement& pe,
                                  double per_group_bound);

}  // namespace scdram

#include <algorithm>
#include <cmath>

#include "scdram/error.hpp"
#include "scdram/error_lab.hpp"
#include "scdram/seed.hpp"

namespace scdram {

namespace {

constexpr unsigned kWidth = 8;
constexpr double kUnit = 1.0 / 256.0;
constexpr double kMaxActivation = 255.0 / 256.0;

std::vector<std::int32_t> random_codes(std::size_t n, std::int32_t lo, std::int32_t hi, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::int32_t> out(n);
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  for (auto& v : out) v = lo + static_cast<std::int32_t>(rng.below(span));
  return out;
}

// Activation tensor flowing through both pipelines.
struct Tensor {
  Shape shape;
  std::vector<ScaledValue> sc;   // stochastic pipeline
  std::vector<double> ref;       // float oracle
  std::vector<double> bound;     // |sc - ref| bound per element
};

std::vector<std::int32_t> as_codes(const Tensor& t, std::size_t layer) {
  std::vector<std::int32_t> codes(t.sc.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto& v = t.sc[i];
    if (v.scale_log2 != 0 || v.reference_length != (std::size_t{1} << kWidth) || v.sign == Sign::Negative) {
      throw InvalidArgument("layer " + std::to_string(layer) + " consumes values that are not activation codes");
    }
    codes[i] = static_cast<std::int32_t>(v.mantissa);
  }
  return codes;
}

// Index lists (into the input tensor, -1 for zero padding) for each dot product,
// with the matching weight offset.
struct DotPlan {
  std::vector<std::int64_t> inputs;
  std::size_t weight_offset = 0;
};

std::vector<DotPlan> plan_dots(const LayerSpec& layer) {
  const Shape in = layer.input;
  const Shape out = layer.output();
  std::vector<DotPlan> plans;
  if (layer.kind == LayerKind::FullyConnected) {
    const std::int64_t n = in.c * in.h * in.w;
    for (std::int64_t o = 0; o < layer.out_features; ++o) {
      DotPlan p;
      p.weight_offset = static_cast<std::size_t>(o * n);
      for (std::int64_t i = 0; i < n; ++i) p.inputs.push_back(i);
      plans.push_back(std::move(p));
    }
    return plans;
  }
  const std::int64_t kernel = in.c * layer.kernel_h * layer.kernel_w;
  for (std::int64_t k = 0; k < out.c; ++k) {
    for (std::int64_t y = 0; y < out.h; ++y) {
      for (std::int64_t x = 0; x < out.w; ++x) {
        DotPlan p;
        p.weight_offset = static_cast<std::size_t>(k * kernel);
        for (std::int64_t c = 0; c < in.c; ++c) {
          for (std::int64_t r = 0; r < layer.kernel_h; ++r) {
            for (std::int64_t s = 0; s < layer.kernel_w; ++s) {
              const std::int64_t iy = y * layer.stride - layer.padding + r;
              const std::int64_t ix = x * layer.stride - layer.padding + s;
              const bool inside = iy >= 0 && iy < in.h && ix >= 0 && ix < in.w;
              p.inputs.push_back(inside ? (c * in.h + iy) * in.w + ix : -1);
            }
          }
        }
        plans.push_back(std::move(p));
      }
    }
  }
  return plans;
}

Tensor run_compute(const LayerSpec& layer, std::size_t index, const std::vector<std::int32_t>& weights, int shift,
                   const Tensor& in, ProcessingElement& pe, double per_group_bound, LayerFidelity& fid) {
  const auto codes = as_codes(in, index);
  const auto plans = plan_dots(layer);
  const std::size_t d = static_cast<std::size_t>(layer.dot_length());
  const std::size_t rows = static_cast<std::size_t>(layer.kind == LayerKind::Conv ? layer.output().c
                                                                                     : layer.out_features);
  if (weights.size() != rows * d) {
    throw ValidationError("layer " + std::to_string(index) + " weight count does not match its shape");
  }
  const double scale = std::ldexp(1.0, -shift);

  Tensor out;
  out.shape = layer.output();
  std::vector<std::int32_t> a(d);
  std::vector<std::int32_t> b(d);
  for (const auto& plan : plans) {
    double exact = 0.0;      // same quantized inputs, double arithmetic
    double reference = 0.0;  // float oracle inputs
    double propagated = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const std::int64_t src = plan.inputs[i];
      const std::int32_t w = weights[plan.weight_offset + i];
      b[i] = w;
      a[i] = src < 0 ? 0 : codes[static_cast<std::size_t>(src)];
      if (src < 0) continue;
      const auto s = static_cast<std::size_t>(src);
      exact += a[i] * kUnit * (w * kUnit);
      reference += in.ref[s] * (w * kUnit);
      propagated += std::abs(w * kUnit) * in.bound[s];
    }
    const DotProductResult r = dot_product(pe, a, b, kWidth);
    const double local = std::abs(r.value.value() - exact);
    const double local_bound = static_cast<double>(r.groups()) * per_group_bound;
    fid.max_local_error = std::max(fid.max_local_error, local);
    fid.max_bound = std::max(fid.max_bound, local_bound);
    fid.max_groups = std::max(fid.max_groups, r.groups());
    if (local > local_bound) ++fid.violations;

    ScaledValue v = r.value;
    v.scale_log2 += shift;
    out.sc.push_back(v);
    out.ref.push_back(reference * scale);
    out.bound.push_back((propagated + local_bound) * scale);
  }
  fid.outputs = plans.size();
  return out;
}

Tensor run_relu(const Tensor& in) {
  Tensor out;
  out.shape = in.shape;
  for (std::size_t i = 0; i < in.sc.size(); ++i) {
    out.sc.push_back(relu_binary(in.sc[i], kWidth));
    out.ref.push_back(std::clamp(in.ref[i], 0.0, kMaxActivation));
    out.bound.push_back(in.bound[i] + 0.5 * kUnit);
  }
  return out;
}

Tensor run_max_pool(const LayerSpec& layer, const Tensor& in) {
  Tensor out;
  out.shape = layer.output();
  const Shape s = in.shape;
  std::vector<ScaledValue> xs;
  for (std::int64_t c = 0; c < out.shape.c; ++c) {
    for (std::int64_t y = 0; y < out.shape.h; ++y) {
      for (std::int64_t x = 0; x < out.shape.w; ++x) {
        xs.clear();
        double ref = -INFINITY;
        double bound = 0.0;
        for (std::int64_t r = 0; r < layer.window; ++r) {
          for (std::int64_t q = 0; q < layer.window; ++q) {
            const std::int64_t iy = y * layer.stride - layer.padding + r;
            const std::int64_t ix = x * layer.stride - layer.padding + q;
            if (iy < 0 || iy >= s.h || ix < 0 || ix >= s.w) {
              xs.push_back(ScaledValue{0, in.sc.front().scale_log2, in.sc.front().reference_length});
              ref = std::max(ref, 0.0);
              continue;
            }
            const auto i = static_cast<std::size_t>((c * s.h + iy) * s.w + ix);
            xs.push_back(in.sc[i]);
            ref = std::max(ref, in.ref[i]);
            bound = std::max(bound, in.bound[i]);
          }
        }
        out.sc.push_back(max_pool_binary(xs, xs.size()));
        out.ref.push_back(ref);
        out.bound.push_back(bound);
      }
    }
  }
  return out;
}

}  // namespace

std::size_t FidelityReport::violations() const noexcept {
  std::size_t n = output_violations;
  for (const auto& l : layers) n += l.violations;
  return n;
}

SmallCnn make_random_small_cnn(std::uint64_t seed) {
  SmallCnn net;
  net.spec.name = "small-cnn";
  LayerSpec conv;
  conv.name = "conv1";
  conv.kind = LayerKind::Conv;
  conv.input = {4, 6, 6};
  conv.out_channels = 8;
  conv.kernel_h = 3;
  conv.kernel_w = 3;
  LayerSpec relu;
  relu.name = "relu1";
  relu.kind = LayerKind::ReLU;
  relu.input = conv.output();
  LayerSpec fc;
  fc.name = "fc2";
  fc.kind = LayerKind::FullyConnected;
  fc.input = relu.output();
  fc.out_features = 10;
  net.spec.layers = {conv, relu, fc};
  net.spec.validate();

  net.weights.resize(3);
  net.weights[0] = random_codes(8 * 4 * 3 * 3, -255, 255, derive_seed(seed, kStreamWeights, 0));
  net.weights[2] = random_codes(128 * 10, -255, 255, derive_seed(seed, kStreamWeights, 2));
  net.output_shift = {2, 0, 3};
  return net;
}

std::vector<std::int32_t> make_random_input(const Shape& shape, std::uint64_t seed) {
  return random_codes(static_cast<std::size_t>(shape.c * shape.h * shape.w), 0, 255,
                      derive_seed(seed, kStreamInputs, 0));
}

FidelityReport small_cnn_fidelity(const SmallCnn& net, std::span<const std::int32_t> input, ProcessingElement& pe,
                                  double per_group_bound) {
  if (net.spec.layers.empty()) throw InvalidArgument("network has no layers");
  if (net.weights.size() != net.spec.layers.size() || net.output_shift.size() != net.spec.layers.size()) {
    throw ValidationError("weights and shifts must be given for every layer");
  }
  if (!(per_group_bound >= 0.0)) throw InvalidArgument("per-group bound must be non-negative");
  net.spec.validate();

  Tensor t;
  t.shape = net.spec.layers.front().input;
  if (input.size() != static_cast<std::size_t>(t.shape.c * t.shape.h * t.shape.w)) {
    throw LengthMismatch("input size does not match the first layer");
  }
  for (std::int32_t x : input) {
    if (x < 0 || x > 255) throw InvalidArgument("input codes must lie in [0, 255]");
    t.sc.push_back(ScaledValue{static_cast<std::uint64_t>(x), 0, std::size_t{1} << kWidth});
    t.ref.push_back(x * kUnit);
    t.bound.push_back(0.0);
  }

  FidelityReport report;
  for (std::size_t i = 0; i < net.spec.layers.size(); ++i) {
    const LayerSpec& layer = net.spec.layers[i];
    LayerFidelity fid;
    fid.layer_index = i;
    switch (layer.kind) {
      case LayerKind::Conv:
      case LayerKind::FullyConnected:
        t = run_compute(layer, i, net.weights[i], net.output_shift[i], t, pe, per_group_bound, fid);
        break;
      case LayerKind::ReLU:
        t = run_relu(t);
        fid.outputs = t.sc.size();
        break;
      case LayerKind::MaxPool:
        t = run_max_pool(layer, t);
        fid.outputs = t.sc.size();
        break;
    }
    report.layers.push_back(fid);
  }

  for (std::size_t i = 0; i < t.sc.size(); ++i) {
    const double sc = t.sc[i].value();
    const double err = std::abs(sc - t.ref[i]);
    report.stochastic_outputs.push_back(sc);
    report.float_outputs.push_back(t.ref[i]);
    report.output_bounds.push_back(t.bound[i]);
    report.max_output_error = std::max(report.max_output_error, err);
    // tolerance for double rounding in the oracle
    if (err > t.bound[i] + 1e-9) ++report.output_violations;
  }
  return report;
}

}  // namespace scdram

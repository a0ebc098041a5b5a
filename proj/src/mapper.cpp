#include "scdram/mapper.hpp"

#include "scdram/error.hpp"

namespace scdram {

std::uint64_t LayerMapping::units_on_pe(std::uint64_t pe) const noexcept {
  if (total_units == 0) return 0;
  return pe < pes_high ? units_high : units_low;
}

std::uint64_t Mapping::total_units() const {
  std::uint64_t n = 0;
  for (const auto& l : layers) n += l.total_units;
  return n;
}

std::uint64_t Mapping::total_macs() const {
  std::uint64_t n = 0;
  for (const auto& l : layers) n += l.macs;
  return n;
}

std::uint64_t Mapping::units_on_pe(std::uint64_t pe) const {
  std::uint64_t n = 0;
  for (const auto& l : layers) n += l.units_on_pe(pe);
  return n;
}

Mapping map_network(const NetworkSpec& net, const AcceleratorConfig& cfg) {
  net.validate();
  cfg.validate();
  Mapping m;
  m.network = net.name;
  m.accelerator = cfg.name;
  m.num_pes = static_cast<std::uint64_t>(cfg.num_pes);
  m.macs_per_unit = static_cast<std::uint64_t>(cfg.macs_per_fmac());

  const std::int64_t free_rows = cfg.bitline_cells - cfg.reserved_rows - kWorkingRows;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const LayerSpec& spec = net.layers[i];
    LayerMapping l;
    l.layer_index = i;
    l.name = spec.name;
    l.kind = spec.kind;
    l.macs = count_macs(spec);
    l.weight_bits_per_unit = m.macs_per_unit * static_cast<std::uint64_t>(cfg.weight_bits_per_mac);
    l.row_bits = static_cast<std::uint64_t>(cfg.row_bits);
    l.resident_rows = free_rows > 0 ? static_cast<std::uint64_t>(free_rows) : 0;
    if (l.macs > 0) {
      l.outputs = static_cast<std::uint64_t>(spec.dot_products());
      l.dot_length = static_cast<std::uint64_t>(spec.dot_length());
      l.units_per_output = LayerMapping::ceil_div(l.dot_length, m.macs_per_unit);
      l.total_units = l.outputs * l.units_per_output;
      l.merges = l.outputs * (l.units_per_output - 1);
      l.input_activations = static_cast<std::uint64_t>(spec.input.elements());

      l.active_pes = std::min(l.total_units, m.num_pes);
      l.units_low = l.total_units / m.num_pes;
      const std::uint64_t rem = l.total_units % m.num_pes;
      if (rem == 0) {
        l.units_high = l.units_low;
        l.pes_high = m.num_pes;
      } else {
        l.units_high = l.units_low + 1;
        l.pes_high = rem;
      }
    }
    m.layers.push_back(std::move(l));
  }
  return m;
}

}  // namespace scdram

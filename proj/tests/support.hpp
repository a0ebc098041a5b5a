#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "scdram/accelerator_config.hpp"
#include "scdram/bit_vector.hpp"
#include "scdram/rnd_selects.hpp"

namespace support {

inline std::filesystem::path data_dir() { return SCDRAM_DATA_DIR; }
inline std::filesystem::path cli_path() { return SCDRAM_CLI_PATH; }

inline std::vector<scdram::AcceleratorConfig> shipped_configs() {
  return scdram::load_config_dir(data_dir() / "configs");
}

inline scdram::AcceleratorConfig shipped_config(const std::string& name) {
  for (auto& c : shipped_configs()) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no shipped config " + name);
}

// Reference implementations below work one bit at a time and share no code
// with the library.

inline scdram::BitVector naive_thermometer(std::size_t ones, std::size_t length) {
  scdram::BitVector v(length);
  for (std::size_t j = 0; j < ones; ++j) v.set(j);
  return v;
}

inline scdram::BitVector naive_clock_division(std::size_t ones, std::size_t length) {
  scdram::BitVector v(length);
  for (std::size_t j = 0; j < length; ++j) {
    if ((j + 1) * ones / length > j * ones / length) v.set(j);
  }
  return v;
}

inline std::size_t naive_popcount(const scdram::BitVector& v) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.length(); ++i) n += v.test(i) ? 1 : 0;
  return n;
}

inline scdram::BitVector naive_and(const scdram::BitVector& a, const scdram::BitVector& b) {
  scdram::BitVector v(a.length());
  for (std::size_t i = 0; i < a.length(); ++i) v.set(i, a.test(i) && b.test(i));
  return v;
}

inline scdram::BitVector naive_mux(const std::vector<scdram::BitVector>& inputs, const scdram::RndSelects& rnd) {
  scdram::BitVector v(inputs.front().length());
  for (std::size_t j = 0; j < v.length(); ++j) v.set(j, inputs[rnd[j]].test(j));
  return v;
}

}  // namespace support

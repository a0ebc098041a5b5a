#pragma once

#include <optional>
#include <string>

namespace scdram {

/// Version stamped into every emitted CSV and manifest.
inline constexpr int kFormatVersion = 1;

/// Shortest round-trip decimal form of `v` (std::to_chars), locale-free.
std::string fmt_double(double v);
std::string fmt_optional(const std::optional<double>& v);
/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace scdram

#include "scdram/accelerator_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "scdram/error.hpp"

namespace scdram {

using nlohmann::json;

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw InvalidArgument("rational denominator must be positive");
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

Rational Rational::parse(std::string_view text) {
  const std::string s(text);
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      std::size_t used = 0;
      const long long n = std::stoll(s.substr(0, slash), &used);
      if (used != slash) throw InvalidArgument("bad numerator");
      const std::string den_text = s.substr(slash + 1);
      const long long d = std::stoll(den_text, &used);
      if (used != den_text.size()) throw InvalidArgument("bad denominator");
      return make(n, d);
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InvalidArgument("trailing characters");
    const std::int64_t scale = 1000000;
    const double scaled = v * static_cast<double>(scale);
    if (std::abs(scaled - std::round(scaled)) > 1e-6) throw InvalidArgument("too many decimals");
    return make(static_cast<std::int64_t>(std::llround(scaled)), scale);
  } catch (const std::logic_error&) {
    throw ValidationError("cannot parse rational '" + s + "'");
  } catch (const InvalidArgument& e) {
    throw ValidationError("cannot parse rational '" + s + "': " + e.what());
  }
}

std::string Rational::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Rational operator+(Rational a, Rational b) {
  const std::int64_t l = std::lcm(a.den, b.den);
  return Rational::make(a.num * (l / a.den) + b.num * (l / b.den), l);
}

std::int64_t AcceleratorConfig::macs_per_fmac() const { return std::lcm(mul_mocs.den, acc_mocs.den); }

std::int64_t AcceleratorConfig::mocs_per_fmac() const {
  const Rational total = mul_mocs + acc_mocs;
  return total.num * (macs_per_fmac() / total.den);
}

void AcceleratorConfig::validate() const {
  auto fail = [this](const std::string& field, const std::string& why) {
    throw ValidationError("config '" + name + "': field '" + field + "' " + why);
  };
  if (name.empty()) fail("name", "must be non-empty");
  if (mul_mocs.num < 0) fail("mul_mocs", "must be non-negative");
  if (acc_mocs.num < 0) fail("acc_mocs", "must be non-negative");
  if ((mul_mocs + acc_mocs).num <= 0) fail("acc_mocs", "together with mul_mocs must be positive");
  const std::pair<const char*, double> non_negative[] = {
      {"moc_ns", moc_ns}, {"b2s_ns", b2s_ns}, {"pc_ns", pc_ns}, {"area_mm2", area_mm2},
      {"avg_power_w", avg_power_w}, {"transfer_ns_per_hop", transfer_ns_per_hop},
      {"moc_energy_pj", moc_energy_pj}};
  for (const auto& [field, v] : non_negative) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(field, "must be a finite non-negative number");
  }
  if (num_pes < 1) fail("num_pes", "must be at least 1");
  if (bitline_cells < 1) fail("bitline_cells", "must be at least 1");
  if (row_bits < 8) fail("row_bits", "must be at least 8");
  if (reserved_rows < 0 || reserved_rows >= bitline_cells) fail("reserved_rows", "must leave at least one data row");
  if (weight_bits_per_mac < 1) fail("weight_bits_per_mac", "must be at least 1");
  for (const auto& [component, o] : component_overheads) {
    if (o.area_mm2 < 0 || o.latency_ns < 0 || o.energy_pj < 0) {
      fail("component_overheads." + component, "must be non-negative");
    }
  }
}

namespace {

class Reader {
 public:
  Reader(const json& j, std::string origin) : j_(j), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& why) const {
    throw ValidationError(origin_ + ": field '" + field + "' " + why);
  }

  const json* find(const std::string& field, bool required) const {
    auto it = j_.find(field);
    if (it == j_.end() || it->is_null()) {
      if (required) fail(field, "is missing");
      return nullptr;
    }
    return &*it;
  }

  double number(const std::string& field) const { return number_at(*find(field, true), field); }
  std::optional<double> opt_number(const std::string& field) const {
    const json* v = find(field, false);
    return v ? std::optional<double>(number_at(*v, field)) : std::nullopt;
  }
  std::int64_t integer(const std::string& field) const { return integer_at(*find(field, true), field); }
  std::optional<std::int64_t> opt_integer(const std::string& field) const {
    const json* v = find(field, false);
    return v ? std::optional<std::int64_t>(integer_at(*v, field)) : std::nullopt;
  }
  bool boolean(const std::string& field) const {
    const json& v = *find(field, true);
    if (!v.is_boolean()) fail(field, "must be true or false");
    return v.get<bool>();
  }
  std::string text(const std::string& field) const {
    const json& v = *find(field, true);
    if (!v.is_string()) fail(field, "must be a string");
    return v.get<std::string>();
  }
  Rational rational(const std::string& field) const { return rational_at(*find(field, true), field); }
  std::optional<Rational> opt_rational(const std::string& field) const {
    const json* v = find(field, false);
    return v ? std::optional<Rational>(rational_at(*v, field)) : std::nullopt;
  }

  double number_at(const json& v, const std::string& field) const {
    if (!v.is_number()) fail(field, "must be a number");
    return v.get<double>();
  }
  std::int64_t integer_at(const json& v, const std::string& field) const {
    if (!v.is_number_integer()) fail(field, "must be an integer");
    return v.get<std::int64_t>();
  }
  Rational rational_at(const json& v, const std::string& field) const {
    if (v.is_number_integer()) return Rational::make(v.get<std::int64_t>(), 1);
    if (v.is_string() || v.is_number()) {
      try {
        return Rational::parse(v.is_string() ? v.get<std::string>() : v.dump());
      } catch (const ValidationError& e) {
        fail(field, e.what());
      }
    }
    fail(field, "must be an integer, a decimal, or an \"n/d\" string");
  }

 private:
  const json& j_;
  std::string origin_;
};

}  // namespace

AcceleratorConfig parse_config(std::string_view json_text, std::string_view origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(origin) + ": " + e.what());
  }
  if (!j.is_object()) throw ValidationError(std::string(origin) + ": config must be a JSON object");

  const Reader r(j, std::string(origin));
  AcceleratorConfig c;
  c.name = r.text("name");
  c.mul_mocs = r.rational("mul_mocs");
  c.acc_mocs = r.rational("acc_mocs");
  c.moc_ns = r.number("moc_ns");
  c.b2s_ns = r.number("b2s_ns");
  c.pc_ns = r.number("pc_ns");
  c.num_pes = r.integer("num_pes");
  c.area_mm2 = r.number("area_mm2");
  c.avg_power_w = r.opt_number("avg_power_w").value_or(0.0);
  c.bitline_cells = r.integer("bitline_cells");
  c.transfer_ns_per_hop = r.number("transfer_ns_per_hop");
  c.pc_offloaded = r.boolean("pc_offloaded");
  c.weight_bits_per_mac = r.integer("weight_bits_per_mac");
  c.moc_energy_pj = r.opt_number("moc_energy_pj").value_or(AcceleratorConfig::default_moc_energy_pj(c.bitline_cells));
  c.row_bits = r.opt_integer("row_bits").value_or(8192);
  c.reserved_rows = r.opt_integer("reserved_rows").value_or(0);
  c.published_mac_ns = r.opt_number("published_mac_ns");
  c.published_num_pes = r.opt_integer("published_num_pes");
  c.alt_acc_mocs = r.opt_rational("alt_acc_mocs");

  if (const json* comps = r.find("component_overheads", false)) {
    if (!comps->is_object()) r.fail("component_overheads", "must be an object");
    for (const auto& [key, value] : comps->items()) {
      const Reader cr(value, std::string(origin) + ": component_overheads." + key);
      c.component_overheads[key] = ComponentOverhead{cr.number("area_mm2"), cr.number("latency_ns"),
                                                     cr.number("energy_pj")};
    }
  }
  c.validate();
  return c;
}

AcceleratorConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.filename().string());
}

std::vector<AcceleratorConfig> load_config_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValidationError("config directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<AcceleratorConfig> out;
  for (const auto& f : files) out.push_back(load_config(f));
  if (out.empty()) throw ValidationError("no *.json configs in " + dir.string());
  return out;
}

}  // namespace scdram

#pragma once

#include <bacnoma/errors.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace bacnoma {

/// Physical and algorithmic parameters of one scenario. Linear SI units except
/// for the noise density, which stays in dBm/Hz at this boundary.
struct ScenarioConfig {
  double bandwidth_hz = 5e6;
  double noise_density_dbm_per_hz = -94.0;
  std::size_t num_bds = 4;
  std::vector<double> data_bits_per_bd = std::vector<double>(4, 1e6);
  double t0_seconds = 0.5;
  double p0_max_watts = 10.0;
  double pa_max_watts = 0.5;
  double energy_budget_joules = 0.1;
  double qos_rate_bps = 2e6;
  double si_residual_alpha = 1e-6;
  double si_channel_gain = 1.0;
  double path_loss_exponent = 3.76;
  double cell_radius_m = 50.0;
  double min_distance_m = 1.0;
  double epsilon_tolerance = 1e-4;
  std::size_t max_iterations = 50;

  /// Total offloading volume over all devices, in bits.
  [[nodiscard]] double total_bits() const {
    return std::accumulate(data_bits_per_bd.begin(), data_bits_per_bd.end(), 0.0);
  }

  /// Sets every device's data length to `bits`.
  void set_uniform_data_bits(double bits) { data_bits_per_bd.assign(num_bds, bits); }
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidParameter(message);
}

inline bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw InvalidParameter("config key '" + std::string(key) + "': cannot parse '" +
                           std::string(text) + "' as a number");
  }
  return value;
}

inline std::size_t parse_count(std::string_view key, std::string_view text) {
  const double v = parse_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw InvalidParameter("config key '" + std::string(key) + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

inline std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start);
    out.push_back(parse_double(key, piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Throws InvalidParameter naming the first violated invariant.
inline void validate(const ScenarioConfig& c) {
  using detail::finite_nonneg;
  using detail::require;
  require(std::isfinite(c.bandwidth_hz) && c.bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(std::isfinite(c.noise_density_dbm_per_hz), "noise_density_dbm_per_hz must be finite");
  require(c.num_bds >= 1, "num_bds must be >= 1");
  require(c.data_bits_per_bd.size() == c.num_bds,
          "data_bits_per_bd must hold exactly num_bds entries");
  for (double bits : c.data_bits_per_bd) require(finite_nonneg(bits), "data_bits_per_bd must be >= 0");
  require(std::isfinite(c.t0_seconds) && c.t0_seconds > 0.0, "t0_seconds must be > 0");
  require(finite_nonneg(c.p0_max_watts), "p0_max_watts must be >= 0");
  require(finite_nonneg(c.pa_max_watts), "pa_max_watts must be >= 0");
  require(c.energy_budget_joules >= 0.0 && !std::isnan(c.energy_budget_joules),
          "energy_budget_joules must be >= 0");
  require(finite_nonneg(c.qos_rate_bps), "qos_rate_bps must be >= 0");
  require(c.si_residual_alpha >= 0.0 && c.si_residual_alpha <= 1.0,
          "si_residual_alpha must lie in [0, 1]");
  require(finite_nonneg(c.si_channel_gain), "si_channel_gain must be >= 0");
  require(finite_nonneg(c.path_loss_exponent), "path_loss_exponent must be >= 0");
  require(std::isfinite(c.min_distance_m) && c.min_distance_m > 0.0, "min_distance_m must be > 0");
  require(std::isfinite(c.cell_radius_m) && c.cell_radius_m > c.min_distance_m,
          "cell_radius_m must exceed min_distance_m");
  require(std::isfinite(c.epsilon_tolerance) && c.epsilon_tolerance > 0.0,
          "epsilon_tolerance must be > 0");
  require(c.max_iterations >= 1, "max_iterations must be >= 1");
}

/// Applies `key = value` assignments on top of `base`. Keys match the field
/// names of ScenarioConfig exactly; anything else is rejected.
///
/// data_bits_per_bd takes one value (shared by every device) or a comma list.
/// A list without an explicit num_bds sets the device count.
inline ScenarioConfig apply_assignments(ScenarioConfig base,
                                        const std::map<std::string, std::string>& kv) {
  using detail::parse_count;
  using detail::parse_double;
  ScenarioConfig c = std::move(base);
  const std::map<std::string, double ScenarioConfig::*> scalars = {
      {"bandwidth_hz", &ScenarioConfig::bandwidth_hz},
      {"noise_density_dbm_per_hz", &ScenarioConfig::noise_density_dbm_per_hz},
      {"t0_seconds", &ScenarioConfig::t0_seconds},
      {"p0_max_watts", &ScenarioConfig::p0_max_watts},
      {"pa_max_watts", &ScenarioConfig::pa_max_watts},
      {"energy_budget_joules", &ScenarioConfig::energy_budget_joules},
      {"qos_rate_bps", &ScenarioConfig::qos_rate_bps},
      {"si_residual_alpha", &ScenarioConfig::si_residual_alpha},
      {"si_channel_gain", &ScenarioConfig::si_channel_gain},
      {"path_loss_exponent", &ScenarioConfig::path_loss_exponent},
      {"cell_radius_m", &ScenarioConfig::cell_radius_m},
      {"min_distance_m", &ScenarioConfig::min_distance_m},
      {"epsilon_tolerance", &ScenarioConfig::epsilon_tolerance},
  };

  const auto bits_it = kv.find("data_bits_per_bd");
  const auto count_it = kv.find("num_bds");
  for (const auto& [key, value] : kv) {
    if (auto s = scalars.find(key); s != scalars.end()) {
      c.*(s->second) = parse_double(key, value);
    } else if (key == "max_iterations") {
      c.max_iterations = parse_count(key, value);
    } else if (key != "num_bds" && key != "data_bits_per_bd") {
      throw InvalidParameter("unknown config key '" + key + "'");
    }
  }

  if (count_it != kv.end()) c.num_bds = parse_count(count_it->first, count_it->second);
  if (bits_it != kv.end()) {
    auto bits = detail::parse_list(bits_it->first, bits_it->second);
    if (bits.size() == 1) {
      c.data_bits_per_bd.assign(c.num_bds, bits.front());
    } else {
      if (count_it == kv.end()) c.num_bds = bits.size();
      c.data_bits_per_bd = std::move(bits);
    }
  } else if (c.data_bits_per_bd.size() != c.num_bds) {
    const double shared = c.data_bits_per_bd.empty() ? 1e6 : c.data_bits_per_bd.front();
    c.data_bits_per_bd.assign(c.num_bds, shared);
  }
  validate(c);
  return c;
}

/// Parses flat `key = value` lines. Blank lines and `#` comments are skipped.
inline std::map<std::string, std::string> parse_assignments(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidParameter("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(detail::trim(view.substr(0, eq)));
    std::string value(detail::trim(view.substr(eq + 1)));
    if (key.empty()) throw InvalidParameter("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw InvalidParameter("config key '" + key + "' given twice");
    }
  }
  return kv;
}

inline ScenarioConfig parse_config(std::istream& in) {
  return apply_assignments(ScenarioConfig{}, parse_assignments(in));
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace bacnoma

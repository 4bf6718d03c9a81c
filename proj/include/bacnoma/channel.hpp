#pragma once

#include <bacnoma/config.hpp>
#include <bacnoma/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

namespace bacnoma {

/// Converts a noise spectral density in dBm/Hz to a noise power in watts over
/// `bandwidth_hz`.
inline double dbm_per_hz_to_watts(double density_dbm_per_hz, double bandwidth_hz) {
  if (!std::isfinite(density_dbm_per_hz) || !std::isfinite(bandwidth_hz)) {
    throw InvalidParameter("dbm_per_hz_to_watts: non-finite input");
  }
  if (bandwidth_hz <= 0.0) throw InvalidParameter("dbm_per_hz_to_watts: bandwidth must be > 0");
  return bandwidth_hz * std::pow(10.0, (density_dbm_per_hz - 30.0) / 10.0);
}

/// One geometry and fading draw. Devices are stored in SIC decoding order,
/// i.e. descending |h_k|^2.
struct ChannelRealization {
  std::vector<double> h_gain_sq;        // |h_k|^2, BS <-> BD_k
  std::vector<double> g_gain_sq;        // |g_k|^2, U_0 <-> BD_k
  double h0_gain_sq = 0.0;              // |h_0|^2, BS <-> U_0
  std::vector<double> bd_distances_m;   // BS <-> BD_k
  std::vector<double> bd_u0_distances_m;
  double u0_distance_m = 0.0;
  double noise_power_watts = 0.0;       // sigma^2
  std::vector<std::size_t> permutation; // original index -> sorted position

  [[nodiscard]] std::size_t size() const { return h_gain_sq.size(); }
};

/// 64-bit finalizer from splitmix64 (Steele, Lea, Flood). Constants:
/// increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB, shifts 30/27/31.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of realization `index` under `master_seed`.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ index);
}

/// Uniform and exponential draws built directly on mt19937_64 output so the
/// streams do not depend on the standard library's distribution code.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Unit-mean exponential, i.e. |h|^2 of a unit-power Rayleigh coefficient.
  /// Strictly positive: the underlying uniform is taken on the open interval.
  double unit_exponential() {
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return -std::log(u);
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Area-uniform point in the annulus min_r <= |p| <= max_r around the BS.
inline Point sample_annulus(PortableRng& rng, double min_r, double max_r) {
  const double u = rng.uniform();
  const double r = std::sqrt(min_r * min_r + u * (max_r * max_r - min_r * min_r));
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

inline double path_gain(double fading, double distance, double exponent) {
  return fading * std::pow(distance, -exponent);
}

}  // namespace detail

/// Draws device and U_0 positions plus Rayleigh fading for every link.
/// Deterministic in (config, seed).
///
/// Draw order: for each BD (radius, angle, fading of h_k); U_0 (radius,
/// angle); fading of h_0; for each BD the fading of g_k. The U_0 <-> BD
/// distance is floored at min_distance_m.
inline ChannelRealization sample_channels(const ScenarioConfig& config, std::uint64_t seed) {
  validate(config);
  const std::size_t k = config.num_bds;
  PortableRng rng(seed);

  std::vector<detail::Point> bds(k);
  std::vector<double> h_fade(k), g_fade(k);
  for (std::size_t i = 0; i < k; ++i) {
    bds[i] = detail::sample_annulus(rng, config.min_distance_m, config.cell_radius_m);
    h_fade[i] = rng.unit_exponential();
  }
  const detail::Point u0 = detail::sample_annulus(rng, config.min_distance_m, config.cell_radius_m);
  const double h0_fade = rng.unit_exponential();
  for (std::size_t i = 0; i < k; ++i) g_fade[i] = rng.unit_exponential();

  std::vector<double> h(k), g(k), d(k), du(k);
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = std::hypot(bds[i].x, bds[i].y);
    du[i] = std::max(config.min_distance_m, std::hypot(bds[i].x - u0.x, bds[i].y - u0.y));
    h[i] = detail::path_gain(h_fade[i], d[i], config.path_loss_exponent);
    g[i] = detail::path_gain(g_fade[i], du[i], config.path_loss_exponent);
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return h[a] > h[b]; });

  ChannelRealization chan;
  chan.permutation.resize(k);
  for (std::size_t pos = 0; pos < k; ++pos) {
    const std::size_t src = order[pos];
    chan.permutation[src] = pos;
    chan.h_gain_sq.push_back(h[src]);
    chan.g_gain_sq.push_back(g[src]);
    chan.bd_distances_m.push_back(d[src]);
    chan.bd_u0_distances_m.push_back(du[src]);
  }
  chan.u0_distance_m = std::hypot(u0.x, u0.y);
  chan.h0_gain_sq = detail::path_gain(h0_fade, chan.u0_distance_m, config.path_loss_exponent);
  chan.noise_power_watts =
      dbm_per_hz_to_watts(config.noise_density_dbm_per_hz, config.bandwidth_hz);
  return chan;
}

}  // namespace bacnoma

// Scenario configuration, domain types and configuration ingestion.
//
// All quantities are SI in the configuration document (meters, watts, hertz,
// bits, seconds); decibel conversions happen inside the channel module only.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uavcache/error.hpp"
#include "uavcache/numerics.hpp"
#include "uavcache/random.hpp"

namespace uavcache {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Converts a dBm figure to watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double horizontal_distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct ChannelParams {
  double fs_ref_distance_m = 5.0;    // d0
  double carrier_hz = 38e9;          // f_c
  double exponent_los = 2.0;         // mmWave LoS path-loss exponent
  double exponent_nlos = 2.4;        // mmWave NLoS path-loss exponent
  double shadow_std_los_db = 5.3;
  double shadow_std_nlos_db = 5.27;
  double env_x = 11.9;               // LoS-probability environment constants
  double env_y = 0.13;
  double g2a_exponent = 2.0;         // beta, also used by the RRH links
  double g2a_nlos_factor = 100.0;    // eta
  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// Reservoir hyper-parameters shared by the content and mobility predictors.
/// Input and output widths are fixed per task when a model is created.
struct EsnConfig {
  int reservoir_size = 1000;
  int context_dim = 4;          // N_x
  int forecast_horizon = 12;    // N_s future locations
  double spectral_radius = 0.9;
  double density = 0.1;
  double input_scale = 1.0;
  double aperture = 15.0;
  double ridge = 0.01;
  int washout = 50;
  int training_length = 1000;   // cap on samples per loaded pattern
  double quota_threshold = 0.01;
  friend bool operator==(const EsnConfig&, const EsnConfig&) = default;
};

struct QoeParams {
  double delay_weight = 0.5;    // zeta_1
  double device_weight = 0.5;   // zeta_2
  double mos_min = 0.8;         // minimum "Excellent" delay score
  double satisfied_threshold = 0.8;
  friend bool operator==(const QoeParams&, const QoeParams&) = default;
};

struct DeviceRateParams {
  double base_rate_bps = 5e6;                      // rate requirement for screen factor 1
  std::vector<double> per_content_rate_bps;        // optional override, one per content
  std::vector<double> screen_factors = {0.5, 1.0, 1.5};  // indexed by device type
  friend bool operator==(const DeviceRateParams&, const DeviceRateParams&) = default;
};

struct GeneratorConfig {
  int train_weeks = 2;
  double position_noise_m = 5.0;
  int num_hotspots = 6;
  double hotspot_spread_m = 60.0;
  double zipf_exponent = 1.2;
  int num_taste_groups = 3;
  double request_probability = 1.0;
  double work_weight_peak = 0.75;
  double work_weight_offpeak = 0.15;
  std::vector<double> occupation_weights = {0.4, 0.25, 0.2, 0.15};  // office, student, service, retired
  std::vector<double> device_weights = {0.3, 0.5, 0.2};
  double female_fraction = 0.5;
  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

struct PlacementParams {
  double step_m = 3.0;
  int max_evaluations = 10000;
  double low_regime_ratio = 0.01;    // h^2 <= ratio * span^2 selects the low-altitude closed form
  double high_regime_ratio = 100.0;  // h^2 >= ratio * span^2 selects the high-altitude closed form
  int kmeans_max_iterations = 100;
  friend bool operator==(const PlacementParams&, const PlacementParams&) = default;
};

struct SimParams {
  int start_hour = 8;           // hour of day at which the simulated period starts
  int periods = 1;
  bool sampled_fading = false;
  int threads = 1;
  Point2 bbu{0.0, 0.0};
  friend bool operator==(const SimParams&, const SimParams&) = default;
};

struct ScenarioConfig {
  double area_radius_m = 500.0;
  int num_users = 70;
  int num_rrhs = 20;
  int num_rrh_clusters = 5;
  int num_uavs = 5;
  int num_contents = 25;
  int cache_size = 1;
  double content_size_bits = 1e6;
  int intervals_per_slot = 1000;     // F
  int slots_per_collection = 10;     // H
  int slots_per_cache_period = 120;  // T
  double slot_duration_s = 1.0;
  double rrh_power_w = dbm_to_watts(20.0);
  double bbu_power_w = dbm_to_watts(30.0);
  double uav_max_power_w = 20.0;
  double rrh_bandwidth_hz = 1e6;
  double uav_bandwidth_hz = 1e9;
  double noise_power_w = dbm_to_watts(-95.0);
  double fronthaul_rate_bps = 100e6;
  double min_altitude_m = 100.0;
  ChannelParams channel;
  QoeParams qoe;
  DeviceRateParams device_rate;
  EsnConfig esn;
  GeneratorConfig generators;
  PlacementParams placement;
  SimParams sim;
  std::uint64_t seed = 1;

  double interval_s() const { return slot_duration_s / intervals_per_slot; }

  /// Per-content rate requirement for a unit screen factor.
  double content_rate_bps(int content) const {
    if (!device_rate.per_content_rate_bps.empty()) return device_rate.per_content_rate_bps.at(content);
    return device_rate.base_rate_bps;
  }

  /// Full-size values.
  static ScenarioConfig paper() { return ScenarioConfig{}; }

  /// Reduced sizes for interactive runs and CI: F=100, N_w=200, T=24, H=1.
  static ScenarioConfig desk() {
    ScenarioConfig c;
    c.intervals_per_slot = 100;
    c.slots_per_collection = 1;
    c.slots_per_cache_period = 24;
    c.esn.reservoir_size = 200;
    c.esn.training_length = 400;
    return c;
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// ---------------------------------------------------------------------------
// Domain state

struct Context {
  int gender = 0;
  int occupation = 0;  // 0 office, 1 student, 2 service, 3 retired
  int age_group = 0;   // 0..3
  int device_type = 1;
  friend bool operator==(const Context&, const Context&) = default;
};

struct Unserved {
  friend bool operator==(const Unserved&, const Unserved&) = default;
};
struct ServedByRrh {
  int cluster = 0;
  friend bool operator==(const ServedByRrh&, const ServedByRrh&) = default;
};
struct ServedByUav {
  int uav = 0;
  friend bool operator==(const ServedByUav&, const ServedByUav&) = default;
};
using Association = std::variant<Unserved, ServedByRrh, ServedByUav>;

struct UserState {
  int id = 0;
  Point2 position;
  Context context;
  double screen_factor = 1.0;
  std::optional<int> current_request;
  Association association = Unserved{};
};

struct UavState {
  int id = 0;
  Point3 position;
  std::vector<int> cache;
  std::vector<int> served_users;
};

struct RrhCluster {
  int id = 0;
  std::vector<Point2> rrhs;
  std::vector<int> users;
  Point2 centroid() const {
    Point2 c;
    for (const auto& p : rrhs) {
      c.x += p.x;
      c.y += p.y;
    }
    if (!rrhs.empty()) {
      c.x /= static_cast<double>(rrhs.size());
      c.y /= static_cast<double>(rrhs.size());
    }
    return c;
  }
};

// Constraint predicates on UAV state and power.
inline bool altitude_ok(const UavState& u, double h_min) { return u.position.h >= h_min; }

inline bool cache_ok(const UavState& u, int capacity, int num_contents) {
  if (static_cast<int>(u.cache.size()) > capacity) return false;
  std::set<int> seen;
  for (int n : u.cache) {
    if (n < 0 || n >= num_contents || !seen.insert(n).second) return false;
  }
  return true;
}

inline bool power_ok(double watts, double p_max) { return watts > 0.0 && watts <= p_max; }

// ---------------------------------------------------------------------------
// Configuration document

inline std::vector<std::string> validate(const ScenarioConfig& c) {
  std::vector<std::string> v;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  auto positive = [&](double x, const char* path) { need(x > 0.0 && std::isfinite(x), std::string(path) + ": must be positive"); };

  positive(c.area_radius_m, "area_radius_m");
  need(c.num_uavs >= 1, "num_uavs: must be at least 1");
  need(c.num_users >= c.num_uavs, "num_users: must be at least num_uavs");
  need(c.num_rrhs >= 1, "num_rrhs: must be at least 1");
  need(c.num_rrh_clusters >= 1 && c.num_rrh_clusters <= c.num_rrhs,
       "num_rrh_clusters: must lie in [1, num_rrhs]");
  need(c.num_contents >= 1, "num_contents: must be at least 1");
  need(c.cache_size >= 0, "cache_size: must be non-negative");
  need(c.cache_size <= c.num_contents, "cache_size: cache size exceeds catalog");
  positive(c.content_size_bits, "content_size_bits");
  need(c.intervals_per_slot >= 1, "intervals_per_slot: must be at least 1");
  need(c.slots_per_collection >= 1, "slots_per_collection: must be at least 1");
  need(c.slots_per_cache_period >= 1, "slots_per_cache_period: must be at least 1");
  need(c.slots_per_collection >= 1 && c.slots_per_cache_period % std::max(1, c.slots_per_collection) == 0,
       "slots_per_cache_period: must be a multiple of slots_per_collection");
  positive(c.slot_duration_s, "slot_duration_s");
  positive(c.rrh_power_w, "rrh_power_w");
  positive(c.bbu_power_w, "bbu_power_w");
  positive(c.uav_max_power_w, "uav_max_power_w");
  positive(c.rrh_bandwidth_hz, "rrh_bandwidth_hz");
  positive(c.uav_bandwidth_hz, "uav_bandwidth_hz");
  positive(c.noise_power_w, "noise_power_w");
  positive(c.fronthaul_rate_bps, "fronthaul_rate_bps");
  positive(c.min_altitude_m, "min_altitude_m");

  const auto& ch = c.channel;
  positive(ch.fs_ref_distance_m, "channel.fs_ref_distance_m");
  positive(ch.carrier_hz, "channel.carrier_hz");
  need(ch.exponent_los > 0.0, "channel.exponent_los: must be positive");
  need(ch.exponent_nlos >= ch.exponent_los, "channel.exponent_nlos: must be >= exponent_los");
  need(ch.shadow_std_los_db >= 0.0, "channel.shadow_std_los_db: must be non-negative");
  need(ch.shadow_std_nlos_db >= 0.0, "channel.shadow_std_nlos_db: must be non-negative");
  positive(ch.env_x, "channel.env_x");
  positive(ch.env_y, "channel.env_y");
  positive(ch.g2a_exponent, "channel.g2a_exponent");
  need(ch.g2a_nlos_factor >= 1.0, "channel.g2a_nlos_factor: must be >= 1");

  const auto& q = c.qoe;
  need(q.delay_weight >= 0.0 && q.device_weight >= 0.0, "qoe: weights must be non-negative");
  need(std::abs(q.delay_weight + q.device_weight - 1.0) <= tol::kUnitSum,
       "qoe.delay_weight+qoe.device_weight: weights must sum to 1");
  need(q.mos_min > 0.0 && q.mos_min <= 1.0, "qoe.mos_min: must lie in (0, 1]");
  need(q.satisfied_threshold >= 0.0 && q.satisfied_threshold <= 1.0,
       "qoe.satisfied_threshold: must lie in [0, 1]");

  const auto& d = c.device_rate;
  positive(d.base_rate_bps, "device_rate.base_rate_bps");
  need(d.per_content_rate_bps.empty() || static_cast<int>(d.per_content_rate_bps.size()) == c.num_contents,
       "device_rate.per_content_rate_bps: needs one entry per content");
  for (double r : d.per_content_rate_bps) need(r > 0.0, "device_rate.per_content_rate_bps: entries must be positive");
  need(!d.screen_factors.empty(), "device_rate.screen_factors: must not be empty");
  for (double s : d.screen_factors) need(s > 0.0, "device_rate.screen_factors: entries must be positive");

  const auto& e = c.esn;
  need(e.reservoir_size >= 1, "esn.reservoir_size: must be at least 1");
  need(e.context_dim >= 1, "esn.context_dim: must be at least 1");
  need(e.forecast_horizon >= 1, "esn.forecast_horizon: must be at least 1");
  need(e.spectral_radius > 0.0 && e.spectral_radius < 1.0, "esn.spectral_radius: must lie in (0, 1)");
  need(e.density > 0.0 && e.density <= 1.0, "esn.density: must lie in (0, 1]");
  positive(e.input_scale, "esn.input_scale");
  positive(e.aperture, "esn.aperture");
  need(e.ridge >= 0.0, "esn.ridge: must be non-negative");
  need(e.washout >= 0 && e.washout < e.training_length, "esn.washout: must be below training_length");
  need(e.quota_threshold >= 0.0 && e.quota_threshold < 1.0, "esn.quota_threshold: must lie in [0, 1)");

  const auto& g = c.generators;
  need(g.train_weeks >= 1, "generators.train_weeks: must be at least 1");
  // The weekend pattern has 48 hourly samples per training week.
  need(48 * g.train_weeks > e.washout, "generators.train_weeks: weekend training data must outlast esn.washout");
  need(g.position_noise_m >= 0.0, "generators.position_noise_m: must be non-negative");
  need(g.num_hotspots >= 1, "generators.num_hotspots: must be at least 1");
  need(g.hotspot_spread_m >= 0.0, "generators.hotspot_spread_m: must be non-negative");
  need(g.zipf_exponent >= 0.0, "generators.zipf_exponent: must be non-negative");
  need(g.num_taste_groups >= 1, "generators.num_taste_groups: must be at least 1");
  need(g.request_probability >= 0.0 && g.request_probability <= 1.0,
       "generators.request_probability: must lie in [0, 1]");
  need(g.work_weight_peak >= 0.0 && g.work_weight_peak <= 1.0, "generators.work_weight_peak: must lie in [0, 1]");
  need(g.work_weight_offpeak >= 0.0 && g.work_weight_offpeak <= 1.0,
       "generators.work_weight_offpeak: must lie in [0, 1]");
  auto distribution = [&](const std::vector<double>& w, std::size_t n, const char* path) {
    bool ok = w.size() == n && std::all_of(w.begin(), w.end(), [](double x) { return x >= 0.0; }) &&
              std::accumulate(w.begin(), w.end(), 0.0) > 0.0;
    need(ok, std::string(path) + ": needs " + std::to_string(n) + " non-negative weights with positive sum");
  };
  distribution(g.occupation_weights, 4, "generators.occupation_weights");
  distribution(g.device_weights, d.screen_factors.size(), "generators.device_weights");
  need(g.female_fraction >= 0.0 && g.female_fraction <= 1.0, "generators.female_fraction: must lie in [0, 1]");

  const auto& p = c.placement;
  positive(p.step_m, "placement.step_m");
  need(p.max_evaluations >= 1, "placement.max_evaluations: must be at least 1");
  need(p.low_regime_ratio > 0.0, "placement.low_regime_ratio: must be positive");
  need(p.high_regime_ratio > 0.0, "placement.high_regime_ratio: must be positive");
  need(p.kmeans_max_iterations >= 1, "placement.kmeans_max_iterations: must be at least 1");

  const auto& s = c.sim;
  need(s.start_hour >= 0 && s.start_hour < 24, "sim.start_hour: must lie in [0, 24)");
  need(s.periods >= 1, "sim.periods: must be at least 1");
  need(s.threads >= 0, "sim.threads: must be non-negative");
  need(std::hypot(s.bbu.x, s.bbu.y) <= c.area_radius_m, "sim.bbu: must lie inside the area");
  return v;
}

namespace detail {

/// Walks one JSON object, reading known keys and recording violations with
/// their full path. Unknown keys are violations too.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(where("") + "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    const auto& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      }
      out = v.get<T>();
    } catch (const std::exception& e) {
      errors_.push_back(where(key) + e.what());
    }
  }

  /// Returns the nested object (or null when absent) and marks the key seen.
  const nlohmann::json* child(const char* key) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  std::string child_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() {
    if (!j_.is_object()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) errors_.push_back(where(it.key().c_str()) + "unknown field");
    }
  }

 private:
  std::string where(const char* key) const {
    std::string p = path_;
    if (key && *key) p = p.empty() ? key : p + "." + key;
    return p.empty() ? "" : p + ": ";
  }

  const nlohmann::json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

inline void read_point(const nlohmann::json* j, const std::string& path, Point2& p, std::vector<std::string>& e) {
  if (!j) return;
  ObjectReader r(*j, path, e);
  r.get("x", p.x);
  r.get("y", p.y);
  r.finish();
}

}  // namespace detail

/// Reads a configuration document over `base` without validating it.
inline ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = ScenarioConfig::paper()) {
  nlohmann::json j;
  try {
    j = text.find_first_not_of(" \t\r\n") == std::string::npos ? nlohmann::json::object()
                                                                : nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  std::vector<std::string> errors;
  ScenarioConfig c = std::move(base);
  detail::ObjectReader r(j, "", errors);
  r.get("area_radius_m", c.area_radius_m);
  r.get("num_users", c.num_users);
  r.get("num_rrhs", c.num_rrhs);
  r.get("num_rrh_clusters", c.num_rrh_clusters);
  r.get("num_uavs", c.num_uavs);
  r.get("num_contents", c.num_contents);
  r.get("cache_size", c.cache_size);
  r.get("content_size_bits", c.content_size_bits);
  r.get("intervals_per_slot", c.intervals_per_slot);
  r.get("slots_per_collection", c.slots_per_collection);
  r.get("slots_per_cache_period", c.slots_per_cache_period);
  r.get("slot_duration_s", c.slot_duration_s);
  r.get("rrh_power_w", c.rrh_power_w);
  r.get("bbu_power_w", c.bbu_power_w);
  r.get("uav_max_power_w", c.uav_max_power_w);
  r.get("rrh_bandwidth_hz", c.rrh_bandwidth_hz);
  r.get("uav_bandwidth_hz", c.uav_bandwidth_hz);
  r.get("noise_power_w", c.noise_power_w);
  r.get("fronthaul_rate_bps", c.fronthaul_rate_bps);
  r.get("min_altitude_m", c.min_altitude_m);
  r.get("seed", c.seed);

  if (const auto* ch = r.child("channel")) {
    detail::ObjectReader s(*ch, "channel", errors);
    auto& p = c.channel;
    s.get("fs_ref_distance_m", p.fs_ref_distance_m);
    s.get("carrier_hz", p.carrier_hz);
    s.get("exponent_los", p.exponent_los);
    s.get("exponent_nlos", p.exponent_nlos);
    s.get("shadow_std_los_db", p.shadow_std_los_db);
    s.get("shadow_std_nlos_db", p.shadow_std_nlos_db);
    s.get("env_x", p.env_x);
    s.get("env_y", p.env_y);
    s.get("g2a_exponent", p.g2a_exponent);
    s.get("g2a_nlos_factor", p.g2a_nlos_factor);
    s.finish();
  }
  if (const auto* q = r.child("qoe")) {
    detail::ObjectReader s(*q, "qoe", errors);
    s.get("delay_weight", c.qoe.delay_weight);
    s.get("device_weight", c.qoe.device_weight);
    s.get("mos_min", c.qoe.mos_min);
    s.get("satisfied_threshold", c.qoe.satisfied_threshold);
    s.finish();
  }
  if (const auto* d = r.child("device_rate")) {
    detail::ObjectReader s(*d, "device_rate", errors);
    s.get("base_rate_bps", c.device_rate.base_rate_bps);
    s.get("per_content_rate_bps", c.device_rate.per_content_rate_bps);
    s.get("screen_factors", c.device_rate.screen_factors);
    s.finish();
  }
  if (const auto* e = r.child("esn")) {
    detail::ObjectReader s(*e, "esn", errors);
    auto& p = c.esn;
    s.get("reservoir_size", p.reservoir_size);
    s.get("context_dim", p.context_dim);
    s.get("forecast_horizon", p.forecast_horizon);
    s.get("spectral_radius", p.spectral_radius);
    s.get("density", p.density);
    s.get("input_scale", p.input_scale);
    s.get("aperture", p.aperture);
    s.get("ridge", p.ridge);
    s.get("washout", p.washout);
    s.get("training_length", p.training_length);
    s.get("quota_threshold", p.quota_threshold);
    s.finish();
  }
  if (const auto* g = r.child("generators")) {
    detail::ObjectReader s(*g, "generators", errors);
    auto& p = c.generators;
    s.get("train_weeks", p.train_weeks);
    s.get("position_noise_m", p.position_noise_m);
    s.get("num_hotspots", p.num_hotspots);
    s.get("hotspot_spread_m", p.hotspot_spread_m);
    s.get("zipf_exponent", p.zipf_exponent);
    s.get("num_taste_groups", p.num_taste_groups);
    s.get("request_probability", p.request_probability);
    s.get("work_weight_peak", p.work_weight_peak);
    s.get("work_weight_offpeak", p.work_weight_offpeak);
    s.get("occupation_weights", p.occupation_weights);
    s.get("device_weights", p.device_weights);
    s.get("female_fraction", p.female_fraction);
    s.finish();
  }
  if (const auto* p = r.child("placement")) {
    detail::ObjectReader s(*p, "placement", errors);
    s.get("step_m", c.placement.step_m);
    s.get("max_evaluations", c.placement.max_evaluations);
    s.get("low_regime_ratio", c.placement.low_regime_ratio);
    s.get("high_regime_ratio", c.placement.high_regime_ratio);
    s.get("kmeans_max_iterations", c.placement.kmeans_max_iterations);
    s.finish();
  }
  if (const auto* p = r.child("sim")) {
    detail::ObjectReader s(*p, "sim", errors);
    s.get("start_hour", c.sim.start_hour);
    s.get("periods", c.sim.periods);
    s.get("sampled_fading", c.sim.sampled_fading);
    s.get("threads", c.sim.threads);
    detail::read_point(s.child("bbu"), "sim.bbu", c.sim.bbu, errors);
    s.finish();
  }
  r.finish();
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

/// Parses and validates; unspecified fields keep the values of `base`
/// (the full-size preset unless another is passed).
inline ScenarioConfig load_config(const std::string& text, ScenarioConfig base = ScenarioConfig::paper()) {
  ScenarioConfig c = parse_config(text, std::move(base));
  auto violations = validate(c);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return c;
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  const auto& ch = c.channel;
  const auto& e = c.esn;
  const auto& g = c.generators;
  return json{
      {"area_radius_m", c.area_radius_m},
      {"num_users", c.num_users},
      {"num_rrhs", c.num_rrhs},
      {"num_rrh_clusters", c.num_rrh_clusters},
      {"num_uavs", c.num_uavs},
      {"num_contents", c.num_contents},
      {"cache_size", c.cache_size},
      {"content_size_bits", c.content_size_bits},
      {"intervals_per_slot", c.intervals_per_slot},
      {"slots_per_collection", c.slots_per_collection},
      {"slots_per_cache_period", c.slots_per_cache_period},
      {"slot_duration_s", c.slot_duration_s},
      {"rrh_power_w", c.rrh_power_w},
      {"bbu_power_w", c.bbu_power_w},
      {"uav_max_power_w", c.uav_max_power_w},
      {"rrh_bandwidth_hz", c.rrh_bandwidth_hz},
      {"uav_bandwidth_hz", c.uav_bandwidth_hz},
      {"noise_power_w", c.noise_power_w},
      {"fronthaul_rate_bps", c.fronthaul_rate_bps},
      {"min_altitude_m", c.min_altitude_m},
      {"seed", c.seed},
      {"channel",
       {{"fs_ref_distance_m", ch.fs_ref_distance_m},
        {"carrier_hz", ch.carrier_hz},
        {"exponent_los", ch.exponent_los},
        {"exponent_nlos", ch.exponent_nlos},
        {"shadow_std_los_db", ch.shadow_std_los_db},
        {"shadow_std_nlos_db", ch.shadow_std_nlos_db},
        {"env_x", ch.env_x},
        {"env_y", ch.env_y},
        {"g2a_exponent", ch.g2a_exponent},
        {"g2a_nlos_factor", ch.g2a_nlos_factor}}},
      {"qoe",
       {{"delay_weight", c.qoe.delay_weight},
        {"device_weight", c.qoe.device_weight},
        {"mos_min", c.qoe.mos_min},
        {"satisfied_threshold", c.qoe.satisfied_threshold}}},
      {"device_rate",
       {{"base_rate_bps", c.device_rate.base_rate_bps},
        {"per_content_rate_bps", c.device_rate.per_content_rate_bps},
        {"screen_factors", c.device_rate.screen_factors}}},
      {"esn",
       {{"reservoir_size", e.reservoir_size},
        {"context_dim", e.context_dim},
        {"forecast_horizon", e.forecast_horizon},
        {"spectral_radius", e.spectral_radius},
        {"density", e.density},
        {"input_scale", e.input_scale},
        {"aperture", e.aperture},
        {"ridge", e.ridge},
        {"washout", e.washout},
        {"training_length", e.training_length},
        {"quota_threshold", e.quota_threshold}}},
      {"generators",
       {{"train_weeks", g.train_weeks},
        {"position_noise_m", g.position_noise_m},
        {"num_hotspots", g.num_hotspots},
        {"hotspot_spread_m", g.hotspot_spread_m},
        {"zipf_exponent", g.zipf_exponent},
        {"num_taste_groups", g.num_taste_groups},
        {"request_probability", g.request_probability},
        {"work_weight_peak", g.work_weight_peak},
        {"work_weight_offpeak", g.work_weight_offpeak},
        {"occupation_weights", g.occupation_weights},
        {"device_weights", g.device_weights},
        {"female_fraction", g.female_fraction}}},
      {"placement",
       {{"step_m", c.placement.step_m},
        {"max_evaluations", c.placement.max_evaluations},
        {"low_regime_ratio", c.placement.low_regime_ratio},
        {"high_regime_ratio", c.placement.high_regime_ratio},
        {"kmeans_max_iterations", c.placement.kmeans_max_iterations}}},
      {"sim",
       {{"start_hour", c.sim.start_hour},
        {"periods", c.sim.periods},
        {"sampled_fading", c.sim.sampled_fading},
        {"threads", c.sim.threads},
        {"bbu", {{"x", c.sim.bbu.x}, {"y", c.sim.bbu.y}}}}},
  };
}

inline std::string serialize(const ScenarioConfig& c) { return to_json(c).dump(2); }

}  // namespace uavcache

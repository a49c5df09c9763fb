// Delay, MOS and QoE scoring, rate requirements and minimum UAV power.
//
// Capacities are bits per slot, rates are bits per second. A capacity C over a
// slot of length dt delivers L bits in L * dt / C seconds.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "uavcache/channel.hpp"
#include "uavcache/error.hpp"
#include "uavcache/numerics.hpp"
#include "uavcache/scenario.hpp"

namespace uavcache {

enum class Link { ServerViaRrh, ServerViaUav, UavCache };

inline const char* link_name(Link l) {
  switch (l) {
    case Link::ServerViaRrh: return "rrh";
    case Link::ServerViaUav: return "uav_fronthaul";
    case Link::UavCache: return "uav_cache";
  }
  return "?";
}

struct DeliveryPath {
  Link link = Link::UavCache;
  double fronthaul_bits = 0.0;  // per slot; ignored for UavCache
  double access_bits = 0.0;     // per slot

  static DeliveryPath via_rrh(double fronthaul_bits, double access_bits) {
    return {Link::ServerViaRrh, fronthaul_bits, access_bits};
  }
  static DeliveryPath via_uav(double fronthaul_bits, double access_bits) {
    return {Link::ServerViaUav, fronthaul_bits, access_bits};
  }
  static DeliveryPath from_cache(double access_bits) { return {Link::UavCache, 0.0, access_bits}; }
};

inline double delay(const DeliveryPath& p, double content_bits, double slot_s) {
  auto leg = [&](double bits_per_slot) {
    if (!(bits_per_slot > 0.0)) throw std::invalid_argument("delay: zero rate on a used link");
    if (std::isinf(bits_per_slot)) return 0.0;
    return content_bits * slot_s / bits_per_slot;
  };
  const double access = leg(p.access_bits);
  return p.link == Link::UavCache ? access : leg(p.fronthaul_bits) + access;
}

/// Peak UAV capacity in bits per second: overhead at h_min, full power, with
/// shadowing four deviations in the link's favour.
inline double peak_uav_rate(const ScenarioConfig& c) {
  const auto& p = c.channel;
  const double pl = free_space_pl(p.fs_ref_distance_m, p.carrier_hz) +
                    10.0 * p.exponent_los * std::log10(c.min_altitude_m) - 4.0 * p.shadow_std_los_db;
  return c.uav_bandwidth_hz * std::log2(1.0 + c.uav_max_power_w / (db_to_linear(pl) * c.noise_power_w));
}

/// Smallest delay any delivery can achieve, in seconds.
inline double delay_lower_bound(const ScenarioConfig& c) {
  return std::min(c.content_size_bits / c.fronthaul_rate_bps, c.content_size_bits / peak_uav_rate(c));
}

/// Largest delay that still earns the minimum "Excellent" delay score.
inline double delay_budget(const ScenarioConfig& c, double bound) {
  return c.slot_duration_s - c.qoe.mos_min * (c.slot_duration_s - bound);
}
inline double delay_budget(const ScenarioConfig& c) { return delay_budget(c, delay_lower_bound(c)); }

/// Linear MOS delay map, clamped to [0, 1]; deliveries slower than a slot score 0.
inline double delay_score(double delay_s, const ScenarioConfig& c, double bound) {
  if (delay_s > c.slot_duration_s) return 0.0;
  const double s = (c.slot_duration_s - delay_s) / (c.slot_duration_s - bound);
  return std::clamp(s, 0.0, 1.0);
}
inline double delay_score(double delay_s, const ScenarioConfig& c) {
  return delay_score(delay_s, c, delay_lower_bound(c));
}

inline int device_score(double rate_bps, double required_bps) { return rate_bps >= required_bps ? 1 : 0; }

/// Rate floor for a user's screen factor on content n.
inline double device_requirement(const ScenarioConfig& c, double screen_factor, int content) {
  return screen_factor * c.content_rate_bps(content);
}

inline const char* mos_label(double q) {
  if (q >= 0.8) return "Excellent";
  if (q >= 0.6) return "Very Good";
  if (q >= 0.4) return "Good";
  if (q >= 0.2) return "Fair";
  return "Poor";
}

struct QoeScore {
  double qoe = 0.0;
  const char* label = "Poor";
};

inline QoeScore qoe_score(double d_score, int device_score_sum, int intervals, const QoeParams& w) {
  if (intervals < 1) throw std::invalid_argument("qoe_score: no intervals");
  const double q = w.delay_weight * d_score + w.device_weight * static_cast<double>(device_score_sum) / intervals;
  return {q, mos_label(q)};
}

inline QoeScore qoe_score(double d_score, const std::vector<int>& device_scores, const QoeParams& w) {
  int sum = 0;
  for (int v : device_scores) sum += v;
  return qoe_score(d_score, sum, static_cast<int>(device_scores.size()), w);
}

struct QoeReport {
  int user = 0;
  int content = -1;
  Link link = Link::UavCache;
  int server = -1;              // UAV id or RRH cluster id, -1 when unserved
  double delay_s = 0.0;
  double delay_score = 0.0;
  int device_score_sum = 0;
  int intervals = 0;
  double qoe = 0.0;
  const char* mos = "Poor";
  bool satisfied = false;
  bool delivered = false;       // false: undeliverable within the slot or unserved
  bool power_infeasible = false;
  double power_w = 0.0;         // mean UAV transmit power over the slot
};

/// Access capacity (bits per slot) for which the delay score reaches mos_min.
/// Uncached content first crosses a fronthaul of `fronthaul_bits` per slot.
inline double delay_rate_requirement(bool cached, double fronthaul_bits, const ScenarioConfig& c, double bound) {
  const double budget = delay_budget(c, bound);
  const double l = c.content_size_bits;
  const double dt = c.slot_duration_s;
  if (cached) return l * dt / budget;
  if (!(fronthaul_bits > 0.0)) throw InfeasibleError("delay_rate_requirement: no fronthaul capacity");
  const double left = budget - l * dt / fronthaul_bits;
  if (!(left > 0.0)) throw InfeasibleError("delay_rate_requirement: fronthaul alone exceeds the delay budget");
  return l * dt / left;
}
inline double delay_rate_requirement(bool cached, double fronthaul_bits, const ScenarioConfig& c) {
  return delay_rate_requirement(cached, fronthaul_bits, c, delay_lower_bound(c));
}

/// Per-interval rate target: the larger of the delay and device requirements.
inline double rate_target(double delay_req_bits, double device_req_bps, const ScenarioConfig& c) {
  return std::max(delay_req_bits / c.slot_duration_s, device_req_bps);
}

/// Per-interval rate an RRH-served user needs; +inf when the wired fronthaul
/// share alone breaks the delay budget.
inline double rrh_rate_requirement(int rrh_users, double device_req_bps, const ScenarioConfig& c, double bound) {
  const double v_fu = c.fronthaul_rate_bps / std::max(1, rrh_users);
  const double left = delay_budget(c, bound) - c.content_size_bits / v_fu;
  if (!(left > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(c.content_size_bits / left, device_req_bps);
}

/// Transmit power that gives a rate of `target_bps` on a 1/U_k share of the
/// UAV band over a link with `pathloss_db`. May exceed P_max; callers flag it.
inline double min_power_for(double target_bps, int users_on_uav, double pathloss_db, double uav_bandwidth_hz,
                            double noise_w) {
  if (!(target_bps >= 0.0)) throw std::invalid_argument("min_uav_power: negative rate target");
  if (users_on_uav < 1) throw std::invalid_argument("min_uav_power: empty association set");
  const double snr = std::expm1(target_bps * users_on_uav / uav_bandwidth_hz * std::numbers::ln2);
  return snr * noise_w * db_to_linear(pathloss_db) * (1.0 + tol::kPowerHeadroom);
}

inline double min_uav_power(const Point3& uav, const Point2& user, double target_bps, int users_on_uav,
                            const ScenarioConfig& c) {
  return min_power_for(target_bps, users_on_uav, uav_user_pathloss(uav, user, c.channel), c.uav_bandwidth_hz,
                       c.noise_power_w);
}

}  // namespace uavcache

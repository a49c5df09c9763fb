// User association with RRH clusters, K-means grouping of UAV users, cache
// selection and UAV positioning for minimum total transmit power.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "uavcache/channel.hpp"
#include "uavcache/error.hpp"
#include "uavcache/qoe.hpp"
#include "uavcache/scenario.hpp"

namespace uavcache {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// RRH association

/// Picks the RRH-served users among candidates with predicted rates (bits
/// per second) and device requirements. The threshold tightens as more users
/// share the wired fronthaul, so the largest N with at least N qualifying
/// users is taken and the N best margins win (ties by candidate order).
/// Returns candidate indices in ascending order.
inline std::vector<int> select_rrh_users(const std::vector<double>& rate_bps, const std::vector<double>& device_bps,
                                         const ScenarioConfig& c, double bound) {
  if (rate_bps.size() != device_bps.size()) throw DimensionError("select_rrh_users: size mismatch");
  const int m = static_cast<int>(rate_bps.size());
  auto qualifying = [&](int n) {
    std::vector<int> q;
    for (int i = 0; i < m; ++i) {
      if (rate_bps[i] >= rrh_rate_requirement(n, device_bps[i], c, bound)) q.push_back(i);
    }
    return q;
  };
  for (int n = m; n >= 1; --n) {
    auto q = qualifying(n);
    if (static_cast<int>(q.size()) < n) continue;
    std::stable_sort(q.begin(), q.end(), [&](int a, int b) {
      return rate_bps[a] / rrh_rate_requirement(n, device_bps[a], c, bound) >
             rate_bps[b] / rrh_rate_requirement(n, device_bps[b], c, bound);
    });
    q.resize(n);
    std::sort(q.begin(), q.end());
    return q;
  }
  return {};
}

struct RrhPlan {
  std::vector<std::vector<int>> cluster_users;  // user ids per cluster
  std::vector<int> uav_pool;                    // user ids left for the UAVs
  std::vector<double> predicted_rate_bps;       // per user; 0 for non-candidates
  int rrh_served = 0;                           // N_FR
};

inline int nearest_cluster(const Point2& p, const std::vector<RrhCluster>& clusters) {
  int best = 0;
  double bd = kInfinity;
  for (std::size_t q = 0; q < clusters.size(); ++q) {
    const double d = horizontal_distance(p, clusters[q].centroid());
    if (d < bd) {
      bd = d;
      best = static_cast<int>(q);
    }
  }
  return best;
}

/// ZF rates (bits per second) for the given users per cluster.
inline std::vector<std::vector<double>> rrh_rates(const std::vector<RrhCluster>& clusters,
                                                  const std::vector<std::vector<int>>& users_per_cluster,
                                                  const std::vector<Point2>& positions, const ScenarioConfig& c,
                                                  bool bbu_active, std::optional<RandomSource> fading = std::nullopt) {
  std::vector<ZfCluster> zf(clusters.size());
  std::vector<std::vector<double>> interference(clusters.size());
  for (std::size_t q = 0; q < clusters.size(); ++q) {
    zf[q].rrhs = clusters[q].rrhs;
    for (int u : users_per_cluster[q]) {
      zf[q].users.push_back(positions[static_cast<std::size_t>(u)]);
      interference[q].push_back(
          bbu_active ? bbu_interference(positions[static_cast<std::size_t>(u)], c.sim.bbu, c.bbu_power_w,
                                        c.channel.g2a_exponent)
                     : 0.0);
    }
  }
  auto sinr = zfbf_sinr(zf, interference, c.rrh_power_w, c.noise_power_w, c.channel.g2a_exponent, fading);
  for (auto& row : sinr)
    for (double& s : row) s = c.rrh_bandwidth_hz * std::log2(1.0 + s);
  return sinr;
}

/// Up to R_q users nearest each cluster's centroid, among the users whose
/// nearest cluster it is.
inline std::vector<std::vector<int>> rrh_candidates(const std::vector<Point2>& positions,
                                                    const std::vector<RrhCluster>& clusters) {
  std::vector<std::vector<int>> candidates(clusters.size());
  if (clusters.empty()) return candidates;
  std::vector<std::vector<std::pair<double, int>>> by_cluster(clusters.size());
  for (std::size_t u = 0; u < positions.size(); ++u) {
    const auto q = static_cast<std::size_t>(nearest_cluster(positions[u], clusters));
    by_cluster[q].push_back({horizontal_distance(positions[u], clusters[q].centroid()), static_cast<int>(u)});
  }
  for (std::size_t q = 0; q < clusters.size(); ++q) {
    auto& v = by_cluster[q];
    std::sort(v.begin(), v.end());
    const std::size_t keep = std::min(v.size(), clusters[q].rrhs.size());
    for (std::size_t i = 0; i < keep; ++i) candidates[q].push_back(v[i].second);
  }
  return candidates;
}

/// Theorem-1 association. Candidates come from rrh_candidates, their rates
/// from ZF over all candidates, and the fixed point in N_FR picks the served set.
inline RrhPlan associate_rrh(const std::vector<Point2>& positions, const std::vector<double>& device_bps,
                             const std::vector<RrhCluster>& clusters, const ScenarioConfig& c, bool bbu_active,
                             double bound) {
  const int nu = static_cast<int>(positions.size());
  RrhPlan plan;
  plan.cluster_users.assign(clusters.size(), {});
  plan.predicted_rate_bps.assign(static_cast<std::size_t>(nu), 0.0);
  const auto candidates = rrh_candidates(positions, clusters);

  std::vector<int> flat;
  std::vector<double> rate, dev;
  const auto rates = rrh_rates(clusters, candidates, positions, c, bbu_active);
  for (std::size_t q = 0; q < clusters.size(); ++q) {
    for (std::size_t i = 0; i < candidates[q].size(); ++i) {
      const int u = candidates[q][i];
      flat.push_back(u);
      rate.push_back(rates[q][i]);
      dev.push_back(device_bps[static_cast<std::size_t>(u)]);
      plan.predicted_rate_bps[static_cast<std::size_t>(u)] = rates[q][i];
    }
  }
  std::vector<bool> served(static_cast<std::size_t>(nu), false);
  for (int i : select_rrh_users(rate, dev, c, bound)) served[static_cast<std::size_t>(flat[static_cast<std::size_t>(i)])] = true;
  for (std::size_t q = 0; q < clusters.size(); ++q) {
    for (int u : candidates[q]) {
      if (served[static_cast<std::size_t>(u)]) plan.cluster_users[q].push_back(u);
    }
    std::sort(plan.cluster_users[q].begin(), plan.cluster_users[q].end());
  }
  for (int u = 0; u < nu; ++u) {
    if (served[static_cast<std::size_t>(u)]) ++plan.rrh_served;
    else plan.uav_pool.push_back(u);
  }
  return plan;
}

// ---------------------------------------------------------------------------
// K-means

struct Clustering {
  std::vector<int> label;         // per pool point, cluster index
  std::vector<Point2> centroids;  // K entries
  std::vector<double> sse;        // within-cluster SSE after each iteration
  int iterations = 0;
};

inline double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Lloyd iteration from `warm` centroids when given, otherwise from a seeded
/// k-means++ start. Empty clusters are reseeded with the point farthest from
/// its centroid. A pool smaller than K gets one point per cluster and the
/// surplus clusters stay empty.
inline Clustering cluster_users(const std::vector<Point2>& pool, int k, const RandomSource& rs,
                                const std::vector<Point2>* warm = nullptr, int max_iterations = 100) {
  if (k < 1) throw std::invalid_argument("cluster_users: K must be positive");
  const int n = static_cast<int>(pool.size());
  Clustering out;
  out.label.assign(static_cast<std::size_t>(n), -1);
  if (n <= k) {
    out.centroids.assign(static_cast<std::size_t>(k), Point2{});
    for (int i = 0; i < k; ++i) {
      if (i < n) out.centroids[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
      else if (warm && static_cast<int>(warm->size()) == k) out.centroids[static_cast<std::size_t>(i)] = (*warm)[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) out.label[static_cast<std::size_t>(i)] = i;
    out.sse.push_back(0.0);
    return out;
  }

  auto& cent = out.centroids;
  if (warm && static_cast<int>(warm->size()) == k) {
    cent = *warm;
  } else {
    auto rng = rs.derive("kmeans++").engine();
    std::uniform_int_distribution<int> first(0, n - 1);
    cent.push_back(pool[static_cast<std::size_t>(first(rng))]);
    std::vector<double> d2(static_cast<std::size_t>(n));
    while (static_cast<int>(cent.size()) < k) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        double best = kInfinity;
        for (const auto& c : cent) best = std::min(best, squared_distance(pool[static_cast<std::size_t>(i)], c));
        d2[static_cast<std::size_t>(i)] = best;
        total += best;
      }
      int pick = 0;
      if (total > 0.0) {
        std::discrete_distribution<int> draw(d2.begin(), d2.end());
        pick = draw(rng);
      } else {
        pick = static_cast<int>(cent.size()) % n;
      }
      cent.push_back(pool[static_cast<std::size_t>(pick)]);
    }
  }

  auto assign = [&] {
    std::vector<int> lab(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = kInfinity;
      for (int j = 0; j < k; ++j) {
        const double d = squared_distance(pool[static_cast<std::size_t>(i)], cent[static_cast<std::size_t>(j)]);
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      lab[static_cast<std::size_t>(i)] = best;
    }
    return lab;
  };
  auto sse = [&](const std::vector<int>& lab) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += squared_distance(pool[static_cast<std::size_t>(i)], cent[static_cast<std::size_t>(lab[static_cast<std::size_t>(i)])]);
    return s;
  };

  std::vector<int> lab = assign();
  for (int it = 0; it < max_iterations; ++it) {
    // Reseed empty clusters with the point farthest from its centroid.
    for (int j = 0; j < k; ++j) {
      if (std::find(lab.begin(), lab.end(), j) != lab.end()) continue;
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < n; ++i) {
        const auto li = static_cast<std::size_t>(lab[static_cast<std::size_t>(i)]);
        const long members = std::count(lab.begin(), lab.end(), lab[static_cast<std::size_t>(i)]);
        const double d = squared_distance(pool[static_cast<std::size_t>(i)], cent[li]);
        if (members > 1 && d > fd) {
          fd = d;
          far = i;
        }
      }
      if (far < 0) break;
      lab[static_cast<std::size_t>(far)] = j;
      cent[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(far)];
    }
    std::vector<Point2> sum(static_cast<std::size_t>(k));
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(lab[static_cast<std::size_t>(i)]);
      sum[j].x += pool[static_cast<std::size_t>(i)].x;
      sum[j].y += pool[static_cast<std::size_t>(i)].y;
      ++count[j];
    }
    for (int j = 0; j < k; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (count[jj] > 0) cent[jj] = {sum[jj].x / count[jj], sum[jj].y / count[jj]};
    }
    out.sse.push_back(sse(lab));
    out.iterations = it + 1;
    auto next = assign();
    if (next == lab) break;
    lab = std::move(next);
  }
  out.label = std::move(lab);
  return out;
}

// ---------------------------------------------------------------------------
// Rate targets and cache selection

/// Per-interval rate target for a UAV user (bits per second); +inf when an
/// uncached delivery cannot meet the delay budget through its fronthaul share.
inline double uav_rate_target(bool cached, double fronthaul_share_bits, double device_bps, const ScenarioConfig& c,
                              double bound) {
  try {
    return rate_target(delay_rate_requirement(cached, fronthaul_share_bits, c, bound), device_bps, c);
  } catch (const InfeasibleError&) {
    return kInfinity;
  }
}

/// Transmit power for a target; infeasible targets cost P_max.
inline double capped_power(double target_bps, int users_on_uav, double pathloss_db, const ScenarioConfig& c,
                           bool* infeasible = nullptr) {
  const double p = std::isinf(target_bps)
                       ? kInfinity
                       : min_power_for(target_bps, users_on_uav, pathloss_db, c.uav_bandwidth_hz, c.noise_power_w);
  const bool over = !(p <= c.uav_max_power_w);
  if (infeasible) *infeasible = over;
  return over ? c.uav_max_power_w : p;
}

/// One user-slot of expected demand at a UAV: request probabilities and the
/// power each content costs when cached and when fetched over the fronthaul.
struct ContentDemand {
  Vec probability;
  Vec power_uncached;
  Vec power_cached;
};

/// Demand of one user-slot with its link conditions.
inline ContentDemand content_demand(const Vec& probability, const std::vector<double>& device_bps, double pathloss_db,
                                    int users_on_uav, double fronthaul_share_bits, const ScenarioConfig& c,
                                    double bound) {
  const auto n = probability.size();
  ContentDemand d{probability, Vec(n), Vec(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dev = device_bps[static_cast<std::size_t>(i)];
    d.power_cached(i) = capped_power(uav_rate_target(true, fronthaul_share_bits, dev, c, bound), users_on_uav,
                                     pathloss_db, c);
    d.power_uncached(i) = capped_power(uav_rate_target(false, fronthaul_share_bits, dev, c, bound), users_on_uav,
                                       pathloss_db, c);
  }
  return d;
}

/// Expected power saving of caching each content, summed over demands.
inline Vec cache_scores(const std::vector<ContentDemand>& demands, int num_contents) {
  Vec s = Vec::Zero(num_contents);
  for (const auto& d : demands) s += d.probability.cwiseProduct(d.power_uncached - d.power_cached);
  return s;
}

/// Expected total power when `cached` is stored.
inline double expected_power(const std::vector<ContentDemand>& demands, const std::vector<int>& cached) {
  double total = 0.0;
  for (const auto& d : demands) {
    for (Eigen::Index n = 0; n < d.probability.size(); ++n) {
      const bool in = std::find(cached.begin(), cached.end(), static_cast<int>(n)) != cached.end();
      total += d.probability(n) * (in ? d.power_cached(n) : d.power_uncached(n));
    }
  }
  return total;
}

/// The C best-scoring contents (ties to the lower index), ascending.
inline std::vector<int> select_cache(const Vec& scores, int capacity) {
  std::vector<int> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return scores(a) > scores(b); });
  idx.resize(static_cast<std::size_t>(std::clamp<Eigen::Index>(capacity, 0, scores.size())));
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Brute-force minimum of expected_power over all subsets of size C.
inline std::vector<int> exhaustive_cache(const std::vector<ContentDemand>& demands, int num_contents, int capacity) {
  const int c = std::clamp(capacity, 0, num_contents);
  std::vector<int> pick(static_cast<std::size_t>(c)), best;
  std::iota(pick.begin(), pick.end(), 0);
  double best_power = kInfinity;
  while (true) {
    const double p = expected_power(demands, pick);
    if (p < best_power) {
      best_power = p;
      best = pick;
    }
    int i = c - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == num_contents - c + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < c; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

// ---------------------------------------------------------------------------
// UAV positioning

struct PlacementUser {
  Point2 position;
  double target_bps = 0.0;  // finite per-interval rate target
};

/// Sum of minimum transmit powers at `uav` (not capped at P_max).
inline double placement_objective(const Point3& uav, const std::vector<PlacementUser>& users, int users_on_uav,
                                  const ScenarioConfig& c) {
  double total = 0.0;
  for (const auto& u : users) total += min_uav_power(uav, u.position, u.target_bps, users_on_uav, c);
  return total;
}

enum class Regime { Low, High, Neither };

inline double max_span(const std::vector<PlacementUser>& users) {
  double s = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i)
    for (std::size_t j = i + 1; j < users.size(); ++j) s = std::max(s, horizontal_distance(users[i].position, users[j].position));
  return s;
}

/// Which closed form applies at altitude h: h^2 small or large against the
/// squared span of the users.
inline Regime placement_regime(const std::vector<PlacementUser>& users, double h, const PlacementParams& p) {
  const double span2 = std::pow(max_span(users), 2);
  if (h * h <= p.low_regime_ratio * span2) return Regime::Low;
  if (h * h >= p.high_regime_ratio * span2) return Regime::High;
  return Regime::Neither;
}

/// Weight of one user in the closed form (free-space reference loss, zero-mean shadowing).
inline double placement_weight(double target_bps, int users_on_uav, const ScenarioConfig& c) {
  return std::expm1(target_bps * users_on_uav / c.uav_bandwidth_hz * std::numbers::ln2) * c.noise_power_w *
         db_to_linear(free_space_pl(c.channel.fs_ref_distance_m, c.channel.carrier_hz));
}

/// Weighted centroid of the users.
inline Point2 place_closed_form(const std::vector<PlacementUser>& users, int users_on_uav, const ScenarioConfig& c) {
  if (users.empty()) throw std::invalid_argument("place_closed_form: no users");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (const auto& u : users) {
    const double w = placement_weight(u.target_bps, users_on_uav, c);
    sw += w;
    sx += w * u.position.x;
    sy += w * u.position.y;
  }
  if (!(sw > 0.0)) {
    for (const auto& u : users) {
      sx += u.position.x;
      sy += u.position.y;
    }
    return {sx / static_cast<double>(users.size()), sy / static_cast<double>(users.size())};
  }
  return {sx / sw, sy / sw};
}

struct PlacementResult {
  Point3 position;
  double objective = 0.0;
  int evaluations = 0;
  std::vector<double> accepted;  // objective after each accepted move
  bool closed_form = false;
};

/// Coordinate descent over +-step moves, scanning x, y then h, accepting
/// strict improvements; h never drops below h_min.
inline PlacementResult place_local_search(const std::vector<PlacementUser>& users, int users_on_uav, Point3 init,
                                          const ScenarioConfig& c) {
  if (init.h < c.min_altitude_m) throw std::invalid_argument("place_local_search: initial altitude below h_min");
  const double step = c.placement.step_m;
  PlacementResult r;
  r.position = init;
  r.objective = placement_objective(init, users, users_on_uav, c);
  r.evaluations = 1;
  bool improved = true;
  while (improved && r.evaluations < c.placement.max_evaluations) {
    improved = false;
    for (int axis = 0; axis < 3 && r.evaluations < c.placement.max_evaluations; ++axis) {
      for (double dir : {1.0, -1.0}) {
        if (r.evaluations >= c.placement.max_evaluations) break;
        Point3 p = r.position;
        double& coord = axis == 0 ? p.x : axis == 1 ? p.y : p.h;
        coord += dir * step;
        if (p.h < c.min_altitude_m) continue;
        const double v = placement_objective(p, users, users_on_uav, c);
        ++r.evaluations;
        if (v < r.objective) {
          r.position = p;
          r.objective = v;
          r.accepted.push_back(v);
          improved = true;
          break;
        }
      }
    }
  }
  return r;
}

/// Grid search over the users' bounding box padded by 100 m.
inline PlacementResult place_exhaustive(const std::vector<PlacementUser>& users, int users_on_uav, double grid_step,
                                        const std::vector<double>& altitudes, const ScenarioConfig& c) {
  if (users.empty() || altitudes.empty() || !(grid_step > 0.0)) throw std::invalid_argument("place_exhaustive: empty grid");
  double x0 = kInfinity, x1 = -kInfinity, y0 = kInfinity, y1 = -kInfinity;
  for (const auto& u : users) {
    x0 = std::min(x0, u.position.x);
    x1 = std::max(x1, u.position.x);
    y0 = std::min(y0, u.position.y);
    y1 = std::max(y1, u.position.y);
  }
  x0 -= 100.0;
  y0 -= 100.0;
  x1 += 100.0;
  y1 += 100.0;
  PlacementResult best;
  best.objective = kInfinity;
  const int nx = static_cast<int>(std::floor((x1 - x0) / grid_step + 1e-9));
  const int ny = static_cast<int>(std::floor((y1 - y0) / grid_step + 1e-9));
  for (double h : altitudes) {
    for (int i = 0; i <= nx; ++i) {
      for (int j = 0; j <= ny; ++j) {
        const Point3 p{x0 + i * grid_step, y0 + j * grid_step, h};
        const double v = placement_objective(p, users, users_on_uav, c);
        ++best.evaluations;
        if (v < best.objective) {
          best.objective = v;
          best.position = p;
        }
      }
    }
  }
  return best;
}

/// Closed form at h_min when a regime applies, otherwise local search started
/// from the closed form.
inline PlacementResult place_uav(const std::vector<PlacementUser>& users, int users_on_uav, const Point3& fallback,
                                 const ScenarioConfig& c) {
  if (users.empty()) {
    PlacementResult r;
    r.position = {fallback.x, fallback.y, std::max(fallback.h, c.min_altitude_m)};
    return r;
  }
  const Point2 xy = place_closed_form(users, users_on_uav, c);
  const Point3 start{xy.x, xy.y, c.min_altitude_m};
  if (placement_regime(users, c.min_altitude_m, c.placement) != Regime::Neither) {
    PlacementResult r;
    r.position = start;
    r.objective = placement_objective(start, users, users_on_uav, c);
    r.evaluations = 1;
    r.closed_form = true;
    return r;
  }
  return place_local_search(users, users_on_uav, start, c);
}

// ---------------------------------------------------------------------------
// Objective

struct UavLoad {
  Point3 position;
  std::vector<PlacementUser> users;  // targets may be +inf (infeasible)
};

struct PowerTotal {
  double watts = 0.0;
  int infeasible = 0;
};

/// Sum of per-user minimum powers over UAVs; users the UAV cannot serve
/// within P_max cost P_max and are counted.
inline PowerTotal total_power_objective(const std::vector<UavLoad>& loads, const ScenarioConfig& c) {
  PowerTotal t;
  for (const auto& l : loads) {
    const int uk = static_cast<int>(l.users.size());
    for (const auto& u : l.users) {
      bool over = false;
      t.watts += capped_power(u.target_bps, uk, uav_user_pathloss(l.position, u.position, c.channel), c, &over);
      t.infeasible += over ? 1 : 0;
    }
  }
  return t;
}

}  // namespace uavcache

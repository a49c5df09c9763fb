#pragma once

// Cross-module property checks behind the `verify` command. Each property
// runs on seeded random instances and reports its first counterexample.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "uavcache/sim.hpp"

namespace uavcache {

struct PropertyResult {
  std::string name;
  bool pass = false;
  std::string detail;  // worst value on success, counterexample on failure
};

// ---------------------------------------------------------------------------
// Random instances

/// Conceptor of a random correlation matrix of rank <= 2n.
inline Conceptor random_conceptor(int n, double aperture, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> rank(1, 2 * n);
  const int m = rank(rng);
  Mat a(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = g(rng);
  return conceptor_from_correlation(a * a.transpose() / m, aperture);
}

/// Channel matrix of a cluster with U users and U..U+3 antennas inside a
/// 300 m square: ground gains times unit Rayleigh amplitudes.
inline Mat random_cluster_channel(std::mt19937_64& rng, double beta) {
  std::uniform_int_distribution<int> users(1, 6), extra(0, 3);
  std::uniform_real_distribution<double> pos(-150.0, 150.0);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  const int u = users(rng), a = u + extra(rng);
  std::vector<Point2> ant(static_cast<std::size_t>(a));
  for (auto& p : ant) p = {pos(rng), pos(rng)};
  Mat h(u, a);
  for (int i = 0; i < u; ++i) {
    const Point2 p{pos(rng), pos(rng)};
    for (int j = 0; j < a; ++j) {
      const double x = g(rng), y = g(rng);
      h(i, j) = std::sqrt(ground_gain(p, ant[static_cast<std::size_t>(j)], beta) * (x * x + y * y));
    }
  }
  return h;
}

inline std::vector<ContentDemand> random_demands(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  std::vector<ContentDemand> out(static_cast<std::size_t>(count(rng)));
  for (auto& d : out) {
    d = {Vec(n), Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
      d.probability(i) = u(rng);
      d.power_cached(i) = u(rng);
      d.power_uncached(i) = d.power_cached(i) + 3.0 * u(rng);
    }
    d.probability /= d.probability.sum();
  }
  return out;
}

/// Up to 10 users inside a 7 m wide square (span below 10 m), which keeps h_min in the
/// high-altitude closed-form regime; targets 1-20 Mbit/s.
inline std::vector<PlacementUser> random_regime_users(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 10);
  std::uniform_real_distribution<double> centre(-300.0, 300.0), off(-3.5, 3.5), rate(1e6, 2e7);
  const Point2 c{centre(rng), centre(rng)};
  std::vector<PlacementUser> users(static_cast<std::size_t>(count(rng)));
  for (auto& u : users) u = {{c.x + off(rng), c.y + off(rng)}, rate(rng)};
  return users;
}

// ---------------------------------------------------------------------------
// Properties

inline PropertyResult check_echo_state(const ScenarioConfig& c) {
  const double rho = spectral_radius(shared_reservoir(c, /*allow_unstable=*/true));
  PropertyResult r{"echo_state", rho < 1.0, "spectral radius " + fmt(rho)};
  if (!r.pass) r.detail += " >= 1 (esn.spectral_radius=" + fmt(c.esn.spectral_radius) + ")";
  return r;
}

inline PropertyResult check_conceptor_algebra(int instances, int n, std::uint64_t seed, double tol = 1e-12) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Conceptor m = random_conceptor(n, 15.0, rng);
    const Conceptor other = random_conceptor(n, 15.0, rng);
    const Vec ev = sym_eig(m.m).values;
    const double nn = (conceptor_not(conceptor_not(m)).m - m.m).cwiseAbs().maxCoeff();
    const double or0 = (conceptor_or(m, zero_conceptor(n, 15.0)).m - m.m).cwiseAbs().maxCoeff();
    const double comm = (conceptor_or(m, other).m - conceptor_or(other, m).m).cwiseAbs().maxCoeff();
    const double err = std::max({nn, or0, comm});
    worst = std::max(worst, err);
    const bool range = ev.minCoeff() >= -tol && ev.maxCoeff() < 1.0;
    if (!range || err > tol) {
      return {"conceptor_algebra", false,
              "instance " + std::to_string(k) + ": eigenvalues [" + fmt(ev.minCoeff()) + ", " + fmt(ev.maxCoeff()) +
                  "], not-not " + fmt(nn) + ", or-zero " + fmt(or0) + ", commutativity " + fmt(comm)};
    }
  }
  return {"conceptor_algebra", true, "max deviation " + fmt(worst)};
}

inline PropertyResult check_zf_nulling(int instances, double beta, std::uint64_t seed, double tol = 1e-9) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const Mat h = random_cluster_channel(rng, beta);
    const Mat f = zf_precoder(h);
    const Mat e = h * f - Mat::Identity(h.rows(), h.rows());
    const double err = e.cwiseAbs().rowwise().sum().maxCoeff();
    worst = std::max(worst, err);
    if (!(err <= tol)) {
      return {"zf_nulling", false,
              "instance " + std::to_string(k) + " (" + std::to_string(h.rows()) + "x" + std::to_string(h.cols()) +
                  "): ||HF - I||_inf = " + fmt(err)};
    }
  }
  return {"zf_nulling", true, "max ||HF - I||_inf " + fmt(worst)};
}

inline PropertyResult check_cache_selection(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> contents(1, 8), capacity(1, 3);
  for (int k = 0; k < instances; ++k) {
    const int n = contents(rng), cap = std::min(n, capacity(rng));
    const auto demands = random_demands(rng, n);
    const auto top = select_cache(cache_scores(demands, n), cap);
    const auto best = exhaustive_cache(demands, n, cap);
    if (top != best) {
      std::string d = "instance " + std::to_string(k) + " N=" + std::to_string(n) + " C=" + std::to_string(cap) + ": top-C {";
      for (int i : top) d += " " + std::to_string(i);
      d += " } exhaustive {";
      for (int i : best) d += " " + std::to_string(i);
      return {"cache_top_c_exact", false, d + " }"};
    }
  }
  return {"cache_top_c_exact", true, std::to_string(instances) + " instances identical"};
}

struct PlacementGap {
  double closed_form = 0.0;   // closed form over grid optimum, minus one
  double local_search = 0.0;  // local search from the closed form over grid optimum, minus one
};

/// Closed form and local search against a grid over the bounding box padded
/// by 100 m at altitudes h_min, h_min + step, ...
inline PlacementGap placement_gap(const std::vector<PlacementUser>& users, const ScenarioConfig& c, double grid_step,
                                  int altitude_levels) {
  const int uk = static_cast<int>(users.size());
  std::vector<double> heights;
  for (int i = 0; i < altitude_levels; ++i) heights.push_back(c.min_altitude_m + i * grid_step);
  const double grid = place_exhaustive(users, uk, grid_step, heights, c).objective;
  const Point2 xy = place_closed_form(users, uk, c);
  const Point3 start{xy.x, xy.y, c.min_altitude_m};
  const double cf = placement_objective(start, users, uk, c);
  const double ls = place_local_search(users, uk, start, c).objective;
  return {cf / grid - 1.0, ls / grid - 1.0};
}

inline PropertyResult check_placement(const ScenarioConfig& c, int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_cf = -kInfinity, worst_ls = -kInfinity;
  for (int k = 0; k < instances; ++k) {
    const auto users = random_regime_users(rng);
    if (placement_regime(users, c.min_altitude_m, c.placement) == Regime::Neither) {
      return {"placement_closed_form", false, "instance " + std::to_string(k) + " left the closed-form regime"};
    }
    const auto g = placement_gap(users, c, 3.0, 3);
    worst_cf = std::max(worst_cf, g.closed_form);
    worst_ls = std::max(worst_ls, g.local_search);
    if (g.closed_form > 0.10 || g.local_search > 0.05) {
      return {"placement_closed_form", false,
              "instance " + std::to_string(k) + " (" + std::to_string(users.size()) + " users): closed form +" +
                  fmt(100.0 * g.closed_form) + "%, local search +" + fmt(100.0 * g.local_search) + "% over the 3 m grid"};
    }
  }
  return {"placement_closed_form", true,
          "worst gap closed form " + fmt(100.0 * worst_cf) + "%, local search " + fmt(100.0 * worst_ls) + "%"};
}

/// One oracle-mode run of the proposed scheme; the per-slot invariant checks
/// (conservation, delay bound, power and cache validity) raise on failure.
inline std::vector<PropertyResult> check_pipeline(const ScenarioConfig& c, int threads) {
  try {
    const auto r = baseline(c, Variant::Proposed, threads);
    const auto& s = r.summary;
    const bool conserved = s.rrh_deliveries + s.fronthaul_deliveries + s.cache_hits + s.unserved == s.requests;
    return {{"delay_lower_bound", s.min_delay_margin_s >= 0.0,
             "min margin " + fmt(s.min_delay_margin_s) + " s over " + std::to_string(s.delivered) + " deliveries"},
            {"slot_invariants", conserved,
             std::to_string(s.requests) + " requests = " + std::to_string(s.rrh_deliveries) + " rrh + " +
                 std::to_string(s.fronthaul_deliveries) + " fronthaul + " + std::to_string(s.cache_hits) +
                 " cache + " + std::to_string(s.unserved) + " unserved"}};
  } catch (const InvariantError& e) {
    const std::string what = e.what();
    const bool delay = what.find("below bound") != std::string::npos;
    return {{"delay_lower_bound", !delay, delay ? what : "run aborted by another invariant"},
            {"slot_invariants", false, what}};
  }
}

/// Every property, each exactly once, in a fixed order.
inline std::vector<PropertyResult> run_property_suite(const ScenarioConfig& c, int threads = 1) {
  std::vector<PropertyResult> out;
  out.push_back(check_echo_state(c));
  out.push_back(check_conceptor_algebra(100, 30, c.seed));
  out.push_back(check_zf_nulling(1000, c.channel.g2a_exponent, c.seed));
  out.push_back(check_cache_selection(100, c.seed));
  out.push_back(check_placement(c, 10, c.seed));
  for (auto& r : check_pipeline(c, threads)) out.push_back(std::move(r));
  return out;
}

}  // namespace uavcache

// Radio propagation: UAV-user mmWave links, BBU-UAV ground-to-air fronthaul
// and zero-forcing RRH clusters.
//
// Elevation angles are in degrees. Slot capacities are in bits per slot: the
// instantaneous rate of each interval is multiplied by the interval duration.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "uavcache/error.hpp"
#include "uavcache/numerics.hpp"
#include "uavcache/random.hpp"
#include "uavcache/scenario.hpp"

namespace uavcache {

/// Shadowing and small-scale fading for one link and one interval.
/// Shadowing is truncated at four deviations, the margin the delay lower
/// bound assumes.
struct FadingDraw {
  static constexpr double kShadowTruncation = 4.0;

  double shadow_los_db = 0.0;
  double shadow_nlos_db = 0.0;
  double rayleigh_gain = 1.0;

  static FadingDraw sample(const ChannelParams& p, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    FadingDraw f;
    auto z = [&] { return std::clamp(n(rng), -kShadowTruncation, kShadowTruncation); };
    f.shadow_los_db = p.shadow_std_los_db * z();
    f.shadow_nlos_db = p.shadow_std_nlos_db * z();
    f.rayleigh_gain = e(rng);
    return f;
  }
};

struct LinkBudget {
  double pathloss_db = 0.0;
  double los_probability = 0.0;
  double snr_linear = 0.0;
  double rate_bps = 0.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double free_space_pl(double d0_m, double fc_hz) {
  return 20.0 * std::log10(d0_m * fc_hz * 4.0 * std::numbers::pi / kSpeedOfLight);
}

inline double distance3(const Point3& uav, const Point2& user) {
  const double dx = user.x - uav.x;
  const double dy = user.y - uav.y;
  return std::sqrt(dx * dx + dy * dy + uav.h * uav.h);
}

inline double los_probability_at(double elevation_deg, const ChannelParams& p) {
  return 1.0 / (1.0 + p.env_x * std::exp(-p.env_y * (elevation_deg - p.env_x)));
}

inline double los_probability(const Point3& uav, const Point2& user, const ChannelParams& p) {
  const double d = distance3(uav, user);
  if (!(d > 0.0)) throw std::invalid_argument("los_probability: zero distance");
  if (!(uav.h > 0.0)) throw std::invalid_argument("los_probability: altitude must be positive");
  const double phi = std::asin(std::min(1.0, uav.h / d)) * 180.0 / std::numbers::pi;
  return los_probability_at(phi, p);
}

/// Average mmWave path loss in dB. Without a draw the shadowing terms sit at
/// their zero mean.
inline double uav_user_pathloss(const Point3& uav, const Point2& user, const ChannelParams& p,
                                const std::optional<FadingDraw>& fading = std::nullopt) {
  const double d = distance3(uav, user);
  if (!(d > 0.0)) throw std::invalid_argument("uav_user_pathloss: zero distance");
  const double pr = los_probability(uav, user, p);
  const double base = free_space_pl(p.fs_ref_distance_m, p.carrier_hz);
  double los = base + 10.0 * p.exponent_los * std::log10(d);
  double nlos = base + 10.0 * p.exponent_nlos * std::log10(d);
  if (fading) {
    los += fading->shadow_los_db;
    nlos += fading->shadow_nlos_db;
  }
  return pr * los + (1.0 - pr) * nlos;
}

inline double uav_user_snr(double power_w, double pathloss_db, double noise_w) {
  return power_w / (db_to_linear(pathloss_db) * noise_w);
}

/// Bits per slot for a per-interval SNR sequence on `bandwidth_hz` shared by
/// `sharing` users.
inline double slot_capacity(const std::vector<double>& snr, double bandwidth_hz, int sharing, double slot_s) {
  if (sharing < 1) throw std::invalid_argument("slot_capacity: empty association set");
  if (snr.empty()) return 0.0;
  const double dt = slot_s / static_cast<double>(snr.size());
  double bits = 0.0;
  for (double g : snr) bits += bandwidth_hz / sharing * std::log2(1.0 + std::max(0.0, g)) * dt;
  return bits;
}

/// UAV-to-user slot capacity; `users_on_uav` is U_k.
inline double uav_slot_capacity(const std::vector<double>& snr_per_interval, double uav_bandwidth_hz, int users_on_uav,
                                double slot_s) {
  return slot_capacity(snr_per_interval, uav_bandwidth_hz, users_on_uav, slot_s);
}

/// ZF-served user on the full cellular band.
inline double rrh_slot_capacity(const std::vector<double>& sinr_per_interval, double bandwidth_hz, double slot_s) {
  return slot_capacity(sinr_per_interval, bandwidth_hz, 1, slot_s);
}

/// BBU-to-UAV link. Attenuation d^beta on LoS and eta*d^beta on NLoS,
/// averaged in dB with the LoS probability seen from the BBU.
inline LinkBudget g2a_link(const Point3& uav, const Point2& bbu, const ChannelParams& p, double power_w,
                           double bandwidth_hz, double noise_w, const std::optional<FadingDraw>& fading = std::nullopt) {
  const double d = distance3(uav, bbu);
  if (!(d > 0.0)) throw std::invalid_argument("g2a_fronthaul_rate: zero distance");
  LinkBudget b;
  b.los_probability = los_probability(uav, bbu, p);
  const double los_db = 10.0 * p.g2a_exponent * std::log10(d);
  const double nlos_db = los_db + 10.0 * std::log10(p.g2a_nlos_factor);
  b.pathloss_db = b.los_probability * los_db + (1.0 - b.los_probability) * nlos_db;
  b.snr_linear = power_w / (db_to_linear(b.pathloss_db) * noise_w);
  if (fading) b.snr_linear *= fading->rayleigh_gain;
  b.rate_bps = bandwidth_hz * std::log2(1.0 + b.snr_linear);
  return b;
}

/// Fronthaul bits per slot delivered to one UAV over the whole band.
inline double g2a_fronthaul_rate(const Point3& uav, const Point2& bbu, const ScenarioConfig& c,
                                 const std::optional<FadingDraw>& fading = std::nullopt) {
  return g2a_link(uav, bbu, c.channel, c.bbu_power_w, c.rrh_bandwidth_hz, c.noise_power_w, fading).rate_bps *
         c.slot_duration_s;
}

// ---------------------------------------------------------------------------
// Zero-forcing RRH clusters

/// Ground distances below this are clamped (user standing at an antenna).
inline constexpr double kMinGroundDistance = 1.0;

inline double ground_gain(const Point2& a, const Point2& b, double beta) {
  return std::pow(std::max(kMinGroundDistance, horizontal_distance(a, b)), -beta);
}

/// F = H^T (H H^T)^{-1}, computed from a QR factorisation of H^T.
/// Throws NumericError when H is not full row rank.
inline Mat zf_precoder(const Mat& h, const std::string& label = "cluster") {
  if (h.rows() == 0) return Mat(h.cols(), 0);
  if (h.rows() > h.cols()) throw DimensionError(label + ": more users than antennas");
  Eigen::HouseholderQR<Mat> qr(h.transpose());
  const Eigen::Index u = h.rows();
  Mat r = qr.matrixQR().topLeftCorner(u, u).triangularView<Eigen::Upper>();
  const double rmax = r.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u; ++i) {
    if (!(std::abs(r(i, i)) > 1e-12 * rmax)) throw NumericError(label + ": channel matrix is rank deficient");
  }
  Mat q = qr.householderQ() * Mat::Identity(h.cols(), u);
  // F = Q R^{-T}
  const Mat rinv_t = r.transpose().triangularView<Eigen::Lower>().solve(Mat::Identity(u, u));
  return q * rinv_t;
}

struct ZfCluster {
  std::vector<Point2> rrhs;
  std::vector<Point2> users;
};

/// Per-user SINR for every cluster (outer index cluster, inner index user).
/// `bbu_interference_w` has the same shape (empty means none). Without a
/// fading stream every Rayleigh gain is at its unit mean; with one, gains are
/// drawn in (victim cluster, victim user, antenna cluster, antenna) order.
inline std::vector<std::vector<double>> zfbf_sinr(const std::vector<ZfCluster>& clusters,
                                                  const std::vector<std::vector<double>>& bbu_interference_w,
                                                  double rrh_power_w, double noise_w, double beta,
                                                  std::optional<RandomSource> fading = std::nullopt) {
  const std::size_t e = clusters.size();
  std::optional<std::mt19937_64> rng;
  if (fading) rng.emplace(fading->engine());
  std::exponential_distribution<double> expo(1.0);

  // h[victim cluster][antenna cluster] : U_victim x R_antenna
  std::vector<std::vector<Mat>> h(e, std::vector<Mat>(e));
  for (std::size_t q = 0; q < e; ++q) {
    for (std::size_t i = 0; i < clusters[q].users.size(); ++i) {
      for (std::size_t j = 0; j < e; ++j) {
        Mat& m = h[q][j];
        if (m.size() == 0) m = Mat::Zero(static_cast<Eigen::Index>(clusters[q].users.size()),
                                         static_cast<Eigen::Index>(clusters[j].rrhs.size()));
        for (std::size_t l = 0; l < clusters[j].rrhs.size(); ++l) {
          const double g = rng ? expo(*rng) : 1.0;
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
              g * ground_gain(clusters[j].rrhs[l], clusters[q].users[i], beta);
        }
      }
    }
  }

  std::vector<Mat> f(e);
  for (std::size_t q = 0; q < e; ++q) {
    if (clusters[q].users.size() > clusters[q].rrhs.size()) {
      throw DimensionError("cluster " + std::to_string(q) + ": more users than antennas");
    }
    if (!clusters[q].users.empty()) f[q] = zf_precoder(h[q][q], "cluster " + std::to_string(q));
  }

  std::vector<std::vector<double>> sinr(e);
  for (std::size_t q = 0; q < e; ++q) {
    const auto nu = clusters[q].users.size();
    sinr[q].resize(nu);
    for (std::size_t i = 0; i < nu; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double s = h[q][q].row(ii).dot(f[q].col(ii));
      double interference = 0.0;
      for (std::size_t j = 0; j < e; ++j) {
        if (j == q || clusters[j].users.empty()) continue;
        const Vec cross = (h[q][j].row(ii) * f[j]).transpose();
        interference += rrh_power_w * cross.squaredNorm();
      }
      if (!bbu_interference_w.empty()) interference += bbu_interference_w.at(q).at(i);
      sinr[q][i] = rrh_power_w * s * s / (interference + noise_w);
    }
  }
  return sinr;
}

/// Interference from the BBU's wireless fronthaul at a ground user.
inline double bbu_interference(const Point2& user, const Point2& bbu, double bbu_power_w, double beta,
                               double rayleigh_gain = 1.0) {
  return bbu_power_w * rayleigh_gain * ground_gain(bbu, user, beta);
}

}  // namespace uavcache

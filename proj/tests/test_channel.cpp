#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "uavcache/channel.hpp"

using namespace uavcache;

namespace {
constexpr double kPi = 3.14159265358979323846;
const ChannelParams kTable;  // full-size defaults

double oracle_los(double h, double ground, double x = 11.9, double y = 0.13) {
  const double phi = std::atan2(h, ground) * 180.0 / kPi;
  return 1.0 / (1.0 + x * std::exp(-y * (phi - x)));
}
}  // namespace

TEST(FreeSpace, ReferenceValues) {
  const double expect = 20.0 * std::log10(4.0 * kPi * 5.0 * 38e9 / 299792458.0);
  EXPECT_NEAR(free_space_pl(5.0, 38e9), expect, 1e-12);
  EXPECT_NEAR(free_space_pl(5.0, 38e9), 78.0, 0.05);
  EXPECT_NEAR(free_space_pl(299792458.0 / (4.0 * kPi * 38e9), 38e9), 0.0, 1e-12);
  EXPECT_NEAR(free_space_pl(10.0, 38e9) - free_space_pl(5.0, 38e9), 6.0206, 1e-4);
}

TEST(LosProbability, KnownAngles) {
  // Elevation exactly X degrees: ground distance h / tan(X).
  const double h = 100.0;
  const double ground = h / std::tan(11.9 * kPi / 180.0);
  EXPECT_NEAR(los_probability({0, 0, h}, {ground, 0}, kTable), 1.0 / 12.9, 1e-12);
  EXPECT_NEAR(los_probability({0, 0, h}, {0, 0}, kTable), oracle_los(h, 0.0), 1e-12);
  EXPECT_NEAR(los_probability({0, 0, h}, {0, 0}, kTable), 0.9995, 5e-5);
}

TEST(LosProbability, MonotoneInElevationAndAltitude) {
  double prev = 0.0;
  for (double g = 1000.0; g >= 0.0; g -= 10.0) {
    const double p = los_probability({0, 0, 100}, {g, 0}, kTable);
    EXPECT_GT(p, prev);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    prev = p;
  }
  prev = 0.0;
  for (double h = 10.0; h <= 1000.0; h += 10.0) {
    const double p = los_probability({0, 0, h}, {200, 0}, kTable);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(LosProbability, ZeroDistanceThrows) {
  EXPECT_THROW(los_probability({0, 0, 0}, {0, 0}, kTable), std::invalid_argument);
}

TEST(UavPathloss, HundredMetresExpected) {
  const double pr = oracle_los(100.0, 0.0);
  const double lfs = 20.0 * std::log10(4.0 * kPi * 5.0 * 38e9 / 299792458.0);
  const double expect = lfs + pr * 20.0 * 2.0 + (1.0 - pr) * 20.0 * 2.4;
  EXPECT_NEAR(uav_user_pathloss({0, 0, 100}, {0, 0}, kTable), expect, 1e-9);
}

TEST(UavPathloss, BetweenLosAndNlosAndDegenerateCases) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-400, 400), hh(20, 400);
  const double lfs = free_space_pl(5.0, 38e9);
  for (int k = 0; k < 200; ++k) {
    const Point3 a{u(rng), u(rng), hh(rng)};
    const Point2 b{u(rng), u(rng)};
    const double d = distance3(a, b);
    const double l = uav_user_pathloss(a, b, kTable);
    EXPECT_GE(l, lfs + 20.0 * std::log10(d) - 1e-9);
    EXPECT_LE(l, lfs + 24.0 * std::log10(d) + 1e-9);
  }
  ChannelParams same = kTable;
  same.exponent_nlos = same.exponent_los;
  EXPECT_NEAR(uav_user_pathloss({0, 0, 100}, {0, 0}, same), uav_user_pathloss({0, 0, 100}, {300, 0}, same) -
                                                                  20.0 * std::log10(std::hypot(100.0, 300.0) / 100.0),
              1e-9);
  // Large X*Y pushes the LoS probability to one overhead.
  ChannelParams sharp = kTable;
  sharp.env_x = 1.0;
  sharp.env_y = 5.0;
  EXPECT_NEAR(uav_user_pathloss({0, 0, 100}, {0, 0}, sharp), lfs + 40.0, 1e-9);
}

TEST(UavPathloss, SampledShadowingShiftsResult) {
  FadingDraw f;
  f.shadow_los_db = 3.0;
  f.shadow_nlos_db = 3.0;
  EXPECT_NEAR(uav_user_pathloss({0, 0, 100}, {50, 0}, kTable, f) - uav_user_pathloss({0, 0, 100}, {50, 0}, kTable),
              3.0, 1e-12);
}

TEST(Snr, DirectValues) {
  EXPECT_NEAR(uav_user_snr(1.0, 100.0, std::pow(10.0, -9.5) * 1e-3), std::pow(10.0, 2.5), 1e-9);
  EXPECT_NEAR(uav_user_snr(3e-13, 0.0, 3e-13), 1.0, 1e-15);
  EXPECT_NEAR(uav_user_snr(1.0, 110.0, 1e-12) / uav_user_snr(1.0, 100.0, 1e-12), 0.1, 1e-12);
}

TEST(SlotCapacity, ConstantSnr) {
  EXPECT_NEAR(uav_slot_capacity(std::vector<double>(1000, 1.0), 1e9, 1, 1.0), 1e9, 1e-3);
  EXPECT_EQ(uav_slot_capacity(std::vector<double>(10, 0.0), 1e9, 1, 1.0), 0.0);
  EXPECT_NEAR(uav_slot_capacity(std::vector<double>(10, 7.0), 1e9, 2, 1.0),
              0.5 * uav_slot_capacity(std::vector<double>(10, 7.0), 1e9, 1, 1.0), 1e-3);
  EXPECT_THROW(uav_slot_capacity({1.0}, 1e9, 0, 1.0), std::invalid_argument);
  EXPECT_NEAR(rrh_slot_capacity(std::vector<double>(100, 3.0), 1e6, 1.0), 2e6, 1e-6);
  EXPECT_EQ(rrh_slot_capacity(std::vector<double>(100, 0.0), 1e6, 1.0), 0.0);
}

TEST(Fronthaul, OverheadHandEvaluation) {
  const auto c = ScenarioConfig::paper();
  // BBU at the origin, UAV straight above: elevation 90 degrees.
  const double pr = oracle_los(100.0, 0.0);
  const double pl_db = pr * 10.0 * 2.0 * 2.0 + (1.0 - pr) * (10.0 * 2.0 * 2.0 + 20.0);
  const double snr = 1.0 / (std::pow(10.0, pl_db / 10.0) * std::pow(10.0, -12.5));
  EXPECT_NEAR(g2a_fronthaul_rate({0, 0, 100}, {0, 0}, c), 1e6 * std::log2(1.0 + snr), 1e-3);
  EXPECT_GT(g2a_fronthaul_rate({0, 0, 100}, {0, 0}, c), 2.0e7);
}

TEST(Fronthaul, EtaOneRemovesLosDependence) {
  auto c = ScenarioConfig::paper();
  c.channel.g2a_nlos_factor = 1.0;
  const double d = std::hypot(300.0, 100.0);
  const double snr = 1.0 / (d * d * c.noise_power_w);
  EXPECT_NEAR(g2a_fronthaul_rate({300, 0, 100}, {0, 0}, c), 1e6 * std::log2(1.0 + snr), 1e-3);
}

TEST(Fronthaul, DecreasesWithHorizontalDistance) {
  const auto c = ScenarioConfig::paper();
  double prev = g2a_fronthaul_rate({0, 0, 100}, {0, 0}, c);
  for (double x = 5.0; x <= 1000.0; x += 5.0) {
    const double r = g2a_fronthaul_rate({x, 0, 100}, {0, 0}, c);
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(ZeroForcing, RandomResidual) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 50; ++k) {
    Mat h(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) h(i, j) = n(rng);
    const Mat f = zf_precoder(h);
    EXPECT_LE((h * f - Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
    // Independent oracle: normal-equation form.
    const Mat g = h.transpose() * (h * h.transpose()).inverse();
    EXPECT_LE((f - g).cwiseAbs().maxCoeff(), 1e-9 * g.cwiseAbs().maxCoeff());
  }
}

TEST(ZeroForcing, RankDeficientAndOverloaded) {
  Mat h(2, 3);
  h << 1, 2, 3, 2, 4, 6;
  EXPECT_THROW(zf_precoder(h, "cluster 4"), NumericError);
  try {
    zf_precoder(h, "cluster 4");
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("cluster 4"), std::string::npos);
  }
  EXPECT_THROW(zf_precoder(Mat::Ones(3, 2)), DimensionError);
}

TEST(ZfbfSinr, SingleUserIsNoiseLimited) {
  ZfCluster c{{{0, 0}, {30, 0}}, {{10, 5}}};
  const double pr = 0.1, noise = 1e-12;
  const auto s = zfbf_sinr({c}, {}, pr, noise, 2.0);
  EXPECT_NEAR(s[0][0], pr / noise, 1e-6 * pr / noise);
}

TEST(ZfbfSinr, FarClustersDoNotInterfere) {
  ZfCluster a{{{0, 0}, {20, 0}}, {{5, 5}}};
  ZfCluster b{{{1e7, 0}, {1e7 + 20, 0}}, {{1e7 + 5, 5}}};
  const auto s = zfbf_sinr({a, b}, {}, 0.1, 1e-12, 2.0);
  EXPECT_NEAR(s[0][0], 0.1 / 1e-12, 1e-3 * 0.1 / 1e-12);
  EXPECT_NEAR(s[1][0], 0.1 / 1e-12, 1e-3 * 0.1 / 1e-12);
}

TEST(ZfbfSinr, InterferenceAndBbuTermMatchHandComputation) {
  ZfCluster a{{{0, 0}, {40, 0}}, {{10, 10}}};
  ZfCluster b{{{200, 0}, {240, 0}}, {{220, 15}}};
  const double pr = 0.1, noise = 1e-12, beta = 2.0;
  const std::vector<std::vector<double>> bbu = {{1e-6}, {2e-6}};
  const auto s = zfbf_sinr({a, b}, bbu, pr, noise, beta);
  // Oracle: single-user ZF is h^T / |h|^2.
  auto gain = [&](Point2 r, Point2 u) { return std::pow(std::hypot(r.x - u.x, r.y - u.y), -beta); };
  auto row = [&](const ZfCluster& c, Point2 u) {
    return std::array<double, 2>{gain(c.rrhs[0], u), gain(c.rrhs[1], u)};
  };
  const auto hb = row(b, b.users[0]);
  const double nb = hb[0] * hb[0] + hb[1] * hb[1];
  const auto cross = row(b, a.users[0]);
  const double leak = (cross[0] * hb[0] + cross[1] * hb[1]) / nb;
  const double expect = pr / (pr * leak * leak + 1e-6 + noise);
  EXPECT_NEAR(s[0][0], expect, 1e-9 * expect);
}

TEST(ZfbfSinr, TooManyUsersThrows) {
  ZfCluster c{{{0, 0}}, {{1, 1}, {2, 2}}};
  EXPECT_THROW(zfbf_sinr({c}, {}, 0.1, 1e-12, 2.0), DimensionError);
}

TEST(ZfbfSinr, SampledFadingIsDeterministic) {
  ZfCluster a{{{0, 0}, {40, 0}, {0, 40}}, {{10, 10}, {30, 5}}};
  ZfCluster b{{{200, 0}, {240, 0}}, {{220, 15}}};
  const auto s1 = zfbf_sinr({a, b}, {}, 0.1, 1e-12, 2.0, RandomSource(3).derive("fading"));
  const auto s2 = zfbf_sinr({a, b}, {}, 0.1, 1e-12, 2.0, RandomSource(3).derive("fading"));
  EXPECT_EQ(s1, s2);
  EXPECT_NE(s1, zfbf_sinr({a, b}, {}, 0.1, 1e-12, 2.0));
}

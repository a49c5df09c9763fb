#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "uavcache/cesn.hpp"

using namespace uavcache;

namespace {

Mat random_matrix(int r, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

Mat random_correlation(int n, std::uint64_t seed) {
  const Mat a = random_matrix(n, 2 * n, seed);
  return a * a.transpose() / (2.0 * n);
}

Mat sinus(double period, int n, double phase = 0.0) {
  Mat m(1, n);
  for (int t = 0; t < n; ++t) m(0, t) = 0.8 * std::sin(2.0 * std::numbers::pi * t / period + phase);
  return m;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

EsnConfig small_config(int n) {
  EsnConfig c;
  c.reservoir_size = n;
  c.training_length = 1000;
  return c;
}

// Hour-of-day request model: a work profile and an entertainment profile
// mixed with a weight that peaks during working hours.
Vec zipf(int n, double s, int offset) {
  Vec p = Vec::Zero(n);
  for (int k = 0; k < n; ++k) p((k + offset) % n) = 1.0 / std::pow(k + 1.0, s);
  return p / p.sum();
}

Vec true_distribution(int hour, int n) {
  const bool work = (hour >= 9 && hour < 12) || (hour >= 14 && hour < 18);
  const double w = work ? 0.75 : 0.15;
  return w * zipf(n, 1.2, 0) + (1.0 - w) * zipf(n, 1.2, n / 2);
}

}  // namespace

// ---------------------------------------------------------------------------
// Conceptor algebra

TEST(Conceptor, IdentityCorrelation) {
  const auto c = conceptor_from_correlation(Mat::Identity(3, 3), 15.0);
  EXPECT_LE(max_abs(c.m - 225.0 / 226.0 * Mat::Identity(3, 3)), 1e-15);
  EXPECT_NEAR(c.m(0, 0), 0.99558, 1e-5);
}

TEST(Conceptor, DiagonalCorrelation) {
  Mat r = Mat::Zero(2, 2);
  r.diagonal() << 4, 1;
  const auto c = conceptor_from_correlation(r, 1.0);
  EXPECT_NEAR(c.m(0, 0), 0.8, 1e-15);
  EXPECT_NEAR(c.m(1, 1), 0.5, 1e-15);
  EXPECT_EQ(c.m(0, 1), 0.0);
}

TEST(Conceptor, ApertureLimits) {
  Mat r = Mat::Zero(3, 3);
  r.diagonal() << 2, 0.5, 0;
  const auto wide = conceptor_from_correlation(r, 1e6);
  Mat range = Mat::Zero(3, 3);
  range.diagonal() << 1, 1, 0;
  EXPECT_LE(max_abs(wide.m - range), 1e-11);
  EXPECT_LE(max_abs(conceptor_from_correlation(r, 1e-6).m), 1e-11);
  EXPECT_THROW(conceptor_from_correlation(r, 0.0), std::invalid_argument);
}

TEST(Conceptor, DefinitionHoldsOnRandomStates) {
  const Mat states = random_matrix(6, 40, 3).array().tanh();
  const auto c = compute_conceptor(states, 3.0);
  const Mat r = states * states.transpose() / 40.0;
  const Mat expected = r * (r + Mat::Identity(6, 6) / 9.0).inverse();
  EXPECT_LE(max_abs(c.m - expected), 1e-9);
}

TEST(ConceptorNot, IdentityZeroAndInvolution) {
  const auto z = zero_conceptor(4, 15.0);
  EXPECT_EQ(conceptor_not(z).m, Mat::Identity(4, 4));
  const auto c = conceptor_from_correlation(random_correlation(5, 4), 2.0);
  EXPECT_LE(max_abs(conceptor_not(conceptor_not(c)).m - c.m), 1e-12);
  const Vec s = sym_eig(c.m).values;
  const Vec ns = sym_eig(conceptor_not(c).m).values;
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(ns(i), 1.0 - s(4 - i), 1e-12);
}

TEST(ConceptorOr, ZeroSelfAndCommutativity) {
  const auto a = conceptor_from_correlation(random_correlation(5, 5), 2.0);
  const auto b = conceptor_from_correlation(random_correlation(5, 6), 2.0);
  EXPECT_LE(max_abs(conceptor_or(a, zero_conceptor(5, 2.0)).m - a.m), 1e-12);
  EXPECT_LE(max_abs(conceptor_or(a, b).m - conceptor_or(b, a).m), 1e-12);

  const Vec s = sym_eig(*a.r).values;
  const Vec aa = sym_eig(conceptor_or(a, a).m).values;
  for (int i = 0; i < 5; ++i) {
    const double x = std::max(0.0, s(i));
    EXPECT_NEAR(aa(i), 2 * x / (2 * x + 0.25), 1e-12);
    EXPECT_GE(aa(i), x / (x + 0.25) - 1e-15);
  }
}

TEST(ConceptorOr, RejectsMismatchedOperands) {
  const auto a = conceptor_from_correlation(random_correlation(3, 7), 2.0);
  const auto b = conceptor_from_correlation(random_correlation(3, 8), 3.0);
  EXPECT_THROW(conceptor_or(a, b), std::invalid_argument);
  EXPECT_THROW(conceptor_or(a, conceptor_not(a)), std::invalid_argument);
  EXPECT_THROW(conceptor_or(a, zero_conceptor(4, 2.0)), DimensionError);
}

TEST(FreeMemory, EmptyFullAndMonotone) {
  EXPECT_DOUBLE_EQ(free_memory({}, 6, 15.0).quota, 1.0);
  const auto full = conceptor_from_correlation(Mat::Identity(6, 6), 1e4);
  EXPECT_LE(free_memory({full}, 6, 1e4).quota, 1e-7);

  std::vector<Conceptor> loaded;
  double prev = 1.0;
  for (int k = 0; k < 5; ++k) {
    const Mat states = random_matrix(6, 3, 30 + k);
    loaded.push_back(compute_conceptor(states, 4.0));
    const double q = free_memory(loaded, 6, 4.0).quota;
    EXPECT_LE(q, prev + 1e-15);
    EXPECT_GE(q, 0.0);
    prev = q;
  }
}

// ---------------------------------------------------------------------------
// Reservoir

TEST(Drive, ZeroWeightsAndSingleStep) {
  const EsnConfig cfg = small_config(3);
  const auto zero = EsnModel::from_weights(cfg, Mat::Zero(3, 3), Mat::Zero(3, 2), 1);
  EXPECT_EQ(zero.drive(random_matrix(2, 5, 1)), Mat::Zero(3, 5));

  const auto id = EsnModel::from_weights(cfg, Mat::Zero(3, 3), Mat::Identity(3, 3), 1);
  Mat e1 = Mat::Zero(3, 1);
  e1(0, 0) = 1.0;
  const Mat v = id.drive(e1);
  EXPECT_DOUBLE_EQ(v(0, 0), std::tanh(1.0));
  EXPECT_EQ(v(1, 0), 0.0);
  EXPECT_EQ(v(2, 0), 0.0);
  EXPECT_THROW(id.drive(Mat::Zero(2, 4)), DimensionError);
}

TEST(Drive, StatesStayInsideOpenUnitInterval) {
  auto m = EsnModel::create(small_config(50), 2, 1, RandomSource(2));
  const Mat v = m.drive(2.0 * random_matrix(2, 300, 9));
  EXPECT_LT(max_abs(v), 1.0);
}

TEST(Drive, EchoStatePropertyForgetsInitialState) {
  EsnConfig cfg = small_config(100);
  cfg.spectral_radius = 0.9;
  const auto m = EsnModel::create(cfg, 1, 1, RandomSource(4));
  const Mat in = sinus(10.0, 500) + 0.2 * random_matrix(1, 500, 5);
  const Mat a = m.drive(in, Vec::Constant(100, 0.9));
  const Mat b = m.drive(in, Vec::Constant(100, -0.9));
  EXPECT_LE((a.col(499) - b.col(499)).norm(), 1e-6);
}

TEST(Drive, UnstableReservoirNeedsExplicitOptIn) {
  EsnConfig cfg = small_config(20);
  cfg.spectral_radius = 1.2;
  EXPECT_THROW(EsnModel::create(cfg, 1, 1, RandomSource(1)), std::invalid_argument);
  EXPECT_NO_THROW(EsnModel::create(cfg, 1, 1, RandomSource(1), true));
}

// ---------------------------------------------------------------------------
// Readout

TEST(Readout, ScalarClosedForms) {
  const int n = 8;
  const Mat v = Mat::Ones(1, n), y = Mat::Constant(1, n, 2.0);
  EXPECT_NEAR(ridge_readout(v, y, 0.0)(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(ridge_readout(v, y, std::sqrt(static_cast<double>(n)))(0, 0), 1.0, 1e-12);
}

TEST(Readout, RidgeObjectiveNotWorseThanLeastSquares) {
  const Mat v = random_matrix(10, 60, 11), y = random_matrix(3, 60, 12);
  const double lambda = 0.7;
  const Mat w = ridge_readout(v, y, lambda);
  const Mat w0 = ridge_readout(v, y, 0.0);
  auto objective = [&](const Mat& m) { return (y - m * v).squaredNorm() + lambda * lambda * m.squaredNorm(); };
  EXPECT_LE((y - w * v).squaredNorm(), (y - w0 * v).squaredNorm() + lambda * lambda * w0.squaredNorm());
  EXPECT_LE(objective(w), objective(w0));
  EXPECT_LE(objective(w), objective(w + 1e-3 * random_matrix(3, 10, 13)));
}

TEST(Readout, ModelMatchesStackedRegression) {
  EsnConfig cfg = small_config(30);
  cfg.washout = 20;
  auto m = EsnModel::create(cfg, 1, 1, RandomSource(6));
  const Mat a = sinus(7.0, 120), b = sinus(13.0, 120);
  m.load_pattern(a, a);
  m.load_pattern(b, b);
  m.train_readout();
  // States of the second pattern are driven from zero, like the first.
  Mat v(30, 200), y(1, 200);
  v << m.drive(a).rightCols(100), m.drive(b).rightCols(100);
  y << a.rightCols(100), b.rightCols(100);
  EXPECT_LE(max_abs(m.w_out() - ridge_readout(v, y, cfg.ridge)), 1e-9);
  EXPECT_THROW(EsnModel::create(cfg, 1, 1, RandomSource(6)).train_readout(), std::logic_error);
}

// ---------------------------------------------------------------------------
// Loading and recall

TEST(LoadPattern, FirstPatternUsesWholeReservoir) {
  auto m = EsnModel::create(small_config(40), 1, 1, RandomSource(7));
  EXPECT_DOUBLE_EQ(m.quota(), 1.0);
  const auto& rec = m.load_pattern(sinus(9.0, 300), sinus(9.0, 300));
  EXPECT_DOUBLE_EQ(rec.quota_before, 1.0);
  EXPECT_LT(rec.quota_after, 1.0);
  EXPECT_EQ(rec.samples, 250);
  const Vec ev = sym_eig(rec.conceptor.m).values;
  EXPECT_GE(ev.minCoeff(), -1e-12);
  EXPECT_LT(ev.maxCoeff(), 1.0);
}

TEST(LoadPattern, RepeatedPatternBarelyChangesD) {
  EsnConfig cfg = small_config(100);
  cfg.aperture = 200.0;
  auto m = EsnModel::create(cfg, 1, 1, RandomSource(8));
  const Mat p = sinus(8.83, 600);
  m.load_pattern(p, p);
  const Mat d1 = m.d();
  m.load_pattern(p, p);
  // Measured on the pattern's own states: the second load only touches
  // directions the pattern barely excites.
  const Mat v = m.drive(p).rightCols(550);
  EXPECT_LT(((m.d() - d1) * v).norm() / (d1 * v).norm(), 1e-3);
}

TEST(LoadPattern, RejectsBadShapes) {
  auto m = EsnModel::create(small_config(20), 1, 1, RandomSource(9));
  EXPECT_THROW(m.load_pattern(Mat::Zero(1, 100), Mat::Zero(1, 90)), DimensionError);
  EXPECT_THROW(m.load_pattern(Mat::Zero(2, 100), Mat::Zero(1, 100)), DimensionError);
  EXPECT_THROW(m.load_pattern(Mat::Zero(1, 40), Mat::Zero(1, 40)), std::invalid_argument);
}

TEST(LoadPattern, ExhaustedMemoryAsksForLargerReservoir) {
  EsnConfig cfg = small_config(6);
  cfg.aperture = 1e3;
  cfg.input_scale = 3.0;
  auto m = EsnModel::create(cfg, 2, 1, RandomSource(10));
  bool thrown = false;
  for (int k = 0; k < 20 && !thrown; ++k) {
    const Mat x = random_matrix(2, 200, 100 + k);
    try {
      m.load_pattern(x, x.topRows(1));
    } catch (const InfeasibleError& e) {
      thrown = true;
      EXPECT_NE(std::string(e.what()).find("larger reservoir"), std::string::npos);
    }
  }
  EXPECT_TRUE(thrown);
  EXPECT_LE(m.quota(), cfg.quota_threshold);
}

class Recall : public ::testing::Test {
 protected:
  void SetUp() override {
    EsnConfig cfg = small_config(200);
    cfg.aperture = 200.0;
    model_ = EsnModel::create(cfg, 1, 1, RandomSource(1));
    for (double period : kPeriods) {
      const Mat p = sinus(period, 1000);
      model_.load_pattern(p, p);
    }
    const Mat c = Mat::Constant(1, 1000, 0.5);
    model_.load_pattern(c, c);
    model_.train_readout();
  }
  static constexpr double kPeriods[4] = {8.83, 14.2, 5.7, 11.3};
  EsnModel model_;
};

TEST_F(Recall, FourSinusoidsAfterAllLoads) {
  for (int i = 0; i < 4; ++i) {
    const Mat truth = sinus(kPeriods[i], 1024).rightCols(24);
    EXPECT_LE(nrmse(model_.recall(i, 24), truth), 0.1) << "pattern " << i;
  }
}

TEST_F(Recall, ConstantPattern) {
  EXPECT_LE(relative_rmse(model_.recall(4, 24), Mat::Constant(1, 24, 0.5)), 0.05);
}

TEST_F(Recall, WrongConceptorIsWorse) {
  const Mat truth = sinus(kPeriods[0], 1024).rightCols(24);
  const double right = nrmse(model_.recall(0, 24), truth);
  for (int j = 1; j < 4; ++j) EXPECT_GT(nrmse(model_.recall(j, 24), truth), right);
}

TEST_F(Recall, StatesStayBoundedForLongRuns) {
  Mat states;
  model_.recall(1, 10000, &states);
  const double bound = std::sqrt(static_cast<double>(model_.reservoir_size()));
  for (Eigen::Index t = 0; t < states.cols(); ++t) ASSERT_LE(states.col(t).norm(), bound);
  EXPECT_TRUE(states.allFinite());
  EXPECT_THROW(model_.recall(5, 1), std::out_of_range);
}

TEST(RecallGuard, NeedsTrainedReadout) {
  auto m = EsnModel::create(small_config(20), 1, 1, RandomSource(3));
  m.load_pattern(sinus(5.0, 100), sinus(5.0, 100));
  EXPECT_THROW(m.recall(0, 5), std::logic_error);
}

// ---------------------------------------------------------------------------
// Serialisation

TEST(Serialisation, ExactRoundTrip) {
  auto m = EsnModel::create(small_config(30), 1, 1, RandomSource(12));
  m.load_pattern(sinus(6.0, 200), sinus(6.0, 200));
  m.train_readout();
  std::stringstream ss;
  m.save(ss);
  const auto back = EsnModel::load(ss);
  EXPECT_TRUE(back == m);
  EXPECT_EQ(back.recall(0, 50), m.recall(0, 50));
  EXPECT_DOUBLE_EQ(back.quota(), m.quota());
}

TEST(Serialisation, InferenceOnlyFile) {
  auto m = EsnModel::create(small_config(30), 1, 1, RandomSource(13));
  m.load_pattern(sinus(6.0, 200), sinus(6.0, 200));
  m.train_readout();
  std::stringstream full, slim;
  m.save(full);
  m.save(slim, false);
  EXPECT_LT(slim.str().size(), full.str().size());
  auto back = EsnModel::load(slim);
  EXPECT_EQ(back.predict(0, sinus(6.0, 40)), m.predict(0, sinus(6.0, 40)));
  EXPECT_DOUBLE_EQ(back.quota(), m.pattern(0).quota_after);
  EXPECT_THROW(back.load_pattern(sinus(6.0, 200), sinus(6.0, 200)), std::logic_error);
}

TEST(Serialisation, RejectsForeignAndTruncatedFiles) {
  std::stringstream junk("not a model");
  EXPECT_THROW(EsnModel::load(junk), Error);
  auto m = EsnModel::create(small_config(10), 1, 1, RandomSource(14));
  std::stringstream ss;
  m.save(ss);
  std::stringstream cut(ss.str().substr(0, ss.str().size() / 2));
  EXPECT_THROW(EsnModel::load(cut), Error);
}

// ---------------------------------------------------------------------------
// Error measure

TEST(Nrmse, Definition) {
  const Mat y = sinus(9.0, 90);
  EXPECT_EQ(nrmse(y, y), 0.0);
  EXPECT_NEAR(nrmse(Mat::Constant(1, 90, y.mean()), y), 1.0, 1e-12);
  EXPECT_THROW(nrmse(Mat::Ones(1, 5), Mat::Ones(1, 5)), std::invalid_argument);
  EXPECT_THROW(nrmse(Mat::Ones(1, 5), Mat::Ones(1, 4)), DimensionError);
}

TEST(Nrmse, NoiseOfTruthScaleGivesAboutOne) {
  const int n = 200000;
  const Mat y = random_matrix(1, n, 15);
  const double sd = std::sqrt((y.array() - y.mean()).square().mean());
  const Mat noisy = y + sd * random_matrix(1, n, 16);
  EXPECT_NEAR(nrmse(noisy, y), 1.0, 0.01);
}

// ---------------------------------------------------------------------------
// Task encodings

TEST(ContextEncoding, RangeAndDayType) {
  Context c;
  c.occupation = 3;
  c.age_group = 3;
  c.gender = 1;
  EXPECT_DOUBLE_EQ(demographic_code(c), 1.0);
  EXPECT_DOUBLE_EQ(demographic_code(Context{0, 0, 0, 0}), -1.0);
  const Vec x = encode_context(6.0, DayType::Weekend, c);
  EXPECT_NEAR(x(0), 1.0, 1e-15);
  EXPECT_NEAR(x(1), 0.0, 1e-15);
  EXPECT_EQ(x(2), -1.0);
  EXPECT_EQ(day_type(0), DayType::Weekday);
  EXPECT_EQ(day_type(5), DayType::Weekend);
  EXPECT_EQ(day_type(13), DayType::Weekend);
}

TEST(RequestPrediction, ValidDistributionForAnyContext) {
  auto m = EsnModel::create(small_config(40), 4, 25, RandomSource(17));
  EXPECT_EQ(m.output_dim(), 25);
  EXPECT_EQ(to_distribution(Vec::Constant(4, -1.0)), Vec::Constant(4, 0.25));
  std::mt19937_64 rng(18);
  std::vector<DaySample> days;
  for (int d = 0; d < 14; ++d) {
    DaySample s{day_type(d), Mat(4, 24), Mat::Zero(25, 24)};
    for (int h = 0; h < 24; ++h) {
      s.inputs.col(h) = encode_context(h, s.type, Context{});
      s.targets(static_cast<Eigen::Index>(rng() % 25), h) = 1.0;
    }
    days.push_back(s);
  }
  DayTypePredictor p(std::move(m));
  p.train(days);
  EXPECT_EQ(p.model().pattern_count(), 2);
  for (int h = 0; h < 24; ++h) {
    const Vec dist = predict_request_distribution(p, DayType::Weekend, days[5].inputs.leftCols(h + 1));
    EXPECT_NEAR(dist.sum(), 1.0, 1e-12);
    EXPECT_GE(dist.minCoeff(), 0.0);
  }
}

TEST(RequestPrediction, RecoversGeneratorDistribution) {
  const int n = 25, days = 400;
  EsnConfig cfg = small_config(100);
  cfg.training_length = days * 24;
  cfg.ridge = 1.0;
  std::mt19937_64 rng(19);
  std::vector<DaySample> samples;
  for (int d = 0; d < days; ++d) {
    DaySample s{DayType::Weekday, Mat(4, 24), Mat::Zero(n, 24)};
    for (int h = 0; h < 24; ++h) {
      s.inputs.col(h) = encode_context(h, DayType::Weekday, Context{});
      const Vec p = true_distribution(h, n);
      std::discrete_distribution<int> draw(p.data(), p.data() + n);
      s.targets(draw(rng), h) = 1.0;
    }
    samples.push_back(std::move(s));
  }
  DayTypePredictor pred(EsnModel::create(cfg, 4, n, RandomSource(20)));
  pred.train(samples);
  double tv = 0.0;
  for (int h = 0; h < 24; ++h) {
    const Vec dist = predict_request_distribution(pred, DayType::Weekday, samples[0].inputs.leftCols(h + 1));
    tv += 0.5 * (dist - true_distribution(h, n)).cwiseAbs().sum() / 24.0;
  }
  EXPECT_LE(tv, 0.1);
}

namespace {

// Hourly positions of a user repeating `day` for `days` days.
std::vector<DaySample> mobility_days(const std::vector<Point2>& day, int days, int horizon, double radius) {
  std::vector<DaySample> out;
  const int hours = static_cast<int>(day.size());
  for (int d = 0; d < days; ++d) {
    DaySample s{DayType::Weekday, Mat(6, hours), Mat(2 * horizon, hours)};
    for (int h = 0; h < hours; ++h) {
      s.inputs.col(h) = encode_mobility(encode_context(h, DayType::Weekday, Context{}), day[h], radius);
      std::vector<Point2> future;
      for (int k = 1; k <= horizon; ++k) future.push_back(day[(h + k) % hours]);
      s.targets.col(h) = encode_future(future, radius);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST(LocationPrediction, StationaryUser) {
  const double radius = 500.0;
  const std::vector<Point2> day(24, Point2{100.0, 50.0});
  auto samples = mobility_days(day, 20, 12, radius);
  EsnConfig cfg = small_config(100);
  DayTypePredictor p(EsnModel::create(cfg, 6, 24, RandomSource(21)));
  p.train(samples);
  for (int h = 0; h < 24; ++h) {
    for (const auto& q : predict_locations(p, DayType::Weekday, samples[3].inputs.leftCols(h + 1), radius)) {
      EXPECT_LE(horizontal_distance(q, day[0]), 5.0);
    }
  }
}

TEST(LocationPrediction, TwoWaypointCommuter) {
  const double radius = 500.0;
  const Point2 home{-200.0, 0.0}, work{200.0, 100.0};
  // Collected hourly; the user travels at constant speed between collections.
  std::vector<Point2> day(24);
  for (int h = 0; h < 24; ++h) day[h] = h >= 9 && h <= 17 ? work : home;
  auto samples = mobility_days(day, 20, 12, radius);
  EsnConfig cfg = small_config(200);
  DayTypePredictor p(EsnModel::create(cfg, 6, 24, RandomSource(22)));
  p.train(samples);
  double err = 0.0;
  int count = 0;
  for (int h = 0; h < 24; ++h) {
    const auto pred = predict_locations(p, DayType::Weekday, samples[5].inputs.leftCols(h + 1), radius);
    for (int k = 0; k < 12; ++k) {
      EXPECT_LE(std::hypot(pred[k].x, pred[k].y), radius + 1e-9);
      err += horizontal_distance(pred[k], day[(h + k + 1) % 24]);
      ++count;
    }
  }
  EXPECT_LE(err / count, 0.1 * radius);
}

TEST(LocationPrediction, ClampsToAreaDisk) {
  const Point2 p = clamp_to_disk({600.0, 800.0}, 500.0);
  EXPECT_NEAR(p.x, 300.0, 1e-12);
  EXPECT_NEAR(p.y, 400.0, 1e-12);
  EXPECT_EQ(clamp_to_disk({1.0, 2.0}, 500.0), (Point2{1.0, 2.0}));
}

TEST(DayTypePredictor, FallsBackToTheOtherDayTypeAndRoundTrips) {
  auto samples = mobility_days(std::vector<Point2>(24, Point2{10.0, 10.0}), 6, 12, 500.0);
  DayTypePredictor p(EsnModel::create(small_config(30), 6, 24, RandomSource(23)));
  EXPECT_THROW(p.pattern_for(DayType::Weekday), std::logic_error);
  p.train(samples);
  EXPECT_EQ(p.pattern_for(DayType::Weekend), p.pattern_for(DayType::Weekday));
  std::stringstream ss;
  p.save(ss, false);
  const auto back = DayTypePredictor::load(ss);
  EXPECT_EQ(back.run(DayType::Weekend, samples[0].inputs), p.run(DayType::Weekend, samples[0].inputs));
}

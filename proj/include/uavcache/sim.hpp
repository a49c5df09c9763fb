// Synthetic world (users, mobility, requests), predictors and the
// slot-by-slot pipeline: predict, associate, cache, place, deliver, score.
//
// Time model: slot g starts at hour g / H, day 0 is a Monday. Training days
// come first; simulation period p starts at hour
// train_days * 24 + start_hour + p * T / H. Users hold one position per slot,
// moving linearly between hourly location samples.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "uavcache/cesn.hpp"
#include "uavcache/channel.hpp"
#include "uavcache/error.hpp"
#include "uavcache/placement.hpp"
#include "uavcache/qoe.hpp"
#include "uavcache/scenario.hpp"

namespace uavcache {

// ---------------------------------------------------------------------------
// Utilities

/// Runs f(0..n-1) on up to `threads` workers (0 means one per core). Callers
/// write results by index, so the outcome does not depend on scheduling.
template <typename F>
void parallel_for(int n, int threads, F&& f) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Standard normal at a counter position (Box-Muller on two uniforms).
inline double normal_at(const RandomSource& rs, std::uint64_t index) {
  const double u1 = rs.uniform(2 * index);
  const double u2 = rs.uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Version of every CSV and JSON layout written by this library.
inline constexpr int kOutputSchema = 1;

/// Nine significant digits, the precision of every float in the outputs.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline Point2 lerp(const Point2& a, const Point2& b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

// ---------------------------------------------------------------------------
// Time model

inline int train_days(const ScenarioConfig& c) { return 7 * c.generators.train_weeks; }

inline long period_start_slot(const ScenarioConfig& c, int period) {
  return (static_cast<long>(train_days(c)) * 24 + c.sim.start_hour) * c.slots_per_collection +
         static_cast<long>(period) * c.slots_per_cache_period;
}

inline double slot_hour(long slot, const ScenarioConfig& c) {
  return static_cast<double>(slot) / c.slots_per_collection;
}

inline int day_of_hour(double hour) { return static_cast<int>(std::floor(hour / 24.0)); }

inline DayType slot_day_type(long slot, const ScenarioConfig& c) { return day_type(day_of_hour(slot_hour(slot, c))); }

// ---------------------------------------------------------------------------
// World

struct SimUser {
  Context context;
  double screen_factor = 1.0;
  Point2 home, work, leisure;
  int taste = 0;
};

struct World {
  RandomSource rs{0};
  std::vector<SimUser> users;
  std::vector<Point2> hotspots;
  std::vector<RrhCluster> clusters;
  std::vector<int> work_rank;                // rank of each content in the work profile
  std::vector<std::vector<int>> taste_rank;  // rank of each content per taste group
};

/// RRH clusters evenly spaced on a ring at 0.55 r, antennas on 50 m circles.
inline std::vector<RrhCluster> rrh_layout(const ScenarioConfig& c) {
  std::vector<RrhCluster> out(static_cast<std::size_t>(c.num_rrh_clusters));
  for (int q = 0; q < c.num_rrh_clusters; ++q) {
    const int count = c.num_rrhs / c.num_rrh_clusters + (q < c.num_rrhs % c.num_rrh_clusters ? 1 : 0);
    const double a = 2.0 * std::numbers::pi * (q + 0.5) / c.num_rrh_clusters;
    const Point2 centre{0.55 * c.area_radius_m * std::cos(a), 0.55 * c.area_radius_m * std::sin(a)};
    auto& k = out[static_cast<std::size_t>(q)];
    k.id = q;
    for (int r = 0; r < count; ++r) {
      const double b = 2.0 * std::numbers::pi * r / count;
      k.rrhs.push_back({centre.x + 50.0 * std::cos(b), centre.y + 50.0 * std::sin(b)});
    }
  }
  return out;
}

namespace detail {
inline int draw_index(const std::vector<double>& weights, double u) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] / total;
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

inline Point2 uniform_in_disk(const RandomSource& rs, std::uint64_t index, double radius) {
  const double r = radius * std::sqrt(rs.uniform(index));
  const double a = 2.0 * std::numbers::pi * rs.uniform(index + 1);
  return {r * std::cos(a), r * std::sin(a)};
}

inline std::vector<int> ranking(const RandomSource& rs, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto eng = rs.engine();
  std::shuffle(order.begin(), order.end(), eng);
  std::vector<int> rank(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
  return rank;
}
}  // namespace detail

/// Users, hotspots and content rankings; user i depends only on (seed, i).
inline World make_world(const ScenarioConfig& c) {
  const auto& g = c.generators;
  World w;
  w.rs = RandomSource(c.seed).derive("world");
  w.clusters = rrh_layout(c);
  const auto hs = w.rs.derive("hotspots");
  for (int h = 0; h < g.num_hotspots; ++h) w.hotspots.push_back(detail::uniform_in_disk(hs, 2 * h, 0.8 * c.area_radius_m));
  w.work_rank = detail::ranking(w.rs.derive("work-content"), c.num_contents);
  for (int t = 0; t < g.num_taste_groups; ++t) w.taste_rank.push_back(detail::ranking(w.rs.derive("taste", t), c.num_contents));

  auto near_hotspot = [&](const RandomSource& rs, std::uint64_t i) {
    const auto h = static_cast<std::size_t>(std::min<double>(rs.uniform(i) * g.num_hotspots, g.num_hotspots - 1));
    Point2 p{w.hotspots[h].x + g.hotspot_spread_m * normal_at(rs, i + 1),
             w.hotspots[h].y + g.hotspot_spread_m * normal_at(rs, i + 2)};
    return clamp_to_disk(p, c.area_radius_m);
  };
  for (int i = 0; i < c.num_users; ++i) {
    const auto rs = w.rs.derive("user", static_cast<std::uint64_t>(i));
    SimUser u;
    u.context.gender = rs.uniform(0) < g.female_fraction ? 1 : 0;
    u.context.occupation = detail::draw_index(g.occupation_weights, rs.uniform(1));
    u.context.age_group = u.context.occupation == 3 ? 3 : std::min(2, static_cast<int>(rs.uniform(2) * 3));
    u.context.device_type = detail::draw_index(g.device_weights, rs.uniform(3));
    u.screen_factor = c.device_rate.screen_factors.at(static_cast<std::size_t>(u.context.device_type));
    u.home = detail::uniform_in_disk(rs, 4, 0.9 * c.area_radius_m);
    u.work = near_hotspot(rs, 10);
    u.leisure = near_hotspot(rs, 20);
    u.taste = std::min(g.num_taste_groups - 1, static_cast<int>(rs.uniform(6) * g.num_taste_groups));
    w.users.push_back(u);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Mobility

/// Scheduled location of a user at an hour of a given day.
inline Point2 anchor(const SimUser& u, int day, int hour_of_day) {
  const int h = hour_of_day;
  if (day_type(day) == DayType::Weekend) return h >= 13 && h <= 17 ? u.leisure : u.home;
  switch (u.context.occupation) {
    case 0:
    case 1: return h >= 9 && h <= 17 ? u.work : u.home;
    case 2: return h >= 11 && h <= 19 ? u.work : u.home;
    default: return h >= 10 && h <= 12 ? u.leisure : u.home;
  }
}

/// Hourly location sample: the scheduled anchor plus Gaussian noise.
inline Point2 location_sample(const World& w, const ScenarioConfig& c, int user, long hour) {
  const auto& u = w.users.at(static_cast<std::size_t>(user));
  const int day = static_cast<int>(hour / 24);
  Point2 p = anchor(u, day, static_cast<int>(hour % 24));
  const double s = c.generators.position_noise_m;
  if (s > 0.0) {
    const auto rs = w.rs.derive("mobility", static_cast<std::uint64_t>(user));
    p.x += s * normal_at(rs, 2 * static_cast<std::uint64_t>(hour));
    p.y += s * normal_at(rs, 2 * static_cast<std::uint64_t>(hour) + 1);
  }
  return clamp_to_disk(p, c.area_radius_m);
}

/// Position at a fractional hour, moving at constant speed between samples.
inline Point2 position_at(const World& w, const ScenarioConfig& c, int user, double hour) {
  const long h0 = static_cast<long>(std::floor(hour));
  const double f = hour - static_cast<double>(h0);
  const Point2 a = location_sample(w, c, user, h0);
  if (f == 0.0) return a;
  return lerp(a, location_sample(w, c, user, h0 + 1), f);
}

inline Point2 slot_position(const World& w, const ScenarioConfig& c, int user, long slot) {
  return position_at(w, c, user, slot_hour(slot, c));
}

/// Hourly samples for every user over [first_hour, first_hour + hours].
inline std::vector<std::vector<Point2>> gen_mobility(const World& w, const ScenarioConfig& c, long first_hour,
                                                     int hours) {
  std::vector<std::vector<Point2>> out(w.users.size());
  for (std::size_t i = 0; i < w.users.size(); ++i) {
    for (long h = first_hour; h <= first_hour + hours; ++h) out[i].push_back(location_sample(w, c, static_cast<int>(i), h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Requests

inline Vec zipf(const std::vector<int>& rank, double exponent) {
  Vec p(static_cast<Eigen::Index>(rank.size()));
  for (std::size_t n = 0; n < rank.size(); ++n) p(static_cast<Eigen::Index>(n)) = std::pow(rank[n] + 1.0, -exponent);
  return p / p.sum();
}

/// Weight of the work profile: high in working hours for office workers and
/// students on weekdays, low otherwise.
inline double work_weight(const Context& ctx, DayType day, int hour_of_day, const GeneratorConfig& g) {
  const bool working = ctx.occupation <= 1 && day == DayType::Weekday &&
                       ((hour_of_day >= 9 && hour_of_day <= 11) || (hour_of_day >= 14 && hour_of_day <= 18));
  return working ? g.work_weight_peak : g.work_weight_offpeak;
}

/// True request distribution of a user in a slot.
inline Vec request_distribution(const World& w, const ScenarioConfig& c, int user, long slot) {
  const auto& u = w.users.at(static_cast<std::size_t>(user));
  const double hour = slot_hour(slot, c);
  const int hod = static_cast<int>(std::floor(hour)) % 24;
  const double a = work_weight(u.context, day_type(day_of_hour(hour)), hod, c.generators);
  return a * zipf(w.work_rank, c.generators.zipf_exponent) +
         (1.0 - a) * zipf(w.taste_rank.at(static_cast<std::size_t>(u.taste)), c.generators.zipf_exponent);
}

/// Inverse-CDF draw; mass-free contents are never returned.
inline int sample_request(const Vec& p, double u) {
  const double total = p.sum();
  double acc = 0.0;
  int last = -1;
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    if (!(p(n) > 0.0)) continue;
    last = static_cast<int>(n);
    acc += p(n) / total;
    if (u < acc) return last;
  }
  return last;
}

/// Content requested by a user in a slot, or -1 when the user stays idle.
inline int request_at(const World& w, const ScenarioConfig& c, int user, long slot) {
  const auto rs = w.rs.derive("requests", static_cast<std::uint64_t>(user));
  const auto g = static_cast<std::uint64_t>(slot);
  if (!(rs.uniform(2 * g) < c.generators.request_probability)) return -1;
  return sample_request(request_distribution(w, c, user, slot), rs.uniform(2 * g + 1));
}

struct RequestTrace {
  std::vector<std::vector<int>> content;  // [user][slot], -1 for none
  std::vector<std::vector<Vec>> truth;    // [user][slot] true distribution
};

inline RequestTrace gen_requests(const World& w, const ScenarioConfig& c, long first_slot, int slots) {
  RequestTrace t;
  t.content.resize(w.users.size());
  t.truth.resize(w.users.size());
  for (std::size_t i = 0; i < w.users.size(); ++i) {
    for (long g = first_slot; g < first_slot + slots; ++g) {
      t.content[i].push_back(request_at(w, c, static_cast<int>(i), g));
      t.truth[i].push_back(request_distribution(w, c, static_cast<int>(i), g));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Predictors

struct UserModels {
  DayTypePredictor content;
  DayTypePredictor mobility;
};

inline Vec mobility_input(const World& w, const ScenarioConfig& c, int user, long hour) {
  const auto& ctx = w.users[static_cast<std::size_t>(user)].context;
  return encode_mobility(encode_context(static_cast<double>(hour % 24), day_type(static_cast<int>(hour / 24)), ctx),
                         location_sample(w, c, user, hour), c.area_radius_m);
}

inline Vec content_input(const World& w, const ScenarioConfig& c, int user, long slot) {
  const double hour = slot_hour(slot, c);
  return encode_context(std::fmod(hour, 24.0), day_type(day_of_hour(hour)), w.users[static_cast<std::size_t>(user)].context);
}

struct TrainingRecord {
  int user = 0;
  std::string task;
  DayType type = DayType::Weekday;
  int samples = 0;
  double quota_before = 1.0;
  double quota_after = 1.0;
  double nrmse = 0.0;  // fit on the loaded training window
};

namespace detail {
inline void training_records(const DayTypePredictor& p, const std::vector<DaySample>& days, int user, const char* task,
                             std::vector<TrainingRecord>& out) {
  const auto& m = p.model();
  const auto& cfg = m.config();
  for (DayType type : {DayType::Weekday, DayType::Weekend}) {
    Eigen::Index cols = 0;
    for (const auto& d : days) cols += d.type == type ? d.inputs.cols() : 0;
    if (cols == 0) continue;
    Mat in(m.input_dim(), cols), out_t(m.output_dim(), cols);
    Eigen::Index at = 0;
    for (const auto& d : days) {
      if (d.type != type) continue;
      in.middleCols(at, d.inputs.cols()) = d.inputs;
      out_t.middleCols(at, d.targets.cols()) = d.targets;
      at += d.inputs.cols();
    }
    const Eigen::Index len = std::min<Eigen::Index>(cols, cfg.training_length);
    const int idx = p.pattern_for(type);
    const Mat y = m.predict(idx, in.leftCols(len), Vec(Vec::Zero(m.reservoir_size())));
    const Eigen::Index n = len - cfg.washout;
    TrainingRecord r;
    r.user = user;
    r.task = task;
    r.type = type;
    r.samples = m.pattern(idx).samples;
    r.quota_before = m.pattern(idx).quota_before;
    r.quota_after = m.pattern(idx).quota_after;
    r.nrmse = nrmse(Mat(y.rightCols(n)), Mat(out_t.leftCols(len).rightCols(n)));
    out.push_back(r);
  }
}
}  // namespace detail

/// Trains the content and mobility predictors of one user on the training
/// weeks. `reservoir` is shared by every model; input weights are per user.
inline UserModels train_user(const World& w, const ScenarioConfig& c, int user, const Mat& reservoir,
                             std::vector<TrainingRecord>* report = nullptr) {
  const auto rs = RandomSource(c.seed).derive("esn").derive("user", static_cast<std::uint64_t>(user));
  const int hs = c.slots_per_collection;
  const int ns = c.esn.forecast_horizon;
  std::vector<DaySample> content_days, mobility_days;
  for (int d = 0; d < train_days(c); ++d) {
    DaySample cd{day_type(d), Mat(c.esn.context_dim, 24 * hs), Mat::Zero(c.num_contents, 24 * hs)};
    for (int s = 0; s < 24 * hs; ++s) {
      const long g = static_cast<long>(d) * 24 * hs + s;
      cd.inputs.col(s) = content_input(w, c, user, g);
      const int n = request_at(w, c, user, g);
      if (n >= 0) cd.targets(n, s) = 1.0;
    }
    content_days.push_back(std::move(cd));
    DaySample md{day_type(d), Mat(c.esn.context_dim + 2, 24), Mat(2 * ns, 24)};
    for (int h = 0; h < 24; ++h) {
      const long hour = static_cast<long>(d) * 24 + h;
      md.inputs.col(h) = mobility_input(w, c, user, hour);
      std::vector<Point2> future;
      for (int k = 1; k <= ns; ++k) future.push_back(location_sample(w, c, user, hour + k));
      md.targets.col(h) = encode_future(future, c.area_radius_m);
    }
    mobility_days.push_back(std::move(md));
  }
  UserModels m{
      DayTypePredictor(EsnModel::create_with_reservoir(c.esn, c.esn.context_dim, c.num_contents, reservoir,
                                                       rs.derive("content"))),
      DayTypePredictor(EsnModel::create_with_reservoir(c.esn, c.esn.context_dim + 2, 2 * ns, reservoir,
                                                       rs.derive("mobility")))};
  m.content.train(content_days);
  m.mobility.train(mobility_days);
  if (report) {
    detail::training_records(m.content, content_days, user, "content", *report);
    detail::training_records(m.mobility, mobility_days, user, "mobility", *report);
  }
  return m;
}

inline Mat shared_reservoir(const ScenarioConfig& c, bool allow_unstable = false) {
  return random_reservoir(c.esn.reservoir_size, c.esn.density, c.esn.spectral_radius,
                          RandomSource(c.seed).derive("esn").derive("reservoir"), allow_unstable);
}

inline std::vector<UserModels> train_models(const World& w, const ScenarioConfig& c, int threads,
                                            std::vector<TrainingRecord>* report = nullptr) {
  const Mat reservoir = shared_reservoir(c);
  const int nu = static_cast<int>(w.users.size());
  std::vector<UserModels> out(static_cast<std::size_t>(nu));
  std::vector<std::vector<TrainingRecord>> rows(static_cast<std::size_t>(nu));
  parallel_for(nu, threads, [&](int i) {
    out[static_cast<std::size_t>(i)] = train_user(w, c, i, reservoir, report ? &rows[static_cast<std::size_t>(i)] : nullptr);
  });
  if (report)
    for (auto& r : rows) report->insert(report->end(), r.begin(), r.end());
  return out;
}

inline std::string model_file(const std::filesystem::path& dir, int user, const char* task) {
  char name[64];
  std::snprintf(name, sizeof name, "user%04d_%s.bin", user, task);
  return (dir / name).string();
}

inline constexpr const char* kModelIndex = "models.json";

/// What a model directory was trained for. Models only make sense for the
/// synthetic users of the seed they were trained on.
inline nlohmann::ordered_json model_index(const ScenarioConfig& c) {
  return {{"schema_version", kOutputSchema},
          {"seed", c.seed},
          {"users", c.num_users},
          {"contents", c.num_contents},
          {"reservoir_size", c.esn.reservoir_size},
          {"context_dim", c.esn.context_dim},
          {"forecast_horizon", c.esn.forecast_horizon}};
}

/// Inference-only model files, two per user, plus the index.
inline void save_models(const std::filesystem::path& dir, const std::vector<UserModels>& models,
                        const ScenarioConfig& c) {
  if (static_cast<int>(models.size()) != c.num_users) throw DimensionError("save_models: one model pair per user");
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (const char* task : {"content", "mobility"}) {
      std::ofstream os(model_file(dir, static_cast<int>(i), task), std::ios::binary);
      if (!os) throw Error("cannot write " + model_file(dir, static_cast<int>(i), task));
      (std::string(task) == "content" ? models[i].content : models[i].mobility).save(os, false);
      if (!os) throw Error("write failed: " + model_file(dir, static_cast<int>(i), task));
    }
  }
  std::ofstream os(dir / kModelIndex);
  os << model_index(c).dump(2) << "\n";
  if (!os) throw Error("write failed: " + (dir / kModelIndex).string());
}

/// Loads the models of every configured user and checks that the directory
/// was trained for this seed, user count and model shape.
inline std::vector<UserModels> load_models(const std::filesystem::path& dir, const ScenarioConfig& c) {
  std::ifstream idx(dir / kModelIndex);
  if (!idx) throw DimensionError("no " + std::string(kModelIndex) + " in " + dir.string());
  nlohmann::ordered_json found;
  try {
    found = nlohmann::ordered_json::parse(idx);
  } catch (const nlohmann::json::parse_error& e) {
    throw DimensionError(std::string(kModelIndex) + ": " + e.what());
  }
  const auto want = model_index(c);
  for (const auto& [key, value] : want.items()) {
    if (!found.contains(key) || found[key] != value) {
      throw DimensionError(std::string(kModelIndex) + ": " + key + " is " +
                           (found.contains(key) ? found[key].dump() : std::string("missing")) + ", configuration needs " +
                           value.dump());
    }
  }
  std::vector<UserModels> out;
  for (int i = 0; i < c.num_users; ++i) {
    UserModels m;
    for (const char* task : {"content", "mobility"}) {
      std::ifstream is(model_file(dir, i, task), std::ios::binary);
      if (!is) throw DimensionError("missing model " + model_file(dir, i, task));
      (std::string(task) == "content" ? m.content : m.mobility) = DayTypePredictor::load(is);
    }
    if (m.content.model().input_dim() != c.esn.context_dim || m.content.model().output_dim() != c.num_contents ||
        m.mobility.model().input_dim() != c.esn.context_dim + 2 ||
        m.mobility.model().output_dim() != 2 * c.esn.forecast_horizon ||
        m.content.model().reservoir_size() != c.esn.reservoir_size) {
      throw DimensionError("model for user " + std::to_string(i) + " does not match the configuration");
    }
    out.push_back(std::move(m));
  }
  return out;
}

/// What the BBU believes about one period.
struct PeriodForecast {
  std::vector<std::vector<Point2>> plan_position;  // [slot][user], from data before the period
  std::vector<std::vector<Point2>> slot_position;  // [slot][user], from data before each slot
  std::vector<std::vector<Vec>> demand;            // [slot][user] request distribution
};

inline PeriodForecast oracle_forecast(const World& w, const ScenarioConfig& c, long first_slot) {
  const int ts = c.slots_per_cache_period;
  const int nu = static_cast<int>(w.users.size());
  PeriodForecast f;
  f.plan_position.assign(static_cast<std::size_t>(ts), std::vector<Point2>(static_cast<std::size_t>(nu)));
  f.demand.assign(static_cast<std::size_t>(ts), std::vector<Vec>(static_cast<std::size_t>(nu)));
  for (int s = 0; s < ts; ++s) {
    for (int i = 0; i < nu; ++i) {
      f.plan_position[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] = slot_position(w, c, i, first_slot + s);
      f.demand[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] = request_distribution(w, c, i, first_slot + s);
    }
  }
  f.slot_position = f.plan_position;
  return f;
}

/// Predictor forecasts. A forecast made at hour h knows the samples up to h;
/// its j-th output is the position at h + j, and positions beyond the horizon
/// hold the last forecast. Content forecasts are driven by the slot contexts
/// after a one-day warm-up.
inline PeriodForecast esn_forecast(const World& w, const ScenarioConfig& c, const std::vector<UserModels>& models,
                                   long first_slot, int threads) {
  const int ts = c.slots_per_cache_period;
  const int hs = c.slots_per_collection;
  const int nu = static_cast<int>(w.users.size());
  if (static_cast<int>(models.size()) != nu) throw DimensionError("esn_forecast: one model pair per user required");
  const long h0 = first_slot / hs;
  const long first_hour = h0 - 24;
  const long last_hour = h0 + ts / hs;
  const int ns = c.esn.forecast_horizon;

  PeriodForecast f;
  f.plan_position.assign(static_cast<std::size_t>(ts), std::vector<Point2>(static_cast<std::size_t>(nu)));
  f.slot_position = f.plan_position;
  f.demand.assign(static_cast<std::size_t>(ts), std::vector<Vec>(static_cast<std::size_t>(nu)));

  parallel_for(nu, threads, [&](int i) {
    const auto ui = static_cast<std::size_t>(i);
    // Mobility: one driven run per day type over the observed hours.
    const int nh = static_cast<int>(last_hour - first_hour + 1);
    Mat in(c.esn.context_dim + 2, nh);
    for (int k = 0; k < nh; ++k) in.col(k) = mobility_input(w, c, i, first_hour + k);
    const Mat by_type[2] = {models[ui].mobility.run(DayType::Weekday, in), models[ui].mobility.run(DayType::Weekend, in)};
    auto forecast_from = [&](long h_obs, double t) {
      const auto col = static_cast<Eigen::Index>(h_obs - first_hour);
      const Vec y = by_type[static_cast<int>(day_type(static_cast<int>(h_obs / 24)))].col(col);
      auto at = [&](int j) {
        if (j == 0) return location_sample(w, c, i, h_obs);
        j = std::min(j, ns);
        return clamp_to_disk({y(2 * (j - 1)) * c.area_radius_m, y(2 * (j - 1) + 1) * c.area_radius_m}, c.area_radius_m);
      };
      const double k = t - static_cast<double>(h_obs);
      const int lo = static_cast<int>(std::floor(k));
      const double frac = k - lo;
      return frac == 0.0 ? at(lo) : lerp(at(lo), at(lo + 1), frac);
    };
    for (int s = 0; s < ts; ++s) {
      const double t = slot_hour(first_slot + s, c);
      f.plan_position[static_cast<std::size_t>(s)][ui] = forecast_from(h0 - 1, t);
      f.slot_position[static_cast<std::size_t>(s)][ui] = forecast_from(static_cast<long>(std::ceil(t)) - 1, t);
    }
    // Content: one driven run per day type from a day before the period.
    const long warm = 24L * hs;
    Mat cin(c.esn.context_dim, warm + ts);
    for (long k = 0; k < warm + ts; ++k) cin.col(k) = content_input(w, c, i, first_slot - warm + k);
    const Mat cy[2] = {models[ui].content.run(DayType::Weekday, cin), models[ui].content.run(DayType::Weekend, cin)};
    for (int s = 0; s < ts; ++s) {
      const int type = static_cast<int>(slot_day_type(first_slot + s, c));
      f.demand[static_cast<std::size_t>(s)][ui] = to_distribution(cy[type].col(warm + s));
    }
  });
  return f;
}

// ---------------------------------------------------------------------------
// Pipeline

enum class Variant { Proposed, NoUav, NoCache, RandomCache, FixedPlacement };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Proposed: return "proposed";
    case Variant::NoUav: return "no_uav";
    case Variant::NoCache: return "no_cache";
    case Variant::RandomCache: return "random_cache";
    case Variant::FixedPlacement: return "fixed_placement";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::Proposed, Variant::NoUav, Variant::NoCache, Variant::RandomCache, Variant::FixedPlacement}) {
    if (s == variant_name(v)) return v;
  }
  throw std::invalid_argument("unknown baseline '" + s + "'");
}

struct RunOptions {
  Variant variant = Variant::Proposed;
  const std::vector<UserModels>* models = nullptr;  // null: oracle predictions
  int threads = 1;
};

struct UavSlot {
  int id = 0;
  Point3 position;
  std::vector<int> cache;
  int users = 0;
  int cache_hits = 0;
  int fetches = 0;
  double power_w = 0.0;
  double fronthaul_bits = 0.0;  // per slot, before sharing
};

struct SlotLog {
  int period = 0;
  long slot = 0;
  std::vector<QoeReport> reports;  // one per requesting user, by user id
  std::vector<UavSlot> uavs;
  int rrh_served = 0;              // N_FR
  double uav_power_w = 0.0;
  int requests = 0, delivered = 0, satisfied = 0, cache_hits = 0, uav_deliveries = 0, infeasible = 0;
};

struct Summary {
  std::string variant;
  std::string mode;
  std::uint64_t seed = 0;
  int users = 0, uavs = 0, cache_size = 0, periods = 0, slots = 0;
  long requests = 0, delivered = 0, satisfied = 0, rrh_deliveries = 0, fronthaul_deliveries = 0, cache_hits = 0,
       unserved = 0, power_infeasible = 0;
  double satisfied_fraction = 0.0;
  double cache_hit_rate = 0.0;
  double total_uav_power_w = 0.0;
  double avg_uav_power_w = 0.0;
  double avg_altitude_m = 0.0;
  double mean_qoe = 0.0;
  double mean_rrh_served = 0.0;
  double position_error_m = 0.0;    // predictor vs truth; 0 in oracle mode
  double demand_tv = 0.0;           // predictor vs true distribution; 0 in oracle mode
  double min_delay_margin_s = 0.0;  // smallest delivered delay minus the lower bound
};

struct RunResult {
  std::vector<SlotLog> slots;
  Summary summary;
};

namespace detail {

struct CachePlan {
  std::vector<std::vector<int>> caches;
  std::vector<Point2> first_centroids;
};

/// Cache contents per UAV from the period forecast: every forecast slot is
/// associated and clustered, and each user-slot adds p * (P_uncached - P_cached)
/// with the UAV at its cluster centroid at h_min and the fronthaul split over
/// the cluster.
inline CachePlan plan_caches(const World& w, const ScenarioConfig& c, const PeriodForecast& f, int k,
                             const std::vector<Point2>* warm, const RandomSource& rs, double bound) {
  const int nu = static_cast<int>(w.users.size());
  std::vector<std::vector<ContentDemand>> demands(static_cast<std::size_t>(k));
  CachePlan plan;
  std::vector<Point2> centroids;
  if (warm) centroids = *warm;
  for (std::size_t s = 0; s < f.plan_position.size(); ++s) {
    const auto& pos = f.plan_position[s];
    std::vector<double> dev(static_cast<std::size_t>(nu));
    for (int i = 0; i < nu; ++i) {
      double e = 0.0;
      for (int n = 0; n < c.num_contents; ++n) e += f.demand[s][static_cast<std::size_t>(i)](n) * c.content_rate_bps(n);
      dev[static_cast<std::size_t>(i)] = w.users[static_cast<std::size_t>(i)].screen_factor * e;
    }
    const auto rrh = associate_rrh(pos, dev, w.clusters, c, true, bound);
    std::vector<Point2> pool;
    for (int u : rrh.uav_pool) pool.push_back(pos[static_cast<std::size_t>(u)]);
    const auto cl = cluster_users(pool, k, rs, centroids.empty() ? nullptr : &centroids, c.placement.kmeans_max_iterations);
    centroids = cl.centroids;
    if (s == 0) plan.first_centroids = centroids;
    std::vector<int> size(static_cast<std::size_t>(k), 0);
    for (int l : cl.label) ++size[static_cast<std::size_t>(l)];
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const int kk = cl.label[j];
      const auto& ce = centroids[static_cast<std::size_t>(kk)];
      const Point3 at{ce.x, ce.y, c.min_altitude_m};
      const int uk = size[static_cast<std::size_t>(kk)];
      const double share = g2a_fronthaul_rate(at, c.sim.bbu, c) / uk;
      const int u = rrh.uav_pool[j];
      std::vector<double> devs(static_cast<std::size_t>(c.num_contents));
      for (int n = 0; n < c.num_contents; ++n)
        devs[static_cast<std::size_t>(n)] = device_requirement(c, w.users[static_cast<std::size_t>(u)].screen_factor, n);
      demands[static_cast<std::size_t>(kk)].push_back(content_demand(
          f.demand[s][static_cast<std::size_t>(u)], devs, uav_user_pathloss(at, pos[static_cast<std::size_t>(u)], c.channel),
          uk, share, c, bound));
    }
  }
  for (int kk = 0; kk < k; ++kk)
    plan.caches.push_back(select_cache(cache_scores(demands[static_cast<std::size_t>(kk)], c.num_contents), c.cache_size));
  if (plan.first_centroids.empty()) plan.first_centroids.assign(static_cast<std::size_t>(k), Point2{});
  return plan;
}

inline std::vector<int> random_cache(const ScenarioConfig& c, const RandomSource& rs) {
  std::vector<int> all(static_cast<std::size_t>(c.num_contents));
  std::iota(all.begin(), all.end(), 0);
  auto eng = rs.engine();
  std::shuffle(all.begin(), all.end(), eng);
  all.resize(static_cast<std::size_t>(c.cache_size));
  std::sort(all.begin(), all.end());
  return all;
}

/// Per-interval access rates of a UAV user, with optional shadowing draws.
inline std::vector<double> uav_rates(const Point3& uav, const Point2& user, double power_w, int uk,
                                     const ScenarioConfig& c, std::optional<RandomSource> fading) {
  const int f = c.intervals_per_slot;
  std::vector<double> r(static_cast<std::size_t>(f));
  if (!fading) {
    const double pl = uav_user_pathloss(uav, user, c.channel);
    const double v = c.uav_bandwidth_hz / uk * std::log2(1.0 + uav_user_snr(power_w, pl, c.noise_power_w));
    std::fill(r.begin(), r.end(), v);
    return r;
  }
  auto eng = fading->engine();
  for (int t = 0; t < f; ++t) {
    const double pl = uav_user_pathloss(uav, user, c.channel, FadingDraw::sample(c.channel, eng));
    r[static_cast<std::size_t>(t)] = c.uav_bandwidth_hz / uk * std::log2(1.0 + uav_user_snr(power_w, pl, c.noise_power_w));
  }
  return r;
}

/// Scores one delivery given its path; rates are per interval in bits per second.
inline QoeReport score(QoeReport r, const DeliveryPath& path, const std::vector<double>& rates, double device_bps,
                       const ScenarioConfig& c, double bound) {
  r.link = path.link;
  r.intervals = static_cast<int>(rates.size());
  for (double v : rates) r.device_score_sum += device_score(v, device_bps);
  const bool usable = path.access_bits > 0.0 && (path.link == Link::UavCache || path.fronthaul_bits > 0.0);
  r.delay_s = usable ? delay(path, c.content_size_bits, c.slot_duration_s) : kInfinity;
  r.delivered = r.delay_s <= c.slot_duration_s;
  r.delay_score = r.delivered ? delay_score(r.delay_s, c, bound) : 0.0;
  const auto q = qoe_score(r.delay_score, r.delivered ? r.device_score_sum : 0, r.intervals, c.qoe);
  r.qoe = q.qoe;
  r.mos = q.label;
  r.satisfied = r.delivered && r.qoe >= c.qoe.satisfied_threshold;
  return r;
}

inline double mean_bits(const std::vector<double>& rates, double slot_s) {
  double s = 0.0;
  for (double v : rates) s += v;
  return rates.empty() ? 0.0 : s / static_cast<double>(rates.size()) * slot_s;
}

}  // namespace detail

/// Checks the per-slot invariants; throws InvariantError with the first breach.
inline void check_slot(const SlotLog& log, const std::vector<int>& requesters, const std::vector<RrhCluster>& clusters,
                       const std::vector<std::vector<int>>& rrh_sets, const ScenarioConfig& c, double bound) {
  auto fail = [&](const std::string& what) {
    throw InvariantError("slot " + std::to_string(log.slot) + ": " + what);
  };
  if (log.reports.size() != requesters.size()) fail("every request needs exactly one outcome");
  int by_link[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < log.reports.size(); ++j) {
    const auto& r = log.reports[j];
    if (r.user != requesters[j]) fail("outcome rows out of order");
    if (r.server < 0) ++by_link[3];
    else ++by_link[static_cast<int>(r.link)];
    if (r.delivered && !(r.delay_s >= bound))
      fail("user " + std::to_string(r.user) + " delay " + fmt(r.delay_s) + " below bound " + fmt(bound));
    if (r.power_w > c.uav_max_power_w) fail("user " + std::to_string(r.user) + " power above P_max");
    if (r.link != Link::ServerViaRrh && r.server >= 0 && !power_ok(r.power_w, c.uav_max_power_w))
      fail("user " + std::to_string(r.user) + " has no transmit power");
  }
  if (by_link[0] + by_link[1] + by_link[2] + by_link[3] != log.requests) fail("delivery counts do not reconcile");
  for (std::size_t q = 0; q < clusters.size(); ++q) {
    if (rrh_sets[q].size() > clusters[q].rrhs.size()) fail("cluster " + std::to_string(q) + " exceeds its antennas");
  }
  double power = 0.0;
  for (const auto& u : log.uavs) {
    UavState s{u.id, u.position, u.cache, {}};
    if (!altitude_ok(s, c.min_altitude_m)) fail("uav " + std::to_string(u.id) + " below h_min");
    if (!cache_ok(s, c.cache_size, c.num_contents)) fail("uav " + std::to_string(u.id) + " cache invalid");
    power += u.power_w;
  }
  if (std::abs(power - log.uav_power_w) > 1e-9 * std::max(1.0, power)) fail("power totals do not reconcile");
}

struct SimState {
  std::vector<Point2> centroids;  // last executed K-means centroids
};

/// One period of T slots.
inline std::vector<SlotLog> run_period(const World& w, const ScenarioConfig& c, const RunOptions& opt, int period,
                                       SimState& state, double* position_error = nullptr, double* demand_tv = nullptr) {
  const double bound = delay_lower_bound(c);
  const long s0 = period_start_slot(c, period);
  const int ts = c.slots_per_cache_period;
  const int nu = static_cast<int>(w.users.size());
  const bool with_uavs = opt.variant != Variant::NoUav;
  const int k = with_uavs ? c.num_uavs : 0;
  const auto root = RandomSource(c.seed).derive("run").derive("period", static_cast<std::uint64_t>(period));

  const PeriodForecast f = opt.models ? esn_forecast(w, c, *opt.models, s0, opt.threads) : oracle_forecast(w, c, s0);
  if (opt.models && (position_error || demand_tv)) {
    double pe = 0.0, tv = 0.0;
    for (int s = 0; s < ts; ++s) {
      for (int i = 0; i < nu; ++i) {
        const auto si = static_cast<std::size_t>(s), ui = static_cast<std::size_t>(i);
        pe += horizontal_distance(f.slot_position[si][ui], slot_position(w, c, i, s0 + s));
        tv += 0.5 * (f.demand[si][ui] - request_distribution(w, c, i, s0 + s)).cwiseAbs().sum();
      }
    }
    const double n = std::max(1, ts * nu);
    if (position_error) *position_error += pe / n;
    if (demand_tv) *demand_tv += tv / n;
  }

  // Caches are refreshed once, before the first slot of the period.
  std::vector<std::vector<int>> caches(static_cast<std::size_t>(k));
  std::vector<Point2> fixed;
  if (k > 0) {
    const auto plan = detail::plan_caches(w, c, f, k, state.centroids.empty() ? nullptr : &state.centroids,
                                          root.derive("plan"), bound);
    fixed = plan.first_centroids;
    if (state.centroids.empty()) state.centroids = plan.first_centroids;
    for (int kk = 0; kk < k; ++kk) {
      auto& ca = caches[static_cast<std::size_t>(kk)];
      switch (opt.variant) {
        case Variant::NoCache: break;
        case Variant::RandomCache: ca = detail::random_cache(c, root.derive("random-cache", static_cast<std::uint64_t>(kk))); break;
        default: ca = plan.caches[static_cast<std::size_t>(kk)];
      }
    }
  }

  std::vector<SlotLog> logs;
  for (int s = 0; s < ts; ++s) {
    const long g = s0 + s;
    SlotLog log;
    log.period = period;
    log.slot = g;
    const auto& est = f.slot_position[static_cast<std::size_t>(s)];

    std::vector<int> req;  // requesting user ids
    std::vector<int> content(static_cast<std::size_t>(nu), -1);
    for (int i = 0; i < nu; ++i) {
      content[static_cast<std::size_t>(i)] = request_at(w, c, i, g);
      if (content[static_cast<std::size_t>(i)] >= 0) req.push_back(i);
    }
    log.requests = static_cast<int>(req.size());
    std::vector<Point2> est_r, truth_r;
    std::vector<double> dev_r;
    for (int i : req) {
      est_r.push_back(est[static_cast<std::size_t>(i)]);
      truth_r.push_back(slot_position(w, c, i, g));
      dev_r.push_back(device_requirement(c, w.users[static_cast<std::size_t>(i)].screen_factor, content[static_cast<std::size_t>(i)]));
    }
    const int nr = static_cast<int>(req.size());

    // Association: indices below are positions in `req`.
    std::vector<std::vector<int>> rrh_sets(w.clusters.size());
    std::vector<int> pool;
    if (with_uavs) {
      const auto plan = associate_rrh(est_r, dev_r, w.clusters, c, true, bound);
      rrh_sets = plan.cluster_users;
      pool = plan.uav_pool;
    } else {
      rrh_sets = rrh_candidates(est_r, w.clusters);
      std::vector<bool> in(static_cast<std::size_t>(nr), false);
      for (const auto& v : rrh_sets)
        for (int j : v) in[static_cast<std::size_t>(j)] = true;
      for (int j = 0; j < nr; ++j)
        if (!in[static_cast<std::size_t>(j)]) pool.push_back(j);
    }
    for (const auto& v : rrh_sets) log.rrh_served += static_cast<int>(v.size());

    std::vector<QoeReport> reports(static_cast<std::size_t>(nr));
    for (int j = 0; j < nr; ++j) {
      auto& r = reports[static_cast<std::size_t>(j)];
      r.user = req[static_cast<std::size_t>(j)];
      r.content = content[static_cast<std::size_t>(r.user)];
      r.intervals = c.intervals_per_slot;
      r.delay_s = kInfinity;
    }

    // RRH deliveries on the final sets at the true positions.
    if (log.rrh_served > 0) {
      std::optional<RandomSource> fading;
      if (c.sim.sampled_fading) fading = root.derive("rrh-fading", static_cast<std::uint64_t>(g));
      std::vector<std::vector<double>> rates;
      try {
        rates = rrh_rates(w.clusters, rrh_sets, truth_r, c, with_uavs, fading);
      } catch (const NumericError&) {
        rates.assign(w.clusters.size(), {});
        for (std::size_t q = 0; q < w.clusters.size(); ++q) rates[q].assign(rrh_sets[q].size(), 0.0);
      }
      const double fronthaul = c.fronthaul_rate_bps / log.rrh_served * c.slot_duration_s;
      for (std::size_t q = 0; q < w.clusters.size(); ++q) {
        for (std::size_t m = 0; m < rrh_sets[q].size(); ++m) {
          const int j = rrh_sets[q][m];
          auto& r = reports[static_cast<std::size_t>(j)];
          r.server = static_cast<int>(q);
          const std::vector<double> per(static_cast<std::size_t>(c.intervals_per_slot), rates[q][m]);
          r = detail::score(r, DeliveryPath::via_rrh(fronthaul, rates[q][m] * c.slot_duration_s), per,
                            dev_r[static_cast<std::size_t>(j)], c, bound);
        }
      }
    }

    // UAV clusters.
    std::vector<int> label(pool.size(), -1);
    if (k > 0) {
      std::vector<Point2> pool_pos;
      for (int j : pool) pool_pos.push_back(est_r[static_cast<std::size_t>(j)]);
      if (opt.variant == Variant::FixedPlacement) {
        for (std::size_t m = 0; m < pool.size(); ++m) {
          double best = kInfinity;
          for (int kk = 0; kk < k; ++kk) {
            const double d = squared_distance(pool_pos[m], fixed[static_cast<std::size_t>(kk)]);
            if (d < best) {
              best = d;
              label[m] = kk;
            }
          }
        }
      } else {
        const auto cl = cluster_users(pool_pos, k, root.derive("kmeans", static_cast<std::uint64_t>(g)),
                                      state.centroids.size() == static_cast<std::size_t>(k) ? &state.centroids : nullptr,
                                      c.placement.kmeans_max_iterations);
        label = cl.label;
        state.centroids = cl.centroids;
      }
    } else {
      for (int j : pool) reports[static_cast<std::size_t>(j)].server = -1;
    }

    log.uavs.resize(static_cast<std::size_t>(k));
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    if (k > 0)
      for (std::size_t m = 0; m < pool.size(); ++m) members[static_cast<std::size_t>(label[m])].push_back(pool[m]);
    std::vector<std::vector<QoeReport>> uav_reports(static_cast<std::size_t>(k));
    parallel_for(k, opt.threads, [&](int kk) {
      const auto ki = static_cast<std::size_t>(kk);
      auto& u = log.uavs[ki];
      u.id = kk;
      u.cache = caches[ki];
      const auto& mem = members[ki];
      const Point2 base = opt.variant == Variant::FixedPlacement ? fixed[ki] : state.centroids[ki];
      const Point3 prelim{base.x, base.y, c.min_altitude_m};
      u.users = static_cast<int>(mem.size());
      u.position = prelim;
      if (mem.empty()) return;
      const int uk = u.users;
      std::vector<bool> cached(mem.size());
      for (std::size_t m = 0; m < mem.size(); ++m) {
        const int n = reports[static_cast<std::size_t>(mem[m])].content;
        cached[m] = std::binary_search(u.cache.begin(), u.cache.end(), n);
        u.cache_hits += cached[m] ? 1 : 0;
      }
      u.fetches = uk - u.cache_hits;
      const double share_pre = g2a_fronthaul_rate(prelim, c.sim.bbu, c) / std::max(1, u.fetches);
      std::vector<double> target(mem.size());
      std::vector<PlacementUser> placed;
      for (std::size_t m = 0; m < mem.size(); ++m) {
        const auto j = static_cast<std::size_t>(mem[m]);
        target[m] = uav_rate_target(cached[m], share_pre, dev_r[j], c, bound);
        if (std::isfinite(target[m])) placed.push_back({est_r[j], target[m]});
      }
      if (opt.variant != Variant::FixedPlacement) u.position = place_uav(placed, uk, prelim, c).position;
      u.fronthaul_bits = g2a_fronthaul_rate(u.position, c.sim.bbu, c);
      const double share = u.fronthaul_bits / std::max(1, u.fetches);
      for (std::size_t m = 0; m < mem.size(); ++m) {
        const auto j = static_cast<std::size_t>(mem[m]);
        QoeReport r = reports[j];
        r.server = kk;
        bool over = false;
        r.power_w = capped_power(target[m], uk, uav_user_pathloss(u.position, est_r[j], c.channel), c, &over);
        r.power_infeasible = over;
        std::optional<RandomSource> fading;
        if (c.sim.sampled_fading)
          fading = root.derive("uav-fading", static_cast<std::uint64_t>(g)).derive("user", static_cast<std::uint64_t>(r.user));
        const auto rates = detail::uav_rates(u.position, truth_r[j], r.power_w, uk, c, fading);
        const double access = detail::mean_bits(rates, c.slot_duration_s);
        const auto path = cached[m] ? DeliveryPath::from_cache(access) : DeliveryPath::via_uav(share, access);
        r = detail::score(r, path, rates, dev_r[j], c, bound);
        u.power_w += r.power_w;
        uav_reports[ki].push_back(r);
      }
    });
    for (int kk = 0; kk < k; ++kk) {
      for (const auto& r : uav_reports[static_cast<std::size_t>(kk)]) {
        const auto it = std::lower_bound(req.begin(), req.end(), r.user);
        reports[static_cast<std::size_t>(it - req.begin())] = r;
      }
    }

    for (const auto& r : reports) {
      log.delivered += r.delivered ? 1 : 0;
      log.satisfied += r.satisfied ? 1 : 0;
      log.infeasible += r.power_infeasible ? 1 : 0;
      if (r.server >= 0 && r.link != Link::ServerViaRrh) {
        ++log.uav_deliveries;
        log.cache_hits += r.link == Link::UavCache ? 1 : 0;
      }
    }
    for (const auto& u : log.uavs) log.uav_power_w += u.power_w;
    log.reports = std::move(reports);
    check_slot(log, req, w.clusters, rrh_sets, c, bound);
    logs.push_back(std::move(log));
  }
  return logs;
}

inline Summary summarize(const std::vector<SlotLog>& logs, const ScenarioConfig& c, const RunOptions& opt) {
  Summary s;
  s.variant = variant_name(opt.variant);
  s.mode = opt.models ? "esn" : "oracle";
  s.seed = c.seed;
  s.users = c.num_users;
  s.uavs = opt.variant == Variant::NoUav ? 0 : c.num_uavs;
  s.cache_size = c.cache_size;
  s.periods = c.sim.periods;
  s.slots = static_cast<int>(logs.size());
  const double bound = delay_lower_bound(c);
  double qoe = 0.0, altitude = 0.0;
  long uav_slots = 0;
  s.min_delay_margin_s = kInfinity;
  for (const auto& l : logs) {
    s.requests += l.requests;
    s.delivered += l.delivered;
    s.satisfied += l.satisfied;
    s.cache_hits += l.cache_hits;
    s.power_infeasible += l.infeasible;
    s.total_uav_power_w += l.uav_power_w;
    s.mean_rrh_served += l.rrh_served;
    for (const auto& r : l.reports) {
      qoe += r.qoe;
      if (r.server < 0) ++s.unserved;
      else if (r.link == Link::ServerViaRrh) ++s.rrh_deliveries;
      else if (r.link == Link::ServerViaUav) ++s.fronthaul_deliveries;
      if (r.delivered) s.min_delay_margin_s = std::min(s.min_delay_margin_s, r.delay_s - bound);
    }
    for (const auto& u : l.uavs) {
      altitude += u.position.h;
      ++uav_slots;
    }
  }
  const long uav_deliveries = s.cache_hits + s.fronthaul_deliveries;
  s.satisfied_fraction = s.requests ? static_cast<double>(s.satisfied) / s.requests : 0.0;
  s.cache_hit_rate = uav_deliveries ? static_cast<double>(s.cache_hits) / uav_deliveries : 0.0;
  s.avg_uav_power_w = uav_slots ? s.total_uav_power_w / uav_slots : 0.0;
  s.avg_altitude_m = uav_slots ? altitude / uav_slots : 0.0;
  s.mean_qoe = s.requests ? qoe / s.requests : 0.0;
  s.mean_rrh_served = logs.empty() ? 0.0 : s.mean_rrh_served / logs.size();
  if (!std::isfinite(s.min_delay_margin_s)) s.min_delay_margin_s = 0.0;
  return s;
}

/// All periods of a run. State (K-means centroids) carries across periods.
inline RunResult run(const ScenarioConfig& c, const RunOptions& opt) {
  const World w = make_world(c);
  RunResult out;
  SimState state;
  double pe = 0.0, tv = 0.0;
  for (int p = 0; p < c.sim.periods; ++p) {
    auto logs = run_period(w, c, opt, p, state, &pe, &tv);
    out.slots.insert(out.slots.end(), std::make_move_iterator(logs.begin()), std::make_move_iterator(logs.end()));
  }
  out.summary = summarize(out.slots, c, opt);
  out.summary.position_error_m = pe / c.sim.periods;
  out.summary.demand_tv = tv / c.sim.periods;
  return out;
}

inline RunResult baseline(const ScenarioConfig& c, Variant v, int threads = 1) {
  RunOptions o;
  o.variant = v;
  o.threads = threads;
  return run(c, o);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepParam { Users, Uavs, Cache };

inline SweepParam parse_sweep_param(const std::string& s) {
  if (s == "users") return SweepParam::Users;
  if (s == "uavs") return SweepParam::Uavs;
  if (s == "cache") return SweepParam::Cache;
  throw std::invalid_argument("unknown sweep parameter '" + s + "' (users, uavs, cache)");
}

inline const char* sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::Users: return "users";
    case SweepParam::Uavs: return "uavs";
    case SweepParam::Cache: return "cache";
  }
  return "?";
}

inline ScenarioConfig with_value(ScenarioConfig c, SweepParam p, int v) {
  switch (p) {
    case SweepParam::Users: c.num_users = v; break;
    case SweepParam::Uavs: c.num_uavs = v; break;
    case SweepParam::Cache: c.cache_size = v; break;
  }
  return c;
}

struct SweepRow {
  int value = 0;
  Summary summary;
};

struct SweepResult {
  SweepParam param = SweepParam::Users;
  std::vector<SweepRow> rows;
};

/// One oracle-mode run per value with the seed held fixed. Every value is
/// validated before any run starts.
inline SweepResult sweep(const ScenarioConfig& c, SweepParam p, const std::vector<int>& values,
                         Variant v = Variant::Proposed, int threads = 1) {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  std::vector<std::string> errors;
  for (int x : values) {
    for (auto& e : validate(with_value(c, p, x))) errors.push_back(std::string(sweep_param_name(p)) + "=" + std::to_string(x) + ": " + e);
  }
  if (!errors.empty()) throw ConfigError(errors);
  SweepResult out;
  out.param = p;
  for (int x : values) out.rows.push_back({x, baseline(with_value(c, p, x), v, threads).summary});
  return out;
}

// ---------------------------------------------------------------------------
// Output files

inline void write_slots_csv(std::ostream& os, const std::vector<SlotLog>& logs) {
  os << "period,slot,user,content,path,server,delay_s,delay_score,device_score,qoe,mos,satisfied,delivered,"
        "power_infeasible,power_w\n";
  for (const auto& l : logs) {
    for (const auto& r : l.reports) {
      os << l.period << ',' << l.slot << ',' << r.user << ',' << r.content << ','
         << (r.server < 0 ? "unserved" : link_name(r.link)) << ',' << r.server << ',' << fmt(r.delay_s) << ','
         << fmt(r.delay_score) << ',' << fmt(static_cast<double>(r.device_score_sum) / std::max(1, r.intervals)) << ','
         << fmt(r.qoe) << ',' << r.mos << ',' << int(r.satisfied) << ',' << int(r.delivered) << ','
         << int(r.power_infeasible) << ',' << fmt(r.power_w) << '\n';
    }
  }
}

inline void write_uavs_csv(std::ostream& os, const std::vector<SlotLog>& logs) {
  os << "period,slot,uav,x_m,y_m,h_m,users,cache_hits,fetches,power_w,fronthaul_bits,cache\n";
  for (const auto& l : logs) {
    for (const auto& u : l.uavs) {
      std::string cache;
      for (std::size_t i = 0; i < u.cache.size(); ++i) cache += (i ? " " : "") + std::to_string(u.cache[i]);
      os << l.period << ',' << l.slot << ',' << u.id << ',' << fmt(u.position.x) << ',' << fmt(u.position.y) << ','
         << fmt(u.position.h) << ',' << u.users << ',' << u.cache_hits << ',' << u.fetches << ',' << fmt(u.power_w) << ','
         << fmt(u.fronthaul_bits) << ',' << cache << '\n';
    }
  }
}

/// Floats go through the 9-digit formatter so files are stable across runs.
inline nlohmann::ordered_json to_json(const Summary& s) {
  auto num = [](double x) { return nlohmann::ordered_json::parse(fmt(x)); };
  nlohmann::ordered_json j;
  j["schema_version"] = kOutputSchema;
  j["variant"] = s.variant;
  j["mode"] = s.mode;
  j["seed"] = s.seed;
  j["users"] = s.users;
  j["uavs"] = s.uavs;
  j["cache_size"] = s.cache_size;
  j["periods"] = s.periods;
  j["slots"] = s.slots;
  j["requests"] = s.requests;
  j["delivered"] = s.delivered;
  j["satisfied"] = s.satisfied;
  j["unserved"] = s.unserved;
  j["rrh_deliveries"] = s.rrh_deliveries;
  j["fronthaul_deliveries"] = s.fronthaul_deliveries;
  j["cache_hits"] = s.cache_hits;
  j["power_infeasible"] = s.power_infeasible;
  j["satisfied_fraction"] = num(s.satisfied_fraction);
  j["cache_hit_rate"] = num(s.cache_hit_rate);
  j["total_uav_power_w"] = num(s.total_uav_power_w);
  j["avg_uav_power_w"] = num(s.avg_uav_power_w);
  j["avg_altitude_m"] = num(s.avg_altitude_m);
  j["mean_qoe"] = num(s.mean_qoe);
  j["mean_rrh_served"] = num(s.mean_rrh_served);
  j["position_error_m"] = num(s.position_error_m);
  j["demand_tv"] = num(s.demand_tv);
  j["min_delay_margin_s"] = num(s.min_delay_margin_s);
  return j;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "param,value,variant,avg_uav_power_w,total_uav_power_w,satisfied_fraction,cache_hit_rate,avg_altitude_m,"
        "mean_qoe,requests\n";
  for (const auto& row : r.rows) {
    const auto& s = row.summary;
    os << sweep_param_name(r.param) << ',' << row.value << ',' << s.variant << ',' << fmt(s.avg_uav_power_w) << ','
       << fmt(s.total_uav_power_w) << ',' << fmt(s.satisfied_fraction) << ',' << fmt(s.cache_hit_rate) << ','
       << fmt(s.avg_altitude_m) << ',' << fmt(s.mean_qoe) << ',' << s.requests << '\n';
  }
}

inline void write_training_csv(std::ostream& os, const std::vector<TrainingRecord>& rows) {
  os << "user,task,pattern,samples,quota_before,quota_after,nrmse\n";
  for (const auto& r : rows) {
    os << r.user << ',' << r.task << ',' << (r.type == DayType::Weekday ? "weekday" : "weekend") << ',' << r.samples
       << ',' << fmt(r.quota_before) << ',' << fmt(r.quota_after) << ',' << fmt(r.nrmse) << '\n';
  }
}

}  // namespace uavcache

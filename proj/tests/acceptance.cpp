// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
// Usage: acceptance <path to the uavcache CLI>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "uavcache/sim.hpp"
#include "uavcache/verify.hpp"

using namespace uavcache;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Pinned settings

// Memory task: reservoir size, aperture, samples per pattern, recall window.
constexpr int kMemoryReservoir = 200;
constexpr double kMemoryAperture = 200.0;
constexpr int kMemorySamples = 1000;
constexpr int kRecallSteps = 24;
constexpr double kRecallNrmse = 0.1;
constexpr double kInterference = 0.05;
constexpr double kDuplicateShare = 0.5;
constexpr double kMemorySeconds = 60.0;

constexpr double kCachingRatio = 0.8;
constexpr int kCachingSeeds = 10;
constexpr double kCachingSeconds = 120.0;

constexpr double kUavCountRatio = 0.5;
constexpr int kAblationSeeds = 30;

// ---------------------------------------------------------------------------
// Bookkeeping

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("%s criterion %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Every delivery of every simulated run passes through here.
struct DelayAudit {
  long deliveries = 0;
  long below_bound = 0;
  double min_margin = kInfinity;

  void add(const RunResult& r, const ScenarioConfig& c) {
    const double bound = delay_lower_bound(c);
    for (const auto& l : r.slots) {
      for (const auto& q : l.reports) {
        if (!q.delivered) continue;
        ++deliveries;
        below_bound += q.delay_s < bound ? 1 : 0;
        min_margin = std::min(min_margin, q.delay_s - bound);
      }
    }
  }
};

DelayAudit audit;

RunResult audited(const ScenarioConfig& c, Variant v) {
  RunResult r = baseline(c, v);
  audit.add(r, c);
  return r;
}

// ---------------------------------------------------------------------------
// Memory patterns

Mat sinus(double period, int n, double phase = 0.0) {
  Mat m(1, n);
  for (int t = 0; t < n; ++t) m(0, t) = 0.8 * std::sin(2.0 * std::numbers::pi * t / period + phase);
  return m;
}

/// Two waypoints at -0.7 and 0.7: dwell 6 steps, travel 8, dwell 6, travel 8.
Mat commuter(int n) {
  Mat m(1, n);
  for (int t = 0; t < n; ++t) {
    const int k = t % 28;
    m(0, t) = k < 6 ? -0.7 : k < 14 ? -0.7 + 1.4 * (k - 6) / 8.0 : k < 20 ? 0.7 : 0.7 - 1.4 * (k - 20) / 8.0;
  }
  return m;
}

struct Pattern {
  const char* name;
  std::function<Mat(int)> make;
  bool constant;
};

const std::vector<Pattern>& patterns() {
  static const std::vector<Pattern> p{
      {"sinus 8.83", [](int n) { return sinus(8.83, n); }, false},
      {"sinus 14.2", [](int n) { return sinus(14.2, n); }, false},
      {"constant", [](int n) { return Mat(Mat::Constant(1, n, 0.5)); }, true},
      {"commuter", commuter, false},
  };
  return p;
}

EsnConfig memory_config() {
  EsnConfig c;
  c.reservoir_size = kMemoryReservoir;
  c.aperture = kMemoryAperture;
  c.training_length = kMemorySamples;
  return c;
}

/// Recall error against the continuation of the training sequence. A
/// constant has no variance, so its error is the RMSE relative to its level.
double recall_error(const EsnModel& m, int i) {
  const auto& p = patterns()[static_cast<std::size_t>(i)];
  const Mat truth = p.make(kMemorySamples + kRecallSteps).rightCols(kRecallSteps);
  const Mat y = m.recall(i, kRecallSteps);
  return p.constant ? relative_rmse(y, truth) : nrmse(y, truth);
}

// ---------------------------------------------------------------------------
// Criteria

void memory_criteria() {
  const auto t0 = std::chrono::steady_clock::now();
  EsnModel m = EsnModel::create(memory_config(), 1, 1, RandomSource(1));
  std::vector<double> own, quota{m.quota()};
  for (int i = 0; i < 4; ++i) {
    const Mat x = patterns()[static_cast<std::size_t>(i)].make(kMemorySamples);
    m.load_pattern(x, x);
    m.train_readout();
    own.push_back(recall_error(m, i));
    quota.push_back(m.quota());
  }
  std::vector<double> final_err;
  for (int i = 0; i < 4; ++i) final_err.push_back(recall_error(m, i));

  // Near-duplicate of pattern 1 against each other pattern, all loaded on
  // top of pattern 1 alone.
  EsnModel first = EsnModel::create(memory_config(), 1, 1, RandomSource(1));
  const Mat p0 = patterns()[0].make(kMemorySamples);
  first.load_pattern(p0, p0);
  const double q1 = first.quota();
  auto consumed = [&](const Mat& x) {
    EsnModel copy = first;
    copy.load_pattern(x, x);
    return q1 - copy.quota();
  };
  const double dup = consumed(sinus(8.83, kMemorySamples, 0.3));
  double most = 0.0;
  for (int i = 1; i < 4; ++i) most = std::max(most, consumed(patterns()[static_cast<std::size_t>(i)].make(kMemorySamples)));
  const double secs = seconds_since(t0);

  bool recall_ok = true, quota_ok = true;
  std::string d = "recall";
  for (int i = 0; i < 4; ++i) {
    recall_ok = recall_ok && final_err[static_cast<std::size_t>(i)] <= kRecallNrmse;
    d += " " + fmt(final_err[static_cast<std::size_t>(i)]);
  }
  d += "; quota";
  for (std::size_t i = 0; i < quota.size(); ++i) {
    d += " " + fmt(quota[i]);
    if (i > 0) quota_ok = quota_ok && quota[i] < quota[i - 1];
  }
  d += "; duplicate uses " + fmt(dup) + " vs " + fmt(most) + "; " + fmt(secs) + " s";
  report(1, "multi-pattern memory",
         {recall_ok && quota_ok && dup < kDuplicateShare * most && secs < kMemorySeconds, d});

  double worst = -kInfinity;
  std::string d2 = "degradation";
  for (int i = 0; i < 3; ++i) {
    const double g = final_err[static_cast<std::size_t>(i)] - own[static_cast<std::size_t>(i)];
    worst = std::max(worst, g);
    d2 += " " + fmt(g);
  }
  report(2, "non-interference", {worst <= kInterference, d2 + " (limit " + fmt(kInterference) + ")"});
}

ScenarioConfig caching_scenario(std::uint64_t seed) {
  auto c = ScenarioConfig::desk();
  c.num_users = 70;
  c.num_uavs = 5;
  c.num_contents = 25;
  c.cache_size = 5;
  c.seed = seed;
  return c;
}

void caching_gain() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, sum_p = 0.0, sum_n = 0.0;
  bool strict = true;
  for (std::uint64_t seed = 1; seed <= kCachingSeeds; ++seed) {
    const auto c = caching_scenario(seed);
    const double p = audited(c, Variant::Proposed).summary.total_uav_power_w;
    const double n = audited(c, Variant::NoCache).summary.total_uav_power_w;
    worst = std::max(worst, p / n);
    sum_p += p;
    sum_n += n;
    strict = strict && p < n;
  }
  const double secs = seconds_since(t0);
  report(3, "caching power gain",
         {worst <= kCachingRatio && strict && secs < kCachingSeconds,
          "worst paired ratio " + fmt(worst) + ", pooled " + fmt(sum_p / sum_n) + ", strictly lower on every seed: " +
              (strict ? "yes" : "no") + "; " + fmt(secs) + " s"});
}

void cache_exactness() {
  const auto r = check_cache_selection(100, 4);
  report(4, "top-C caching is exact", {r.pass, r.detail});
}

void placement() {
  const auto r = check_placement(ScenarioConfig::paper(), 10, 5);
  report(5, "closed-form placement", {r.pass, r.detail + " (limits 10%, 5%)"});
}

void uav_count() {
  const auto c = ScenarioConfig::desk();
  std::vector<double> avg;
  std::string d = "avg per-UAV power";
  for (int k : {3, 5, 7}) {
    auto ck = c;
    ck.num_uavs = k;
    avg.push_back(audited(ck, Variant::Proposed).summary.avg_uav_power_w);
    d += " " + fmt(avg.back());
  }
  const bool dec = avg[1] < avg[0] && avg[2] < avg[1];
  report(6, "UAV-count monotonicity",
         {dec && avg[2] <= kUavCountRatio * avg[0], d + "; K=7/K=3 " + fmt(avg[2] / avg[0])});
}

void satisfaction() {
  bool ok = true;
  std::string d;
  for (int u : {70, 90, 120}) {
    auto c = ScenarioConfig::desk();
    c.num_users = u;
    const double with = audited(c, Variant::Proposed).summary.satisfied_fraction;
    const double without = audited(c, Variant::NoUav).summary.satisfied_fraction;
    ok = ok && with >= without && (u != 120 || with > without);
    d += "U=" + std::to_string(u) + " " + fmt(with) + " vs " + fmt(without) + "; ";
  }
  report(7, "QoE satisfaction gain", {ok, d + "(with vs without UAVs)"});
}

void zf() {
  const auto r = check_zf_nulling(1000, ScenarioConfig::paper().channel.g2a_exponent, 9);
  report(9, "ZF nulling", {r.pass, r.detail + " (limit 1e-9)"});
}

void conceptor_algebra() {
  const auto r = check_conceptor_algebra(100, 30, 10);
  report(10, "conceptor algebra", {r.pass, r.detail + " (limit 1e-12)"});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(const std::string& cli) {
  if (cli.empty()) {
    report(11, "determinism", {false, "CLI path not given"});
    return;
  }
  const fs::path root = fs::temp_directory_path() / "uavcache_acceptance";
  fs::remove_all(root);
  // 1 thread twice, then every core, then more workers than users per UAV.
  const std::vector<std::string> threads{"1", "1", "0", "16"};
  std::vector<std::string> slots, summaries;
  bool ran = true;
  for (std::size_t i = 0; i < threads.size(); ++i) {
    const fs::path out = root / ("run" + std::to_string(i));
    const std::string cmd = "\"" + cli + "\" simulate --oracle --seed 7 --threads " + threads[i] + " -v 0 --out \"" +
                            out.string() + "\"";
    ran = ran && std::system(cmd.c_str()) == 0;
    slots.push_back(slurp(out / "slots.csv"));
    summaries.push_back(slurp(out / "summary.json"));
  }
  bool same = ran && !slots[0].empty();
  for (std::size_t i = 1; i < threads.size(); ++i) same = same && slots[i] == slots[0] && summaries[i] == summaries[0];
  fs::remove_all(root);
  report(11, "determinism",
         {same, std::string(ran ? "" : "a run failed; ") + "slots.csv and summary.json identical across threads 1,1,0,16: " +
                    (same ? "yes" : "no") + " (" + std::to_string(slots[0].size()) + " bytes)"});
}

void random_cache_ablation() {
  bool ok = true;
  std::string d;
  for (int cap : {1, 3, 5}) {
    double p = 0.0, r = 0.0;
    for (std::uint64_t seed = 1; seed <= kAblationSeeds; ++seed) {
      auto c = ScenarioConfig::desk();
      c.cache_size = cap;
      c.seed = seed;
      p += audited(c, Variant::Proposed).summary.total_uav_power_w;
      r += audited(c, Variant::RandomCache).summary.total_uav_power_w;
    }
    ok = ok && p < r;
    d += "C=" + std::to_string(cap) + " " + fmt(p / kAblationSeeds) + " vs " + fmt(r / kAblationSeeds) + "; ";
  }
  report(12, "random-cache ablation", {ok, d + "(mean total power, top-C vs random)"});
}

void delay_bound() {
  report(8, "delay lower bound",
         {audit.deliveries > 0 && audit.below_bound == 0,
          std::to_string(audit.below_bound) + " of " + std::to_string(audit.deliveries) +
              " deliveries below the bound; min margin " + fmt(audit.min_margin) + " s"});
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const auto t0 = std::chrono::steady_clock::now();
  try {
    memory_criteria();
    caching_gain();
    cache_exactness();
    placement();
    uav_count();
    satisfaction();
    zf();
    conceptor_algebra();
    determinism(cli);
    random_cache_ablation();
    delay_bound();
  } catch (const std::exception& e) {
    std::printf("FAIL aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed; %s s\n", failures, fmt(seconds_since(t0)).c_str());
  return failures == 0 ? 0 : 1;
}

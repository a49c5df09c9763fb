// uavcache command-line driver: train predictors, simulate one scheme,
// sweep a scenario size and run the property suite.
//
// Exit codes: 0 success, 1 usage or I/O, 2 invalid configuration or
// model/config mismatch, 3 invariant violation or numeric failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "uavcache/sim.hpp"
#include "uavcache/verify.hpp"

#ifndef UAVCACHE_VERSION
#define UAVCACHE_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace uavcache;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

constexpr const char* kOutEnv = "UAVCACHE_OUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool paper_scale = false;
  int threads = -1;
  int verbosity = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig preset(const Common& o) { return o.paper_scale ? ScenarioConfig::paper() : ScenarioConfig::desk(); }

/// Preset, then the config file, then --seed. Violations starting with
/// `tolerated` are let through.
ScenarioConfig resolve_config(const Common& o, const std::string& tolerated = "") {
  const std::string text = o.config.empty() ? std::string() : read_file(o.config);
  ScenarioConfig c = parse_config(text, preset(o));
  if (o.seed_set) c.seed = o.seed;
  std::vector<std::string> violations;
  for (auto& v : validate(c))
    if (tolerated.empty() || v.rfind(tolerated, 0) != 0) violations.push_back(std::move(v));
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return c;
}

int threads_for(const Common& o, const ScenarioConfig& c) { return o.threads >= 0 ? o.threads : c.sim.threads; }

fs::path out_dir(const Common& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "out";
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw UsageError("cannot write " + p.string());
  os << text;
  if (!os) throw UsageError("write failed for " + p.string());
}

template <class F>
void write_stream(const fs::path& p, F&& f) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw UsageError("cannot write " + p.string());
  f(os);
  if (!os) throw UsageError("write failed for " + p.string());
}

/// manifest.json in the output directory: written with status "running"
/// before any work and rewritten with the outcome afterwards. Output paths
/// are relative to the manifest.
class Manifest {
 public:
  Manifest(fs::path dir, std::string command, const ScenarioConfig& c, std::vector<std::string> argv)
      : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw UsageError("cannot create output directory " + dir_.string() + ": " + ec.message());
    doc_["schema"] = kOutputSchema;
    doc_["command"] = std::move(command);
    doc_["argv"] = std::move(argv);
    doc_["version"] = UAVCACHE_VERSION;
    doc_["seed"] = c.seed;
    doc_["started_utc"] = utc_now();
    doc_["status"] = "running";
    doc_["outputs"] = ordered_json::array();
    doc_["config"] = to_json(c);
    flush();
  }

  const fs::path& dir() const { return dir_; }

  void add_output(const std::string& relative) { doc_["outputs"].push_back(relative); }

  void finish(const std::string& status, const std::string& error = "") {
    doc_["status"] = status;
    if (!error.empty()) doc_["error"] = error;
    doc_["wall_clock_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc_["finished_utc"] = utc_now();
    flush();
  }

 private:
  void flush() { write_text(dir_ / "manifest.json", doc_.dump(2) + "\n"); }

  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  ordered_json doc_;
};

void log_slots(const std::vector<SlotLog>& logs) {
  for (const auto& l : logs) {
    std::fprintf(stderr, "period %d slot %ld requests %d delivered %d uav_power_w %s\n", l.period, l.slot, l.requests,
                 l.delivered, fmt(l.uav_power_w).c_str());
  }
}

template <class F>
auto parse_name(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw UsageError("--values: empty item in '" + text + "'");
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError("--values: '" + item + "' is not an integer");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("--values: at least one value required");
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_train(const Common& o, const std::vector<std::string>& argv) {
  const auto c = resolve_config(o);
  Manifest m(out_dir(o), "train", c, argv);
  try {
    const World w = make_world(c);
    std::vector<TrainingRecord> report;
    const auto models = train_models(w, c, threads_for(o, c), &report);
    save_models(m.dir(), models, c);
    for (int i = 0; i < c.num_users; ++i) {
      m.add_output(fs::path(model_file(".", i, "content")).filename().string());
      m.add_output(fs::path(model_file(".", i, "mobility")).filename().string());
    }
    m.add_output(kModelIndex);
    write_stream(m.dir() / "training_report.csv", [&](std::ostream& os) { write_training_csv(os, report); });
    m.add_output("training_report.csv");
    if (o.verbosity >= 1)
      std::fprintf(stderr, "trained %d users into %s\n", c.num_users, m.dir().string().c_str());
  } catch (const std::exception& e) {
    m.finish("failed", e.what());
    throw;
  }
  m.finish("ok");
  return kExitOk;
}

int cmd_simulate(const Common& o, const std::vector<std::string>& argv, const std::string& models_dir,
                 const std::string& variant) {
  const auto c = resolve_config(o);
  RunOptions opt;
  opt.variant = parse_name([&] { return parse_variant(variant); });
  opt.threads = threads_for(o, c);
  Manifest m(out_dir(o), "simulate", c, argv);
  try {
    std::vector<UserModels> models;
    if (!models_dir.empty()) {
      models = load_models(models_dir, c);
      opt.models = &models;
    }
    const auto r = run(c, opt);
    if (o.verbosity >= 2) log_slots(r.slots);
    write_stream(m.dir() / "slots.csv", [&](std::ostream& os) { write_slots_csv(os, r.slots); });
    write_stream(m.dir() / "uavs.csv", [&](std::ostream& os) { write_uavs_csv(os, r.slots); });
    write_text(m.dir() / "summary.json", to_json(r.summary).dump(2) + "\n");
    for (const char* f : {"slots.csv", "uavs.csv", "summary.json"}) m.add_output(f);
    if (o.verbosity >= 1)
      std::fprintf(stderr, "%s: total_uav_power_w %s satisfied_fraction %s\n", variant.c_str(),
                   fmt(r.summary.total_uav_power_w).c_str(), fmt(r.summary.satisfied_fraction).c_str());
  } catch (const std::exception& e) {
    m.finish("failed", e.what());
    throw;
  }
  m.finish("ok");
  return kExitOk;
}

int cmd_sweep(const Common& o, const std::vector<std::string>& argv, const std::string& param,
              const std::string& values_text, const std::string& variant) {
  const auto values = parse_values(values_text);
  const auto p = parse_name([&] { return parse_sweep_param(param); });
  const auto v = parse_name([&] { return parse_variant(variant); });
  const auto c = resolve_config(o);
  for (int x : values) {
    auto errs = validate(with_value(c, p, x));
    if (!errs.empty()) throw ConfigError(std::move(errs));
  }
  Manifest m(out_dir(o), "sweep", c, argv);
  try {
    const auto r = sweep(c, p, values, v, threads_for(o, c));
    write_stream(m.dir() / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, r); });
    m.add_output("sweep.csv");
  } catch (const std::exception& e) {
    m.finish("failed", e.what());
    throw;
  }
  m.finish("ok");
  return kExitOk;
}

int cmd_verify(const Common& o, const std::vector<std::string>& argv) {
  // An unstable reservoir is reported by the echo-state property rather than
  // rejected up front.
  const auto c = resolve_config(o, "esn.spectral_radius");
  if (!(c.esn.spectral_radius > 0.0)) throw ConfigError({"esn.spectral_radius: must be positive"});
  Manifest m(out_dir(o), "verify", c, argv);
  std::vector<PropertyResult> results;
  try {
    results = run_property_suite(c, threads_for(o, c));
  } catch (const std::exception& e) {
    m.finish("failed", e.what());
    throw;
  }
  ordered_json report = ordered_json::array();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    report.push_back({{"property", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    all = all && r.pass;
  }
  write_text(m.dir() / "verify.json", report.dump(2) + "\n");
  m.add_output("verify.json");
  m.finish(all ? "ok" : "failed", all ? "" : "property failures");
  return all ? kExitOk : kExitInvariant;
}

CLI::Option* add_common(CLI::App* app, Common& o) {
  app->add_option("--config", o.config, "JSON scenario file layered over the preset")->check(CLI::ExistingFile);
  app->add_option("--out", o.out, std::string("Output directory (default $") + kOutEnv + " or ./out)");
  auto* seed = app->add_option("--seed", o.seed, "Override the scenario seed");
  app->add_flag("--paper-scale", o.paper_scale, "Start from the full-size preset instead of the desk preset");
  app->add_option("--threads", o.threads, "Worker threads (0: all cores; default from config)")->check(CLI::NonNegativeNumber);
  app->add_option("-v,--verbosity", o.verbosity, "0 quiet, 1 summary, 2 one line per slot")->check(CLI::Range(0, 2));
  return seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV caching and placement simulator"};
  app.set_version_flag("--version", UAVCACHE_VERSION);
  app.require_subcommand(1);

  Common o;
  std::string models_dir, variant = "proposed", param, values;
  bool oracle = false;
  std::vector<CLI::Option*> seeds;

  auto* train = app.add_subcommand("train", "Train per-user predictors and write models plus a training report");
  seeds.push_back(add_common(train, o));

  auto* simulate = app.add_subcommand("simulate", "Run one scheme and write slots.csv and summary.json");
  seeds.push_back(add_common(simulate, o));
  auto* models_opt = simulate->add_option("--models", models_dir, "Directory written by train");
  auto* oracle_opt = simulate->add_flag("--oracle", oracle, "Use generator truth instead of trained predictors");
  models_opt->excludes(oracle_opt);
  simulate->add_option("--baseline", variant, "proposed, no_uav, no_cache, random_cache or fixed_placement");

  auto* sw = app.add_subcommand("sweep", "One oracle-mode run per value of a scenario size");
  seeds.push_back(add_common(sw, o));
  sw->add_option("--param", param, "users, uavs or cache")->required();
  sw->add_option("--values", values, "Comma-separated integers")->required();
  sw->add_option("--baseline", variant, "Scheme to sweep");

  auto* verify = app.add_subcommand("verify", "Run the cross-module property suite");
  seeds.push_back(add_common(verify, o));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  o.seed_set = std::any_of(seeds.begin(), seeds.end(), [](CLI::Option* s) { return s->count() > 0; });
  const std::vector<std::string> args(argv + 1, argv + argc);

  try {
    if (*train) return cmd_train(o, args);
    if (*simulate) {
      if (!oracle && models_dir.empty()) throw UsageError("simulate: pass --oracle or --models DIR");
      return cmd_simulate(o, args, models_dir, variant);
    }
    if (*sw) return cmd_sweep(o, args, param, values, variant);
    if (*verify) return cmd_verify(o, args);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "model and configuration disagree: %s\n", e.what());
    return kExitConfig;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "invariant violated: %s\n", e.what());
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return kExitInvariant;
  }
  return kExitUsage;
}

// Conceptor echo state networks: reservoir driving, conceptor algebra,
// incremental pattern loading through an input-simulation matrix, ridge
// readout, conceptor-controlled recall and prediction.
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "uavcache/error.hpp"
#include "uavcache/numerics.hpp"
#include "uavcache/random.hpp"
#include "uavcache/scenario.hpp"

namespace uavcache {

// ---------------------------------------------------------------------------
// Conceptors

struct Conceptor {
  Mat m;                 // N_w x N_w, symmetric, eigenvalues in [0, 1)
  std::optional<Mat> r;  // source correlation when known
  double aperture = 1.0;

  Eigen::Index size() const { return m.rows(); }
};

/// M = R (R + aperture^-2 I)^-1, evaluated in R's eigenbasis.
inline Conceptor conceptor_from_correlation(const Mat& r, double aperture) {
  if (!(aperture > 0.0)) throw std::invalid_argument("conceptor: aperture must be positive");
  const auto e = sym_eig(r);
  const double a2 = 1.0 / (aperture * aperture);
  Vec f(e.values.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double s = std::max(0.0, e.values(i));
    f(i) = s / (s + a2);
  }
  Mat m = e.vectors * f.asDiagonal() * e.vectors.transpose();
  m = 0.5 * (m + m.transpose());
  return {std::move(m), r, aperture};
}

/// Conceptor of a state sequence (states as columns).
inline Conceptor compute_conceptor(const Mat& states, double aperture) {
  if (states.cols() < 1) throw std::invalid_argument("compute_conceptor: no states");
  const Mat r = states * states.transpose() / static_cast<double>(states.cols());
  return conceptor_from_correlation(r, aperture);
}

inline Conceptor conceptor_not(const Conceptor& c) {
  return {Mat::Identity(c.size(), c.size()) - c.m, std::nullopt, c.aperture};
}

/// OR through correlation addition; both operands need their correlation.
inline Conceptor conceptor_or(const Conceptor& a, const Conceptor& b) {
  if (a.aperture != b.aperture) throw std::invalid_argument("conceptor_or: aperture mismatch");
  if (a.size() != b.size()) throw DimensionError("conceptor_or: size mismatch");
  if (!a.r || !b.r) throw std::invalid_argument("conceptor_or: operand without correlation matrix");
  return conceptor_from_correlation(*a.r + *b.r, a.aperture);
}

inline Conceptor zero_conceptor(Eigen::Index n, double aperture) {
  return {Mat::Zero(n, n), Mat::Zero(n, n), aperture};
}

struct FreeMemory {
  Conceptor f;
  double quota = 1.0;  // trace(F) / N_w
};

/// F = NOT(OR of all loaded conceptors).
inline FreeMemory free_memory(const std::vector<Conceptor>& loaded, Eigen::Index n, double aperture) {
  Conceptor any = zero_conceptor(n, aperture);
  for (const auto& c : loaded) any = conceptor_or(any, c);
  FreeMemory out{conceptor_not(any), 0.0};
  out.quota = out.f.m.trace() / static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------------------
// Error measures

/// sqrt(mean squared error / variance of truth), pooled over rows.
inline double nrmse(const Mat& predicted, const Mat& truth) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols()) {
    throw DimensionError("nrmse: length mismatch");
  }
  if (truth.size() == 0) throw std::invalid_argument("nrmse: empty sequence");
  const double mean = truth.mean();
  const double var = (truth.array() - mean).square().mean();
  if (!(var > 0.0)) throw std::invalid_argument("nrmse: truth has zero variance");
  return std::sqrt((predicted - truth).array().square().mean() / var);
}

inline double nrmse(const std::vector<double>& predicted, const std::vector<double>& truth) {
  return nrmse(Eigen::Map<const Mat>(predicted.data(), 1, static_cast<Eigen::Index>(predicted.size())),
               Eigen::Map<const Mat>(truth.data(), 1, static_cast<Eigen::Index>(truth.size())));
}

/// RMS error normalised by the RMS of the truth; used where the truth is
/// constant and the variance normalisation is undefined.
inline double relative_rmse(const Mat& predicted, const Mat& truth) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols()) {
    throw DimensionError("relative_rmse: length mismatch");
  }
  const double rms = std::sqrt(truth.array().square().mean());
  if (!(rms > 0.0)) throw std::invalid_argument("relative_rmse: zero truth");
  return std::sqrt((predicted - truth).array().square().mean()) / rms;
}

// ---------------------------------------------------------------------------
// Model

/// W = cross (gram + lambda^2 I)^-1 for gram = V V^T and cross = Y V^T.
inline Mat solve_readout(const Mat& gram, const Mat& cross, double ridge) {
  Mat a = gram;
  a.diagonal().array() += ridge * ridge;
  if (ridge > 0.0) return solve_spd(a, cross.transpose()).transpose();
  return (pinv(a) * cross.transpose()).transpose();
}

/// Ridge readout W = Y V^T (V V^T + lambda^2 I)^-1 with states as columns of V.
inline Mat ridge_readout(const Mat& states, const Mat& targets, double ridge) {
  if (states.cols() != targets.cols()) throw DimensionError("ridge_readout: states and targets differ in length");
  return solve_readout(states * states.transpose(), targets * states.transpose(), ridge);
}

struct PatternRecord {
  Conceptor conceptor;
  Vec last_state;           // reservoir state after the final training input
  double quota_before = 1.0;
  double quota_after = 1.0;
  int samples = 0;          // states used after washout
};

class EsnModel {
 public:
  static constexpr int kFormatVersion = 1;

  EsnModel() = default;

  /// Fresh model with its own random reservoir.
  static EsnModel create(const EsnConfig& cfg, int input_dim, int output_dim, const RandomSource& rs,
                         bool allow_unstable = false) {
    Mat w = random_reservoir(cfg.reservoir_size, cfg.density, cfg.spectral_radius, rs.derive("reservoir"),
                             allow_unstable);
    return create_with_reservoir(cfg, input_dim, output_dim, std::move(w), rs);
  }

  /// Fresh model around an existing recurrent matrix (shared across users to
  /// avoid repeated eigen-solves); the input matrix is drawn from `rs`.
  static EsnModel create_with_reservoir(const EsnConfig& cfg, int input_dim, int output_dim, Mat reservoir,
                                        const RandomSource& rs) {
    if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("EsnModel: dimensions must be positive");
    if (reservoir.rows() != cfg.reservoir_size || reservoir.cols() != cfg.reservoir_size) {
      throw DimensionError("EsnModel: reservoir size mismatch");
    }
    EsnModel m;
    m.cfg_ = cfg;
    const int n = cfg.reservoir_size;
    m.w_ = std::move(reservoir);
    auto rng = rs.derive("input").engine();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    m.w_in_.resize(n, input_dim);
    for (int j = 0; j < input_dim; ++j)
      for (int i = 0; i < n; ++i) m.w_in_(i, j) = cfg.input_scale * u(rng);
    m.d_ = Mat::Zero(n, n);
    m.w_out_ = Mat::Zero(output_dim, n);
    m.r_sum_ = Mat::Zero(n, n);
    m.gram_ = Mat::Zero(n, n);
    m.cross_ = Mat::Zero(output_dim, n);
    return m;
  }

  /// Model with explicit recurrent and input weights.
  static EsnModel from_weights(const EsnConfig& cfg, Mat reservoir, Mat input_weights, int output_dim) {
    if (input_weights.rows() != reservoir.rows()) throw DimensionError("EsnModel: input weights do not match reservoir");
    EsnConfig c = cfg;
    c.reservoir_size = static_cast<int>(reservoir.rows());
    EsnModel m = create_with_reservoir(c, static_cast<int>(input_weights.cols()), output_dim, std::move(reservoir),
                                       RandomSource(0));
    m.w_in_ = std::move(input_weights);
    return m;
  }

  int reservoir_size() const { return static_cast<int>(w_.rows()); }
  int input_dim() const { return static_cast<int>(w_in_.cols()); }
  int output_dim() const { return static_cast<int>(w_out_.rows()); }
  const EsnConfig& config() const { return cfg_; }
  const Mat& w() const { return w_; }
  const Mat& w_in() const { return w_in_; }
  const Mat& w_out() const { return w_out_; }
  const Mat& d() const { return d_; }
  bool trained() const { return trained_; }
  int pattern_count() const { return static_cast<int>(patterns_.size()); }
  const PatternRecord& pattern(int i) const { return patterns_.at(static_cast<std::size_t>(i)); }

  /// Free-memory quota trace(F)/N_w of the current model.
  double quota() const {
    if (patterns_.empty()) return 1.0;
    if (!with_training_state_) return patterns_.back().quota_after;
    return free_memory_conceptor().m.trace() / reservoir_size();
  }

  Conceptor free_memory_conceptor() const {
    Conceptor any = conceptor_from_correlation(r_sum_, cfg_.aperture);
    return conceptor_not(any);
  }

  /// States v_1..v_T of tanh(W v + W_in x) from `initial` (zero by default).
  Mat drive(const Mat& inputs, const std::optional<Vec>& initial = std::nullopt) const {
    if (inputs.rows() != input_dim()) throw DimensionError("drive: input dimension mismatch");
    Vec v = initial ? *initial : Vec::Zero(reservoir_size());
    Mat out(reservoir_size(), inputs.cols());
    for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
      v = (w_ * v + w_in_ * inputs.col(t)).array().tanh();
      out.col(t) = v;
    }
    return out;
  }

  /// Loads one pattern: updates D inside the free memory, stores the
  /// pattern's conceptor and accumulates readout statistics. Inputs and
  /// targets hold one sample per column; only the first training_length
  /// columns are used.
  const PatternRecord& load_pattern(const Mat& inputs, const Mat& targets) {
    if (!with_training_state_) throw std::logic_error("load_pattern: model was saved without its training state");
    if (inputs.cols() != targets.cols()) throw DimensionError("load_pattern: inputs and targets differ in length");
    if (inputs.rows() != input_dim()) throw DimensionError("load_pattern: input dimension mismatch");
    if (targets.rows() != output_dim()) throw DimensionError("load_pattern: target dimension mismatch");
    const Eigen::Index len = std::min<Eigen::Index>(inputs.cols(), cfg_.training_length);
    const Eigen::Index wash = cfg_.washout;
    if (len <= wash) throw std::invalid_argument("load_pattern: sequence not longer than the washout");

    // One eigen-solve gives both the quota and the free-memory filter.
    const Mat f = patterns_.empty() ? Mat::Identity(reservoir_size(), reservoir_size()) : free_memory_conceptor().m;
    const double before = f.trace() / reservoir_size();
    if (!(before > cfg_.quota_threshold)) {
      throw InfeasibleError("load_pattern: reservoir memory exhausted; retrain with a larger reservoir");
    }

    const Mat x = inputs.leftCols(len);
    const Mat states = drive(x);
    const Eigen::Index n = len - wash;
    const Mat v = states.rightCols(n);
    Mat v_old(reservoir_size(), n);
    v_old = states.middleCols(wash - 1 >= 0 ? wash - 1 : 0, n);
    if (wash == 0) {
      v_old.col(0).setZero();
      if (n > 1) v_old.rightCols(n - 1) = states.leftCols(n - 1);
    }
    const Mat xs = x.rightCols(n);
    const double nn = static_cast<double>(n);
    const double a2 = 1.0 / (cfg_.aperture * cfg_.aperture);

    const Mat s = f * v_old;
    const Mat t = w_in_ * xs - d_ * v_old;
    Mat lhs = s * s.transpose() / nn;
    lhs.diagonal().array() += a2;
    const Mat d_inc = (pinv(lhs) * (s * t.transpose() / nn)).transpose();
    d_ += d_inc;

    const Mat r = v * v.transpose() / nn;
    PatternRecord rec;
    rec.conceptor = conceptor_from_correlation(r, cfg_.aperture);
    rec.last_state = states.col(len - 1);
    rec.samples = static_cast<int>(n);
    r_sum_ += r;
    gram_ += v * v.transpose();
    cross_ += targets.leftCols(len).rightCols(n) * v.transpose();
    rec.quota_before = before;
    patterns_.push_back(std::move(rec));
    patterns_.back().quota_after = quota();
    trained_ = false;
    return patterns_.back();
  }

  /// W_out = Y V^T (V V^T + lambda^2 I)^-1 over every loaded pattern.
  void train_readout() {
    if (!with_training_state_) throw std::logic_error("train_readout: model was saved without its training state");
    if (patterns_.empty()) throw std::logic_error("train_readout: no patterns loaded");
    w_out_ = solve_readout(gram_, cross_, cfg_.ridge);
    trained_ = true;
  }

  /// Autonomous run v_t = C tanh(W v + D v) from the pattern's last training
  /// state; returns outputs y_1..y_steps as columns.
  Mat recall(int pattern_index, int steps, Mat* states_out = nullptr) const {
    require_trained("recall");
    const auto& p = pattern(check_index(pattern_index));
    const Mat wd = w_ + d_;
    Vec v = p.last_state;
    Mat y(output_dim(), steps);
    if (states_out) states_out->resize(reservoir_size(), steps);
    for (int t = 0; t < steps; ++t) {
      v = p.conceptor.m * Vec((wd * v).array().tanh());
      y.col(t) = w_out_ * v;
      if (states_out) states_out->col(t) = v;
    }
    return y;
  }

  /// Input-driven run with the pattern's conceptor in the loop.
  Mat predict(int pattern_index, const Mat& inputs, const std::optional<Vec>& initial = std::nullopt) const {
    require_trained("predict");
    if (inputs.rows() != input_dim()) throw DimensionError("predict: input dimension mismatch");
    const auto& p = pattern(check_index(pattern_index));
    Vec v = initial ? *initial : p.last_state;
    Mat y(output_dim(), inputs.cols());
    for (Eigen::Index t = 0; t < inputs.cols(); ++t) {
      v = p.conceptor.m * Vec((w_ * v + w_in_ * inputs.col(t)).array().tanh());
      y.col(t) = w_out_ * v;
    }
    return y;
  }

  // Versioned little-endian binary format. Without the training state the
  // model still predicts and recalls but cannot load further patterns.
  void save(std::ostream& os, bool with_training_state = true) const {
    static_assert(std::endian::native == std::endian::little, "model files are little-endian");
    os.write(kMagic, sizeof kMagic);
    put<std::int32_t>(os, kFormatVersion);
    put<std::int32_t>(os, with_training_state ? 1 : 0);
    put<std::int32_t>(os, cfg_.reservoir_size);
    put<std::int32_t>(os, cfg_.context_dim);
    put<std::int32_t>(os, cfg_.forecast_horizon);
    put<std::int32_t>(os, cfg_.washout);
    put<std::int32_t>(os, cfg_.training_length);
    for (double x : {cfg_.spectral_radius, cfg_.density, cfg_.input_scale, cfg_.aperture, cfg_.ridge,
                     cfg_.quota_threshold}) {
      put<double>(os, x);
    }
    put<std::int32_t>(os, trained_ ? 1 : 0);
    write_mat(os, w_);
    write_mat(os, w_in_);
    write_mat(os, w_out_);
    write_mat(os, d_);
    write_mat(os, with_training_state ? r_sum_ : Mat(0, 0));
    write_mat(os, with_training_state ? gram_ : Mat(0, 0));
    write_mat(os, with_training_state ? cross_ : Mat(0, 0));
    put<std::int32_t>(os, static_cast<std::int32_t>(patterns_.size()));
    for (const auto& p : patterns_) {
      put<std::int32_t>(os, p.samples);
      put<double>(os, p.quota_before);
      put<double>(os, p.quota_after);
      put<double>(os, p.conceptor.aperture);
      write_mat(os, p.conceptor.m);
      write_mat(os, with_training_state && p.conceptor.r ? *p.conceptor.r : Mat(0, 0));
      write_mat(os, p.last_state);
    }
    if (!os) throw Error("model: write failed");
  }

  static EsnModel load(std::istream& is) {
    char magic[sizeof kMagic];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error("model: not a model file");
    const int version = get<std::int32_t>(is);
    if (version != kFormatVersion) throw Error("model: unsupported format version " + std::to_string(version));
    EsnModel m;
    m.with_training_state_ = get<std::int32_t>(is) != 0;
    m.cfg_.reservoir_size = get<std::int32_t>(is);
    m.cfg_.context_dim = get<std::int32_t>(is);
    m.cfg_.forecast_horizon = get<std::int32_t>(is);
    m.cfg_.washout = get<std::int32_t>(is);
    m.cfg_.training_length = get<std::int32_t>(is);
    m.cfg_.spectral_radius = get<double>(is);
    m.cfg_.density = get<double>(is);
    m.cfg_.input_scale = get<double>(is);
    m.cfg_.aperture = get<double>(is);
    m.cfg_.ridge = get<double>(is);
    m.cfg_.quota_threshold = get<double>(is);
    m.trained_ = get<std::int32_t>(is) != 0;
    m.w_ = read_mat(is);
    m.w_in_ = read_mat(is);
    m.w_out_ = read_mat(is);
    m.d_ = read_mat(is);
    m.r_sum_ = read_mat(is);
    m.gram_ = read_mat(is);
    m.cross_ = read_mat(is);
    const int count = get<std::int32_t>(is);
    if (count < 0) throw Error("model: negative pattern count");
    for (int i = 0; i < count; ++i) {
      PatternRecord p;
      p.samples = get<std::int32_t>(is);
      p.quota_before = get<double>(is);
      p.quota_after = get<double>(is);
      p.conceptor.aperture = get<double>(is);
      p.conceptor.m = read_mat(is);
      Mat rr = read_mat(is);
      if (rr.size() > 0) p.conceptor.r = std::move(rr);
      Mat last = read_mat(is);
      p.last_state = Eigen::Map<Vec>(last.data(), last.size());
      m.patterns_.push_back(std::move(p));
    }
    const auto n = m.w_.rows();
    bool ok = m.w_.cols() == n && m.w_in_.rows() == n && m.w_out_.cols() == n && m.d_.rows() == n &&
              m.d_.cols() == n && n == m.cfg_.reservoir_size;
    for (const auto& p : m.patterns_) ok = ok && p.conceptor.m.rows() == n && p.last_state.size() == n;
    if (m.with_training_state_) ok = ok && m.r_sum_.rows() == n && m.gram_.rows() == n && m.cross_.cols() == n;
    if (!ok) throw DimensionError("model: inconsistent matrix dimensions");
    return m;
  }

  friend bool operator==(const EsnModel& a, const EsnModel& b) {
    auto same = [](const Mat& x, const Mat& y) { return x.rows() == y.rows() && x.cols() == y.cols() && x == y; };
    if (!(a.cfg_ == b.cfg_) || a.trained_ != b.trained_ || a.patterns_.size() != b.patterns_.size()) return false;
    if (!same(a.w_, b.w_) || !same(a.w_in_, b.w_in_) || !same(a.w_out_, b.w_out_) || !same(a.d_, b.d_) ||
        !same(a.r_sum_, b.r_sum_) || !same(a.gram_, b.gram_) || !same(a.cross_, b.cross_)) {
      return false;
    }
    for (std::size_t i = 0; i < a.patterns_.size(); ++i) {
      const auto& p = a.patterns_[i];
      const auto& q = b.patterns_[i];
      if (!same(p.conceptor.m, q.conceptor.m) || !same(p.last_state, q.last_state) || p.samples != q.samples) {
        return false;
      }
    }
    return true;
  }

 private:
  void require_trained(const char* what) const {
    if (!trained_) throw std::logic_error(std::string(what) + ": readout not trained");
  }
  int check_index(int i) const {
    if (i < 0 || i >= pattern_count()) throw std::out_of_range("pattern index out of range");
    return i;
  }

  static constexpr char kMagic[8] = {'u', 'a', 'v', 'c', 'e', 's', 'n', '\0'};

  template <class T>
  static void put(std::ostream& os, T x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof x);
  }
  template <class T>
  static T get(std::istream& is) {
    T x{};
    is.read(reinterpret_cast<char*>(&x), sizeof x);
    if (!is) throw Error("model: unexpected end of file");
    return x;
  }
  static void write_mat(std::ostream& os, const Mat& m) {
    put<std::int64_t>(os, m.rows());
    put<std::int64_t>(os, m.cols());
    os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  static Mat read_mat(std::istream& is) {
    const auto rows = get<std::int64_t>(is), cols = get<std::int64_t>(is);
    if (rows < 0 || cols < 0 || rows > (1 << 20) || cols > (1 << 20)) throw Error("model: bad matrix size");
    Mat m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!is) throw Error("model: unexpected end of file");
    return m;
  }

  EsnConfig cfg_;
  Mat w_, w_in_, w_out_, d_;
  Mat r_sum_;  // sum of loaded pattern correlations (their OR)
  Mat gram_;   // sum of V V^T over loaded patterns
  Mat cross_;  // sum of Y V^T over loaded patterns
  std::vector<PatternRecord> patterns_;
  bool trained_ = false;
  bool with_training_state_ = true;
};

// ---------------------------------------------------------------------------
// Task encodings

enum class DayType { Weekday = 0, Weekend = 1 };

inline DayType day_type(int day_index) { return day_index % 7 < 5 ? DayType::Weekday : DayType::Weekend; }

/// Demographic profile mapped onto [-1, 1].
inline double demographic_code(const Context& c) {
  const int index = (c.occupation * 4 + c.age_group) * 2 + c.gender;
  return 2.0 * index / 31.0 - 1.0;
}

/// Context vector: hour of day on the unit circle, weekday flag, demographics.
inline Vec encode_context(double hour, DayType day, const Context& c) {
  const double angle = 2.0 * std::numbers::pi * hour / 24.0;
  Vec x(4);
  x << std::sin(angle), std::cos(angle), day == DayType::Weekday ? 1.0 : -1.0, demographic_code(c);
  return x;
}

/// Inputs and targets of one day, one column per step.
struct DaySample {
  DayType type = DayType::Weekday;
  Mat inputs;
  Mat targets;
};

/// One conceptor per day type. Days of the same type are concatenated in
/// order and loaded as one pattern; weekdays load first.
class DayTypePredictor {
 public:
  DayTypePredictor() = default;
  explicit DayTypePredictor(EsnModel model) : model_(std::move(model)) {}

  const EsnModel& model() const { return model_; }
  EsnModel& model() { return model_; }

  /// Loads every day type present and fits the readout.
  void train(const std::vector<DaySample>& days) {
    for (DayType type : {DayType::Weekday, DayType::Weekend}) {
      std::vector<const DaySample*> chosen;
      Eigen::Index cols = 0;
      for (const auto& d : days) {
        if (d.type != type) continue;
        chosen.push_back(&d);
        cols += d.inputs.cols();
      }
      if (chosen.empty()) continue;
      Mat in(model_.input_dim(), cols), out(model_.output_dim(), cols);
      Eigen::Index at = 0;
      for (const auto* d : chosen) {
        in.middleCols(at, d->inputs.cols()) = d->inputs;
        out.middleCols(at, d->targets.cols()) = d->targets;
        at += d->inputs.cols();
      }
      model_.load_pattern(in, out);
      pattern_of_[static_cast<int>(type)] = model_.pattern_count() - 1;
    }
    model_.train_readout();
  }

  int pattern_for(DayType type) const {
    const int own = pattern_of_[static_cast<int>(type)];
    if (own >= 0) return own;
    const int other = pattern_of_[1 - static_cast<int>(type)];
    if (other >= 0) return other;
    throw std::logic_error("DayTypePredictor: not trained");
  }

  /// Readout for every input column, driven from the pattern's last training
  /// state; leading columns act as warm-up history.
  Mat run(DayType type, const Mat& inputs) const { return model_.predict(pattern_for(type), inputs); }

  void save(std::ostream& os, bool with_training_state = true) const {
    os.write(reinterpret_cast<const char*>(pattern_of_), sizeof pattern_of_);
    model_.save(os, with_training_state);
  }
  static DayTypePredictor load(std::istream& is) {
    DayTypePredictor p;
    is.read(reinterpret_cast<char*>(p.pattern_of_), sizeof p.pattern_of_);
    if (!is) throw Error("model: unexpected end of file");
    p.model_ = EsnModel::load(is);
    for (int i : p.pattern_of_) {
      if (i < -1 || i >= p.model_.pattern_count()) throw Error("model: bad day-type index");
    }
    return p;
  }

 private:
  EsnModel model_;
  std::int32_t pattern_of_[2] = {-1, -1};
};

/// Readout clipped at zero then normalised; uniform when nothing is left.
inline Vec to_distribution(const Vec& raw) {
  Vec p = raw.cwiseMax(0.0);
  const double s = p.sum();
  if (!(s > tol::kTiny) || !std::isfinite(s)) return Vec::Constant(raw.size(), 1.0 / static_cast<double>(raw.size()));
  return p / s;
}

/// Request distribution for the context in the final input column.
inline Vec predict_request_distribution(const DayTypePredictor& p, DayType type, const Mat& inputs) {
  const Mat y = p.run(type, inputs);
  return to_distribution(y.col(y.cols() - 1));
}

/// Mobility input: context followed by the position scaled by the area radius.
inline Vec encode_mobility(const Vec& context, const Point2& position, double area_radius_m) {
  Vec x(context.size() + 2);
  x << context, position.x / area_radius_m, position.y / area_radius_m;
  return x;
}

/// Stacked (x, y) targets for the next `horizon` positions, scaled by the radius.
inline Vec encode_future(const std::vector<Point2>& future, double area_radius_m) {
  Vec y(2 * static_cast<Eigen::Index>(future.size()));
  for (std::size_t k = 0; k < future.size(); ++k) {
    y(2 * static_cast<Eigen::Index>(k)) = future[k].x / area_radius_m;
    y(2 * static_cast<Eigen::Index>(k) + 1) = future[k].y / area_radius_m;
  }
  return y;
}

inline Point2 clamp_to_disk(Point2 p, double radius) {
  const double r = std::hypot(p.x, p.y);
  if (r > radius) {
    p.x *= radius / r;
    p.y *= radius / r;
  }
  return p;
}

/// Next positions after the final input column, clamped to the area disk.
inline std::vector<Point2> predict_locations(const DayTypePredictor& p, DayType type, const Mat& inputs,
                                             double area_radius_m) {
  const Mat y = p.run(type, inputs);
  const Vec last = y.col(y.cols() - 1);
  std::vector<Point2> out(static_cast<std::size_t>(last.size() / 2));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out[k] = clamp_to_disk({last(2 * i) * area_radius_m, last(2 * i + 1) * area_radius_m}, area_radius_m);
  }
  return out;
}

}  // namespace uavcache

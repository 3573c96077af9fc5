#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vidfec/rng.hpp"

namespace vidfec {

// Two-state Gilbert-Elliot loss model. pg and pb are per-state LOSS
// probabilities (loss in good state is possible), k transitions good -> bad,
// r transitions bad -> good.
struct GeParams {
  double pg = 0.0;
  double pb = 1.0;
  double k = 0.1;
  double r = 0.4;

  bool operator==(const GeParams&) const = default;
};

inline void validate(const GeParams& p) {
  if (p.pg < 0 || p.pg > 1 || p.pb < 0 || p.pb > 1)
    throw std::invalid_argument("GeParams: loss probabilities must be in [0, 1]");
  if (p.k <= 0 || p.k >= 1 || p.r <= 0 || p.r >= 1)
    throw std::invalid_argument("GeParams: transition probabilities must be in (0, 1)");
}

// Stationary occupancy (phi_good, phi_bad) = (r/(r+k), k/(r+k)).
inline std::pair<double, double> ge_steady_state(double k, double r) {
  if (k <= 0 || k >= 1 || r <= 0 || r >= 1)
    throw std::invalid_argument("ge_steady_state: transition probabilities must be in (0, 1)");
  return {r / (r + k), k / (r + k)};
}

// Long-run loss probability pg*phi_good + pb*phi_bad.
inline double ge_avg_loss(double pg, double pb, double k, double r) {
  validate(GeParams{pg, pb, k, r});
  const auto [phi_g, phi_b] = ge_steady_state(k, r);
  return pg * phi_g + pb * phi_b;
}

// Simplified variant: no loss in good, certain loss in bad.
struct SimplifiedGeParams {
  double p_gb = 0.05;  // good -> bad
  double p_bg = 0.2;   // bad -> good

  bool operator==(const SimplifiedGeParams&) const = default;
};

inline void validate(const SimplifiedGeParams& p) {
  if (p.p_gb <= 0 || p.p_gb >= 1 || p.p_bg <= 0 || p.p_bg >= 1)
    throw std::invalid_argument("SimplifiedGeParams: transition probabilities must be in (0, 1)");
}

// The loss-rate formula the reference mechanisms print and feed to their
// predictors: p_bg / (p_bg + p_gb). Note this is the GOOD-state occupancy,
// not the fraction of packets actually lost; it matches the published
// computation verbatim. Use simplified_bad_occupancy for the true rate.
inline double simplified_plr(double p_gb, double p_bg) {
  validate(SimplifiedGeParams{p_gb, p_bg});
  return p_bg / (p_bg + p_gb);
}

// True long-run loss fraction of the simplified model (bad-state occupancy).
inline double simplified_bad_occupancy(double p_gb, double p_bg) {
  validate(SimplifiedGeParams{p_gb, p_bg});
  return p_gb / (p_gb + p_bg);
}

enum class GeState { Good, Bad };

// Full-model channel. Each step draws the loss from the current state's loss
// probability, then draws the state transition (two rng draws per packet).
class GilbertElliotChannel {
 public:
  GilbertElliotChannel(const GeParams& params, GeState initial = GeState::Good)
      : params_(params), state_(initial) {
    validate(params_);
  }

  // Returns true when the packet is delivered.
  bool step(Rng& rng) {
    const double loss_p = state_ == GeState::Good ? params_.pg : params_.pb;
    const bool delivered = !rng.bernoulli(loss_p);
    const double flip_p = state_ == GeState::Good ? params_.k : params_.r;
    if (rng.bernoulli(flip_p)) state_ = state_ == GeState::Good ? GeState::Bad : GeState::Good;
    return delivered;
  }

  GeState state() const { return state_; }

 private:
  GeParams params_;
  GeState state_;
};

// Simplified-model channel: delivery is determined by the state (good
// delivers, bad loses), then the transition is drawn (one rng draw).
class SimplifiedGeChannel {
 public:
  SimplifiedGeChannel(const SimplifiedGeParams& params, GeState initial = GeState::Good)
      : params_(params), state_(initial) {
    validate(params_);
  }

  bool step(Rng& rng) {
    const bool delivered = state_ == GeState::Good;
    const double flip_p = state_ == GeState::Good ? params_.p_gb : params_.p_bg;
    if (rng.bernoulli(flip_p)) state_ = state_ == GeState::Good ? GeState::Bad : GeState::Good;
    return delivered;
  }

  GeState state() const { return state_; }

 private:
  SimplifiedGeParams params_;
  GeState state_;
};

// Run-length view of a delivered/lost flag sequence. Runs alternate; together
// with first_run_delivered the original trace is reconstructible.
struct GapStats {
  std::vector<std::uint64_t> good_gaps;
  std::vector<std::uint64_t> bad_gaps;
  std::uint64_t total_packets = 0;
  bool first_run_delivered = true;

  double mean_good() const {
    if (good_gaps.empty()) return 0.0;
    double s = 0;
    for (auto g : good_gaps) s += static_cast<double>(g);
    return s / static_cast<double>(good_gaps.size());
  }
  double mean_bad() const {
    if (bad_gaps.empty()) return 0.0;
    double s = 0;
    for (auto b : bad_gaps) s += static_cast<double>(b);
    return s / static_cast<double>(bad_gaps.size());
  }
};

inline GapStats gap_stats(const std::vector<bool>& delivered) {
  GapStats stats;
  stats.total_packets = delivered.size();
  if (delivered.empty()) return stats;
  stats.first_run_delivered = delivered[0];
  bool current = delivered[0];
  std::uint64_t run = 0;
  auto flush = [&] {
    if (current)
      stats.good_gaps.push_back(run);
    else
      stats.bad_gaps.push_back(run);
  };
  for (bool d : delivered) {
    if (d == current) {
      ++run;
    } else {
      flush();
      current = d;
      run = 1;
    }
  }
  flush();
  return stats;
}

// Inverse of gap_stats; used by tests and by trace tooling.
inline std::vector<bool> expand_gap_stats(const GapStats& stats) {
  std::vector<bool> out;
  out.reserve(stats.total_packets);
  std::size_t gi = 0, bi = 0;
  bool good_turn = stats.first_run_delivered;
  while (gi < stats.good_gaps.size() || bi < stats.bad_gaps.size()) {
    if (good_turn && gi < stats.good_gaps.size())
      out.insert(out.end(), stats.good_gaps[gi++], true);
    else if (!good_turn && bi < stats.bad_gaps.size())
      out.insert(out.end(), stats.bad_gaps[bi++], false);
    good_turn = !good_turn;
  }
  return out;
}

// Predicted error pattern of the next FEC block, ordered by severity.
enum class ErrorClass { NoError, SingleSharedError, SingleError, SharedMultipleErrors, MultipleErrors };

inline const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::NoError: return "NE";
    case ErrorClass::SingleSharedError: return "SSE";
    case ErrorClass::SingleError: return "SE";
    case ErrorClass::SharedMultipleErrors: return "SME";
    case ErrorClass::MultipleErrors: return "ME";
  }
  return "?";
}

// Predicts the error class of the next block from observed gap statistics.
// With g/b the mean good/bad gap, e = block/(g+b) is the expected number of
// bad-gap onsets in a block and r = block mod (g+b) the leftover after the
// full predicted cycles; a predicted gap that cannot complete inside the
// leftover (b >= r) straddles the block boundary and is "shared". The full
// table is documented in docs/error-prediction.md.
inline ErrorClass predict_error_class(const GapStats& stats, int block_size = 10) {
  if (block_size < 1) throw std::invalid_argument("predict_error_class: block_size must be >= 1");
  const double b = stats.mean_bad();
  if (b <= 0.0) return ErrorClass::NoError;
  const double g = stats.mean_good();
  const double cycle = g + b;
  const double e = static_cast<double>(block_size) / cycle;
  if (e < 0.5) return ErrorClass::NoError;
  const double leftover = static_cast<double>(block_size) - std::floor(static_cast<double>(block_size) / cycle) * cycle;
  const bool straddle = b >= leftover - 1e-12;
  if (e < 1.5) return straddle ? ErrorClass::SingleSharedError : ErrorClass::SingleError;
  return straddle ? ErrorClass::SharedMultipleErrors : ErrorClass::MultipleErrors;
}

// Loss-trace file: '1' = delivered, '0' = lost, a line feed every 80
// characters and after the final partial line.
inline void save_loss_trace(const std::vector<bool>& delivered, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_loss_trace: cannot open " + path);
  for (std::size_t i = 0; i < delivered.size(); ++i) {
    out.put(delivered[i] ? '1' : '0');
    if ((i + 1) % 80 == 0) out.put('\n');
  }
  if (delivered.size() % 80 != 0) out.put('\n');
  if (!out) throw std::runtime_error("save_loss_trace: write failed for " + path);
}

inline std::vector<bool> load_loss_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_loss_trace: cannot open " + path);
  std::vector<bool> out;
  char c;
  while (in.get(c)) {
    if (c == '1')
      out.push_back(true);
    else if (c == '0')
      out.push_back(false);
    else if (c == '\n' || c == '\r' || c == ' ' || c == '\t')
      continue;
    else
      throw std::runtime_error("load_loss_trace: unexpected character in " + path);
  }
  return out;
}

// Replays a recorded loss trace as a channel; throws when stepped past the
// end of the recording.
class ReplayChannel {
 public:
  explicit ReplayChannel(std::vector<bool> delivered) : flags_(std::move(delivered)) {}

  bool step() {
    if (pos_ >= flags_.size()) throw std::runtime_error("ReplayChannel: trace exhausted");
    return flags_[pos_++];
  }

  std::size_t remaining() const { return flags_.size() - pos_; }

 private:
  std::vector<bool> flags_;
  std::size_t pos_ = 0;
};

}  // namespace vidfec

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vidfec/channel.hpp"
#include "vidfec/fec.hpp"
#include "vidfec/mechanisms.hpp"
#include "vidfec/motion.hpp"
#include "vidfec/netstate.hpp"
#include "vidfec/qoe.hpp"
#include "vidfec/rng.hpp"
#include "vidfec/rnn.hpp"
#include "vidfec/video.hpp"

// Scenario harness: one config describes a video trace, a protection
// mechanism, a loss channel, and the network telemetry; the runner transmits
// every frame packet by packet and reports QoE rows. Everything downstream of
// the config is deterministic in (config, seed).

namespace vidfec {

// --- Configuration ------------------------------------------------------------
//
// Sectioned key=value text (see docs/config-format.md). Every struct carries
// a usable default so a minimal config can be a single [mechanism] line.

struct TraceConfig {
  std::string source = "synth";  // "synth" | "file"
  std::string path;              // trace CSV, required iff source == "file"
  SynthesisSpec synth;

  bool operator==(const TraceConfig&) const = default;
};

struct MechanismConfig {
  MechanismKind kind;
  ViewFecParams viewfec;
};

struct ChannelConfig {
  std::string kind = "simplified_ge";  // "ge" | "simplified_ge" | "replay"
  GeParams ge;
  SimplifiedGeParams simplified;
  std::string replay_path;  // loss-trace file, required iff kind == "replay"

  bool operator==(const ChannelConfig&) const = default;
};

struct NetConfig {
  std::string positions_path;      // node CSV; when set it supplies density (and SNR if recorded)
  double density_per_km2 = 100.0;  // fallback when no positions or a degenerate hull
  double distance_m = 400.0;
  double snr_db = 15.0;

  bool operator==(const NetConfig&) const = default;
};

struct RunConfig {
  std::uint64_t seed = 1;
  int repetitions = 1;
  std::uint64_t payload_bytes = 1000;
  int block_packets = 10;  // source shards per FEC block
  int plr_window = 500;    // packets feeding the loss-rate estimate

  bool operator==(const RunConfig&) const = default;
};

struct ScenarioConfig {
  TraceConfig trace;
  MechanismConfig mechanism;
  ChannelConfig channel;
  NetConfig net;
  RunConfig run;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& field, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw std::invalid_argument(field + ": not a number ('" + value + "')");
  return v;
}

inline long long parse_int(const std::string& field, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0')
    throw std::invalid_argument(field + ": not an integer ('" + value + "')");
  return v;
}

inline std::uint64_t parse_u64(const std::string& field, const std::string& value) {
  const long long v = parse_int(field, value);
  if (v < 0) throw std::invalid_argument(field + ": must be >= 0");
  return static_cast<std::uint64_t>(v);
}

inline MotionProfile motion_profile_from_string(const std::string& field, const std::string& value) {
  if (value == "low") return MotionProfile::Low;
  if (value == "medium") return MotionProfile::Medium;
  if (value == "high") return MotionProfile::High;
  throw std::invalid_argument(field + ": expected low|medium|high ('" + value + "')");
}

}  // namespace detail

// Parses the sectioned key=value format. Unknown sections or keys, malformed
// lines, and unparseable numbers throw immediately with the offending
// [section].key path; semantic cross-field checks live in validate().
inline ScenarioConfig parse_scenario_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": unterminated section header");
      section = t.substr(1, t.size() - 2);
      if (section != "trace" && section != "mechanism" && section != "channel" && section != "net" &&
          section != "run")
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": key '" + key +
                                  "' before any [section]");
    const std::string field = "[" + section + "]." + key;

    if (section == "trace") {
      if (key == "source") cfg.trace.source = value;
      else if (key == "path") cfg.trace.path = value;
      else if (key == "gops") cfg.trace.synth.gop_count = static_cast<int>(detail::parse_int(field, value));
      else if (key == "n_ratio") cfg.trace.synth.gop.n_ratio = static_cast<int>(detail::parse_int(field, value));
      else if (key == "m_ratio") cfg.trace.synth.gop.m_ratio = static_cast<int>(detail::parse_int(field, value));
      else if (key == "motion") cfg.trace.synth.motion = detail::motion_profile_from_string(field, value);
      else if (key == "width") cfg.trace.synth.width = static_cast<int>(detail::parse_int(field, value));
      else if (key == "height") cfg.trace.synth.height = static_cast<int>(detail::parse_int(field, value));
      else if (key == "fps") cfg.trace.synth.fps = detail::parse_double(field, value);
      else if (key == "size_i") cfg.trace.synth.size_i = detail::parse_u64(field, value);
      else if (key == "size_p") cfg.trace.synth.size_p = detail::parse_u64(field, value);
      else if (key == "size_b") cfg.trace.synth.size_b = detail::parse_u64(field, value);
      else throw std::invalid_argument(field + ": unknown key");
    } else if (section == "mechanism") {
      if (key == "kind") cfg.mechanism.kind.id = mechanism_from_string(value);
      else if (key == "ratio") cfg.mechanism.kind.ratio = detail::parse_double(field, value);
      else if (key == "ratio_i") cfg.mechanism.kind.ratio_i = detail::parse_double(field, value);
      else if (key == "ratio_p") cfg.mechanism.kind.ratio_p = detail::parse_double(field, value);
      else if (key == "gamma_i") cfg.mechanism.viewfec.gamma_i = detail::parse_double(field, value);
      else if (key == "gamma_p") cfg.mechanism.viewfec.gamma_p = detail::parse_double(field, value);
      else if (key == "gamma_b") cfg.mechanism.viewfec.gamma_b = detail::parse_double(field, value);
      else if (key == "alpha_high") cfg.mechanism.viewfec.alpha_high = detail::parse_double(field, value);
      else if (key == "alpha_medium") cfg.mechanism.viewfec.alpha_medium = detail::parse_double(field, value);
      else if (key == "alpha_low") cfg.mechanism.viewfec.alpha_low = detail::parse_double(field, value);
      else throw std::invalid_argument(field + ": unknown key");
    } else if (section == "channel") {
      if (key == "kind") cfg.channel.kind = value;
      else if (key == "pg") cfg.channel.ge.pg = detail::parse_double(field, value);
      else if (key == "pb") cfg.channel.ge.pb = detail::parse_double(field, value);
      else if (key == "k") cfg.channel.ge.k = detail::parse_double(field, value);
      else if (key == "r") cfg.channel.ge.r = detail::parse_double(field, value);
      else if (key == "p_gb") cfg.channel.simplified.p_gb = detail::parse_double(field, value);
      else if (key == "p_bg") cfg.channel.simplified.p_bg = detail::parse_double(field, value);
      else if (key == "path") cfg.channel.replay_path = value;
      else throw std::invalid_argument(field + ": unknown key");
    } else if (section == "net") {
      if (key == "positions") cfg.net.positions_path = value;
      else if (key == "density") cfg.net.density_per_km2 = detail::parse_double(field, value);
      else if (key == "distance") cfg.net.distance_m = detail::parse_double(field, value);
      else if (key == "snr") cfg.net.snr_db = detail::parse_double(field, value);
      else throw std::invalid_argument(field + ": unknown key");
    } else {  // run
      if (key == "seed") cfg.run.seed = detail::parse_u64(field, value);
      else if (key == "repetitions") cfg.run.repetitions = static_cast<int>(detail::parse_int(field, value));
      else if (key == "payload") cfg.run.payload_bytes = detail::parse_u64(field, value);
      else if (key == "block_packets") cfg.run.block_packets = static_cast<int>(detail::parse_int(field, value));
      else if (key == "plr_window") cfg.run.plr_window = static_cast<int>(detail::parse_int(field, value));
      else throw std::invalid_argument(field + ": unknown key");
    }
  }
  return cfg;
}

// Semantic validation. Collects every violation so a broken config reports
// all offending fields at once.
inline std::vector<std::string> scenario_config_errors(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  auto guard = [&errors](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      errors.push_back(std::string(field) + ": " + e.what());
    }
  };

  if (cfg.trace.source != "synth" && cfg.trace.source != "file")
    errors.push_back("[trace].source: expected synth|file ('" + cfg.trace.source + "')");
  if (cfg.trace.source == "file" && cfg.trace.path.empty())
    errors.push_back("[trace].path: required when source = file");
  if (cfg.trace.source == "synth" && !cfg.trace.path.empty())
    errors.push_back("[trace].path: set but source = synth; pick one trace source");
  if (cfg.trace.source == "synth") {
    if (cfg.trace.synth.gop_count < 1) errors.push_back("[trace].gops: must be >= 1");
    if (cfg.trace.synth.gop.n_ratio < 1) errors.push_back("[trace].n_ratio: must be >= 1");
    if (cfg.trace.synth.gop.m_ratio < 1) errors.push_back("[trace].m_ratio: must be >= 1");
    if (cfg.trace.synth.width < 16 || cfg.trace.synth.height < 16)
      errors.push_back("[trace].width/height: frames must be at least 16x16");
    if (!(cfg.trace.synth.fps > 0.0)) errors.push_back("[trace].fps: must be > 0");
  }

  guard("[mechanism]", [&] { cfg.mechanism.kind.validate(); });
  guard("[mechanism]", [&] { cfg.mechanism.viewfec.validate(); });

  if (cfg.channel.kind == "ge") {
    guard("[channel]", [&] { validate(cfg.channel.ge); });
  } else if (cfg.channel.kind == "simplified_ge") {
    guard("[channel]", [&] { validate(cfg.channel.simplified); });
  } else if (cfg.channel.kind == "replay") {
    if (cfg.channel.replay_path.empty()) errors.push_back("[channel].path: required when kind = replay");
  } else {
    errors.push_back("[channel].kind: expected ge|simplified_ge|replay ('" + cfg.channel.kind + "')");
  }
  if (cfg.channel.kind != "replay" && !cfg.channel.replay_path.empty())
    errors.push_back("[channel].path: set but kind is not replay; pick one channel source");

  if (cfg.net.positions_path.empty() && !(cfg.net.density_per_km2 > 0.0))
    errors.push_back("[net].density: must be > 0 when no positions file is given");
  if (cfg.net.distance_m < 0.0) errors.push_back("[net].distance: must be >= 0");

  if (cfg.run.repetitions < 1) errors.push_back("[run].repetitions: must be >= 1");
  if (cfg.run.payload_bytes < 1) errors.push_back("[run].payload: must be >= 1");
  if (cfg.run.block_packets < 1 || cfg.run.block_packets > 128)
    errors.push_back("[run].block_packets: must lie in [1, 128]");
  if (cfg.run.plr_window < 1) errors.push_back("[run].plr_window: must be >= 1");
  return errors;
}

inline void validate(const ScenarioConfig& cfg) {
  const auto errors = scenario_config_errors(cfg);
  if (errors.empty()) return;
  std::string msg = "scenario config:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

inline ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario_config: cannot open " + path);
  ScenarioConfig cfg = parse_scenario_config(in);
  validate(cfg);
  return cfg;
}

// --- Assets ---------------------------------------------------------------------

struct ScenarioAssets {
  VideoTrace trace;
  std::vector<PixelFrame> frames;
};

// Pixel content for traces that carry only statistics: the synthesized
// texture scrolled by a per-frame step that grows with the trace's mean
// motion-vector length. An approximation, but deterministic and
// motion-monotone, which is all the QoE stage needs.
inline std::vector<PixelFrame> render_frames(const VideoTrace& trace) {
  if (trace.width < 1 || trace.height < 1)
    throw std::invalid_argument("render_frames: trace has no frame dimensions");
  std::vector<PixelFrame> out;
  out.reserve(trace.frames.size());
  int shift = 0;
  for (const auto& f : trace.frames) {
    const double mean_len =
        f.mv_count > 0 ? f.mv_total_distance / static_cast<double>(f.mv_count) : 0.0;
    shift += 1 + static_cast<int>(std::lround(std::min(mean_len, 2048.0) / 256.0));
    PixelFrame px(trace.width, trace.height);
    for (int y = 0; y < trace.height; ++y)
      for (int x = 0; x < trace.width; ++x) px.set(x, y, detail::texture(x, y, shift));
    out.push_back(std::move(px));
  }
  return out;
}

inline ScenarioAssets materialize_assets(const ScenarioConfig& cfg) {
  if (cfg.trace.source == "synth") {
    SynthesizedVideo v = synthesize_video(cfg.trace.synth, cfg.run.seed);
    return {std::move(v.trace), std::move(v.frames)};
  }
  VideoTrace trace = load_trace(cfg.trace.path);
  auto frames = render_frames(trace);
  return {std::move(trace), std::move(frames)};
}

// Crisp network telemetry after resolving the optional positions file.
struct ResolvedNet {
  double density_per_km2 = 0.0;
  double distance_m = 0.0;
  double snr_db = 0.0;
};

inline ResolvedNet resolve_net(const NetConfig& net) {
  ResolvedNet r{net.density_per_km2, net.distance_m, net.snr_db};
  if (net.positions_path.empty()) return r;
  const auto nodes = load_positions_csv(net.positions_path);
  if (const auto d = density_per_km2(to_points(nodes))) r.density_per_km2 = *d;
  double snr_sum = 0.0;
  std::size_t snr_n = 0;
  for (const auto& n : nodes)
    if (n.snr_db) {
      snr_sum += *n.snr_db;
      ++snr_n;
    }
  if (snr_n > 0) r.snr_db = snr_sum / static_cast<double>(snr_n);
  return r;
}

// --- Channel dispatch ------------------------------------------------------------

// One loss process per repetition. The stochastic models consume a fixed
// number of rng draws per packet, so two runs with the same seed see the
// same loss realization no matter how many packets each sends: common random
// numbers across mechanism rows.
class ScenarioChannel {
 public:
  explicit ScenarioChannel(const ChannelConfig& cfg) {
    if (cfg.kind == "ge") {
      nominal_loss_pct_ = ge_avg_loss(cfg.ge.pg, cfg.ge.pb, cfg.ge.k, cfg.ge.r) * 100.0;
      impl_.emplace<GilbertElliotChannel>(cfg.ge);
    } else if (cfg.kind == "simplified_ge") {
      nominal_loss_pct_ = simplified_bad_occupancy(cfg.simplified.p_gb, cfg.simplified.p_bg) * 100.0;
      impl_.emplace<SimplifiedGeChannel>(cfg.simplified);
    } else if (cfg.kind == "replay") {
      auto flags = load_loss_trace(cfg.replay_path);
      if (flags.empty()) throw std::runtime_error("ScenarioChannel: empty loss trace " + cfg.replay_path);
      std::size_t lost = 0;
      for (const bool d : flags)
        if (!d) ++lost;
      nominal_loss_pct_ = 100.0 * static_cast<double>(lost) / static_cast<double>(flags.size());
      impl_.emplace<ReplayChannel>(std::move(flags));
    } else {
      throw std::invalid_argument("ScenarioChannel: unknown kind '" + cfg.kind + "'");
    }
  }

  bool step(Rng& rng) {
    if (auto* ge = std::get_if<GilbertElliotChannel>(&impl_)) return ge->step(rng);
    if (auto* s = std::get_if<SimplifiedGeChannel>(&impl_)) return s->step(rng);
    if (auto* r = std::get_if<ReplayChannel>(&impl_)) return r->step();
    throw std::logic_error("ScenarioChannel: stepped before construction");
  }

  // Long-run loss percentage of the configured process (measured, for replay).
  double nominal_loss_pct() const { return nominal_loss_pct_; }

 private:
  std::variant<std::monostate, GilbertElliotChannel, SimplifiedGeChannel, ReplayChannel> impl_;
  double nominal_loss_pct_ = 0.0;
};

// --- Mechanism preparation ---------------------------------------------------------

namespace detail {

// Training set for the neural scorer, labeled by the membership classifier
// over each GoP's mean motion so the learned ordering matches the crisp rule.
inline std::vector<LabeledSample> trace_training_set(const VideoTrace& trace) {
  std::vector<LabeledSample> samples;
  const int len = trace.gop.length();
  const std::size_t n = trace.frames.size();
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(len)) {
    const std::size_t end = std::min(start + static_cast<std::size_t>(len), n);
    std::vector<double> i_sizes, p_sizes, b_sizes;
    double motion_sum = 0.0;
    std::size_t motion_n = 0;
    for (std::size_t f = start; f < end; ++f) {
      const auto& fr = trace.frames[f];
      if (fr.kind == FrameType::I) i_sizes.push_back(static_cast<double>(fr.size_bytes));
      if (fr.kind == FrameType::P) p_sizes.push_back(static_cast<double>(fr.size_bytes));
      if (fr.kind == FrameType::B) b_sizes.push_back(static_cast<double>(fr.size_bytes));
      if (fr.mv_count > 0) {
        motion_sum += fr.mv_total_distance;
        ++motion_n;
      }
    }
    const double gop_motion = motion_n > 0 ? motion_sum / static_cast<double>(motion_n) : 0.0;
    const int cls = static_cast<int>(classify_motion_distance(gop_motion));
    const double label = (2.0 * cls + 1.0) / 6.0;  // class band centers 1/6, 1/2, 5/6
    const FrameSizeShares shares =
        normalize_frame_sizes(i_sizes.empty() ? nullptr : &i_sizes, p_sizes.empty() ? nullptr : &p_sizes,
                              b_sizes.empty() ? nullptr : &b_sizes);
    for (std::size_t f = start; f < end; ++f) {
      const auto& fr = trace.frames[f];
      if (fr.kind == FrameType::B) continue;  // never protected, never scored
      const double code = fr.kind == FrameType::I ? 1.0 : 0.5;
      const double nhat = fr.kind == FrameType::I ? shares.i : shares.p;
      const double ratio =
          fr.mv_total_distance > 0.0 ? mv_ratio(static_cast<double>(fr.mv_count), fr.mv_total_distance) : 0.0;
      samples.push_back({{code, nhat, ratio}, label});
    }
  }
  return samples;
}

// Distinct stream from the channel seeds so mechanism randomness (ant tours,
// scorer initialization) never perturbs the loss realization.
constexpr std::uint64_t kMechanismSeedSalt = 0x5eedf0c5a17ULL;

}  // namespace detail

// Engine bundle for one scenario. The neural scorer is trained on the trace
// itself (GoP-motion labels); everything else ships with built-in defaults.
inline MechanismEngines prepare_engines(const ScenarioConfig& cfg, const VideoTrace& trace) {
  MechanismEngines engines;
  if (cfg.mechanism.kind.id == MechanismId::NeuralFec) {
    Rng init_rng(cfg.run.seed ^ detail::kMechanismSeedSalt);
    RnnModel model(RnnTopology(3), init_rng);
    train(model, detail::trace_training_set(trace));
    engines.rnn = std::move(model);
  }
  return engines;
}

// --- Simulation core -----------------------------------------------------------------

namespace detail {

// Deterministic source payload, independent of every rng stream.
inline std::uint8_t payload_byte(std::uint64_t frame, int packet, std::uint64_t offset) {
  return static_cast<std::uint8_t>(frame * 131 + static_cast<std::uint64_t>(packet) * 31 + offset);
}

struct RepOutcome {
  std::vector<bool> frame_lost;
  std::uint64_t source_bytes = 0;
  std::uint64_t parity_bytes = 0;
  double nominal_loss_pct = 0.0;
};

// Transmits the whole trace once: per frame decide -> build blocks -> encode
// -> channel per packet -> decode. The receiver-side packet log feeds the
// loss-rate window and the error-class predictor between blocks, so adaptive
// mechanisms see the channel they are actually on.
inline RepOutcome run_repetition(const ScenarioConfig& cfg, const VideoTrace& trace,
                                 const MechanismEngines& engines, const ResolvedNet& net, int rep) {
  const std::uint64_t rep_seed = cfg.run.seed + static_cast<std::uint64_t>(rep);
  Rng channel_rng(rep_seed);
  Rng mech_rng(rep_seed ^ kMechanismSeedSalt);
  ScenarioChannel channel(cfg.channel);
  WindowedPlr wplr(cfg.run.plr_window);
  std::vector<bool> delivered_log;

  RepOutcome out;
  out.nominal_loss_pct = channel.nominal_loss_pct();
  out.frame_lost.assign(trace.frames.size(), false);

  const int len = trace.gop.length();
  const std::size_t n = trace.frames.size();
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(len)) {
    const std::size_t end = std::min(start + static_cast<std::size_t>(len), n);

    std::vector<double> i_sizes, p_sizes, b_sizes;
    double motion_sum = 0.0;
    std::size_t motion_n = 0;
    for (std::size_t f = start; f < end; ++f) {
      const auto& fr = trace.frames[f];
      if (fr.kind == FrameType::I) i_sizes.push_back(static_cast<double>(fr.size_bytes));
      if (fr.kind == FrameType::P) p_sizes.push_back(static_cast<double>(fr.size_bytes));
      if (fr.kind == FrameType::B) b_sizes.push_back(static_cast<double>(fr.size_bytes));
      if (fr.mv_count > 0) {
        motion_sum += fr.mv_total_distance;
        ++motion_n;
      }
    }
    const double gop_motion = motion_n > 0 ? motion_sum / static_cast<double>(motion_n) : 0.0;
    const IntensityClass intensity = intensity_class(classify_motion_distance(gop_motion));
    const FrameSizeShares shares =
        normalize_frame_sizes(i_sizes.empty() ? nullptr : &i_sizes, p_sizes.empty() ? nullptr : &p_sizes,
                              b_sizes.empty() ? nullptr : &b_sizes);

    for (std::size_t f = start; f < end; ++f) {
      const auto& fr = trace.frames[f];
      MechanismContext ctx;
      ctx.frame = fr;
      ctx.gop = trace.gop;
      ctx.intensity = intensity;
      ctx.nhat_i = shares.i;
      ctx.nhat_p = shares.p;
      ctx.nhat_b = shares.b;
      ctx.temporal_intensity = gop_motion;
      ctx.spatial_complexity = fr.kind == FrameType::I   ? shares.i
                               : fr.kind == FrameType::P ? shares.p
                                                         : shares.b;
      ctx.plr_pct = wplr.plr() * 100.0;
      ctx.density_per_km2 = net.density_per_km2;
      ctx.distance_m = net.distance_m;
      ctx.snr_db = net.snr_db;
      ctx.predicted_error = predict_error_class(gap_stats(delivered_log), cfg.run.block_packets);
      ctx.viewfec = cfg.mechanism.viewfec;

      const ProtectionDecision decision = decide(cfg.mechanism.kind, ctx, engines, mech_rng);

      out.source_bytes += fr.size_bytes;
      const int packets = packetize(fr.size_bytes, cfg.run.payload_bytes);
      if (packets == 0) continue;  // nothing on the wire, nothing to lose

      bool frame_ok = true;
      int packet_base = 0;
      for (const RsParams& params : build_ffblocks(packets, cfg.run.block_packets, decision.ratio)) {
        const int k = params.k;
        const int h = params.h;
        std::vector<std::vector<std::uint8_t>> source(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
          auto& shard = source[static_cast<std::size_t>(i)];
          shard.resize(cfg.run.payload_bytes);
          for (std::uint64_t j = 0; j < cfg.run.payload_bytes; ++j)
            shard[j] = payload_byte(fr.index, packet_base + i, j);
        }
        const auto shards = rs_encode(source, h);
        out.parity_bytes += static_cast<std::uint64_t>(h) * cfg.run.payload_bytes;

        FecBlock block;
        block.params = params;
        block.shards.resize(shards.size());
        for (std::size_t s = 0; s < shards.size(); ++s) {
          const bool ok = channel.step(channel_rng);
          delivered_log.push_back(ok);
          wplr.record(!ok);
          if (ok) block.shards[s] = shards[s];
        }

        const auto decoded = rs_decode(block);
        if (!decoded) {
          frame_ok = false;
        } else if (*decoded != source) {
          throw std::logic_error("run_scenario: decoded shards differ from the source");
        }
        packet_base += k;
      }
      out.frame_lost[f] = !frame_ok;
    }
  }
  return out;
}

}  // namespace detail

// QoE summary of one repetition: damage propagation, frame-copy concealment,
// then full-reference metrics against the clean frames.
inline QoeRow summarize_repetition(const ScenarioConfig& cfg, const VideoTrace& trace,
                                   const std::vector<PixelFrame>& frames, const detail::RepOutcome& rep,
                                   std::uint64_t rep_seed) {
  const auto damaged = propagate_gop_damage(trace.gop, rep.frame_lost);
  const auto concealed = frame_copy_conceal(frames, damaged);
  double mse_sum = 0.0, ssim_sum = 0.0;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    mse_sum += mse(frames[f], concealed[f]);
    ssim_sum += ssim(frames[f], concealed[f]);
  }
  const double n = static_cast<double>(frames.size());

  QoeRow row;
  row.mechanism = to_string(cfg.mechanism.kind.id);
  row.seed = rep_seed;
  row.plr_setting = rep.nominal_loss_pct;
  row.decodable_ratio = decodable_frame_ratio(rep.frame_lost);
  row.mean_psnr_db = psnr_db(mse_sum / n);
  row.mean_ssim = ssim_sum / n;
  row.overhead_pct = overhead_pct(rep.source_bytes + rep.parity_bytes, rep.source_bytes);
  return row;
}

// GoP slicing, damage propagation, and the training labeler all address
// frames positionally, so the trace must be the plain 0..n-1 sequence with
// kinds that agree with its own layout.
inline void validate_trace_shape(const VideoTrace& trace) {
  if (trace.frames.empty()) throw std::invalid_argument("run_scenario: trace has no frames");
  for (std::size_t f = 0; f < trace.frames.size(); ++f) {
    if (trace.frames[f].index != f)
      throw std::invalid_argument("run_scenario: frame indices must be contiguous from 0");
    if (trace.frames[f].kind != trace.gop.type_at(f))
      throw std::invalid_argument("run_scenario: frame kinds do not match the GoP layout");
  }
}

// Runs the configured scenario, one QoeRow per repetition. Repetition r uses
// seed + r for the channel, so distinct configs sharing [run].seed face the
// identical loss realization row by row.
inline std::vector<QoeRow> run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const ScenarioAssets assets = materialize_assets(cfg);
  validate_trace_shape(assets.trace);
  const MechanismEngines engines = prepare_engines(cfg, assets.trace);
  const ResolvedNet net = resolve_net(cfg.net);

  std::vector<QoeRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.run.repetitions));
  for (int rep = 0; rep < cfg.run.repetitions; ++rep) {
    const auto outcome = detail::run_repetition(cfg, assets.trace, engines, net, rep);
    rows.push_back(summarize_repetition(cfg, assets.trace, assets.frames, outcome,
                                        cfg.run.seed + static_cast<std::uint64_t>(rep)));
  }
  return rows;
}

// Paired comparison: every config must match the first in everything except
// [mechanism], so the rows differ only in the protection decisions. Returns
// one row per config, metrics averaged over repetitions (a +inf PSNR
// propagates; it means every repetition came through clean).
inline std::vector<QoeRow> compare_mechanisms(const std::vector<ScenarioConfig>& configs) {
  if (configs.empty()) throw std::invalid_argument("compare_mechanisms: no configs");
  for (std::size_t i = 1; i < configs.size(); ++i) {
    if (!(configs[i].trace == configs[0].trace) || !(configs[i].channel == configs[0].channel) ||
        !(configs[i].net == configs[0].net) || !(configs[i].run == configs[0].run))
      throw std::invalid_argument("compare_mechanisms: config " + std::to_string(i) +
                                  " differs from config 0 outside [mechanism]");
  }

  std::vector<QoeRow> table;
  table.reserve(configs.size());
  for (const auto& cfg : configs) {
    const auto rows = run_scenario(cfg);
    QoeRow mean = rows[0];
    mean.seed = cfg.run.seed;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      mean.plr_setting += rows[r].plr_setting;
      mean.decodable_ratio += rows[r].decodable_ratio;
      mean.mean_psnr_db += rows[r].mean_psnr_db;
      mean.mean_ssim += rows[r].mean_ssim;
      mean.overhead_pct += rows[r].overhead_pct;
    }
    const double n = static_cast<double>(rows.size());
    mean.plr_setting /= n;
    mean.decodable_ratio /= n;
    mean.mean_psnr_db /= n;
    mean.mean_ssim /= n;
    mean.overhead_pct /= n;
    table.push_back(std::move(mean));
  }
  return table;
}

// Same columns as the CSV, space separated with a '#' header: feed it to
// gnuplot's `plot ... using` directly.
inline void save_qoe_dat(const std::string& path, const std::vector<QoeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_qoe_dat: cannot open " + path);
  out << "# mechanism seed plr_setting decodable_ratio mean_psnr_db mean_ssim overhead_pct\n";
  char buf[256];
  for (const auto& r : rows) {
    for (const char c : r.mechanism)
      if (std::isspace(static_cast<unsigned char>(c)))
        throw std::invalid_argument("save_qoe_dat: mechanism name contains whitespace");
    std::snprintf(buf, sizeof buf, "%s %llu %.17g %.17g %.17g %.17g %.17g", r.mechanism.c_str(),
                  static_cast<unsigned long long>(r.seed), r.plr_setting, r.decodable_ratio, r.mean_psnr_db,
                  r.mean_ssim, r.overhead_pct);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("save_qoe_dat: write failed for " + path);
}

}  // namespace vidfec

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidfec/aco.hpp"
#include "vidfec/channel.hpp"
#include "vidfec/fuzzy.hpp"
#include "vidfec/fuzzy_builtins.hpp"
#include "vidfec/motion.hpp"
#include "vidfec/rng.hpp"
#include "vidfec/rnn.hpp"
#include "vidfec/video.hpp"

namespace vidfec {

enum class MechanismId {
  NoFec,
  VaEEP,
  VaUEP,
  ViewFec,
  NeuralFec,
  PredictiveAnts,
  UavFec,
  MintFec,
  Corvette,
  Shield,
};

inline const char* to_string(MechanismId id) {
  switch (id) {
    case MechanismId::NoFec: return "nofec";
    case MechanismId::VaEEP: return "vaeep";
    case MechanismId::VaUEP: return "vauep";
    case MechanismId::ViewFec: return "viewfec";
    case MechanismId::NeuralFec: return "neuralfec";
    case MechanismId::PredictiveAnts: return "predictiveants";
    case MechanismId::UavFec: return "uavfec";
    case MechanismId::MintFec: return "mintfec";
    case MechanismId::Corvette: return "corvette";
    case MechanismId::Shield: return "shield";
  }
  return "?";
}

inline MechanismId mechanism_from_string(const std::string& name) {
  for (const MechanismId id : {MechanismId::NoFec, MechanismId::VaEEP, MechanismId::VaUEP,
                               MechanismId::ViewFec, MechanismId::NeuralFec, MechanismId::PredictiveAnts,
                               MechanismId::UavFec, MechanismId::MintFec, MechanismId::Corvette,
                               MechanismId::Shield}) {
    if (name == to_string(id)) return id;
  }
  throw std::invalid_argument("mechanism_from_string: unknown mechanism '" + name + "'");
}

// Mechanism selector. Only the fixed baselines carry parameters: VaEEP uses
// one ratio for every protected frame, VaUEP one per anchor type.
struct MechanismKind {
  MechanismId id = MechanismId::NoFec;
  double ratio = 0.0;     // VaEEP
  double ratio_i = 0.38;  // VaUEP
  double ratio_p = 0.25;  // VaUEP

  void validate() const {
    if (ratio < 0.0 || ratio > 1.0 || ratio_i < 0.0 || ratio_i > 1.0 || ratio_p < 0.0 || ratio_p > 1.0)
      throw std::invalid_argument("MechanismKind: baseline ratios must lie in [0, 1]");
  }

  static MechanismKind no_fec() { return {}; }
  static MechanismKind va_eep(double r) {
    MechanismKind k;
    k.id = MechanismId::VaEEP;
    k.ratio = r;
    k.validate();
    return k;
  }
  static MechanismKind va_uep(double ri = 0.38, double rp = 0.25) {
    MechanismKind k;
    k.id = MechanismId::VaUEP;
    k.ratio_i = ri;
    k.ratio_p = rp;
    k.validate();
    return k;
  }
  static MechanismKind adaptive(MechanismId id) {
    MechanismKind k;
    k.id = id;
    return k;
  }
};

// Per-frame gates and per-cluster weights of the position-aware scheme. The
// default gates protect anchors only; the alphas grade redundancy by the
// GoP's motion class.
struct ViewFecParams {
  double gamma_i = 1.0;
  double gamma_p = 1.0;
  double gamma_b = 0.0;
  double alpha_high = 1.0;
  double alpha_medium = 0.5;
  double alpha_low = 0.25;

  void validate() const {
    if (gamma_i < 0.0 || gamma_p < 0.0 || gamma_b < 0.0)
      throw std::invalid_argument("ViewFecParams: gamma gates must be >= 0");
    for (const double a : {alpha_high, alpha_medium, alpha_low})
      if (!(a > 0.0) || a > 1.0) throw std::invalid_argument("ViewFecParams: alphas must lie in (0, 1]");
  }

  double gamma(FrameType kind) const {
    switch (kind) {
      case FrameType::I: return gamma_i;
      case FrameType::P: return gamma_p;
      case FrameType::B: return gamma_b;
    }
    return 0.0;
  }

  double alpha(IntensityLevel level) const {
    switch (level) {
      case IntensityLevel::High: return alpha_high;
      case IntensityLevel::Medium: return alpha_medium;
      case IntensityLevel::Low: return alpha_low;
    }
    return alpha_low;
  }
};

// Parity fraction for one frame: gate x cluster weight x 1/position. Frames
// deeper into the GoP matter less because fewer frames reference them.
inline double viewfec_frame_ratio(FrameType kind, int relative_pos, const ViewFecParams& params,
                                  double c_gop) {
  params.validate();
  if (relative_pos < 1) throw std::invalid_argument("viewfec_frame_ratio: relative position must be >= 1");
  if (!(c_gop > 0.0) || c_gop > 1.0) throw std::invalid_argument("viewfec_frame_ratio: c_gop outside (0, 1]");
  const double gate = params.gamma(kind);
  if (gate <= 0.0) return 0.0;
  return gate * c_gop * (1.0 / static_cast<double>(relative_pos));
}

// Redundancy packets for one GoP: sum of frame size (packets) times the
// per-frame ratio. Summing in frame order keeps this bitwise equal to the
// per-frame split a sender applies. A gated-open B-frame (nonzero gamma_b)
// counts as position 1 since it has no anchor position of its own.
inline double viewfec_gop_redundancy(const std::vector<FrameRecord>& frames, const GopLayout& layout,
                                     const ViewFecParams& params, double c_gop,
                                     std::uint64_t payload_bytes) {
  double total = 0.0;
  for (const auto& f : frames) {
    const int fs = packetize(f.size_bytes, payload_bytes);
    const int rp = f.kind == FrameType::B ? 1 : relative_position(f.index, layout);
    total += static_cast<double>(fs) * viewfec_frame_ratio(f.kind, rp, params, c_gop);
  }
  return total;
}

inline double average_redundancy(const std::vector<double>& per_gop) {
  if (per_gop.empty()) throw std::invalid_argument("average_redundancy: no GoPs");
  double sum = 0.0;
  for (const double r : per_gop) sum += r;
  return sum / static_cast<double>(per_gop.size());
}

// Everything a mechanism may consult for one frame decision. plr_pct is on
// the percent scale the rule bases expect.
struct MechanismContext {
  FrameRecord frame;
  GopLayout gop;
  IntensityClass intensity = intensity_class(IntensityLevel::Medium);
  double nhat_i = 0.0;  // normalized mean frame sizes, one share per type
  double nhat_p = 0.0;
  double nhat_b = 0.0;
  double temporal_intensity = 0.0;
  double spatial_complexity = 0.0;  // [0, 1]
  double plr_pct = 0.0;
  double density_per_km2 = 0.0;
  double distance_m = 0.0;
  double snr_db = 0.0;
  ErrorClass predicted_error = ErrorClass::NoError;
  ViewFecParams viewfec;

  void validate() const {
    if (plr_pct < 0.0 || plr_pct > 100.0)
      throw std::invalid_argument("MechanismContext: plr_pct outside [0, 100]");
    for (const double v : {nhat_i, nhat_p, nhat_b, spatial_complexity})
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("MechanismContext: normalized shares must lie in [0, 1]");
    if (temporal_intensity < 0.0 || density_per_km2 < 0.0 || distance_m < 0.0)
      throw std::invalid_argument("MechanismContext: negative magnitude input");
    viewfec.validate();
  }

  double nhat(FrameType kind) const {
    switch (kind) {
      case FrameType::I: return nhat_i;
      case FrameType::P: return nhat_p;
      case FrameType::B: return nhat_b;
    }
    return 0.0;
  }
};

struct ProtectionDecision {
  double ratio = 0.0;
  bool engine_activated = true;  // false: a fuzzy stage fell back to its universe midpoint
};

// Shared read-only engine bundle. The neural model ships untrained; train it
// (or load weights) before asking for neural decisions.
struct MechanismEngines {
  FuzzyEngine uavfec = builtin_uavfec_engine();
  FuzzyEngine mintfec = builtin_mintfec_engine();
  HfsGraph corvette = builtin_corvette_graph();
  HfsGraph shield = builtin_shield_graph();
  RnnModel rnn;
  AcoGraph aco = AcoGraph::standard();
  AcoParams aco_params;
};

// Importance of a frame to its GoP, on the relevance universe: anchors high,
// references between, disposables low.
inline double frame_relevance(FrameType kind) {
  switch (kind) {
    case FrameType::I: return 1.0;
    case FrameType::P: return 0.5;
    case FrameType::B: return 0.25;
  }
  return 0.25;
}

// Index of the strongest term at x; ties resolve to the later (more severe)
// term, matching the motion classifier's convention.
inline int max_membership_index(const LinguisticVariable& var, double x) {
  if (var.terms.empty()) throw std::invalid_argument("max_membership_index: variable has no terms");
  int best = 0;
  double best_mu = -1.0;
  for (std::size_t i = 0; i < var.terms.size(); ++i) {
    const double mu = var.terms[i].membership(x);
    if (mu >= best_mu) {
      best_mu = mu;
      best = static_cast<int>(i);
    }
  }
  return best;
}

// Feature layout fed to the intensity network: frame-type code (I 1.0,
// P 0.5, B 0.0), the type's size share, and the vector ratio (count over
// total distance; zero when the frame carries no vectors). Four-input
// models insert the vector count per macroblock before the ratio.
inline std::vector<double> neural_features(const MechanismContext& ctx, int inputs = 3) {
  if (inputs != 3 && inputs != 4) throw std::invalid_argument("neural_features: inputs must be 3 or 4");
  double type_code = 0.0;
  switch (ctx.frame.kind) {
    case FrameType::I: type_code = 1.0; break;
    case FrameType::P: type_code = 0.5; break;
    case FrameType::B: type_code = 0.0; break;
  }
  const double ratio = ctx.frame.mv_total_distance > 0.0
                           ? mv_ratio(static_cast<double>(ctx.frame.mv_count), ctx.frame.mv_total_distance)
                           : 0.0;
  std::vector<double> features{type_code, ctx.nhat(ctx.frame.kind)};
  if (inputs == 4) {
    features.push_back(ctx.frame.mb_count > 0
                           ? static_cast<double>(ctx.frame.mv_count) / static_cast<double>(ctx.frame.mb_count)
                           : 0.0);
  }
  features.push_back(ratio);
  return features;
}

namespace detail {

inline FuzzyInputs hierarchical_inputs(const MechanismContext& ctx, bool with_snr) {
  FuzzyInputs in{{"PacketLossRate", ctx.plr_pct},
                 {"Density", ctx.density_per_km2},
                 {"Distance", ctx.distance_m},
                 {"TemporalIntensity", ctx.temporal_intensity},
                 {"SpatialComplexity", ctx.spatial_complexity},
                 {"FrameRelevance", frame_relevance(ctx.frame.kind)}};
  if (with_snr) in["Snr"] = ctx.snr_db;
  return in;
}

}  // namespace detail

// One protection decision. B-frames are never protected, whatever the
// mechanism; everything else maps its inputs onto a parity fraction in
// [0, 1]. Pure given (kind, ctx, engines, rng state).
inline ProtectionDecision decide(const MechanismKind& kind, const MechanismContext& ctx,
                                 const MechanismEngines& engines, Rng& rng) {
  kind.validate();
  ctx.validate();
  ProtectionDecision d;
  if (ctx.frame.kind == FrameType::B) return d;

  switch (kind.id) {
    case MechanismId::NoFec:
      break;
    case MechanismId::VaEEP:
      d.ratio = kind.ratio;
      break;
    case MechanismId::VaUEP:
      d.ratio = ctx.frame.kind == FrameType::I ? kind.ratio_i : kind.ratio_p;
      break;
    case MechanismId::ViewFec: {
      const int rp = relative_position(ctx.frame.index, ctx.gop);
      d.ratio = viewfec_frame_ratio(ctx.frame.kind, rp, ctx.viewfec, ctx.viewfec.alpha(ctx.intensity.level));
      break;
    }
    case MechanismId::NeuralFec: {
      if (!engines.rnn.trained())
        throw std::logic_error("decide: neural mechanism requires a trained intensity model");
      const double score = engines.rnn.forward(neural_features(ctx, engines.rnn.topology().inputs));
      d.ratio = 0.55 + 0.45 * std::clamp(score, 0.0, 1.0);
      break;
    }
    case MechanismId::PredictiveAnts: {
      AcoContext actx;
      switch (ctx.intensity.level) {
        case IntensityLevel::Low: actx.motion = AcoGraph::kMotionLow; break;
        case IntensityLevel::Medium: actx.motion = AcoGraph::kMotionMedium; break;
        case IntensityLevel::High: actx.motion = AcoGraph::kMotionHigh; break;
      }
      actx.frame = ctx.frame.kind == FrameType::I ? AcoGraph::kFrameI : AcoGraph::kFrameP;
      const char* size_var = ctx.frame.kind == FrameType::I ? "FrameSizeI" : "FrameSizeP";
      actx.size =
          AcoGraph::kSizeSmall + max_membership_index(engines.mintfec.input(size_var), ctx.nhat(ctx.frame.kind));
      actx.error = AcoGraph::kErrNe + static_cast<int>(ctx.predicted_error);
      d.ratio = aco_run(engines.aco, actx, engines.aco_params, rng).redundancy;
      break;
    }
    case MechanismId::UavFec: {
      const InferenceResult r = engines.uavfec.infer(
          {{"MotionIntensity", ctx.temporal_intensity}, {"PacketLossRate", ctx.plr_pct}});
      d.ratio = r.value;
      d.engine_activated = r.activated;
      break;
    }
    case MechanismId::MintFec: {
      const InferenceResult r = engines.mintfec.infer({{"FrameSizeI", ctx.nhat_i},
                                                       {"FrameSizeP", ctx.nhat_p},
                                                       {"FrameSizeB", ctx.nhat_b},
                                                       {"PacketLossRate", ctx.plr_pct}});
      d.ratio = r.value;
      d.engine_activated = r.activated;
      break;
    }
    case MechanismId::Corvette: {
      const HfsResult r = hfs_infer(engines.corvette, detail::hierarchical_inputs(ctx, false));
      d.ratio = r.value;
      d.engine_activated = r.activated;
      break;
    }
    case MechanismId::Shield: {
      const HfsResult r = hfs_infer(engines.shield, detail::hierarchical_inputs(ctx, true));
      d.ratio = r.value;
      d.engine_activated = r.activated;
      break;
    }
  }
  d.ratio = std::clamp(d.ratio, 0.0, 1.0);
  return d;
}

// Video-side classes travel with every packet so intermediate hops can
// re-decide without touching the payload. 5 bytes: version, four 2-bit
// classes, three quantized size shares.
struct HopHeader {
  FrameType frame_type = FrameType::I;
  int motion_class = 0;  // 0 low, 1 medium, 2 high
  int spatial_class = 0;
  int temporal_class = 0;
  double nhat_i = 0.0;
  double nhat_p = 0.0;
  double nhat_b = 0.0;
};

inline constexpr std::size_t kHopHeaderBytes = 5;
inline constexpr std::uint8_t kHopHeaderVersion = 1;

namespace detail {

inline std::uint8_t quantize_unit(double v) {
  if (!(v >= 0.0) || v > 1.0) throw std::invalid_argument("hop header: fraction outside [0, 1]");
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace detail

inline std::array<std::uint8_t, kHopHeaderBytes> encode_header(const HopHeader& h) {
  for (const int cls : {h.motion_class, h.spatial_class, h.temporal_class})
    if (cls < 0 || cls > 2) throw std::invalid_argument("encode_header: class outside the three-level range");
  std::array<std::uint8_t, kHopHeaderBytes> out{};
  out[0] = kHopHeaderVersion;
  out[1] = static_cast<std::uint8_t>(static_cast<int>(h.frame_type) << 6 | h.motion_class << 4 |
                                     h.spatial_class << 2 | h.temporal_class);
  out[2] = detail::quantize_unit(h.nhat_i);
  out[3] = detail::quantize_unit(h.nhat_p);
  out[4] = detail::quantize_unit(h.nhat_b);
  return out;
}

inline HopHeader decode_header(const std::uint8_t* data, std::size_t len) {
  if (len < kHopHeaderBytes) throw std::invalid_argument("decode_header: truncated buffer");
  if (data[0] != kHopHeaderVersion) throw std::invalid_argument("decode_header: unsupported version");
  const int ft = data[1] >> 6;
  if (ft > 2) throw std::invalid_argument("decode_header: bad frame type");
  HopHeader h;
  h.frame_type = static_cast<FrameType>(ft);
  h.motion_class = (data[1] >> 4) & 3;
  h.spatial_class = (data[1] >> 2) & 3;
  h.temporal_class = data[1] & 3;
  for (const int cls : {h.motion_class, h.spatial_class, h.temporal_class})
    if (cls > 2) throw std::invalid_argument("decode_header: class outside the three-level range");
  h.nhat_i = data[2] / 255.0;
  h.nhat_p = data[3] / 255.0;
  h.nhat_b = data[4] / 255.0;
  return h;
}

inline HopHeader decode_header(const std::vector<std::uint8_t>& bytes) {
  return decode_header(bytes.data(), bytes.size());
}

inline HopHeader make_hop_header(const MechanismContext& ctx) {
  HopHeader h;
  h.frame_type = ctx.frame.kind;
  h.motion_class = static_cast<int>(ctx.intensity.level);
  h.spatial_class = max_membership_index(detail::spatial_complexity_variable(), ctx.spatial_complexity);
  h.temporal_class = max_membership_index(detail::temporal_intensity_variable(), ctx.temporal_intensity);
  h.nhat_i = ctx.nhat_i;
  h.nhat_p = ctx.nhat_p;
  h.nhat_b = ctx.nhat_b;
  return h;
}

// Midpoint of a term's membership-1 region, used to turn a transported class
// back into a crisp value.
inline double term_core_midpoint(const LinguisticVariable& var, int term_index) {
  if (term_index < 0 || term_index >= static_cast<int>(var.terms.size()))
    throw std::invalid_argument("term_core_midpoint: no such term");
  const FuzzyTerm& t = var.terms[static_cast<std::size_t>(term_index)];
  switch (t.shape) {
    case TermShape::Triangular: return 0.5 * (t.a + t.b);
    case TermShape::ShoulderLeft: return 0.5 * (var.universe_min + t.a);
    case TermShape::ShoulderRight: return 0.5 * (t.b + var.universe_max);
  }
  throw std::logic_error("term_core_midpoint: unknown shape");
}

// Crisp network readings taken where the packet currently sits.
struct HopNetInputs {
  double plr_pct = 0.0;
  double density_per_km2 = 0.0;
  double distance_m = 0.0;
  double snr_db = 0.0;
};

// Re-decide at an intermediate hop: local network readings, video side
// reconstructed from the header (temporal class as its term core, spatial
// complexity from the quantized size share of the frame's own type).
inline ProtectionDecision per_hop_adjust(const MechanismKind& kind, const HopHeader& header,
                                         const HopNetInputs& net, const MechanismEngines& engines) {
  if (kind.id != MechanismId::Corvette && kind.id != MechanismId::Shield)
    throw std::invalid_argument("per_hop_adjust: only hierarchical mechanisms re-decide per hop");
  if (net.plr_pct < 0.0 || net.plr_pct > 100.0)
    throw std::invalid_argument("per_hop_adjust: plr_pct outside [0, 100]");
  ProtectionDecision d;
  if (header.frame_type == FrameType::B) return d;

  double nhat = 0.0;
  switch (header.frame_type) {
    case FrameType::I: nhat = header.nhat_i; break;
    case FrameType::P: nhat = header.nhat_p; break;
    case FrameType::B: nhat = header.nhat_b; break;
  }
  FuzzyInputs in{
      {"PacketLossRate", net.plr_pct},
      {"Density", net.density_per_km2},
      {"Distance", net.distance_m},
      {"TemporalIntensity",
       term_core_midpoint(detail::temporal_intensity_variable(), header.temporal_class)},
      {"SpatialComplexity", nhat},
      {"FrameRelevance", frame_relevance(header.frame_type)},
  };
  if (kind.id == MechanismId::Shield) in["Snr"] = net.snr_db;
  const HfsResult r =
      hfs_infer(kind.id == MechanismId::Corvette ? engines.corvette : engines.shield, in);
  d.ratio = std::clamp(r.value, 0.0, 1.0);
  d.engine_activated = r.activated;
  return d;
}

}  // namespace vidfec

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidfec/rng.hpp"

namespace vidfec {

enum class FrameType { I, P, B };

inline char to_char(FrameType t) {
  switch (t) {
    case FrameType::I: return 'I';
    case FrameType::P: return 'P';
    case FrameType::B: return 'B';
  }
  return '?';
}

inline FrameType frame_type_from_char(char c) {
  switch (c) {
    case 'I': return FrameType::I;
    case 'P': return FrameType::P;
    case 'B': return FrameType::B;
    default: throw std::invalid_argument(std::string("unknown frame type '") + c + "'");
  }
}

// One encoded frame as carried by a trace: sizes plus aggregate motion-vector
// and macroblock statistics (I-frames carry no vectors).
struct FrameRecord {
  std::uint64_t index = 0;
  FrameType kind = FrameType::I;
  std::uint64_t size_bytes = 0;
  std::uint64_t mv_count = 0;
  double mv_total_distance = 0.0;
  std::uint32_t mb_width = 16;
  std::uint32_t mb_height = 16;
  std::uint64_t mb_count = 0;
};

// GoP structure N:M. n_ratio is the GoP length (one I every n_ratio frames);
// m_ratio is the anchor spacing: every m_ratio-th position inside the GoP is
// an anchor (I at position 0, P afterwards), with m_ratio - 1 B-frames
// between consecutive anchors. "19:2" in the source material means 19 frames
// per GoP with two B-frames between anchors, i.e. n_ratio 19, m_ratio 3.
struct GopLayout {
  int n_ratio = 19;
  int m_ratio = 3;

  GopLayout() = default;
  GopLayout(int n, int m) : n_ratio(n), m_ratio(m) {
    if (n_ratio < 1 || m_ratio < 1) throw std::invalid_argument("GopLayout: ratios must be >= 1");
  }

  int length() const { return n_ratio; }

  FrameType type_at(std::uint64_t frame_index) const {
    const std::uint64_t g = frame_index % static_cast<std::uint64_t>(n_ratio);
    if (g == 0) return FrameType::I;
    if (g % static_cast<std::uint64_t>(m_ratio) == 0) return FrameType::P;
    return FrameType::B;
  }

  bool operator==(const GopLayout&) const = default;
};

inline std::vector<FrameType> generate_gop_layout(int n_ratio, int m_ratio, int total_frames) {
  if (total_frames < 0) throw std::invalid_argument("generate_gop_layout: total_frames must be >= 0");
  const GopLayout layout(n_ratio, m_ratio);
  std::vector<FrameType> out(static_cast<std::size_t>(total_frames));
  for (int i = 0; i < total_frames; ++i) out[static_cast<std::size_t>(i)] = layout.type_at(static_cast<std::uint64_t>(i));
  return out;
}

// Anchor ordinal within the GoP: the I-frame is 1, the j-th P-frame is j + 1.
// B-frames have no relative position (they are never FEC-protected).
inline int relative_position(std::uint64_t frame_index, const GopLayout& layout) {
  const auto kind = layout.type_at(frame_index);
  if (kind == FrameType::B)
    throw std::invalid_argument("relative_position: B-frames have no anchor position");
  if (kind == FrameType::I) return 1;
  const std::uint64_t g = frame_index % static_cast<std::uint64_t>(layout.n_ratio);
  return 1 + static_cast<int>(g / static_cast<std::uint64_t>(layout.m_ratio));
}

// Number of payload-sized packets needed for the frame (ceiling division).
inline int packetize(std::uint64_t size_bytes, std::uint64_t payload_bytes) {
  if (payload_bytes < 1) throw std::invalid_argument("packetize: payload_bytes must be >= 1");
  if (size_bytes == 0) return 0;
  return static_cast<int>((size_bytes + payload_bytes - 1) / payload_bytes);
}

struct VideoTrace {
  int width = 176;
  int height = 144;
  double fps = 30.0;
  GopLayout gop;
  std::vector<FrameRecord> frames;
};

// 8-bit grayscale frame used by the QoE stage.
struct PixelFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  PixelFrame() = default;
  PixelFrame(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {
    if (w < 1 || h < 1) throw std::invalid_argument("PixelFrame: dimensions must be positive");
  }

  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { data[static_cast<std::size_t>(y) * width + x] = v; }
  bool operator==(const PixelFrame&) const = default;
};

enum class MotionProfile { Low, Medium, High };

inline const char* to_string(MotionProfile p) {
  switch (p) {
    case MotionProfile::Low: return "low";
    case MotionProfile::Medium: return "medium";
    case MotionProfile::High: return "high";
  }
  return "?";
}

// Controls for the synthetic source. Per-type frame sizes may be pinned to
// fixed values (deterministic byte accounting in scenarios); size 0 keeps the
// profile's randomized default.
struct SynthesisSpec {
  GopLayout gop{19, 3};
  int gop_count = 5;
  MotionProfile motion = MotionProfile::Medium;
  int width = 176;
  int height = 144;
  double fps = 30.0;
  std::uint64_t size_i = 0;
  std::uint64_t size_p = 0;
  std::uint64_t size_b = 0;

  bool operator==(const SynthesisSpec&) const = default;
};

struct SynthesizedVideo {
  VideoTrace trace;
  std::vector<PixelFrame> frames;
};

namespace detail {

struct MotionTargets {
  double mv_distance_mean;  // lands inside the matching motion fuzzy-set core
  double size_i_mean;
  double size_p_mean;
  double size_b_mean;
  int shift_per_frame;  // pixel scroll between consecutive frames
};

inline MotionTargets motion_targets(MotionProfile p) {
  // mv distance cores: low <= 10000, medium peak 50500, high >= 130000.
  switch (p) {
    case MotionProfile::Low: return {6000.0, 16000.0, 8000.0, 2400.0, 1};
    case MotionProfile::Medium: return {50500.0, 24000.0, 12000.0, 3600.0, 4};
    case MotionProfile::High: return {140000.0, 36000.0, 18000.0, 5400.0, 8};
  }
  return {50500.0, 24000.0, 12000.0, 3600.0, 4};
}

inline std::uint8_t texture(int x, int y, int shift) {
  const double u = static_cast<double>(x + shift);
  const double v = static_cast<double>(y);
  const double s = 128.0 + 52.0 * std::sin(u * 0.26) * std::cos(v * 0.21) + 36.0 * std::sin((u + v) * 0.11);
  const double clamped = s < 0.0 ? 0.0 : (s > 255.0 ? 255.0 : s);
  return static_cast<std::uint8_t>(clamped + 0.5);
}

}  // namespace detail

// Deterministic synthetic source: the trace's per-class mv-distance means land
// inside the matching motion fuzzy-set cores, frame sizes follow the I > P > B
// ordering, and pixel content scrolls proportionally to the motion profile so
// frame-copy concealment error grows with motion.
inline SynthesizedVideo synthesize_video(const SynthesisSpec& spec, std::uint64_t seed) {
  if (spec.gop_count < 1) throw std::invalid_argument("synthesize_video: gop_count must be >= 1");
  if (spec.width < 16 || spec.height < 16)
    throw std::invalid_argument("synthesize_video: frame dimensions must be at least 16x16");
  const auto targets = detail::motion_targets(spec.motion);
  Rng rng(seed);

  SynthesizedVideo out;
  out.trace.width = spec.width;
  out.trace.height = spec.height;
  out.trace.fps = spec.fps;
  out.trace.gop = spec.gop;

  const int total = spec.gop.length() * spec.gop_count;
  const std::uint32_t mb_w = 16, mb_h = 16;
  const std::uint64_t mb_count =
      static_cast<std::uint64_t>((spec.width + 15) / 16) * static_cast<std::uint64_t>((spec.height + 15) / 16);

  for (int i = 0; i < total; ++i) {
    FrameRecord rec;
    rec.index = static_cast<std::uint64_t>(i);
    rec.kind = spec.gop.type_at(rec.index);
    rec.mb_width = mb_w;
    rec.mb_height = mb_h;
    rec.mb_count = mb_count;

    double size_mean = 0.0;
    std::uint64_t pinned = 0;
    switch (rec.kind) {
      case FrameType::I: size_mean = targets.size_i_mean; pinned = spec.size_i; break;
      case FrameType::P: size_mean = targets.size_p_mean; pinned = spec.size_p; break;
      case FrameType::B: size_mean = targets.size_b_mean; pinned = spec.size_b; break;
    }
    if (pinned > 0) {
      rec.size_bytes = pinned;
    } else {
      const double drawn = rng.gaussian(size_mean, size_mean * 0.08);
      rec.size_bytes = static_cast<std::uint64_t>(drawn < 256.0 ? 256.0 : drawn);
    }

    if (rec.kind == FrameType::I) {
      rec.mv_count = 0;
      rec.mv_total_distance = 0.0;
    } else {
      rec.mv_count = mb_count;
      double dist = rng.gaussian(targets.mv_distance_mean, targets.mv_distance_mean * 0.05);
      if (dist < 1.0) dist = 1.0;
      rec.mv_total_distance = dist;
    }
    out.trace.frames.push_back(rec);
  }

  out.frames.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) {
    PixelFrame f(spec.width, spec.height);
    const int shift = i * targets.shift_per_frame;
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) f.set(x, y, detail::texture(x, y, shift));
    out.frames.push_back(std::move(f));
  }
  return out;
}

// Trace file: header "width,height,fps,n_ratio,m_ratio", then one line per
// frame "index,kind,size_bytes,mv_count,mv_total_distance,mb_width,mb_height,
// mb_count". Canonical files round-trip byte for byte.
inline void save_trace(const VideoTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_trace: cannot open " + path);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%d,%d\n", trace.width, trace.height, trace.fps,
                trace.gop.n_ratio, trace.gop.m_ratio);
  out << buf;
  for (const auto& f : trace.frames) {
    std::snprintf(buf, sizeof buf, "%llu,%c,%llu,%llu,%.17g,%u,%u,%llu\n",
                  static_cast<unsigned long long>(f.index), to_char(f.kind),
                  static_cast<unsigned long long>(f.size_bytes),
                  static_cast<unsigned long long>(f.mv_count), f.mv_total_distance, f.mb_width,
                  f.mb_height, static_cast<unsigned long long>(f.mb_count));
    out << buf;
  }
  if (!out) throw std::runtime_error("save_trace: write failed for " + path);
}

inline VideoTrace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_trace: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_trace: empty file " + path);

  auto split = [&](const std::string& s) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    return fields;
  };

  VideoTrace trace;
  {
    const auto f = split(line);
    if (f.size() != 5) throw std::runtime_error("load_trace: malformed header in " + path);
    trace.width = std::stoi(f[0]);
    trace.height = std::stoi(f[1]);
    trace.fps = std::stod(f[2]);
    trace.gop = GopLayout(std::stoi(f[3]), std::stoi(f[4]));
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != 8) throw std::runtime_error("load_trace: malformed frame line in " + path);
    FrameRecord rec;
    rec.index = std::stoull(f[0]);
    if (f[1].size() != 1) throw std::runtime_error("load_trace: malformed frame kind in " + path);
    rec.kind = frame_type_from_char(f[1][0]);
    rec.size_bytes = std::stoull(f[2]);
    rec.mv_count = std::stoull(f[3]);
    rec.mv_total_distance = std::stod(f[4]);
    rec.mb_width = static_cast<std::uint32_t>(std::stoul(f[5]));
    rec.mb_height = static_cast<std::uint32_t>(std::stoul(f[6]));
    rec.mb_count = std::stoull(f[7]);
    trace.frames.push_back(rec);
  }
  return trace;
}

}  // namespace vidfec

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidfec/video.hpp"

namespace vidfec {

// Reference-chain damage: a lost B-frame hurts only itself, a lost P-frame
// hurts itself and everything after it in its group, a lost I-frame takes
// the whole group down.
inline std::vector<bool> propagate_gop_damage(const GopLayout& layout,
                                              const std::vector<bool>& frame_lost) {
  const std::size_t len = static_cast<std::size_t>(layout.length());
  std::vector<bool> damaged(frame_lost.size(), false);
  for (std::size_t f = 0; f < frame_lost.size(); ++f) {
    if (!frame_lost[f]) continue;
    const std::size_t gop_start = f - f % len;
    const std::size_t gop_end = std::min(gop_start + len, damaged.size());
    switch (layout.type_at(f)) {
      case FrameType::B:
        damaged[f] = true;
        break;
      case FrameType::P:
        for (std::size_t i = f; i < gop_end; ++i) damaged[i] = true;
        break;
      case FrameType::I:
        for (std::size_t i = gop_start; i < gop_end; ++i) damaged[i] = true;
        break;
    }
  }
  return damaged;
}

// Decoder-style concealment: a damaged frame shows the last clean frame;
// damage before any clean frame shows mid-gray.
inline std::vector<PixelFrame> frame_copy_conceal(const std::vector<PixelFrame>& frames,
                                                  const std::vector<bool>& damaged) {
  if (frames.size() != damaged.size())
    throw std::invalid_argument("frame_copy_conceal: flag count does not match frame count");
  std::vector<PixelFrame> out;
  out.reserve(frames.size());
  const PixelFrame* last_clean = nullptr;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (!damaged[f]) {
      out.push_back(frames[f]);
      last_clean = &frames[f];
    } else if (last_clean) {
      out.push_back(*last_clean);
    } else {
      PixelFrame gray(frames[f].width, frames[f].height);
      std::fill(gray.data.begin(), gray.data.end(), std::uint8_t{128});
      out.push_back(std::move(gray));
    }
  }
  return out;
}

inline double mse(const PixelFrame& a, const PixelFrame& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mse: frame dimensions differ");
  if (a.data.empty()) throw std::invalid_argument("mse: empty frames");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.data.size());
}

// Peak signal-to-noise ratio for 8-bit content; identical frames rate
// infinite.
inline double psnr_db(double mean_squared_error) {
  if (mean_squared_error < 0.0) throw std::invalid_argument("psnr_db: negative MSE");
  if (mean_squared_error == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mean_squared_error);
}

inline double psnr_db(const PixelFrame& a, const PixelFrame& b) { return psnr_db(mse(a, b)); }

struct SsimParams {
  int window = 8;
  int stride = 4;
  double alpha = 1.0;  // luminance exponent
  double beta = 1.0;   // contrast exponent
  double gamma = 1.0;  // structure exponent
};

// Mean structural similarity over sliding windows. Population statistics per
// window; the structure term keeps its sign, so anti-correlated content can
// push a window (and the mean) negative.
inline double ssim(const PixelFrame& a, const PixelFrame& b, const SsimParams& params = {}) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("ssim: frame dimensions differ");
  if (params.window < 2 || params.stride < 1) throw std::invalid_argument("ssim: bad window/stride");
  if (a.width < params.window || a.height < params.window)
    throw std::invalid_argument("ssim: frame smaller than the window");

  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  const double c3 = c2 / 2.0;
  const double n = static_cast<double>(params.window) * params.window;

  double total = 0.0;
  int windows = 0;
  for (int y = 0; y + params.window <= a.height; y += params.stride) {
    for (int x = 0; x + params.window <= a.width; x += params.stride) {
      double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_ab = 0.0;
      for (int dy = 0; dy < params.window; ++dy) {
        for (int dx = 0; dx < params.window; ++dx) {
          const double va = a.at(x + dx, y + dy);
          const double vb = b.at(x + dx, y + dy);
          sum_a += va;
          sum_b += vb;
          sum_aa += va * va;
          sum_bb += vb * vb;
          sum_ab += va * vb;
        }
      }
      const double mu_a = sum_a / n;
      const double mu_b = sum_b / n;
      const double var_a = std::max(0.0, sum_aa / n - mu_a * mu_a);
      const double var_b = std::max(0.0, sum_bb / n - mu_b * mu_b);
      const double cov = sum_ab / n - mu_a * mu_b;
      const double sd_a = std::sqrt(var_a);
      const double sd_b = std::sqrt(var_b);

      const double l = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
      const double c = (2.0 * sd_a * sd_b + c2) / (var_a + var_b + c2);
      const double s = (cov + c3) / (sd_a * sd_b + c3);
      total += std::pow(l, params.alpha) * std::pow(c, params.beta) *
               (s < 0.0 ? -std::pow(-s, params.gamma) : std::pow(s, params.gamma));
      ++windows;
    }
  }
  return total / windows;
}

// Transmission cost of the protection: extra bytes relative to the plain
// stream. 1380 bytes sent for 1000 bytes of content is 38% overhead.
inline double overhead_pct(std::uint64_t sent_bytes, std::uint64_t original_bytes) {
  if (original_bytes == 0) throw std::invalid_argument("overhead_pct: original_bytes is zero");
  if (sent_bytes < original_bytes)
    throw std::invalid_argument("overhead_pct: sent fewer bytes than the original stream");
  return static_cast<double>(sent_bytes - original_bytes) / static_cast<double>(original_bytes);
}

inline double decodable_frame_ratio(const std::vector<bool>& frame_lost) {
  if (frame_lost.empty()) throw std::invalid_argument("decodable_frame_ratio: no frames");
  std::size_t ok = 0;
  for (const bool lost : frame_lost)
    if (!lost) ++ok;
  return static_cast<double>(ok) / static_cast<double>(frame_lost.size());
}

// One result row of a simulation run. mean_psnr_db is the PSNR of the mean
// per-frame MSE (not the mean of per-frame PSNRs, which the infinite value
// of any clean frame would destroy).
struct QoeRow {
  std::string mechanism;
  std::uint64_t seed = 0;
  double plr_setting = 0.0;
  double decodable_ratio = 0.0;
  double mean_psnr_db = 0.0;
  double mean_ssim = 0.0;
  double overhead_pct = 0.0;
};

inline void save_qoe_csv(const std::string& path, const std::vector<QoeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_qoe_csv: cannot open " + path);
  out << "mechanism,seed,plr_setting,decodable_ratio,mean_psnr_db,mean_ssim,overhead_pct\n";
  char buf[256];
  for (const auto& r : rows) {
    if (r.mechanism.find(',') != std::string::npos || r.mechanism.find('\n') != std::string::npos)
      throw std::invalid_argument("save_qoe_csv: mechanism name contains a delimiter");
    std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.17g,%.17g,%.17g,%.17g", r.mechanism.c_str(),
                  static_cast<unsigned long long>(r.seed), r.plr_setting, r.decodable_ratio,
                  r.mean_psnr_db, r.mean_ssim, r.overhead_pct);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("save_qoe_csv: write failed for " + path);
}

}  // namespace vidfec

// Acceptance gate: end-to-end checks of the library's load-bearing claims,
// one [PASS]/[FAIL] line each, nonzero exit if anything fails. Tolerances are
// pinned next to each check. Total runtime budget is well under two minutes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vidfec/aco.hpp"
#include "vidfec/channel.hpp"
#include "vidfec/fec.hpp"
#include "vidfec/fuzzy.hpp"
#include "vidfec/fuzzy_builtins.hpp"
#include "vidfec/harness.hpp"
#include "vidfec/mechanisms.hpp"
#include "vidfec/netstate.hpp"
#include "vidfec/qoe.hpp"
#include "vidfec/rng.hpp"
#include "vidfec/video.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// --- 1: erasure recovery, exhaustive and randomized ------------------------------

void check_rs_recovery() {
  const auto t0 = Clock::now();
  vidfec::Rng rng(42);
  bool ok = true;
  long exhaustive_cases = 0;

  for (int k = 1; k <= 8 && ok; ++k) {
    for (int h = 0; h <= 4 && ok; ++h) {
      const int n = k + h;
      std::vector<std::vector<std::uint8_t>> source(static_cast<std::size_t>(k));
      for (auto& s : source) {
        s.resize(16);
        for (auto& byte : s) byte = static_cast<std::uint8_t>(rng.next_below(256));
      }
      const auto shards = vidfec::rs_encode(source, h);
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        vidfec::FecBlock block;
        block.params = vidfec::RsParams(k, h);
        block.shards.resize(static_cast<std::size_t>(n));
        int present = 0;
        for (int i = 0; i < n; ++i)
          if (mask & (1u << i)) {
            block.shards[static_cast<std::size_t>(i)] = shards[static_cast<std::size_t>(i)];
            ++present;
          }
        const auto decoded = vidfec::rs_decode(block);
        const bool expect_decode = present >= k;
        if (decoded.has_value() != expect_decode || (decoded && *decoded != source)) {
          ok = false;
          break;
        }
        ++exhaustive_cases;
      }
    }
  }

  int randomized = 0;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int k = 1 + static_cast<int>(rng.next_below(32));
    const int h = static_cast<int>(rng.next_below(17));
    const int n = k + h;
    std::vector<std::vector<std::uint8_t>> source(static_cast<std::size_t>(k));
    for (auto& s : source) {
      s.resize(64);
      for (auto& byte : s) byte = static_cast<std::uint8_t>(rng.next_below(256));
    }
    const auto shards = vidfec::rs_encode(source, h);
    vidfec::FecBlock block;
    block.params = vidfec::RsParams(k, h);
    block.shards.resize(static_cast<std::size_t>(n));
    int present = 0;
    for (int i = 0; i < n; ++i)
      if (rng.bernoulli(0.6)) {
        block.shards[static_cast<std::size_t>(i)] = shards[static_cast<std::size_t>(i)];
        ++present;
      }
    const auto decoded = vidfec::rs_decode(block);
    if (decoded.has_value() != (present >= k) || (decoded && *decoded != source)) ok = false;
    ++randomized;
  }

  const double dt = seconds_since(t0);
  ok = ok && dt < 10.0;
  report(ok, "rs-erasure-recovery",
         fmt("%ld exhaustive erasure patterns (k<=8, h<=4) + %d randomized (k<=32, h<=16), %.2fs "
             "(budget 10s)",
             exhaustive_cases, randomized, dt));
}

// --- 2: full-model loss occupancy -------------------------------------------------

void check_ge_occupancy() {
  const auto t0 = Clock::now();
  const vidfec::GeParams sets[5] = {{0.0, 1.0, 0.1, 0.4},
                                    {0.01, 0.9, 0.05, 0.3},
                                    {0.02, 0.8, 0.2, 0.5},
                                    {0.005, 0.95, 0.03, 0.15},
                                    {0.05, 0.7, 0.3, 0.6}};
  constexpr int kSteps = 1000000;
  constexpr double kTol = 0.01;
  double worst = 0.0;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    vidfec::Rng rng(100 + static_cast<std::uint64_t>(i));
    vidfec::GilbertElliotChannel ch(sets[i]);
    long lost = 0;
    for (int s = 0; s < kSteps; ++s)
      if (!ch.step(rng)) ++lost;
    const double measured = static_cast<double>(lost) / kSteps;
    const double predicted = vidfec::ge_avg_loss(sets[i].pg, sets[i].pb, sets[i].k, sets[i].r);
    worst = std::max(worst, std::abs(measured - predicted));
  }
  const double dt = seconds_since(t0);
  ok = worst <= kTol && dt < 5.0;
  report(ok, "ge-loss-occupancy",
         fmt("5 parameter sets x 1e6 steps, worst |measured - predicted| = %.5f (tol %.2f), %.2fs "
             "(budget 5s)",
             worst, kTol, dt));
}

// --- 3: simplified-model occupancy and its printed loss formula --------------------

void check_simplified_ge_occupancy() {
  const vidfec::SimplifiedGeParams sets[4] = {{0.05, 0.2}, {0.1, 0.3}, {0.02, 0.5}, {0.15, 0.25}};
  constexpr int kSteps = 1000000;
  constexpr double kTol = 0.01;
  double worst = 0.0;
  std::string notes;
  for (int i = 0; i < 4; ++i) {
    vidfec::Rng rng(200 + static_cast<std::uint64_t>(i));
    vidfec::SimplifiedGeChannel ch(sets[i]);
    long lost = 0;
    for (int s = 0; s < kSteps; ++s)
      if (!ch.step(rng)) ++lost;
    const double measured = static_cast<double>(lost) / kSteps;
    const double true_loss = vidfec::simplified_bad_occupancy(sets[i].p_gb, sets[i].p_bg);
    const double printed = vidfec::simplified_plr(sets[i].p_gb, sets[i].p_bg);
    worst = std::max(worst, std::abs(measured - true_loss));
    if (std::abs(printed - true_loss) > kTol)
      notes += fmt(" [set %d reports %.3f, actual loss %.3f]", i, printed, true_loss);
  }
  const bool ok = worst <= kTol;
  report(ok, "simplified-ge-occupancy",
         fmt("4 parameter sets x 1e6 steps, worst |measured - bad occupancy| = %.5f (tol %.2f);"
             " divergent printed loss formulas flagged:%s",
             worst, kTol, notes.empty() ? " none" : notes.c_str()));
}

// --- 4: fuzzy term pins and loss-sweep monotonicity ---------------------------------

bool zone_monotone(const std::vector<double>& values, double step_slack, double overall_gap) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1] - step_slack) return false;
  return values.back() > values.front() + overall_gap;
}

void check_fuzzy_builtins() {
  constexpr double kMembTol = 1e-12;
  constexpr double kStepSlack = 2.5e-3;  // centroid grid ripple
  constexpr double kOverallGap = 0.02;
  bool ok = true;
  std::string what = "term bounds exact";

  // Pinned exemplar bounds straight off the built-in variables.
  const auto shield_plr = vidfec::detail::plr_variable(12.0, 5.0, 23.0, 19.0);
  const auto& low = shield_plr.term("LOW");
  ok &= low.shape == vidfec::TermShape::Triangular && low.a == 0.0 && low.b == 12.0;

  const auto uav = vidfec::builtin_uavfec_engine();
  const auto& motion = uav.input("MotionIntensity");
  ok &= motion.term("LOW").shape == vidfec::TermShape::ShoulderLeft &&
        motion.term("LOW").a == 10000.0 && motion.term("LOW").b == 30000.0;
  ok &= motion.term("MEDIUM").a == 21000.0 && motion.term("MEDIUM").b == 80000.0;
  ok &= motion.term("HIGH").shape == vidfec::TermShape::ShoulderRight &&
        motion.term("HIGH").a == 60000.0 && motion.term("HIGH").b == 130000.0;
  ok &= uav.input("PacketLossRate").term("LOW").b == 15.0;
  ok &= vidfec::builtin_mintfec_engine().input("PacketLossRate").term("LOW").b == 10.0;
  if (!ok) what = "term bound pin failed";

  // Hand membership values.
  bool memb_ok = std::abs(low.membership(6.0) - 1.0) <= kMembTol &&
                 std::abs(low.membership(3.0) - 0.5) <= kMembTol &&
                 std::abs(low.membership(12.0)) <= kMembTol &&
                 std::abs(motion.term("LOW").membership(10000.0) - 1.0) <= kMembTol &&
                 std::abs(motion.term("LOW").membership(20000.0) - 0.5) <= kMembTol &&
                 std::abs(motion.term("LOW").membership(30000.0)) <= kMembTol &&
                 std::abs(motion.term("HIGH").membership(95000.0) - 0.5) <= kMembTol;
  if (!memb_ok) what = "hand membership values drifted";
  ok &= memb_ok;

  // Loss sweeps: redundancy never drops beyond grid ripple and climbs overall.
  // Loss terms are triangular, so each sweep starts at the engine's LOW core
  // (membership peak); at exactly 0 no rule fires and the midpoint fallback
  // would mask the trend.
  const auto mint = vidfec::builtin_mintfec_engine();
  const auto corvette = vidfec::builtin_corvette_graph();
  const auto shield = vidfec::builtin_shield_graph();
  int sweeps = 0;
  for (const double m : {5000.0, 50500.0, 140000.0}) {
    std::vector<double> vals;
    for (double plr = 7.5; plr <= 60.0; plr += 0.5)
      vals.push_back(uav.infer({{"MotionIntensity", m}, {"PacketLossRate", plr}}).value);
    if (!zone_monotone(vals, kStepSlack, kOverallGap)) {
      ok = false;
      what = fmt("uav sweep not monotone at motion %.0f", m);
    }
    ++sweeps;
  }
  {
    std::vector<double> vals;
    for (double plr = 5.0; plr <= 60.0; plr += 0.5)
      vals.push_back(mint.infer({{"FrameSizeI", 0.5},
                                 {"FrameSizeP", 0.25},
                                 {"FrameSizeB", 0.25},
                                 {"PacketLossRate", plr}})
                         .value);
    if (!zone_monotone(vals, kStepSlack, kOverallGap)) {
      ok = false;
      what = "mint sweep not monotone";
    }
    ++sweeps;
  }
  for (const bool with_snr : {false, true}) {
    vidfec::FuzzyInputs in{{"Density", 100.0},   {"Distance", 400.0},        {"TemporalIntensity", 40000.0},
                           {"SpatialComplexity", 0.4}, {"FrameRelevance", 0.5}};
    if (with_snr) in["Snr"] = 15.0;
    std::vector<double> vals;
    for (double plr = with_snr ? 6.0 : 5.5; plr <= 60.0; plr += 0.5) {
      in["PacketLossRate"] = plr;
      vals.push_back(vidfec::hfs_infer(with_snr ? shield : corvette, in).value);
    }
    if (!zone_monotone(vals, kStepSlack, kOverallGap)) {
      ok = false;
      what = fmt("%s sweep not monotone", with_snr ? "shield" : "corvette");
    }
    ++sweeps;
  }

  report(ok, "fuzzy-terms-and-loss-sweeps",
         fmt("%s; memberships within %.0e; %d loss sweeps monotone (step slack %.1e, overall gap > "
             "%.2f)",
             what.c_str(), kMembTol, sweeps, kStepSlack, kOverallGap));
}

// --- 5: anchor-position redundancy against a brute-force oracle ---------------------

void check_anchor_redundancy_oracle() {
  constexpr std::uint64_t kPayload = 1000;
  vidfec::Rng rng(99);
  bool oracle_ok = true;
  for (int trial = 0; trial < 100 && oracle_ok; ++trial) {
    const int n = 6 + static_cast<int>(rng.next_below(19));
    const int m = 1 + static_cast<int>(rng.next_below(4));
    const vidfec::GopLayout layout(n, m);
    std::vector<vidfec::FrameRecord> frames(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      frames[static_cast<std::size_t>(i)].index = static_cast<std::uint64_t>(i);
      frames[static_cast<std::size_t>(i)].kind = layout.type_at(static_cast<std::uint64_t>(i));
      frames[static_cast<std::size_t>(i)].size_bytes = 256 + rng.next_below(20000);
    }
    const double c = 0.25 + 0.75 * rng.next_double();

    double expected = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& f = frames[static_cast<std::size_t>(i)];
      if (f.kind == vidfec::FrameType::B) continue;
      const double fs = std::ceil(static_cast<double>(f.size_bytes) / static_cast<double>(kPayload));
      const int rp = f.kind == vidfec::FrameType::I ? 1 : 1 + i % n / m;
      expected += fs * c / rp;
    }
    const double got =
        vidfec::viewfec_gop_redundancy(frames, layout, vidfec::ViewFecParams{}, c, kPayload);
    if (std::abs(got - expected) > 1e-12 * std::max(1.0, expected)) oracle_ok = false;
  }

  // Per-frame split: frame-level decisions must sum back to the GoP budget.
  const vidfec::GopLayout layout(19, 3);
  std::vector<vidfec::FrameRecord> frames(19);
  for (int i = 0; i < 19; ++i) {
    frames[static_cast<std::size_t>(i)].index = static_cast<std::uint64_t>(i);
    frames[static_cast<std::size_t>(i)].kind = layout.type_at(static_cast<std::uint64_t>(i));
    frames[static_cast<std::size_t>(i)].size_bytes = 512 + 997u * static_cast<std::uint64_t>(i);
  }
  const vidfec::MechanismEngines engines;
  vidfec::Rng mech_rng(1);
  double split_sum = 0.0;
  for (const auto& f : frames) {
    vidfec::MechanismContext ctx;
    ctx.frame = f;
    ctx.gop = layout;
    const auto d =
        vidfec::decide(vidfec::MechanismKind::adaptive(vidfec::MechanismId::ViewFec), ctx, engines, mech_rng);
    split_sum += std::ceil(static_cast<double>(f.size_bytes) / static_cast<double>(kPayload)) * d.ratio;
  }
  // decide() gates ViewFec by the context's intensity cluster, Medium by default.
  const double c_medium = vidfec::ViewFecParams{}.alpha(vidfec::IntensityLevel::Medium);
  const double total =
      vidfec::viewfec_gop_redundancy(frames, layout, vidfec::ViewFecParams{}, c_medium, kPayload);
  const bool split_ok = split_sum == total;

  report(oracle_ok && split_ok, "anchor-redundancy-oracle",
         fmt("100 random GoPs within 1e-12 relative of the brute-force budget; per-frame split sums "
             "back %s",
             split_ok ? "bitwise" : "WRONG"));
}

// --- 6: hull area oracles ---------------------------------------------------------

// O(n^3) boundary test: a point is on the hull boundary iff it supports a
// line with every other point on one closed side.
std::vector<vidfec::Point> brute_hull_boundary(std::vector<vidfec::Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const vidfec::Point& a, const vidfec::Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<bool> on_hull(n, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool pos = false, neg = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double c = (pts[j].x - pts[i].x) * (pts[k].y - pts[i].y) -
                         (pts[j].y - pts[i].y) * (pts[k].x - pts[i].x);
        if (c > 0) pos = true;
        if (c < 0) neg = true;
      }
      if (!(pos && neg)) {
        on_hull[i] = true;
        on_hull[j] = true;
      }
    }
  std::vector<vidfec::Point> boundary;
  double cx = 0, cy = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (on_hull[i]) boundary.push_back(pts[i]);
  for (const auto& p : boundary) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(boundary.size());
  cy /= static_cast<double>(boundary.size());
  std::sort(boundary.begin(), boundary.end(), [&](const vidfec::Point& a, const vidfec::Point& b) {
    const double aa = std::atan2(a.y - cy, a.x - cx);
    const double ab = std::atan2(b.y - cy, b.x - cx);
    if (aa != ab) return aa < ab;
    const double da = (a.x - cx) * (a.x - cx) + (a.y - cy) * (a.y - cy);
    const double db = (b.x - cx) * (b.x - cx) + (b.y - cy) * (b.y - cy);
    return da < db;
  });
  return boundary;
}

void check_hull_oracles() {
  vidfec::Rng rng(7);
  constexpr int kTrials = 500;
  constexpr double kAreaTol = 1e-6;
  bool ok = true;
  double worst_gap = 0.0;
  for (int trial = 0; trial < kTrials && ok; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(10));
    std::vector<vidfec::Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
      p.x = static_cast<double>(rng.next_below(100));  // small grid forces collinear runs
      p.y = static_cast<double>(rng.next_below(100));
    }
    const auto quick = vidfec::quickhull(pts);
    const double exact = vidfec::polygon_area(quick);
    const double brute = vidfec::polygon_area(brute_hull_boundary(pts));
    worst_gap = std::max(worst_gap, std::abs(exact - brute));
    if (std::abs(exact - brute) > kAreaTol) ok = false;

    const auto approx = vidfec::bfp_hull(pts, 8);
    if (vidfec::polygon_area(approx) > exact + 1e-9) ok = false;
  }

  std::vector<vidfec::Point> circle(256);
  for (int i = 0; i < 256; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * i / 256.0;
    circle[static_cast<std::size_t>(i)] = {1000.0 * std::cos(a), 1000.0 * std::sin(a)};
  }
  const double circle_exact = vidfec::polygon_area(vidfec::quickhull(circle));
  const double circle_bfp = vidfec::polygon_area(vidfec::bfp_hull(circle, 64));
  const double circle_err = (circle_exact - circle_bfp) / circle_exact;
  if (!(circle_bfp <= circle_exact + 1e-9) || circle_err > 0.05) ok = false;

  report(ok, "hull-area-oracles",
         fmt("%d trials vs O(n^3) boundary oracle (worst gap %.2e), strip hull never exceeds exact, "
             "256-gon at 64 strips within %.2f%% (tol 5%%)",
             kTrials, worst_gap, circle_err * 100.0));
}

// --- 7: damage propagation counts ----------------------------------------------------

void check_damage_counts() {
  const vidfec::GopLayout layout(19, 3);
  bool ok = true;
  std::string bad;
  for (std::size_t f = 0; f < 19; ++f) {
    std::vector<bool> lost(19, false);
    lost[f] = true;
    const auto damaged = vidfec::propagate_gop_damage(layout, lost);
    std::size_t count = 0;
    for (const bool d : damaged)
      if (d) ++count;
    const vidfec::FrameType kind = layout.type_at(f);
    const std::size_t expected = kind == vidfec::FrameType::I   ? 19
                                 : kind == vidfec::FrameType::P ? 19 - f
                                                                : 1;
    if (count != expected) {
      ok = false;
      bad = fmt(" (frame %zu: %zu damaged, expected %zu)", f, count, expected);
    }
  }
  report(ok, "gop-damage-propagation",
         "single losses in a 19-frame GoP damage 19 (I) / 19-offset (P) / 1 (B) frames" + bad);
}

// --- 8: pixel metric pins --------------------------------------------------------------

void check_qoe_pins() {
  constexpr double kTol = 1e-12;
  bool ok = std::isinf(vidfec::psnr_db(0.0));
  ok &= std::abs(vidfec::psnr_db(65025.0)) <= kTol;
  ok &= std::abs(vidfec::psnr_db(16256.25) - 6.0205999132796239) <= kTol;

  vidfec::Rng rng(5);
  vidfec::PixelFrame a(32, 32);
  for (auto& px : a.data) px = static_cast<std::uint8_t>(rng.next_below(256));
  ok &= vidfec::mse(a, a) == 0.0;
  ok &= std::abs(vidfec::ssim(a, a) - 1.0) <= 1e-9;

  int pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double u = rng.uniform(1e-6, 65025.0);
    const double v = rng.uniform(1e-6, 65025.0);
    if (u == v) continue;
    const bool inverse = (u < v) == (vidfec::psnr_db(u) > vidfec::psnr_db(v));
    if (!inverse) ok = false;
    ++pairs;
  }
  report(ok, "pixel-metric-pins",
         fmt("psnr(0)=inf, psnr(65025)=0dB, psnr(16256.25) within 1e-12 of 6.02060dB, ssim(a,a)=1, "
             "%d random pairs inverse-monotone",
             pairs));
}

// --- 9: harness overhead and the paired five-mechanism table --------------------------

void check_harness_comparison() {
  const auto t0 = Clock::now();

  vidfec::ScenarioConfig pinned;
  pinned.trace.synth.gop_count = 1;
  pinned.trace.synth.size_i = 50000;
  pinned.trace.synth.size_p = 25000;
  pinned.trace.synth.size_b = 1000;
  pinned.mechanism.kind = vidfec::MechanismKind::va_eep(0.38);
  pinned.run.seed = 7;
  const double eep_overhead = vidfec::run_scenario(pinned)[0].overhead_pct;
  pinned.mechanism.kind = vidfec::MechanismKind::va_uep(0.38, 0.25);
  const double uep_overhead = vidfec::run_scenario(pinned)[0].overhead_pct;
  bool ok = std::abs(eep_overhead - 0.38) <= 0.02 && uep_overhead < eep_overhead;

  vidfec::ScenarioConfig base;
  base.trace.synth.gop_count = 5;  // 95 frames
  base.run.seed = 7;
  base.run.repetitions = 2;
  std::vector<vidfec::ScenarioConfig> cfgs(5, base);
  cfgs[0].mechanism.kind = vidfec::MechanismKind::no_fec();
  cfgs[1].mechanism.kind = vidfec::MechanismKind::va_eep(0.38);
  cfgs[2].mechanism.kind = vidfec::MechanismKind::va_uep(0.38, 0.25);
  cfgs[3].mechanism.kind = vidfec::MechanismKind::adaptive(vidfec::MechanismId::ViewFec);
  cfgs[4].mechanism.kind = vidfec::MechanismKind::adaptive(vidfec::MechanismId::Shield);
  const auto table = vidfec::compare_mechanisms(cfgs);
  std::string detail = fmt("overhead eep %.4f (0.38 +/- 0.02), uep %.4f < eep; decodable at 20%% loss:",
                           eep_overhead, uep_overhead);
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (!(table[i].decodable_ratio > table[0].decodable_ratio)) ok = false;
    detail += fmt(" %s %.3f", table[i].mechanism.c_str(), table[i].decodable_ratio);
  }
  detail += fmt(" all > nofec %.3f", table[0].decodable_ratio);

  const double dt = seconds_since(t0);
  ok = ok && dt < 60.0;
  report(ok, "overhead-and-paired-comparison", detail + fmt(", %.1fs (budget 60s)", dt));
}

// --- 10: ant tours ---------------------------------------------------------------------

void check_ant_tours() {
  const auto g = vidfec::AcoGraph::standard();
  vidfec::Rng rng(11);
  const int motions[] = {vidfec::AcoGraph::kMotionLow, vidfec::AcoGraph::kMotionMedium,
                         vidfec::AcoGraph::kMotionHigh};
  const int sizes[] = {vidfec::AcoGraph::kSizeSmall, vidfec::AcoGraph::kSizeMedium,
                       vidfec::AcoGraph::kSizeLarge};
  const int frames[] = {vidfec::AcoGraph::kFrameP, vidfec::AcoGraph::kFrameI};
  const int errors[] = {vidfec::AcoGraph::kErrNe, vidfec::AcoGraph::kErrSse, vidfec::AcoGraph::kErrSe,
                        vidfec::AcoGraph::kErrSme, vidfec::AcoGraph::kErrMe};

  bool constraints_ok = true;
  constexpr int kSamples = 10000;
  for (int s = 0; s < kSamples && constraints_ok; ++s) {
    vidfec::AcoContext ctx;
    ctx.motion = motions[rng.next_below(3)];
    ctx.frame = frames[rng.next_below(2)];
    ctx.size = sizes[rng.next_below(3)];
    ctx.error = errors[rng.next_below(5)];
    vidfec::Rng run_rng(rng.next_u64());
    const auto result = vidfec::aco_run(g, ctx, vidfec::AcoParams{}, run_rng);
    const auto& t = result.best;
    if (t.nodes[0] != vidfec::AcoGraph::kStart) constraints_ok = false;
    double severity_sum = 0.0;
    for (int layer = 1; layer <= 4; ++layer) {
      const int node = t.nodes[static_cast<std::size_t>(layer)];
      if (vidfec::AcoGraph::layer_of(node) != layer) constraints_ok = false;
      if (ctx.node_weight(node) <= 0.0) constraints_ok = false;
      severity_sum += vidfec::AcoGraph::severity(node);
    }
    if (t.raw_length != severity_sum) constraints_ok = false;
    if (result.redundancy != vidfec::tour_redundancy(g, t.raw_length)) constraints_ok = false;
    if (result.redundancy < 0.55 || result.redundancy > 1.0) constraints_ok = false;
  }

  // Exhaustive 90-context enumeration: the cheapest reachable tour is the
  // pinned tour, its redundancy strictly climbs with every severity step, and
  // a converged colony lands on the same optimum.
  bool monotone_ok = true;
  bool colony_ok = true;
  double red[3][2][3][5];
  vidfec::AcoParams converged;
  converged.iterations = 50;
  for (int m = 0; m < 3; ++m)
    for (int f = 0; f < 2; ++f)
      for (int s = 0; s < 3; ++s)
        for (int e = 0; e < 5; ++e) {
          vidfec::AcoContext ctx;
          ctx.motion = motions[m];
          ctx.frame = frames[f];
          ctx.size = sizes[s];
          ctx.error = errors[e];
          const auto tours = vidfec::enumerate_tours(g, &ctx);
          const vidfec::Tour* best = nullptr;
          for (const auto& t : tours)
            if (!best || t.effective_length < best->effective_length) best = &t;
          red[m][f][s][e] = vidfec::tour_redundancy(g, best->raw_length);
          vidfec::Rng colony_rng(5);
          if (vidfec::aco_run(g, ctx, converged, colony_rng).redundancy != red[m][f][s][e])
            colony_ok = false;
        }
  for (int m = 0; m < 3; ++m)
    for (int f = 0; f < 2; ++f)
      for (int s = 0; s < 3; ++s)
        for (int e = 0; e < 5; ++e) {
          if (m + 1 < 3 && !(red[m + 1][f][s][e] > red[m][f][s][e])) monotone_ok = false;
          if (f + 1 < 2 && !(red[m][f + 1][s][e] > red[m][f][s][e])) monotone_ok = false;
          if (s + 1 < 3 && !(red[m][f][s + 1][e] > red[m][f][s][e])) monotone_ok = false;
          if (e + 1 < 5 && !(red[m][f][s][e + 1] > red[m][f][s][e])) monotone_ok = false;
        }

  vidfec::AcoContext ctx;
  ctx.motion = vidfec::AcoGraph::kMotionHigh;
  ctx.frame = vidfec::AcoGraph::kFrameI;
  ctx.error = vidfec::AcoGraph::kErrSme;
  vidfec::Rng r1(123), r2(123);
  const auto a = vidfec::aco_run(g, ctx, vidfec::AcoParams{}, r1);
  const auto b = vidfec::aco_run(g, ctx, vidfec::AcoParams{}, r2);
  const bool deterministic =
      a.best.nodes == b.best.nodes && a.best.raw_length == b.best.raw_length && a.redundancy == b.redundancy;

  report(constraints_ok && monotone_ok && colony_ok && deterministic, "ant-tour-constraints",
         fmt("%d sampled tours respect layers/reachability/length accounting; 90-context enumeration "
             "strictly severity-monotone; converged colony matches every enumerated optimum; same "
             "seed reproduces bit-exact",
             kSamples));
}

// --- 11: byte-identical reports -----------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void check_deterministic_reports() {
  vidfec::ScenarioConfig cfg;
  cfg.trace.synth.gop_count = 2;
  cfg.mechanism.kind = vidfec::MechanismKind::adaptive(vidfec::MechanismId::PredictiveAnts);
  cfg.run.seed = 31;
  cfg.run.repetitions = 2;

  const auto rows1 = vidfec::run_scenario(cfg);
  const auto rows2 = vidfec::run_scenario(cfg);
  const std::string p1 = "acceptance_rows1.csv";
  const std::string p2 = "acceptance_rows2.csv";
  vidfec::save_qoe_csv(p1, rows1);
  vidfec::save_qoe_csv(p2, rows2);
  const std::string b1 = read_file(p1);
  const bool ok = !b1.empty() && b1 == read_file(p2);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  report(ok, "byte-identical-reports",
         fmt("two runs of the same (config, seed) produce byte-identical CSV (%zu bytes, adaptive "
             "mechanism with colony randomness)",
             b1.size()));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  check_rs_recovery();
  check_ge_occupancy();
  check_simplified_ge_occupancy();
  check_fuzzy_builtins();
  check_anchor_redundancy_oracle();
  check_hull_oracles();
  check_damage_counts();
  check_qoe_pins();
  check_harness_comparison();
  check_ant_tours();
  check_deterministic_reports();
  std::printf("%d criteria failed, %.1fs total\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}

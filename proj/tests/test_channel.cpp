#include "vidfec/channel.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <vector>

#include "vidfec/rng.hpp"

namespace {

using vidfec::ErrorClass;
using vidfec::GapStats;
using vidfec::GeParams;
using vidfec::Rng;
using vidfec::SimplifiedGeParams;

TEST(GilbertElliot, SteadyStateClosedForm) {
  const auto [phi_g, phi_b] = vidfec::ge_steady_state(0.1, 0.4);
  EXPECT_DOUBLE_EQ(phi_g, 0.8);
  EXPECT_DOUBLE_EQ(phi_b, 0.2);
  EXPECT_THROW(vidfec::ge_steady_state(0.0, 0.4), std::invalid_argument);
  EXPECT_THROW(vidfec::ge_steady_state(0.1, 1.0), std::invalid_argument);
}

TEST(GilbertElliot, AverageLossClosedForm) {
  EXPECT_NEAR(vidfec::ge_avg_loss(0.01, 0.5, 0.1, 0.4), 0.108, 1e-12);
  EXPECT_THROW(vidfec::ge_avg_loss(-0.1, 0.5, 0.1, 0.4), std::invalid_argument);
}

// Empirical occupancy of a long simulated chain must match the closed form.
// This is the independent oracle for the steady-state equations.
TEST(GilbertElliot, SimulatedOccupancyMatchesClosedForm) {
  const GeParams params{0.01, 0.5, 0.1, 0.4};
  vidfec::GilbertElliotChannel ch(params);
  Rng rng(42);
  const int steps = 200000;
  int good = 0;
  int lost = 0;
  for (int i = 0; i < steps; ++i) {
    if (ch.state() == vidfec::GeState::Good) ++good;
    if (!ch.step(rng)) ++lost;
  }
  EXPECT_NEAR(static_cast<double>(good) / steps, 0.8, 0.01);
  EXPECT_NEAR(static_cast<double>(lost) / steps, 0.108, 0.01);
}

TEST(SimplifiedGe, PrintedFormulaAndTrueOccupancyDiverge) {
  // The published loss-rate computation yields the good-state share.
  EXPECT_DOUBLE_EQ(vidfec::simplified_plr(0.05, 0.2), 0.8);
  // The fraction of packets actually lost is the bad-state share.
  EXPECT_DOUBLE_EQ(vidfec::simplified_bad_occupancy(0.05, 0.2), 0.2);
  EXPECT_THROW(vidfec::simplified_plr(0.0, 0.2), std::invalid_argument);
}

TEST(SimplifiedGe, SimulatedLossMatchesBadOccupancy) {
  vidfec::SimplifiedGeChannel ch(SimplifiedGeParams{0.05, 0.2});
  Rng rng(7);
  const int steps = 200000;
  int lost = 0;
  for (int i = 0; i < steps; ++i)
    if (!ch.step(rng)) ++lost;
  EXPECT_NEAR(static_cast<double>(lost) / steps, 0.2, 0.01);
}

TEST(Channels, SeededDeterminism) {
  const GeParams params{0.01, 0.5, 0.1, 0.4};
  std::vector<bool> a, b;
  {
    vidfec::GilbertElliotChannel ch(params);
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) a.push_back(ch.step(rng));
  }
  {
    vidfec::GilbertElliotChannel ch(params);
    Rng rng(123);
    for (int i = 0; i < 1000; ++i) b.push_back(ch.step(rng));
  }
  EXPECT_EQ(a, b);
}

TEST(GapStats, SpecExample) {
  // ok ok lost lost ok lost -> good [2, 1], bad [2, 1]
  const std::vector<bool> trace = {true, true, false, false, true, false};
  const auto stats = vidfec::gap_stats(trace);
  EXPECT_EQ(stats.good_gaps, (std::vector<std::uint64_t>{2, 1}));
  EXPECT_EQ(stats.bad_gaps, (std::vector<std::uint64_t>{2, 1}));
  EXPECT_EQ(stats.total_packets, 6u);
  EXPECT_TRUE(stats.first_run_delivered);
}

TEST(GapStats, RoundTripsRandomTraces) {
  Rng rng(99);
  for (int t = 0; t < 50; ++t) {
    std::vector<bool> trace;
    const int len = static_cast<int>(rng.next_below(200));
    for (int i = 0; i < len; ++i) trace.push_back(rng.bernoulli(0.7));
    const auto stats = vidfec::gap_stats(trace);
    EXPECT_EQ(vidfec::expand_gap_stats(stats), trace);
    std::uint64_t total = 0;
    for (auto g : stats.good_gaps) total += g;
    for (auto b : stats.bad_gaps) total += b;
    EXPECT_EQ(total, stats.total_packets);
  }
}

TEST(GapStats, EmptyAndUniformTraces) {
  const auto empty = vidfec::gap_stats({});
  EXPECT_TRUE(empty.good_gaps.empty());
  EXPECT_TRUE(empty.bad_gaps.empty());
  EXPECT_EQ(empty.total_packets, 0u);

  const auto all_good = vidfec::gap_stats(std::vector<bool>(5, true));
  EXPECT_EQ(all_good.good_gaps, (std::vector<std::uint64_t>{5}));
  EXPECT_TRUE(all_good.bad_gaps.empty());

  const auto all_bad = vidfec::gap_stats(std::vector<bool>(4, false));
  EXPECT_EQ(all_bad.bad_gaps, (std::vector<std::uint64_t>{4}));
  EXPECT_FALSE(all_bad.first_run_delivered);
}

TEST(PredictErrorClass, SpecExamples) {
  GapStats none;
  none.good_gaps = {50};
  none.total_packets = 50;
  EXPECT_EQ(vidfec::predict_error_class(none, 10), ErrorClass::NoError);

  GapStats single;  // g = 18, b = 2 -> e = 0.5, gap of 2 fits -> SE
  single.good_gaps = {18};
  single.bad_gaps = {2};
  EXPECT_EQ(vidfec::predict_error_class(single, 10), ErrorClass::SingleError);

  GapStats dense;  // g = 2, b = 2 -> e = 2.5, leftover 2 -> shared -> SME
  dense.good_gaps = {2};
  dense.bad_gaps = {2};
  EXPECT_EQ(vidfec::predict_error_class(dense, 10), ErrorClass::SharedMultipleErrors);
}

TEST(PredictErrorClass, MultipleContainedErrors) {
  // g = 3, b = 1: cycle 4, e = 2.5, leftover 2 > b -> gaps complete inside.
  GapStats s;
  s.good_gaps = {3};
  s.bad_gaps = {1};
  EXPECT_EQ(vidfec::predict_error_class(s, 10), ErrorClass::MultipleErrors);
}

TEST(PredictErrorClass, SingleSharedError) {
  // g = 8, b = 4: cycle 12, e = 0.83, leftover 10 mod 12 = 10... b < leftover
  // -> SE; tighten: g = 5, b = 5: cycle 10, e = 1, leftover 0 -> straddle.
  GapStats s;
  s.good_gaps = {5};
  s.bad_gaps = {5};
  EXPECT_EQ(vidfec::predict_error_class(s, 10), ErrorClass::SingleSharedError);
}

// Denser losses (shrinking good gaps, bad gaps fixed) never lower the zone
// level none < single < multiple.
TEST(PredictErrorClass, ZoneMonotoneUnderDenserLosses) {
  auto zone = [](ErrorClass c) {
    switch (c) {
      case ErrorClass::NoError: return 0;
      case ErrorClass::SingleSharedError:
      case ErrorClass::SingleError: return 1;
      default: return 2;
    }
  };
  for (double b = 1.0; b <= 6.0; b += 1.0) {
    int prev = 0;
    for (double g = 60.0; g >= 1.0; g -= 0.5) {
      GapStats s;
      s.good_gaps = {static_cast<std::uint64_t>(g * 2)};
      s.good_gaps.push_back(0);  // keep mean exactly g
      s.bad_gaps = {static_cast<std::uint64_t>(b)};
      const int z = zone(vidfec::predict_error_class(s, 10));
      EXPECT_GE(z, prev) << "g=" << g << " b=" << b;
      prev = z;
    }
  }
}

TEST(LossTrace, FileRoundTripWith80ColumnWrap) {
  Rng rng(5);
  std::vector<bool> trace;
  for (int i = 0; i < 205; ++i) trace.push_back(rng.bernoulli(0.8));
  const auto path = std::filesystem::temp_directory_path() / "vidfec_loss_trace_test.txt";
  vidfec::save_loss_trace(trace, path.string());

  // Verify the wrap: lines of at most 80 chars.
  std::ifstream in(path);
  std::string line;
  std::size_t chars = 0;
  while (std::getline(in, line)) {
    EXPECT_LE(line.size(), 80u);
    chars += line.size();
  }
  EXPECT_EQ(chars, trace.size());

  EXPECT_EQ(vidfec::load_loss_trace(path.string()), trace);
  std::filesystem::remove(path);
}

TEST(ReplayChannel, ReplaysAndThrowsWhenExhausted) {
  vidfec::ReplayChannel ch({true, false, true});
  EXPECT_TRUE(ch.step());
  EXPECT_FALSE(ch.step());
  EXPECT_EQ(ch.remaining(), 1u);
  EXPECT_TRUE(ch.step());
  EXPECT_THROW(ch.step(), std::runtime_error);
}

}  // namespace

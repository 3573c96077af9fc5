#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidfec/rng.hpp"

namespace vidfec {

// Layered context graph walked by the ant optimizer. A tour visits one node
// per layer: start, motion class, frame type, size class, predicted error
// class. Arc length defaults to the destination's severity weight, so the
// shortest unweighted tour is the most benign context (raw length 4) and the
// longest the most hostile (raw length 13).
class AcoGraph {
 public:
  static constexpr int kNodeCount = 14;
  static constexpr int kStart = 0;
  static constexpr int kMotionLow = 1, kMotionMedium = 2, kMotionHigh = 3;
  static constexpr int kFrameI = 4, kFrameP = 5;
  static constexpr int kSizeSmall = 6, kSizeMedium = 7, kSizeLarge = 8;
  static constexpr int kErrNe = 9, kErrSse = 10, kErrSe = 11, kErrSme = 12, kErrMe = 13;

  static const std::vector<std::vector<int>>& layers() {
    static const std::vector<std::vector<int>> kLayers{
        {kStart},
        {kMotionLow, kMotionMedium, kMotionHigh},
        {kFrameI, kFrameP},
        {kSizeSmall, kSizeMedium, kSizeLarge},
        {kErrNe, kErrSse, kErrSe, kErrSme, kErrMe}};
    return kLayers;
  }

  static const char* node_name(int id) {
    static const char* kNames[kNodeCount] = {
        "start",      "motion_low", "motion_medium", "motion_high", "frame_i",
        "frame_p",    "size_small", "size_medium",   "size_large",  "err_ne",
        "err_sse",    "err_se",     "err_sme",       "err_me"};
    if (id < 0 || id >= kNodeCount) throw std::invalid_argument("node_name: bad id");
    return kNames[id];
  }

  static int node_id(const std::string& name) {
    for (int i = 0; i < kNodeCount; ++i)
      if (name == node_name(i)) return i;
    throw std::invalid_argument("node_id: unknown node '" + name + "'");
  }

  // Severity rank of a node inside its layer (used for arc defaults and
  // neighbor pinning). The P-frame ranks below the I-frame.
  static int severity(int id) {
    switch (id) {
      case kMotionLow: return 1;
      case kMotionMedium: return 2;
      case kMotionHigh: return 3;
      case kFrameP: return 1;
      case kFrameI: return 2;
      case kSizeSmall: return 1;
      case kSizeMedium: return 2;
      case kSizeLarge: return 3;
      case kErrNe: return 1;
      case kErrSse: return 2;
      case kErrSe: return 3;
      case kErrSme: return 4;
      case kErrMe: return 5;
    }
    throw std::invalid_argument("severity: node has no severity rank");
  }

  static int layer_of(int id) {
    for (std::size_t l = 0; l < layers().size(); ++l)
      for (int v : layers()[l])
        if (v == id) return static_cast<int>(l);
    throw std::invalid_argument("layer_of: bad id");
  }

  static AcoGraph standard() {
    AcoGraph g;
    for (std::size_t l = 0; l + 1 < layers().size(); ++l)
      for (int from : layers()[l])
        for (int to : layers()[l + 1])
          g.length_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] = severity(to);
    return g;
  }

  bool has_arc(int from, int to) const {
    return from >= 0 && to >= 0 && from < kNodeCount && to < kNodeCount &&
           length_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] > 0.0;
  }

  double length(int from, int to) const {
    if (!has_arc(from, to)) throw std::invalid_argument("length: no such arc");
    return length_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }

  void set_arc(int from, int to, double len) {
    if (layer_of(to) != layer_of(from) + 1)
      throw std::invalid_argument("set_arc: nodes are not in consecutive layers");
    if (!(len > 0.0)) throw std::invalid_argument("set_arc: length must be positive");
    length_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] = len;
  }

 private:
  std::array<std::array<double, kNodeCount>, kNodeCount> length_{};  // 0 marks "no arc"
};

// Observed per-frame situation pinning the graph: the matching node in each
// layer carries full weight, nodes one severity step away carry
// neighbor_weight, everything else is unreachable. The effective arc cost is
// length / destination weight, so the matching tour is the optimum by a wide
// margin (any detour costs at least 1 / neighbor_weight of its raw length).
struct AcoContext {
  int motion = AcoGraph::kMotionLow;
  int frame = AcoGraph::kFrameP;
  int size = AcoGraph::kSizeSmall;
  int error = AcoGraph::kErrNe;
  double neighbor_weight = 0.25;

  void validate() const {
    if (AcoGraph::layer_of(motion) != 1) throw std::invalid_argument("AcoContext: bad motion node");
    if (AcoGraph::layer_of(frame) != 2) throw std::invalid_argument("AcoContext: bad frame node");
    if (AcoGraph::layer_of(size) != 3) throw std::invalid_argument("AcoContext: bad size node");
    if (AcoGraph::layer_of(error) != 4) throw std::invalid_argument("AcoContext: bad error node");
    if (!(neighbor_weight >= 0.0) || neighbor_weight > 1.0)
      throw std::invalid_argument("AcoContext: neighbor_weight outside [0, 1]");
  }

  int pinned_node(int layer) const {
    switch (layer) {
      case 1: return motion;
      case 2: return frame;
      case 3: return size;
      case 4: return error;
    }
    throw std::invalid_argument("pinned_node: bad layer");
  }

  double node_weight(int id) const {
    const int layer = AcoGraph::layer_of(id);
    if (layer == 0) return 1.0;
    const int pinned = pinned_node(layer);
    if (id == pinned) return 1.0;
    return std::abs(AcoGraph::severity(id) - AcoGraph::severity(pinned)) == 1 ? neighbor_weight : 0.0;
  }
};

struct Tour {
  std::array<int, 5> nodes{};     // start plus one node per layer
  double raw_length = 0.0;        // sum of arc lengths
  double effective_length = 0.0;  // sum of length / weight under a context
};

// All complete tours in node-id order (3 * 2 * 3 * 5 = 90 for the standard
// graph shape). Without a context the effective length equals the raw one.
inline std::vector<Tour> enumerate_tours(const AcoGraph& g, const AcoContext* ctx = nullptr) {
  std::vector<Tour> tours;
  for (int m : AcoGraph::layers()[1]) {
    for (int f : AcoGraph::layers()[2]) {
      for (int s : AcoGraph::layers()[3]) {
        for (int e : AcoGraph::layers()[4]) {
          Tour t;
          t.nodes = {AcoGraph::kStart, m, f, s, e};
          for (int hop = 0; hop + 1 < 5; ++hop) {
            const double len = g.length(t.nodes[static_cast<std::size_t>(hop)],
                                        t.nodes[static_cast<std::size_t>(hop + 1)]);
            t.raw_length += len;
            if (ctx) {
              const double w = ctx->node_weight(t.nodes[static_cast<std::size_t>(hop + 1)]);
              t.effective_length =
                  w > 0.0 ? t.effective_length + len / w : std::numeric_limits<double>::infinity();
            } else {
              t.effective_length += len;
            }
          }
          tours.push_back(t);
        }
      }
    }
  }
  return tours;
}

// Affine map from raw tour length onto the redundancy band, anchored at the
// graph's shortest and longest complete tours ([4, 13] -> [0.55, 1.0] for
// the standard arc table).
inline double tour_redundancy(const AcoGraph& g, double raw_length) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : enumerate_tours(g)) {
    lo = std::min(lo, t.raw_length);
    hi = std::max(hi, t.raw_length);
  }
  if (!(hi > lo)) return 0.775;  // all tours equal: midpoint of the band
  const double unit = std::clamp((raw_length - lo) / (hi - lo), 0.0, 1.0);
  return 0.55 + 0.45 * unit;
}

struct AcoParams {
  int ants = 10;
  int iterations = 10;
  double evaporation = 0.5;
  double alpha = 1.0;  // pheromone exponent
  double beta = 2.0;   // heuristic (1 / effective length) exponent
  double tau_min = 0.01;
  double tau_max = 10.0;
  double tau_init = 1.0;

  void validate() const {
    if (ants < 1 || iterations < 1) throw std::invalid_argument("AcoParams: ants/iterations < 1");
    if (!(evaporation >= 0.0) || evaporation >= 1.0)
      throw std::invalid_argument("AcoParams: evaporation outside [0, 1)");
    if (!(tau_min > 0.0) || !(tau_max >= tau_min) || !(tau_init >= tau_min) || tau_init > tau_max)
      throw std::invalid_argument("AcoParams: bad pheromone bounds");
  }
};

struct AcoResult {
  Tour best;
  double redundancy = 0.0;
  int tours_completed = 0;
};

// Ant-system search for the cheapest context-weighted tour. Every ant walks
// the layers, sampling each hop proportionally to tau^alpha * (1/cost)^beta;
// after each iteration pheromone evaporates, each ant deposits 1 / tour cost
// on its arcs, and trails clamp to [tau_min, tau_max]. With the default
// pinning the matching tour dominates so strongly that the colony converges
// to it; the search still runs honestly and reports whatever it found.
inline AcoResult aco_run(const AcoGraph& graph, const AcoContext& context, const AcoParams& params,
                         Rng& rng, std::vector<Tour>* trace = nullptr) {
  context.validate();
  params.validate();

  std::array<std::array<double, AcoGraph::kNodeCount>, AcoGraph::kNodeCount> tau{};
  for (int u = 0; u < AcoGraph::kNodeCount; ++u)
    for (int v = 0; v < AcoGraph::kNodeCount; ++v)
      if (graph.has_arc(u, v)) tau[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = params.tau_init;

  auto arc_cost = [&](int u, int v) {
    const double w = context.node_weight(v);
    return w > 0.0 ? graph.length(u, v) / w : std::numeric_limits<double>::infinity();
  };

  AcoResult result;
  result.best.effective_length = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < params.iterations; ++iter) {
    std::vector<Tour> tours;
    tours.reserve(static_cast<std::size_t>(params.ants));
    for (int ant = 0; ant < params.ants; ++ant) {
      Tour t;
      t.nodes[0] = AcoGraph::kStart;
      bool complete = true;
      for (std::size_t layer = 1; layer < AcoGraph::layers().size(); ++layer) {
        const int u = t.nodes[layer - 1];
        double total = 0.0;
        std::vector<std::pair<int, double>> scores;
        for (int v : AcoGraph::layers()[layer]) {
          const double cost = arc_cost(u, v);
          if (!std::isfinite(cost)) continue;
          const double score = std::pow(tau[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)],
                                        params.alpha) *
                               std::pow(1.0 / cost, params.beta);
          scores.emplace_back(v, score);
          total += score;
        }
        if (scores.empty() || !(total > 0.0)) {
          complete = false;
          break;
        }
        double pick = rng.next_double() * total;
        int chosen = scores.back().first;
        for (const auto& [v, score] : scores) {
          pick -= score;
          if (pick < 0.0) {
            chosen = v;
            break;
          }
        }
        t.nodes[layer] = chosen;
        t.raw_length += graph.length(u, chosen);
        t.effective_length += arc_cost(u, chosen);
      }
      if (!complete) continue;
      ++result.tours_completed;
      tours.push_back(t);
      if (trace) trace->push_back(t);
      if (t.effective_length < result.best.effective_length) result.best = t;
    }

    for (int u = 0; u < AcoGraph::kNodeCount; ++u) {
      for (int v = 0; v < AcoGraph::kNodeCount; ++v) {
        if (!graph.has_arc(u, v)) continue;
        auto& trail = tau[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
        trail *= 1.0 - params.evaporation;
      }
    }
    for (const auto& t : tours) {
      const double deposit = 1.0 / t.effective_length;
      for (int hop = 0; hop + 1 < 5; ++hop)
        tau[static_cast<std::size_t>(t.nodes[static_cast<std::size_t>(hop)])]
           [static_cast<std::size_t>(t.nodes[static_cast<std::size_t>(hop + 1)])] += deposit;
    }
    for (int u = 0; u < AcoGraph::kNodeCount; ++u) {
      for (int v = 0; v < AcoGraph::kNodeCount; ++v) {
        if (!graph.has_arc(u, v)) continue;
        auto& trail = tau[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
        trail = std::clamp(trail, params.tau_min, params.tau_max);
      }
    }
  }

  if (result.tours_completed == 0) throw std::runtime_error("aco_run: no complete tour (over-pinned context)");
  result.redundancy = tour_redundancy(graph, result.best.raw_length);
  return result;
}

// --- Arc override files ---------------------------------------------------
//
//   # comment
//   arc FROM TO LENGTH
//
// Node names: start, motion_low/medium/high, frame_i/p,
// size_small/medium/large, err_ne/sse/se/sme/me. FROM and TO must sit in
// consecutive layers and LENGTH must be positive.
inline AcoGraph load_arc_overrides(const std::string& path, AcoGraph base = AcoGraph::standard()) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_arc_overrides: cannot open " + path);
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] != "arc" || tok.size() != 4) fail("expected: arc FROM TO LENGTH");
    try {
      std::size_t used = 0;
      const double len = std::stod(tok[3], &used);
      if (used != tok[3].size()) throw std::invalid_argument("trailing junk");
      base.set_arc(AcoGraph::node_id(tok[1]), AcoGraph::node_id(tok[2]), len);
    } catch (const std::logic_error& e) {
      fail(e.what());
    }
  }
  return base;
}

}  // namespace vidfec

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vidfec/fuzzy.hpp"

namespace vidfec {

// Reference variable and rule-base definitions for the four fuzzy-driven
// mechanisms. Published term bounds are reproduced verbatim; variables the
// source material only shows graphically carry reconstructed bounds,
// documented in docs/fuzzy-builtins.md. Rule bases are completed by the
// severity schema: consequent severity = round-half-up of the mean
// antecedent severity (plus a per-variable offset where noted), which keeps
// every engine monotone from low-loss to high-loss conditions.

inline LinguisticVariable motion_intensity_variable() {
  return {"MotionIntensity",
          0.0,
          200000.0,
          {FuzzyTerm{"LOW", TermShape::ShoulderLeft, 10000.0, 30000.0},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 21000.0, 80000.0},
           FuzzyTerm{"HIGH", TermShape::ShoulderRight, 60000.0, 130000.0}}};
}

inline LinguisticVariable redundancy_variable() {
  return {"RedundancyAmount",
          0.55,
          1.0,
          {FuzzyTerm{"SMALL", TermShape::ShoulderLeft, 0.55, 0.70},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 0.60, 0.80},
           FuzzyTerm{"LARGE", TermShape::Triangular, 0.75, 1.0}}};
}

namespace detail {

inline LinguisticVariable plr_variable(double low_b, double med_a, double med_b, double high_a) {
  return {"PacketLossRate",
          0.0,
          100.0,
          {FuzzyTerm{"LOW", TermShape::Triangular, 0.0, low_b},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, med_a, med_b},
           FuzzyTerm{"HIGH", TermShape::Triangular, high_a, 100.0}}};
}

// Shared template for intermediate (engine-to-engine) variables.
inline LinguisticVariable unit_level_variable(const std::string& name) {
  return {name,
          0.0,
          1.0,
          {FuzzyTerm{"LOW", TermShape::ShoulderLeft, 0.2, 0.5},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 0.25, 0.75},
           FuzzyTerm{"HIGH", TermShape::ShoulderRight, 0.5, 0.8}}};
}

inline int completed_severity(int sum, int count, int offset) {
  const int sev = static_cast<int>(std::floor(static_cast<double>(sum) / count + 0.5)) + offset;
  return sev < 0 ? 0 : (sev > 2 ? 2 : sev);
}

// Adds the full Cartesian rule base over two inputs. Severity indexes each
// variable's terms lowest-to-highest; pass descending=true for a variable
// whose FIRST term is the severe one (e.g. poor SNR demands protection).
struct SeverityInput {
  std::string variable;
  std::vector<std::string> terms;  // listed in ascending severity order
};

inline SeverityInput ascending(const LinguisticVariable& var) {
  SeverityInput in{var.name, {}};
  for (const auto& t : var.terms) in.terms.push_back(t.label);
  return in;
}

inline SeverityInput descending(const LinguisticVariable& var) {
  SeverityInput in{var.name, {}};
  for (auto it = var.terms.rbegin(); it != var.terms.rend(); ++it) in.terms.push_back(it->label);
  return in;
}

inline void add_pairwise_severity_rules(FuzzyEngine& engine, const SeverityInput& x, const SeverityInput& y,
                                        const std::vector<std::string>& consequents, int offset = 0) {
  for (int sx = 0; sx < static_cast<int>(x.terms.size()); ++sx) {
    for (int sy = 0; sy < static_cast<int>(y.terms.size()); ++sy) {
      MamdaniRule rule;
      rule.antecedent = {RuleAtom{x.variable, {x.terms[static_cast<std::size_t>(sx)]}},
                         RuleAtom{y.variable, {y.terms[static_cast<std::size_t>(sy)]}}};
      rule.consequent_term = consequents[static_cast<std::size_t>(completed_severity(sx + sy, 2, offset))];
      engine.add_rule(std::move(rule));
    }
  }
}

inline void add_single_severity_rules(FuzzyEngine& engine, const SeverityInput& x,
                                      const std::vector<std::string>& consequents) {
  for (int sx = 0; sx < static_cast<int>(x.terms.size()); ++sx) {
    MamdaniRule rule;
    rule.antecedent = {RuleAtom{x.variable, {x.terms[static_cast<std::size_t>(sx)]}}};
    rule.consequent_term = consequents[static_cast<std::size_t>(sx)];
    engine.add_rule(std::move(rule));
  }
}

inline const std::vector<std::string> kRedundancyTerms = {"SMALL", "MEDIUM", "LARGE"};
inline const std::vector<std::string> kLevelTerms = {"LOW", "MEDIUM", "HIGH"};

inline LinguisticVariable density_variable() {
  // Nodes per square kilometre.
  return {"Density",
          0.0,
          300.0,
          {FuzzyTerm{"SPARSE", TermShape::ShoulderLeft, 20.0, 60.0},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 40.0, 120.0},
           FuzzyTerm{"DENSE", TermShape::ShoulderRight, 80.0, 150.0}}};
}

inline LinguisticVariable distance_variable() {
  // Metres to the next hop.
  return {"Distance",
          0.0,
          1500.0,
          {FuzzyTerm{"NEAR", TermShape::ShoulderLeft, 100.0, 300.0},
           FuzzyTerm{"MID", TermShape::Triangular, 200.0, 600.0},
           FuzzyTerm{"FAR", TermShape::ShoulderRight, 450.0, 900.0}}};
}

inline LinguisticVariable snr_variable() {
  return {"Snr",
          -20.0,
          40.0,
          {FuzzyTerm{"POOR", TermShape::ShoulderLeft, -5.0, 10.0},
           FuzzyTerm{"FAIR", TermShape::Triangular, -5.0, 25.0},
           FuzzyTerm{"GOOD", TermShape::ShoulderRight, 10.0, 25.0}}};
}

inline LinguisticVariable temporal_intensity_variable() {
  // Mean macroblock-area-weighted vector magnitude.
  return {"TemporalIntensity",
          0.0,
          200000.0,
          {FuzzyTerm{"LOW", TermShape::ShoulderLeft, 5000.0, 20000.0},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 10000.0, 70000.0},
           FuzzyTerm{"HIGH", TermShape::ShoulderRight, 50000.0, 100000.0}}};
}

inline LinguisticVariable spatial_complexity_variable() {
  // Normalized per-type frame-size share.
  return {"SpatialComplexity",
          0.0,
          1.0,
          {FuzzyTerm{"SMALL", TermShape::ShoulderLeft, 0.15, 0.3},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 0.2, 0.6},
           FuzzyTerm{"LARGE", TermShape::ShoulderRight, 0.45, 0.7}}};
}

inline LinguisticVariable frame_relevance_variable() {
  // 1 / relative anchor position: the I-frame scores 1, late P-frames near 0.
  return {"FrameRelevance",
          0.0,
          1.0,
          {FuzzyTerm{"LOW", TermShape::ShoulderLeft, 0.2, 0.4},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, 0.25, 0.75},
           FuzzyTerm{"HIGH", TermShape::ShoulderRight, 0.6, 0.85}}};
}

inline LinguisticVariable size_variable(const std::string& name, double s_a, double s_b, double m_a,
                                        double m_b, double l_a, double l_b) {
  return {name,
          0.0,
          1.0,
          {FuzzyTerm{"SMALL", TermShape::ShoulderLeft, s_a, s_b},
           FuzzyTerm{"MEDIUM", TermShape::Triangular, m_a, m_b},
           FuzzyTerm{"LARGE", TermShape::ShoulderRight, l_a, l_b}}};
}

}  // namespace detail

// Drone-link mechanism: motion intensity x loss rate -> redundancy.
inline FuzzyEngine builtin_uavfec_engine() {
  FuzzyEngine engine("uavfec");
  engine.add_input(motion_intensity_variable());
  engine.add_input(detail::plr_variable(15.0, 5.0, 30.0, 20.0));
  engine.set_output(redundancy_variable());
  detail::add_pairwise_severity_rules(engine, detail::ascending(engine.input("MotionIntensity")),
                                      detail::ascending(engine.input("PacketLossRate")),
                                      detail::kRedundancyTerms);
  return engine;
}

// Size-profile mechanism: normalized I/P/B frame-size shares x loss rate.
// B-keyed rules sit one severity step below the I/P-keyed ones.
inline FuzzyEngine builtin_mintfec_engine() {
  FuzzyEngine engine("mintfec");
  engine.add_input(detail::size_variable("FrameSizeI", 0.274, 0.459, 0.274, 0.651, 0.502, 0.757));
  engine.add_input(detail::size_variable("FrameSizeP", 0.162, 0.219, 0.162, 0.325, 0.288, 0.333));
  engine.add_input(detail::size_variable("FrameSizeB", 0.081, 0.13, 0.081, 0.219, 0.205, 0.252));
  engine.add_input(detail::plr_variable(10.0, 5.0, 20.0, 15.0));
  engine.set_output(redundancy_variable());
  const auto plr = detail::ascending(engine.input("PacketLossRate"));
  detail::add_pairwise_severity_rules(engine, detail::ascending(engine.input("FrameSizeI")), plr,
                                      detail::kRedundancyTerms, 0);
  detail::add_pairwise_severity_rules(engine, detail::ascending(engine.input("FrameSizeP")), plr,
                                      detail::kRedundancyTerms, 0);
  detail::add_pairwise_severity_rules(engine, detail::ascending(engine.input("FrameSizeB")), plr,
                                      detail::kRedundancyTerms, -1);
  return engine;
}

namespace detail {

inline FuzzyEngine level_engine(const std::string& name, LinguisticVariable in_a, LinguisticVariable in_b,
                                const std::string& out_name, bool first_descending = false) {
  FuzzyEngine engine(name);
  engine.add_input(std::move(in_a));
  engine.add_input(std::move(in_b));
  engine.set_output(unit_level_variable(out_name));
  const auto& a = engine.inputs()[0];
  const auto& b = engine.inputs()[1];
  add_pairwise_severity_rules(engine, first_descending ? descending(a) : ascending(a), ascending(b),
                              kLevelTerms);
  return engine;
}

}  // namespace detail

// Multi-hop mechanism, three layers: specific criteria (network status from
// loss and density; surroundings from hop distance; motion activity from
// temporal/spatial measures), general criteria (network health, video
// details), and the objective engine producing the redundancy amount. The
// network-facing inputs are re-fed at every hop while the video inputs stay
// pinned to the header-carried classes.
inline HfsGraph builtin_corvette_graph() {
  HfsGraph graph;
  {
    FuzzyEngine e("network_status");
    e.add_input(detail::plr_variable(11.0, 5.0, 22.0, 17.0));
    e.add_input(detail::density_variable());
    e.set_output(detail::unit_level_variable("NetworkStatus"));
    detail::add_pairwise_severity_rules(e, detail::ascending(e.input("PacketLossRate")),
                                        detail::ascending(e.input("Density")), detail::kLevelTerms);
    graph.add_node("network_status", std::move(e),
                   {{"PacketLossRate", HfsSource::external("PacketLossRate")},
                    {"Density", HfsSource::external("Density")}});
  }
  {
    FuzzyEngine e("surroundings");
    e.add_input(detail::distance_variable());
    e.set_output(detail::unit_level_variable("Surroundings"));
    detail::add_single_severity_rules(e, detail::ascending(e.input("Distance")), detail::kLevelTerms);
    graph.add_node("surroundings", std::move(e), {{"Distance", HfsSource::external("Distance")}});
  }
  {
    auto e = detail::level_engine("general_network", detail::unit_level_variable("NetworkStatus"),
                                  detail::unit_level_variable("Surroundings"), "NetworkHealth");
    graph.add_node("general_network", std::move(e),
                   {{"NetworkStatus", HfsSource::node("network_status")},
                    {"Surroundings", HfsSource::node("surroundings")}});
  }
  {
    auto e = detail::level_engine("motion_activity", detail::temporal_intensity_variable(),
                                  detail::spatial_complexity_variable(), "MotionActivity");
    graph.add_node("motion_activity", std::move(e),
                   {{"TemporalIntensity", HfsSource::external("TemporalIntensity")},
                    {"SpatialComplexity", HfsSource::external("SpatialComplexity")}});
  }
  {
    auto e = detail::level_engine("video_details", detail::unit_level_variable("MotionActivity"),
                                  detail::frame_relevance_variable(), "VideoDetails");
    graph.add_node("video_details", std::move(e),
                   {{"MotionActivity", HfsSource::node("motion_activity")},
                    {"FrameRelevance", HfsSource::external("FrameRelevance")}});
  }
  {
    FuzzyEngine e("objective");
    e.add_input(detail::unit_level_variable("NetworkHealth"));
    e.add_input(detail::unit_level_variable("VideoDetails"));
    e.set_output(redundancy_variable());
    detail::add_pairwise_severity_rules(e, detail::ascending(e.input("NetworkHealth")),
                                        detail::ascending(e.input("VideoDetails")),
                                        detail::kRedundancyTerms);
    graph.add_node("objective", std::move(e),
                   {{"NetworkHealth", HfsSource::node("general_network")},
                    {"VideoDetails", HfsSource::node("video_details")}});
  }
  return graph;
}

// Variant with link-quality awareness: network status reads SNR + loss rate
// and the surroundings combine density with hop distance.
inline HfsGraph builtin_shield_graph() {
  HfsGraph graph;
  {
    auto e = detail::level_engine("network_status", detail::snr_variable(),
                                  detail::plr_variable(12.0, 5.0, 23.0, 19.0), "NetworkStatus",
                                  /*first_descending=*/true);
    graph.add_node("network_status", std::move(e),
                   {{"Snr", HfsSource::external("Snr")},
                    {"PacketLossRate", HfsSource::external("PacketLossRate")}});
  }
  {
    auto e = detail::level_engine("surroundings", detail::density_variable(),
                                  detail::distance_variable(), "Surroundings");
    graph.add_node("surroundings", std::move(e),
                   {{"Density", HfsSource::external("Density")},
                    {"Distance", HfsSource::external("Distance")}});
  }
  {
    auto e = detail::level_engine("general_network", detail::unit_level_variable("NetworkStatus"),
                                  detail::unit_level_variable("Surroundings"), "NetworkHealth");
    graph.add_node("general_network", std::move(e),
                   {{"NetworkStatus", HfsSource::node("network_status")},
                    {"Surroundings", HfsSource::node("surroundings")}});
  }
  {
    auto e = detail::level_engine("motion_activity", detail::temporal_intensity_variable(),
                                  detail::spatial_complexity_variable(), "MotionActivity");
    graph.add_node("motion_activity", std::move(e),
                   {{"TemporalIntensity", HfsSource::external("TemporalIntensity")},
                    {"SpatialComplexity", HfsSource::external("SpatialComplexity")}});
  }
  {
    auto e = detail::level_engine("video_details", detail::unit_level_variable("MotionActivity"),
                                  detail::frame_relevance_variable(), "VideoDetails");
    graph.add_node("video_details", std::move(e),
                   {{"MotionActivity", HfsSource::node("motion_activity")},
                    {"FrameRelevance", HfsSource::external("FrameRelevance")}});
  }
  {
    FuzzyEngine e("objective");
    e.add_input(detail::unit_level_variable("NetworkHealth"));
    e.add_input(detail::unit_level_variable("VideoDetails"));
    e.set_output(redundancy_variable());
    detail::add_pairwise_severity_rules(e, detail::ascending(e.input("NetworkHealth")),
                                        detail::ascending(e.input("VideoDetails")),
                                        detail::kRedundancyTerms);
    graph.add_node("objective", std::move(e),
                   {{"NetworkHealth", HfsSource::node("general_network")},
                    {"VideoDetails", HfsSource::node("video_details")}});
  }
  return graph;
}

}  // namespace vidfec

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vidfec/rng.hpp"

namespace vidfec {

// Motion-intensity scorer: a fully connected feed-forward net, 3 or 4 inputs
// x 7 hidden x 1 output, logistic activations throughout, trained by
// full-batch gradient descent on mean squared error.
struct RnnTopology {
  int inputs = 3;
  int hidden = 7;
  int outputs = 1;

  RnnTopology() = default;
  explicit RnnTopology(int inputs_) : inputs(inputs_) { validate(); }
  void validate() const {
    if (inputs != 3 && inputs != 4) throw std::invalid_argument("RnnTopology: inputs must be 3 or 4");
    if (hidden != 7 || outputs != 1) throw std::invalid_argument("RnnTopology: hidden=7, outputs=1");
  }
};

struct LabeledSample {
  std::vector<double> features;
  double label = 0.0;  // target score in [0, 1]
};

class RnnModel {
 public:
  RnnModel() = default;
  explicit RnnModel(const RnnTopology& topo, Rng& rng) : topo_(topo) {
    topo_.validate();
    w1_.assign(static_cast<std::size_t>(topo_.hidden) * topo_.inputs, 0.0);
    b1_.assign(static_cast<std::size_t>(topo_.hidden), 0.0);
    w2_.assign(static_cast<std::size_t>(topo_.hidden), 0.0);
    b2_ = 0.0;
    for (auto& w : w1_) w = rng.uniform(-0.5, 0.5);
    for (auto& b : b1_) b = rng.uniform(-0.5, 0.5);
    for (auto& w : w2_) w = rng.uniform(-0.5, 0.5);
    b2_ = rng.uniform(-0.5, 0.5);
  }

  const RnnTopology& topology() const { return topo_; }
  bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }

  // Logistic MLP forward pass; all-zero weights yield sigmoid(0) = 0.5.
  double forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != topo_.inputs)
      throw std::invalid_argument("RnnModel::forward: feature count mismatch");
    double out = b2_;
    for (int j = 0; j < topo_.hidden; ++j) {
      double a = b1_[static_cast<std::size_t>(j)];
      for (int i = 0; i < topo_.inputs; ++i)
        a += w1_[static_cast<std::size_t>(j) * topo_.inputs + i] * x[static_cast<std::size_t>(i)];
      out += w2_[static_cast<std::size_t>(j)] * sigmoid(a);
    }
    return sigmoid(out);
  }

  // Serialized with full round-trip precision so a reloaded model scores
  // bit-identically.
  void save(const std::string& path) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["inputs"] = topo_.inputs;
    j["hidden"] = topo_.hidden;
    j["outputs"] = topo_.outputs;
    j["trained"] = trained_;
    j["w1"] = w1_;
    j["b1"] = b1_;
    j["w2"] = w2_;
    j["b2"] = b2_;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("RnnModel::save: cannot open " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("RnnModel::save: write failed for " + path);
  }

  static RnnModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("RnnModel::load: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("RnnModel::load: malformed JSON in " + path + ": " + e.what());
    }
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
      throw std::runtime_error("RnnModel::load: unsupported format version in " + path);
    RnnModel m;
    m.topo_.inputs = j.at("inputs").get<int>();
    m.topo_.hidden = j.at("hidden").get<int>();
    m.topo_.outputs = j.at("outputs").get<int>();
    m.topo_.validate();
    m.trained_ = j.value("trained", false);
    m.w1_ = j.at("w1").get<std::vector<double>>();
    m.b1_ = j.at("b1").get<std::vector<double>>();
    m.w2_ = j.at("w2").get<std::vector<double>>();
    m.b2_ = j.at("b2").get<double>();
    if (m.w1_.size() != static_cast<std::size_t>(m.topo_.hidden) * m.topo_.inputs ||
        m.b1_.size() != static_cast<std::size_t>(m.topo_.hidden) ||
        m.w2_.size() != static_cast<std::size_t>(m.topo_.hidden))
      throw std::runtime_error("RnnModel::load: weight shapes do not match topology in " + path);
    return m;
  }

  static double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

  std::vector<double> w1_, b1_, w2_;
  double b2_ = 0.0;

 private:
  RnnTopology topo_;
  bool trained_ = false;
};

struct TrainParams {
  int max_iterations = 600;
  double learning_rate = 2.0;
  double min_improvement = 1e-12;  // early stop once MSE stops moving
};

struct TrainReport {
  std::vector<double> error_history;  // MSE after each iteration
  double final_mse = 0.0;
  int iterations = 0;
};

// Full-batch gradient descent. Deterministic given the model's initial
// weights and the dataset order.
inline TrainReport train(RnnModel& model, const std::vector<LabeledSample>& data, const TrainParams& params = {}) {
  if (data.empty()) throw std::invalid_argument("train: dataset is empty");
  const int inputs = model.topology().inputs;
  const int hidden = model.topology().hidden;
  for (const auto& s : data) {
    if (static_cast<int>(s.features.size()) != inputs)
      throw std::invalid_argument("train: sample feature count mismatch");
    if (s.label < 0.0 || s.label > 1.0) throw std::invalid_argument("train: labels must be in [0, 1]");
  }
  const double n = static_cast<double>(data.size());

  TrainReport report;
  std::vector<double> hid(static_cast<std::size_t>(hidden));
  std::vector<double> gw1(model.w1_.size()), gb1(model.b1_.size()), gw2(model.w2_.size());
  double prev_mse = -1.0;
  for (int it = 0; it < params.max_iterations; ++it) {
    std::fill(gw1.begin(), gw1.end(), 0.0);
    std::fill(gb1.begin(), gb1.end(), 0.0);
    std::fill(gw2.begin(), gw2.end(), 0.0);
    double gb2 = 0.0;
    double mse = 0.0;
    for (const auto& s : data) {
      double out_a = model.b2_;
      for (int j = 0; j < hidden; ++j) {
        double a = model.b1_[static_cast<std::size_t>(j)];
        for (int i = 0; i < inputs; ++i)
          a += model.w1_[static_cast<std::size_t>(j) * inputs + i] * s.features[static_cast<std::size_t>(i)];
        hid[static_cast<std::size_t>(j)] = RnnModel::sigmoid(a);
        out_a += model.w2_[static_cast<std::size_t>(j)] * hid[static_cast<std::size_t>(j)];
      }
      const double y = RnnModel::sigmoid(out_a);
      const double err = y - s.label;
      mse += err * err;
      const double delta_out = 2.0 * err * y * (1.0 - y) / n;
      for (int j = 0; j < hidden; ++j) {
        const double hj = hid[static_cast<std::size_t>(j)];
        gw2[static_cast<std::size_t>(j)] += delta_out * hj;
        const double delta_h = delta_out * model.w2_[static_cast<std::size_t>(j)] * hj * (1.0 - hj);
        gb1[static_cast<std::size_t>(j)] += delta_h;
        for (int i = 0; i < inputs; ++i)
          gw1[static_cast<std::size_t>(j) * inputs + i] += delta_h * s.features[static_cast<std::size_t>(i)];
      }
      gb2 += delta_out;
    }
    mse /= n;
    for (std::size_t i = 0; i < model.w1_.size(); ++i) model.w1_[i] -= params.learning_rate * gw1[i];
    for (std::size_t i = 0; i < model.b1_.size(); ++i) model.b1_[i] -= params.learning_rate * gb1[i];
    for (std::size_t i = 0; i < model.w2_.size(); ++i) model.w2_[i] -= params.learning_rate * gw2[i];
    model.b2_ -= params.learning_rate * gb2;
    report.error_history.push_back(mse);
    report.iterations = it + 1;
    if (prev_mse >= 0.0 && std::abs(prev_mse - mse) < params.min_improvement) break;
    prev_mse = mse;
  }
  report.final_mse = report.error_history.back();
  model.mark_trained();
  return report;
}

// Score thresholds: [0, 1/3) -> class 0, [1/3, 2/3) -> 1, [2/3, 1] -> 2.
inline int classify_score(double score, double low_cut = 1.0 / 3.0, double high_cut = 2.0 / 3.0) {
  if (!(low_cut < high_cut)) throw std::invalid_argument("classify_score: cuts must be ordered");
  if (score < low_cut) return 0;
  if (score < high_cut) return 1;
  return 2;
}

// Synthetic, linearly separable motion dataset mirroring the scorer's input
// convention: (frame type code, normalized size, motion-vector ratio[, loss
// prediction]). Class labels sit at the band centers 1/6, 1/2, 5/6. Note the
// mv ratio is count/distance, so LOW ratios mean HIGH motion.
inline std::vector<LabeledSample> make_toy_dataset(int inputs, int per_class, std::uint64_t seed) {
  if (per_class < 1) throw std::invalid_argument("make_toy_dataset: per_class must be >= 1");
  RnnTopology topo(inputs);
  Rng rng(seed);
  std::vector<LabeledSample> data;
  const double ratio_center[3] = {0.35, 0.15, 0.05};  // low, medium, high motion
  const double size_center[3] = {0.25, 0.45, 0.65};
  for (int cls = 0; cls < 3; ++cls) {
    for (int s = 0; s < per_class; ++s) {
      LabeledSample sample;
      sample.features.push_back(rng.bernoulli(0.3) ? 1.0 : 0.5);  // frame type: I or P
      sample.features.push_back(size_center[cls] + rng.uniform(-0.05, 0.05));
      sample.features.push_back(ratio_center[cls] + rng.uniform(-0.03, 0.03));
      if (inputs == 4) sample.features.push_back(rng.uniform(0.0, 0.4));
      sample.label = (2.0 * cls + 1.0) / 6.0;
      data.push_back(std::move(sample));
    }
  }
  return data;
}

}  // namespace vidfec

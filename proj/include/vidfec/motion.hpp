#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vidfec/fuzzy_builtins.hpp"
#include "vidfec/rnn.hpp"

namespace vidfec {

enum class IntensityLevel { Low, Medium, High };

inline const char* to_string(IntensityLevel level) {
  switch (level) {
    case IntensityLevel::Low: return "low";
    case IntensityLevel::Medium: return "medium";
    case IntensityLevel::High: return "high";
  }
  return "?";
}

// Content class with the loss rate the content absorbs without visible
// degradation: static scenes conceal well, busy scenes do not.
struct IntensityClass {
  IntensityLevel level = IntensityLevel::Low;
  double natural_resilience_plr = 0.20;
};

inline IntensityClass intensity_class(IntensityLevel level) {
  switch (level) {
    case IntensityLevel::Low: return {level, 0.20};
    case IntensityLevel::Medium: return {level, 0.10};
    case IntensityLevel::High: return {level, 0.06};
  }
  throw std::invalid_argument("intensity_class: bad level");
}

// Vector-count to total-distance ratio. Busy content moves far per vector,
// so HIGH motion yields a LOW ratio.
inline double mv_ratio(double vector_count, double total_distance) {
  if (!(total_distance > 0.0)) throw std::invalid_argument("mv_ratio: total_distance must be positive");
  if (vector_count < 0.0) throw std::invalid_argument("mv_ratio: negative vector_count");
  return vector_count / total_distance;
}

constexpr double macroblock_area(int width = 16, int height = 16) {
  return static_cast<double>(width) * height;
}

struct MbMotion {
  double area = 0.0;    // pixels covered by the block
  double length = 0.0;  // displacement magnitude
};

// Mean area-weighted displacement over the blocks of one frame.
inline double temporal_intensity(const std::vector<MbMotion>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("temporal_intensity: no blocks");
  double sum = 0.0;
  for (const auto& b : blocks) {
    if (b.area < 0.0 || b.length < 0.0) throw std::invalid_argument("temporal_intensity: negative block");
    sum += b.area * b.length;
  }
  return sum / static_cast<double>(blocks.size());
}

struct FrameSizeShares {
  double i = 0.0;
  double p = 0.0;
  double b = 0.0;
};

// Mean frame size per type divided by the sum of the three means. A type
// absent from the stream contributes zero; a list that is present but empty
// is a caller bug.
inline FrameSizeShares normalize_frame_sizes(const std::vector<double>* i_sizes,
                                             const std::vector<double>* p_sizes,
                                             const std::vector<double>* b_sizes) {
  auto mean_of = [](const std::vector<double>* sizes, const char* what) {
    if (!sizes) return 0.0;
    if (sizes->empty()) throw std::invalid_argument(std::string("normalize_frame_sizes: empty ") + what);
    double sum = 0.0;
    for (double s : *sizes) {
      if (s < 0.0) throw std::invalid_argument("normalize_frame_sizes: negative size");
      sum += s;
    }
    return sum / static_cast<double>(sizes->size());
  };
  const double mi = mean_of(i_sizes, "I list");
  const double mp = mean_of(p_sizes, "P list");
  const double mb = mean_of(b_sizes, "B list");
  const double total = mi + mp + mb;
  if (!(total > 0.0)) throw std::invalid_argument("normalize_frame_sizes: all sizes zero");
  return {mi / total, mp / total, mb / total};
}

// Max-membership decision on the motion intensity sets; ties resolve to the
// higher class (protect more when ambiguous).
inline IntensityLevel classify_motion_distance(double mv_distance) {
  const auto var = motion_intensity_variable();
  const double low = var.term("LOW").membership(mv_distance);
  const double med = var.term("MEDIUM").membership(mv_distance);
  const double high = var.term("HIGH").membership(mv_distance);
  if (high >= med && high >= low) return IntensityLevel::High;
  if (med >= low) return IntensityLevel::Medium;
  return IntensityLevel::Low;
}

inline IntensityLevel intensity_from_int(int cls) {
  switch (cls) {
    case 0: return IntensityLevel::Low;
    case 1: return IntensityLevel::Medium;
    case 2: return IntensityLevel::High;
  }
  throw std::invalid_argument("intensity_from_int: class outside 0..2");
}

// Pluggable content classifier: the membership-based rule, or a trained
// network scoring feature vectors.
class IntensityClassifier {
 public:
  static IntensityClassifier fuzzy() { return IntensityClassifier{}; }

  static IntensityClassifier neural(RnnModel model) {
    if (!model.trained()) throw std::invalid_argument("IntensityClassifier: model is untrained");
    IntensityClassifier c;
    c.model_ = std::move(model);
    c.neural_ = true;
    return c;
  }

  bool is_neural() const { return neural_; }

  IntensityLevel classify_distance(double mv_distance) const {
    if (neural_) throw std::logic_error("IntensityClassifier: neural classifier needs a feature vector");
    return classify_motion_distance(mv_distance);
  }

  IntensityLevel classify_features(const std::vector<double>& features) const {
    if (!neural_) throw std::logic_error("IntensityClassifier: membership classifier takes a distance");
    return intensity_from_int(classify_score(model_->forward(features)));
  }

 private:
  IntensityClassifier() = default;
  std::optional<RnnModel> model_;
  bool neural_ = false;
};

// --- Agglomerative clustering -------------------------------------------------
//
// Minimum-variance (Ward) linkage: each step merges the pair of clusters
// whose union increases total within-cluster variance the least. The
// increase for clusters A, B is |A||B| / (|A| + |B|) * ||cA - cB||^2; the
// recorded dendrogram height is sqrt(2 * increase), which reduces to the
// Euclidean distance for two singletons. Merge costs are non-decreasing, so
// a distance cut is always a prefix of the merge list.

struct ClusterMerge {
  int left = 0;   // smaller cluster id
  int right = 0;  // larger cluster id
  double distance = 0.0;
  int size = 0;  // samples in the merged cluster
};

struct Dendrogram {
  int sample_count = 0;
  std::vector<ClusterMerge> merges;  // row r creates cluster id sample_count + r

  // Labels in 0..k-1, numbered by first sample occurrence.
  std::vector<int> cut_by_count(int k) const {
    if (k < 1 || k > sample_count) throw std::invalid_argument("cut_by_count: k outside 1..n");
    return apply(static_cast<int>(sample_count - k));
  }

  std::vector<int> cut_by_distance(double max_distance) const {
    int steps = 0;
    while (steps < static_cast<int>(merges.size()) &&
           merges[static_cast<std::size_t>(steps)].distance <= max_distance)
      ++steps;
    return apply(steps);
  }

 private:
  std::vector<int> apply(int steps) const {
    std::vector<int> owner(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i) owner[static_cast<std::size_t>(i)] = i;
    for (int s = 0; s < steps; ++s) {
      const auto& m = merges[static_cast<std::size_t>(s)];
      const int merged = sample_count + s;
      for (auto& o : owner)
        if (o == m.left || o == m.right) o = merged;
    }
    std::vector<int> labels(owner.size());
    std::vector<int> seen;
    for (std::size_t i = 0; i < owner.size(); ++i) {
      const auto it = std::find(seen.begin(), seen.end(), owner[i]);
      if (it == seen.end()) {
        labels[i] = static_cast<int>(seen.size());
        seen.push_back(owner[i]);
      } else {
        labels[i] = static_cast<int>(it - seen.begin());
      }
    }
    return labels;
  }
};

inline std::vector<std::vector<double>> zscore_standardize(std::vector<std::vector<double>> samples) {
  if (samples.empty()) return samples;
  const std::size_t dim = samples[0].size();
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s[d];
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (const auto& s : samples) var += (s[d] - mean) * (s[d] - mean);
    const double sd = std::sqrt(var / static_cast<double>(samples.size()));
    for (auto& s : samples) s[d] = sd > 0.0 ? (s[d] - mean) / sd : 0.0;
  }
  return samples;
}

inline Dendrogram ward_cluster(const std::vector<std::vector<double>>& raw_samples,
                               bool standardize = true) {
  if (raw_samples.empty()) throw std::invalid_argument("ward_cluster: no samples");
  const std::size_t dim = raw_samples[0].size();
  if (dim == 0) throw std::invalid_argument("ward_cluster: zero-dimensional samples");
  for (const auto& s : raw_samples)
    if (s.size() != dim) throw std::invalid_argument("ward_cluster: ragged sample matrix");
  const auto samples = standardize ? zscore_standardize(raw_samples) : raw_samples;

  const int n = static_cast<int>(samples.size());
  struct Cluster {
    int id;
    int size;
    std::vector<double> centroid;
  };
  std::vector<Cluster> active;
  active.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) active.push_back({i, 1, samples[static_cast<std::size_t>(i)]});

  Dendrogram out;
  out.sample_count = n;
  for (int step = 0; step + 1 < n; ++step) {
    std::size_t best_a = 0, best_b = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = active[a].centroid[d] - active[b].centroid[d];
          d2 += diff * diff;
        }
        const double cost = static_cast<double>(active[a].size) * active[b].size /
                            (active[a].size + active[b].size) * d2;
        // Ties resolve to the lexicographically least (left, right) id pair.
        const bool better =
            cost < best_cost ||
            (cost == best_cost &&
             std::minmax(active[a].id, active[b].id) <
                 std::minmax(active[best_a].id, active[best_b].id));
        if (better) {
          best_cost = cost;
          best_a = a;
          best_b = b;
        }
      }
    }
    auto& ca = active[best_a];
    auto& cb = active[best_b];
    const int merged_size = ca.size + cb.size;
    std::vector<double> centroid(dim);
    for (std::size_t d = 0; d < dim; ++d)
      centroid[d] = (ca.centroid[d] * ca.size + cb.centroid[d] * cb.size) / merged_size;
    out.merges.push_back({std::min(ca.id, cb.id), std::max(ca.id, cb.id),
                          std::sqrt(2.0 * best_cost), merged_size});
    ca = Cluster{n + step, merged_size, std::move(centroid)};
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  return out;
}

inline void save_assignments_csv(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_assignments_csv: cannot open " + path);
  out << "sample_id,cluster_id\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
  if (!out) throw std::runtime_error("save_assignments_csv: write failed for " + path);
}

inline void save_linkage_csv(const std::string& path, const Dendrogram& dendrogram) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_linkage_csv: cannot open " + path);
  out << "step,distance,left,right\n";
  char buf[64];
  for (std::size_t s = 0; s < dendrogram.merges.size(); ++s) {
    const auto& m = dendrogram.merges[s];
    std::snprintf(buf, sizeof buf, "%.17g", m.distance);
    out << s << ',' << buf << ',' << m.left << ',' << m.right << '\n';
  }
  if (!out) throw std::runtime_error("save_linkage_csv: write failed for " + path);
}

}  // namespace vidfec

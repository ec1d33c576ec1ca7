#include "lxh/knn.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lxh/error.hpp"

namespace lxh {

double distance(Metric metric, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(Errc::shape_mismatch, "distance between vectors of different length");
  switch (metric) {
    case Metric::euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    case Metric::minkowski3: {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        s += d * d * d;
      }
      return std::cbrt(s);
    }
    case Metric::cosine: {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      if (na == 0.0 && nb == 0.0) return 0.0;
      if (na == 0.0 || nb == 0.0) return 1.0;
      return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
    }
  }
  return 0.0;
}

std::vector<Neighbor> nearest(const FeatureMatrix& points, std::span<const double> query, std::size_t k,
                              Metric metric) {
  if (query.size() != points.cols) fail(Errc::shape_mismatch, "query dimension differs from stored points");
  std::vector<Neighbor> all(points.rows);
  for (std::size_t i = 0; i < points.rows; ++i) all[i] = {distance(metric, points.row(i), query), i};
  const auto before = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), before);
  all.resize(k);
  return all;
}

LightClass knn_vote(const FeatureMatrix& points, std::span<const LightClass> labels, std::span<const double> query,
                    std::size_t k, Metric metric, bool weighted) {
  if (labels.size() != points.rows) fail(Errc::shape_mismatch, "label count differs from stored points");
  if (points.rows == 0 || k == 0) fail(Errc::degenerate_training, "no neighbours to vote");
  const auto neighbors = nearest(points, query, k, metric);
  std::array<double, kLightClassCount> votes{};
  bool exact = false;
  if (weighted)
    for (const auto& n : neighbors)
      if (n.distance == 0.0) {
        votes[index_of(labels[n.index])] += 1.0;
        exact = true;
      }
  if (!exact)
    for (const auto& n : neighbors) votes[index_of(labels[n.index])] += weighted ? 1.0 / (n.distance * n.distance) : 1.0;
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[best]) best = c;
  return static_cast<LightClass>(best);
}

}  // namespace lxh

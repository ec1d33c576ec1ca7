#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lxh/features.hpp"
#include "lxh/light_class.hpp"

namespace lxh {

enum class Metric { euclidean, cosine, minkowski3 };

double distance(Metric metric, std::span<const double> a, std::span<const double> b);

struct Neighbor {
  double distance;
  std::size_t index;
};

/// The k stored rows closest to the query, ordered by (distance, index).
std::vector<Neighbor> nearest(const FeatureMatrix& points, std::span<const double> query, std::size_t k, Metric metric);

/// Majority vote of the k nearest neighbours, or a 1/d^2 weighted vote when
/// `weighted`. A neighbour at distance zero decides a weighted vote outright
/// (several such neighbours vote among themselves). Vote ties go to the
/// class that comes first in canonical order.
LightClass knn_vote(const FeatureMatrix& points, std::span<const LightClass> labels, std::span<const double> query,
                    std::size_t k, Metric metric, bool weighted);

}  // namespace lxh

#include <algorithm>
#include <array>
#include <numeric>

#include "lxh/error.hpp"
#include "models.hpp"

namespace lxh::detail {

namespace {

using Counts = std::array<std::size_t, kLightClassCount>;

double gini_mass(const Counts& counts, std::size_t n) {
  // n * gini impurity, so that gains of different nodes compare directly
  if (n == 0) return 0.0;
  double sq = 0.0;
  for (auto c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
  return static_cast<double>(n) - sq / static_cast<double>(n);
}

LightClass majority(const Counts& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return static_cast<LightClass>(best);
}

struct Split {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct Pending {
  int node;
  std::vector<std::size_t> rows;
  Split split;
};

Split best_split(const FeatureMatrix& x, std::span<const LightClass> labels, const std::vector<std::size_t>& rows) {
  Counts total{};
  for (auto r : rows) ++total[index_of(labels[r])];
  const double parent = gini_mass(total, rows.size());
  Split best;
  if (parent <= 0.0) return best;
  std::vector<std::size_t> order(rows);
  for (std::size_t f = 0; f < x.cols; ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = x.values[a * x.cols + f], vb = x.values[b * x.cols + f];
      return va < vb || (va == vb && a < b);
    });
    Counts left{};
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      ++left[index_of(labels[order[i]])];
      const double v = x.values[order[i] * x.cols + f];
      const double next = x.values[order[i + 1] * x.cols + f];
      if (!(next > v)) continue;
      Counts right{};
      for (std::size_t c = 0; c < right.size(); ++c) right[c] = total[c] - left[c];
      const double gain = parent - gini_mass(left, i + 1) - gini_mass(right, order.size() - i - 1);
      if (gain > best.gain + 1e-12) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        double mid = 0.5 * (v + next);
        if (!(mid > v)) mid = next;  // adjacent doubles
        best.threshold = mid;
      }
    }
  }
  return best;
}

}  // namespace

TreeModel fit_tree(const FeatureMatrix& x, std::span<const LightClass> labels, std::size_t max_splits) {
  TreeModel model;
  model.max_splits = max_splits;
  std::vector<std::size_t> all(x.rows);
  std::iota(all.begin(), all.end(), std::size_t{0});

  const auto make_node = [&](const std::vector<std::size_t>& rows) {
    Counts counts{};
    for (auto r : rows) ++counts[index_of(labels[r])];
    model.nodes.push_back(TreeNode{-1, 0.0, -1, -1, majority(counts)});
    return static_cast<int>(model.nodes.size() - 1);
  };

  // best-first growth: always split the leaf whose split removes the most
  // impurity, until the split budget runs out or no leaf can improve
  std::vector<Pending> leaves;
  const int root = make_node(all);
  leaves.push_back({root, all, best_split(x, labels, all)});
  for (std::size_t splits = 0; splits < max_splits; ++splits) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].split.feature < 0) continue;
      if (pick == leaves.size() || leaves[i].split.gain > leaves[pick].split.gain) pick = i;
    }
    if (pick == leaves.size()) break;
    Pending leaf = std::move(leaves[pick]);
    leaves.erase(leaves.begin() + static_cast<std::ptrdiff_t>(pick));
    std::vector<std::size_t> lrows, rrows;
    for (auto r : leaf.rows)
      (x.values[r * x.cols + static_cast<std::size_t>(leaf.split.feature)] < leaf.split.threshold ? lrows : rrows)
          .push_back(r);
    const int l = make_node(lrows);
    const int r = make_node(rrows);
    auto& node = model.nodes[static_cast<std::size_t>(leaf.node)];
    node.feature = leaf.split.feature;
    node.threshold = leaf.split.threshold;
    node.left = l;
    node.right = r;
    leaves.push_back({l, lrows, best_split(x, labels, lrows)});
    leaves.push_back({r, rrows, best_split(x, labels, rrows)});
  }
  return model;
}

LightClass predict_tree(const TreeModel& model, std::span<const double> q) {
  std::size_t i = 0;
  while (model.nodes[i].feature >= 0) {
    const auto& n = model.nodes[i];
    i = static_cast<std::size_t>(q[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return model.nodes[i].label;
}

}  // namespace lxh::detail

#include <algorithm>
#include <cmath>
#include <limits>

#include "lxh/error.hpp"
#include "models.hpp"

namespace lxh::detail {

namespace {

constexpr double kTolerance = 1e-3;
constexpr std::size_t kMaxIterations = 200000;
constexpr double kTau = 1e-12;

// Dual SMO with maximal-violating-pair selection for one binary problem on
// a linear kernel. y is +1/-1.
SvmMachine solve_binary(const std::vector<std::vector<double>>& pts, const std::vector<double>& y, double box) {
  const std::size_t n = pts.size();
  const std::size_t d = pts.empty() ? 0 : pts.front().size();
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double k = 0.0;
      for (std::size_t f = 0; f < d; ++f) k += pts[i][f] * pts[j][f];
      q[i * n + j] = q[j * n + i] = y[i] * y[j] * k;
    }
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);
  const auto up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < box) || (y[t] < 0 && alpha[t] > 0); };
  const auto low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < box); };

  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    std::size_t i = n, j = n;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    if (i == n || j == n || gmax - gmin < kTolerance) break;

    const double ai = alpha[i], aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = q[i * n + i] + q[j * n + j] + 2.0 * q[i * n + j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > box) { alpha[i] = box; alpha[j] = box - diff; }
      } else if (alpha[j] > box) {
        alpha[j] = box;
        alpha[i] = box + diff;
      }
    } else {
      double quad = q[i * n + i] + q[j * n + j] - 2.0 * q[i * n + j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > box) {
        if (alpha[i] > box) { alpha[i] = box; alpha[j] = sum - box; }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > box) {
        if (alpha[j] > box) { alpha[j] = box; alpha[i] = sum - box; }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - ai, dj = alpha[j] - aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q[t * n + i] * di + q[t * n + j] * dj;
  }

  // threshold: mean over free vectors, else midpoint of the feasible interval
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum = 0.0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= box) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free;
      sum += yg;
    }
  }
  const double rho = free > 0 ? sum / static_cast<double>(free) : 0.5 * (ub + lb);

  SvmMachine m;
  m.w.assign(d, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    ++m.support_vectors;
    for (std::size_t f = 0; f < d; ++f) m.w[f] += alpha[t] * y[t] * pts[t][f];
  }
  m.bias = -rho;
  return m;
}

}  // namespace

SvmModel fit_svm(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t classes, double box) {
  const std::size_t d = x.cols;
  SvmModel model;
  model.box = box;
  model.center.assign(d, 0.0);
  model.scale.assign(d, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < d; ++j) model.center[j] += x.values[i * d + j];
  for (auto& c : model.center) c /= static_cast<double>(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double r = x.values[i * d + j] - model.center[j];
      model.scale[j] += r * r;
    }
  for (auto& s : model.scale) {
    s = std::sqrt(s / static_cast<double>(x.rows));
    if (!(s > 0.0)) s = 1.0;
  }

  for (std::size_t a = 0; a < classes; ++a)
    for (std::size_t b = a + 1; b < classes; ++b) {
      std::vector<std::vector<double>> pts;
      std::vector<double> labels;
      for (std::size_t i = 0; i < x.rows; ++i) {
        if (y[i] != a && y[i] != b) continue;
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j) p[j] = (x.values[i * d + j] - model.center[j]) / model.scale[j];
        pts.push_back(std::move(p));
        labels.push_back(y[i] == a ? 1.0 : -1.0);
      }
      SvmMachine m = solve_binary(pts, labels, box);
      for (double w : m.w)
        if (!std::isfinite(w)) fail(Errc::numerical_failure, "SVM weights are not finite");
      m.positive = a;
      m.negative = b;
      model.machines.push_back(std::move(m));
    }
  return model;
}

std::size_t predict_svm(const SvmModel& model, std::span<const double> q, std::size_t classes) {
  std::vector<double> votes(classes, 0.0);
  for (const auto& m : model.machines) {
    double f = m.bias;
    for (std::size_t j = 0; j < q.size(); ++j) f += m.w[j] * (q[j] - model.center[j]) / model.scale[j];
    votes[f > 0.0 ? m.positive : m.negative] += 1.0;
  }
  return argmax(votes);
}

}  // namespace lxh::detail

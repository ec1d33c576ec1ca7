#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "lxh/error.hpp"
#include "models.hpp"

namespace lxh::detail {

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

LdaModel fit_lda(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t classes) {
  const auto d = static_cast<Eigen::Index>(x.cols);
  const auto m = static_cast<Eigen::Index>(classes);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(m, d);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto c = static_cast<Eigen::Index>(y[i]);
    counts(c) += 1.0;
    for (Eigen::Index j = 0; j < d; ++j) means(c, j) += x.values[i * x.cols + static_cast<std::size_t>(j)];
  }
  for (Eigen::Index c = 0; c < m; ++c) means.row(c) /= counts(c);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd r(d);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto c = static_cast<Eigen::Index>(y[i]);
    for (Eigen::Index j = 0; j < d; ++j) r(j) = x.values[i * x.cols + static_cast<std::size_t>(j)] - means(c, j);
    cov.noalias() += r * r.transpose();
  }
  const double dof = x.rows > classes ? static_cast<double>(x.rows - classes) : static_cast<double>(x.rows);
  cov /= dof;
  const double ridge = 1e-6 * cov.trace() / static_cast<double>(d);
  cov.diagonal().array() += ridge;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !(ridge > 0.0) || ldlt.vectorD().minCoeff() <= 0.0)
    fail(Errc::numerical_failure, "pooled covariance is singular after ridge regularization");
  // delta_c(x) = x' S^-1 mu_c - mu_c' S^-1 mu_c / 2 + log prior_c
  const Eigen::MatrixXd w = ldlt.solve(means.transpose()).transpose();
  if (!w.allFinite()) fail(Errc::numerical_failure, "LDA solve produced non-finite weights");
  LdaModel model;
  model.weights.resize(classes * x.cols);
  model.offsets.resize(classes);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index j = 0; j < d; ++j) model.weights[static_cast<std::size_t>(c * d + j)] = w(c, j);
    model.offsets[static_cast<std::size_t>(c)] =
        -0.5 * w.row(c).dot(means.row(c)) + std::log(counts(c) / static_cast<double>(x.rows));
  }
  return model;
}

std::size_t predict_lda(const LdaModel& model, std::span<const double> q) {
  const std::size_t m = model.offsets.size();
  const std::size_t d = q.size();
  std::vector<double> scores(m);
  for (std::size_t c = 0; c < m; ++c) {
    double s = model.offsets[c];
    for (std::size_t j = 0; j < d; ++j) s += model.weights[c * d + j] * q[j];
    scores[c] = s;
  }
  return argmax(scores);
}

GnbModel fit_gnb(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t classes) {
  const std::size_t d = x.cols;
  GnbModel model;
  model.means.assign(classes * d, 0.0);
  model.variances.assign(classes * d, 0.0);
  std::vector<double> counts(classes, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    counts[y[i]] += 1.0;
    for (std::size_t j = 0; j < d; ++j) model.means[y[i] * d + j] += x.values[i * d + j];
  }
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t j = 0; j < d; ++j) model.means[c * d + j] /= counts[c];
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double r = x.values[i * d + j] - model.means[y[i] * d + j];
      model.variances[y[i] * d + j] += r * r;
    }
  constexpr double kVarianceFloor = 1e-9;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t j = 0; j < d; ++j)
      model.variances[c * d + j] = std::max(model.variances[c * d + j] / counts[c], kVarianceFloor);
  model.log_priors.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) model.log_priors[c] = std::log(counts[c] / static_cast<double>(x.rows));
  return model;
}

std::size_t predict_gnb(const GnbModel& model, std::span<const double> q) {
  const std::size_t m = model.log_priors.size();
  const std::size_t d = q.size();
  std::vector<double> scores(m);
  for (std::size_t c = 0; c < m; ++c) {
    double s = model.log_priors[c];
    for (std::size_t j = 0; j < d; ++j) {
      const double v = model.variances[c * d + j];
      const double r = q[j] - model.means[c * d + j];
      s -= 0.5 * (std::log(2.0 * std::numbers::pi * v) + r * r / v);
    }
    scores[c] = s;
  }
  return argmax(scores);
}

}  // namespace lxh::detail

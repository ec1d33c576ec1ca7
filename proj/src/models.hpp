#pragma once

// Training and evaluation kernels behind TrainedClassifier. Class indices
// refer to the classifier's sorted class list.

#include <span>
#include <vector>

#include "lxh/classifiers.hpp"

namespace lxh::detail {

TreeModel fit_tree(const FeatureMatrix& x, std::span<const LightClass> labels, std::size_t max_splits);
LightClass predict_tree(const TreeModel& model, std::span<const double> q);

LdaModel fit_lda(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t classes);
std::size_t predict_lda(const LdaModel& model, std::span<const double> q);

GnbModel fit_gnb(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t classes);
std::size_t predict_gnb(const GnbModel& model, std::span<const double> q);

SvmModel fit_svm(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t classes, double box);
std::size_t predict_svm(const SvmModel& model, std::span<const double> q, std::size_t classes);

/// Index of the largest score; the first index wins ties.
std::size_t argmax(std::span<const double> scores);

}  // namespace lxh::detail

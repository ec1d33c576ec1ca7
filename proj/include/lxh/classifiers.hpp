#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lxh/exec.hpp"
#include "lxh/features.hpp"
#include "lxh/knn.hpp"
#include "lxh/light_class.hpp"

namespace lxh {

enum class Method {
  fine_tree,
  medium_tree,
  coarse_tree,
  linear_discriminant,
  gaussian_naive_bayes,
  linear_svm,
  fine_knn,
  medium_knn,
  coarse_knn,
  cosine_knn,
  cubic_knn,
  weighted_knn,
};

inline constexpr std::array<Method, 12> kAllMethods = {
    Method::fine_tree,  Method::medium_tree, Method::coarse_tree, Method::linear_discriminant,
    Method::gaussian_naive_bayes, Method::linear_svm, Method::fine_knn, Method::medium_knn,
    Method::coarse_knn, Method::cosine_knn, Method::cubic_knn, Method::weighted_knn};

/// "FineKNN", "LinearDiscriminant", ...
std::string_view to_string(Method method);
/// Accepts the names above in any case, with or without underscores.
Method parse_method(std::string_view name);

bool is_knn(Method method);
bool is_tree(Method method);
std::size_t tree_max_splits(Method method);
std::size_t knn_k(Method method);
Metric knn_metric(Method method);

struct KnnModel {
  std::size_t k = 1;
  Metric metric = Metric::euclidean;
  bool weighted = false;
  FeatureMatrix points;
  std::vector<LightClass> labels;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x[feature] < threshold goes left
  int left = -1;
  int right = -1;
  LightClass label = LightClass::dark;  // majority class of the node's rows
};

struct TreeModel {
  std::size_t max_splits = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct LdaModel {
  std::vector<double> weights;  // classes x dim, row-major
  std::vector<double> offsets;  // per class
};

struct GnbModel {
  std::vector<double> log_priors;  // per class
  std::vector<double> means;       // classes x dim
  std::vector<double> variances;   // classes x dim, floored
};

struct SvmMachine {
  std::size_t positive = 0;  // index into the classifier's class list
  std::size_t negative = 0;
  std::vector<double> w;     // on standardized features
  double bias = 0.0;
  std::size_t support_vectors = 0;
};

struct SvmModel {
  double box = 1.0;
  std::vector<double> center;  // standardization
  std::vector<double> scale;
  std::vector<SvmMachine> machines;
};

using ModelState = std::variant<KnnModel, TreeModel, LdaModel, GnbModel, SvmModel>;

class TrainedClassifier {
 public:
  TrainedClassifier(Method method, FeatureConfig config, Taxonomy taxonomy, std::vector<LightClass> classes,
                    std::vector<double> medians, ModelState state);

  Method method() const { return method_; }
  const FeatureConfig& config() const { return config_; }
  Taxonomy taxonomy() const { return taxonomy_; }
  /// Classes seen in training, canonical order.
  const std::vector<LightClass>& classes() const { return classes_; }
  /// Per-feature medians of the training rows.
  const std::vector<double>& medians() const { return medians_; }
  const ModelState& state() const { return state_; }

  LightClass predict(std::span<const double> features) const;
  LightClass predict(const PseudoSpectrum& ps) const;

 private:
  Method method_;
  FeatureConfig config_;
  Taxonomy taxonomy_;
  std::vector<LightClass> classes_;
  std::vector<double> medians_;
  ModelState state_;
};

TrainedClassifier train(Method method, const LabeledDataset& ds, const FeatureConfig& config);
/// Training on precomputed features; `config` is recorded, not applied.
TrainedClassifier train(Method method, const FeatureMatrix& features, std::span<const LightClass> labels,
                        const FeatureConfig& config, Taxonomy taxonomy);

std::vector<LightClass> predict_batch(const TrainedClassifier& clf, const FeatureMatrix& features,
                                      Exec exec = Exec::parallel);

inline constexpr std::uint64_t kDefaultCvSeed = 20210601;

struct CvResult {
  double mean_accuracy = 0.0;
  std::vector<double> fold_accuracies;
};

/// Complement of fold `f`: the training rows for that fold.
std::vector<std::size_t> training_indices(const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                                          std::size_t n);

CvResult cross_validate(Method method, const LabeledDataset& ds, const FeatureConfig& config, std::size_t k = 5,
                        std::uint64_t seed = kDefaultCvSeed);

struct SweepCell {
  enum class Status { ok, skipped, failed };

  Method method;
  char config;
  Norm norm;
  double accuracy = 0.0;
  Status status = Status::ok;
  std::string message;
  std::optional<double> holdout;  // set by evaluate_perfect_cells
};

std::string_view to_string(SweepCell::Status status);

struct SweepReport {
  std::vector<SweepCell> cells;

  /// Cells with CV accuracy exactly 1.
  std::size_t perfect_count(Norm norm) const;
  std::size_t perfect_count(Method method) const;
  std::size_t perfect_count(char config) const;
  std::string csv() const;
};

/// One cross-validation per (method, config, norm). Configs a normalization
/// rules out appear as skipped cells (only letters L..S can be skipped; the
/// raw axis lists A..K only).
SweepReport sweep(const LabeledDataset& ds, std::span<const Method> methods, std::span<const Norm> norms,
                  std::size_t k = 5, std::uint64_t seed = kDefaultCvSeed, Exec exec = Exec::parallel);

struct Bounds {
  double x0, x1, y0, y1;
};

struct SurfacePoint {
  double x;
  double y;
  LightClass cls;
};

/// res x res cell centres over the bounds, varying features dims[0] and
/// dims[1]; remaining features held at the training medians.
std::vector<SurfacePoint> decision_surface(const TrainedClassifier& clf, std::array<std::size_t, 2> dims,
                                           const Bounds& bounds, std::size_t res, Exec exec = Exec::parallel);
std::string surface_csv(std::span<const SurfacePoint> surface);

struct HoldoutResult {
  double accuracy = 0.0;
  std::vector<LightClass> classes;               // row/column order, canonical
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

HoldoutResult evaluate_holdout(const TrainedClassifier& clf, const LabeledDataset& holdout);

/// Retrains every cell with CV accuracy exactly 1 on `ds` and records its
/// holdout accuracy in the cell.
void evaluate_perfect_cells(SweepReport& report, const LabeledDataset& ds, const LabeledDataset& holdout,
                            Exec exec = Exec::parallel);

}  // namespace lxh

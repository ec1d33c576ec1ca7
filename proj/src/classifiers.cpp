#include "lxh/classifiers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"
#include "models.hpp"

namespace lxh {

namespace {

constexpr std::array<std::string_view, 12> kMethodNames = {
    "FineTree", "MediumTree", "CoarseTree", "LinearDiscriminant", "GaussianNaiveBayes", "LinearSVM",
    "FineKNN",  "MediumKNN",  "CoarseKNN",  "CosineKNN",          "CubicKNN",           "WeightedKNN"};

std::string fold_name(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '_' && c != '-') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<double> medians_of(const FeatureMatrix& x) {
  std::vector<double> out(x.cols, 0.0);
  if (x.rows == 0) return out;
  std::vector<double> col(x.rows);
  for (std::size_t j = 0; j < x.cols; ++j) {
    for (std::size_t i = 0; i < x.rows; ++i) col[i] = x.values[i * x.cols + j];
    std::sort(col.begin(), col.end());
    const std::size_t h = x.rows / 2;
    out[j] = x.rows % 2 ? col[h] : 0.5 * (col[h - 1] + col[h]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Method method) { return kMethodNames[static_cast<std::size_t>(method)]; }

Method parse_method(std::string_view name) {
  const auto key = fold_name(name);
  for (Method m : kAllMethods)
    if (fold_name(to_string(m)) == key) return m;
  fail(Errc::config_error, "unknown classifier method '" + std::string(name) + "'");
}

bool is_knn(Method method) { return method >= Method::fine_knn; }
bool is_tree(Method method) { return method <= Method::coarse_tree; }

std::size_t tree_max_splits(Method method) {
  switch (method) {
    case Method::fine_tree: return 100;
    case Method::medium_tree: return 20;
    case Method::coarse_tree: return 4;
    default: return 0;
  }
}

std::size_t knn_k(Method method) {
  switch (method) {
    case Method::fine_knn: return 1;
    case Method::coarse_knn: return 100;
    default: return is_knn(method) ? 10 : 0;
  }
}

Metric knn_metric(Method method) {
  if (method == Method::cosine_knn) return Metric::cosine;
  if (method == Method::cubic_knn) return Metric::minkowski3;
  return Metric::euclidean;
}

TrainedClassifier::TrainedClassifier(Method method, FeatureConfig config, Taxonomy taxonomy,
                                     std::vector<LightClass> classes, std::vector<double> medians, ModelState state)
    : method_(method),
      config_(std::move(config)),
      taxonomy_(taxonomy),
      classes_(std::move(classes)),
      medians_(std::move(medians)),
      state_(std::move(state)) {}

LightClass TrainedClassifier::predict(std::span<const double> features) const {
  if (features.size() != config_.dimension())
    fail(Errc::shape_mismatch, "feature vector has " + std::to_string(features.size()) + " values, config " +
                                   config_.name() + " expects " + std::to_string(config_.dimension()));
  return std::visit(
      [&](const auto& m) -> LightClass {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, KnnModel>) {
          return knn_vote(m.points, m.labels, features, m.k, m.metric, m.weighted);
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          return detail::predict_tree(m, features);
        } else if constexpr (std::is_same_v<T, LdaModel>) {
          return classes_[detail::predict_lda(m, features)];
        } else if constexpr (std::is_same_v<T, GnbModel>) {
          return classes_[detail::predict_gnb(m, features)];
        } else {
          return classes_[detail::predict_svm(m, features, classes_.size())];
        }
      },
      state_);
}

LightClass TrainedClassifier::predict(const PseudoSpectrum& ps) const { return predict(extract(ps, config_)); }

TrainedClassifier train(Method method, const FeatureMatrix& x, std::span<const LightClass> labels,
                        const FeatureConfig& config, Taxonomy taxonomy) {
  if (labels.size() != x.rows) fail(Errc::shape_mismatch, "label count differs from feature rows");
  if (x.cols != config.dimension()) fail(Errc::shape_mismatch, "feature width differs from config dimension");
  if (x.rows == 0) fail(Errc::degenerate_training, "empty training set");
  for (double v : x.values)
    if (!std::isfinite(v)) fail(Errc::invalid_channel_value, "non-finite training feature");

  std::array<std::size_t, kLightClassCount> slot;
  slot.fill(kLightClassCount);
  for (auto l : labels) slot[index_of(l)] = 0;
  std::vector<LightClass> classes;
  for (std::size_t c = 0; c < kLightClassCount; ++c)
    if (slot[c] == 0) {
      slot[c] = classes.size();
      classes.push_back(static_cast<LightClass>(c));
    }
  if (classes.size() < 2) fail(Errc::degenerate_training, "training data holds a single class");
  std::vector<std::size_t> y(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) y[i] = slot[index_of(labels[i])];

  ModelState state;
  if (is_knn(method)) {
    KnnModel m;
    m.k = std::max<std::size_t>(1, std::min(knn_k(method), x.rows - 1));
    if (method == Method::fine_knn) m.k = 1;
    m.metric = knn_metric(method);
    m.weighted = method == Method::weighted_knn;
    m.points = x;
    m.labels.assign(labels.begin(), labels.end());
    state = std::move(m);
  } else if (is_tree(method)) {
    state = detail::fit_tree(x, labels, tree_max_splits(method));
  } else if (method == Method::linear_discriminant) {
    state = detail::fit_lda(x, y, classes.size());
  } else if (method == Method::gaussian_naive_bayes) {
    state = detail::fit_gnb(x, y, classes.size());
  } else {
    state = detail::fit_svm(x, y, classes.size(), 1.0);
  }
  return TrainedClassifier(method, config, taxonomy, std::move(classes), medians_of(x), std::move(state));
}

TrainedClassifier train(Method method, const LabeledDataset& ds, const FeatureConfig& config) {
  return train(method, featurize(ds, config), ds.labels, config, ds.taxonomy);
}

std::vector<LightClass> predict_batch(const TrainedClassifier& clf, const FeatureMatrix& features, Exec exec) {
  std::vector<LightClass> out(features.rows);
  const auto n = static_cast<std::ptrdiff_t>(features.rows);
  if (exec == Exec::parallel) {
    // the first exception escaping a worker is rethrown after the loop
    std::optional<Error> error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = clf.predict(features.row(static_cast<std::size_t>(i)));
      } catch (const Error& e) {
#pragma omp critical(lxh_predict_error)
        if (!error) error = e;
      }
    }
    if (error) throw *error;
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = clf.predict(features.row(static_cast<std::size_t>(i)));
  }
  return out;
}

std::vector<std::size_t> training_indices(const std::vector<std::vector<std::size_t>>& folds, std::size_t f,
                                          std::size_t n) {
  std::vector<bool> held(n, false);
  for (auto i : folds.at(f)) held[i] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!held[i]) out.push_back(i);
  return out;
}

namespace {

FeatureMatrix take_rows(const FeatureMatrix& x, std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.rows = rows.size();
  out.cols = x.cols;
  out.values.reserve(out.rows * out.cols);
  for (auto r : rows) {
    const auto row = x.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  return out;
}

CvResult cross_validate_matrix(Method method, const FeatureMatrix& x, std::span<const LightClass> labels,
                               const FeatureConfig& config, Taxonomy taxonomy,
                               const std::vector<std::vector<std::size_t>>& folds) {
  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto train_rows = training_indices(folds, f, x.rows);
    std::vector<LightClass> train_labels;
    train_labels.reserve(train_rows.size());
    for (auto r : train_rows) train_labels.push_back(labels[r]);
    const auto clf = train(method, take_rows(x, train_rows), train_labels, config, taxonomy);
    std::size_t correct = 0;
    for (auto r : folds[f]) correct += clf.predict(x.row(r)) == labels[r];
    result.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(folds[f].size()));
  }
  double sum = 0.0;
  for (double a : result.fold_accuracies) sum += a;
  result.mean_accuracy = sum / static_cast<double>(result.fold_accuracies.size());
  return result;
}

}  // namespace

CvResult cross_validate(Method method, const LabeledDataset& ds, const FeatureConfig& config, std::size_t k,
                        std::uint64_t seed) {
  const auto folds = kfold_split(ds, k, seed);
  return cross_validate_matrix(method, featurize(ds, config), ds.labels, config, ds.taxonomy, folds);
}

std::string_view to_string(SweepCell::Status status) {
  switch (status) {
    case SweepCell::Status::ok: return "ok";
    case SweepCell::Status::skipped: return "skipped";
    case SweepCell::Status::failed: return "failed";
  }
  return "ok";
}

std::size_t SweepReport::perfect_count(Norm norm) const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [&](const SweepCell& c) {
    return c.norm == norm && c.status == SweepCell::Status::ok && c.accuracy == 1.0;
  }));
}

std::size_t SweepReport::perfect_count(Method method) const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [&](const SweepCell& c) {
    return c.method == method && c.status == SweepCell::Status::ok && c.accuracy == 1.0;
  }));
}

std::size_t SweepReport::perfect_count(char config) const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [&](const SweepCell& c) {
    return c.config == config && c.status == SweepCell::Status::ok && c.accuracy == 1.0;
  }));
}

std::string SweepReport::csv() const {
  std::string out = "method,config,normalization,cv_accuracy,status,holdout_accuracy\n";
  for (const auto& c : cells) {
    out += to_string(c.method);
    out += ',';
    out += c.config;
    out += ',';
    out += to_string(c.norm);
    out += ',';
    out += c.status == SweepCell::Status::ok ? csv::number(c.accuracy) : std::string();
    out += ',';
    out += to_string(c.status);
    out += ',';
    if (c.holdout) out += csv::number(*c.holdout);
    out += '\n';
  }
  return out;
}

SweepReport sweep(const LabeledDataset& ds, std::span<const Method> methods, std::span<const Norm> norms,
                  std::size_t k, std::uint64_t seed, Exec exec) {
  if (methods.empty() || norms.empty()) fail(Errc::config_error, "sweep needs at least one method and normalization");
  const auto folds = kfold_split(ds, k, seed);

  struct Column {
    std::optional<FeatureConfig> config;
    char id;
    Norm norm;
    FeatureMatrix x;
  };
  std::vector<Column> columns;
  for (Norm norm : norms)
    for (char id : all_config_ids()) {
      if (norm == Norm::none && id > 'K') continue;
      auto config = try_make_config(id, norm);
      FeatureMatrix x = config ? featurize(ds, *config) : FeatureMatrix{};
      columns.push_back({std::move(config), id, norm, std::move(x)});
    }

  SweepReport report;
  for (const auto& col : columns)
    for (Method m : methods) {
      SweepCell cell{m, col.id, col.norm, 0.0, SweepCell::Status::ok, {}, {}};
      if (!col.config) cell.status = SweepCell::Status::skipped;
      report.cells.push_back(cell);
    }

  const auto n_methods = methods.size();
  const auto run = [&](std::size_t i) {
    auto& cell = report.cells[i];
    if (cell.status == SweepCell::Status::skipped) return;
    const auto& col = columns[i / n_methods];
    try {
      cell.accuracy = cross_validate_matrix(cell.method, col.x, ds.labels, *col.config, ds.taxonomy, folds).mean_accuracy;
    } catch (const Error& e) {
      cell.status = SweepCell::Status::failed;
      cell.message = e.what();
    }
  };
  const auto n = static_cast<std::ptrdiff_t>(report.cells.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
  }
  return report;
}

std::vector<SurfacePoint> decision_surface(const TrainedClassifier& clf, std::array<std::size_t, 2> dims,
                                           const Bounds& b, std::size_t res, Exec exec) {
  if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) fail(Errc::invalid_grid, "surface bounds must satisfy x0 < x1 and y0 < y1");
  if (res == 0) fail(Errc::invalid_grid, "surface resolution must be >= 1");
  const std::size_t d = clf.config().dimension();
  if (dims[0] >= d || dims[1] >= d || dims[0] == dims[1])
    fail(Errc::shape_mismatch, "surface dimensions must be two distinct feature indices below " + std::to_string(d));
  std::vector<SurfacePoint> out(res * res);
  const double dx = (b.x1 - b.x0) / static_cast<double>(res);
  const double dy = (b.y1 - b.y0) / static_cast<double>(res);
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const auto cell = [&](std::ptrdiff_t idx) {
    const auto i = static_cast<std::size_t>(idx);
    std::vector<double> q = clf.medians();
    const double x = b.x0 + (static_cast<double>(i % res) + 0.5) * dx;
    const double y = b.y0 + (static_cast<double>(i / res) + 0.5) * dy;
    q[dims[0]] = x;
    q[dims[1]] = y;
    out[i] = {x, y, clf.predict(q)};
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) cell(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) cell(i);
  }
  return out;
}

std::string surface_csv(std::span<const SurfacePoint> surface) {
  std::string out = "x,y,class\n";
  for (const auto& p : surface) {
    out += csv::number(p.x);
    out += ',';
    out += csv::number(p.y);
    out += ',';
    out += to_string(p.cls);
    out += '\n';
  }
  return out;
}

HoldoutResult evaluate_holdout(const TrainedClassifier& clf, const LabeledDataset& holdout) {
  if (holdout.taxonomy != clf.taxonomy())
    fail(Errc::taxonomy_error, "holdout taxonomy differs from the classifier's");
  HoldoutResult r;
  std::array<bool, kLightClassCount> present{};
  for (auto c : clf.classes()) present[index_of(c)] = true;
  for (auto c : holdout.labels) present[index_of(c)] = true;
  std::array<std::size_t, kLightClassCount> slot{};
  for (std::size_t c = 0; c < kLightClassCount; ++c)
    if (present[c]) {
      slot[c] = r.classes.size();
      r.classes.push_back(static_cast<LightClass>(c));
    }
  r.confusion.assign(r.classes.size(), std::vector<std::size_t>(r.classes.size(), 0));
  if (holdout.size() == 0) return r;
  const auto predicted = predict_batch(clf, featurize(holdout, clf.config()), Exec::serial);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    ++r.confusion[slot[index_of(holdout.labels[i])]][slot[index_of(predicted[i])]];
    correct += predicted[i] == holdout.labels[i];
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(holdout.size());
  return r;
}

void evaluate_perfect_cells(SweepReport& report, const LabeledDataset& ds, const LabeledDataset& holdout, Exec exec) {
  if (holdout.taxonomy != ds.taxonomy) fail(Errc::taxonomy_error, "holdout taxonomy differs from the training set's");
  std::vector<std::size_t> perfect;
  for (std::size_t i = 0; i < report.cells.size(); ++i)
    if (report.cells[i].status == SweepCell::Status::ok && report.cells[i].accuracy == 1.0) perfect.push_back(i);
  const auto n = static_cast<std::ptrdiff_t>(perfect.size());
  const auto one = [&](std::ptrdiff_t j) {
    auto& cell = report.cells[perfect[static_cast<std::size_t>(j)]];
    const auto clf = train(cell.method, ds, make_config(cell.config, cell.norm));
    cell.holdout = evaluate_holdout(clf, holdout).accuracy;
  };
  if (exec == Exec::parallel) {
    std::optional<Error> error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      try {
        one(j);
      } catch (const Error& e) {
#pragma omp critical(lxh_holdout_error)
        if (!error) error = e;
      }
    }
    if (error) throw *error;
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) one(j);
  }
}

}  // namespace lxh

#include "lxh/model_io.hpp"

#include <json.hpp>

#include "lxh/csv.hpp"
#include "lxh/error.hpp"

namespace lxh {

using nlohmann::json;

namespace {

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::cosine: return "cosine";
    case Metric::minkowski3: return "minkowski3";
  }
  return "euclidean";
}

Metric parse_metric(const std::string& s) {
  for (Metric m : {Metric::euclidean, Metric::cosine, Metric::minkowski3})
    if (metric_name(m) == s) return m;
  fail(Errc::parse_error, "unknown metric '" + s + "'");
}

json labels_json(std::span<const LightClass> labels) {
  json a = json::array();
  for (auto l : labels) a.push_back(std::string(to_string(l)));
  return a;
}

std::vector<LightClass> labels_from(const json& a) {
  std::vector<LightClass> out;
  for (const auto& s : a) out.push_back(parse_light_class(s.get<std::string>()));
  return out;
}

struct StateWriter {
  json& j;
  void operator()(const KnnModel& m) const {
    j["k"] = m.k;
    j["metric"] = metric_name(m.metric);
    j["weighted"] = m.weighted;
    j["points"] = m.points.values;
    j["labels"] = labels_json(m.labels);
  }
  void operator()(const TreeModel& m) const {
    j["max_splits"] = m.max_splits;
    json nodes = json::array();
    for (const auto& n : m.nodes)
      nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right},
                       {"label", std::string(to_string(n.label))}});
    j["nodes"] = nodes;
  }
  void operator()(const LdaModel& m) const {
    j["weights"] = m.weights;
    j["offsets"] = m.offsets;
  }
  void operator()(const GnbModel& m) const {
    j["log_priors"] = m.log_priors;
    j["means"] = m.means;
    j["variances"] = m.variances;
  }
  void operator()(const SvmModel& m) const {
    j["box"] = m.box;
    j["center"] = m.center;
    j["scale"] = m.scale;
    json machines = json::array();
    for (const auto& s : m.machines)
      machines.push_back({{"positive", s.positive}, {"negative", s.negative}, {"w", s.w}, {"bias", s.bias},
                          {"support_vectors", s.support_vectors}});
    j["machines"] = machines;
  }
};

ModelState state_from(Method method, const json& j, std::size_t dim, std::size_t classes) {
  const auto sized = [](const std::vector<double>& v, std::size_t n, const char* what) {
    if (v.size() != n) fail(Errc::parse_error, std::string("model ") + what + " has the wrong length");
    return v;
  };
  if (is_knn(method)) {
    KnnModel m;
    m.k = j.at("k").get<std::size_t>();
    m.metric = parse_metric(j.at("metric").get<std::string>());
    m.weighted = j.at("weighted").get<bool>();
    m.labels = labels_from(j.at("labels"));
    m.points.cols = dim;
    m.points.rows = m.labels.size();
    m.points.values = sized(j.at("points").get<std::vector<double>>(), dim * m.labels.size(), "points");
    if (m.k == 0 || m.labels.empty()) fail(Errc::parse_error, "KNN model needs k >= 1 and stored points");
    return m;
  }
  if (is_tree(method)) {
    TreeModel m;
    m.max_splits = j.at("max_splits").get<std::size_t>();
    for (const auto& n : j.at("nodes"))
      m.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(), n.at("left").get<int>(),
                         n.at("right").get<int>(), parse_light_class(n.at("label").get<std::string>())});
    const auto count = static_cast<int>(m.nodes.size());
    if (count == 0) fail(Errc::parse_error, "tree model has no nodes");
    for (int i = 0; i < count; ++i) {
      const auto& n = m.nodes[static_cast<std::size_t>(i)];
      if (n.feature < 0) continue;
      // children always follow their parent, which also rules out cycles
      if (n.feature >= static_cast<int>(dim) || n.left <= i || n.right <= i || n.left >= count || n.right >= count)
        fail(Errc::parse_error, "tree model has an invalid node");
    }
    return m;
  }
  if (method == Method::linear_discriminant) {
    LdaModel m;
    m.weights = sized(j.at("weights").get<std::vector<double>>(), classes * dim, "weights");
    m.offsets = sized(j.at("offsets").get<std::vector<double>>(), classes, "offsets");
    return m;
  }
  if (method == Method::gaussian_naive_bayes) {
    GnbModel m;
    m.log_priors = sized(j.at("log_priors").get<std::vector<double>>(), classes, "log_priors");
    m.means = sized(j.at("means").get<std::vector<double>>(), classes * dim, "means");
    m.variances = sized(j.at("variances").get<std::vector<double>>(), classes * dim, "variances");
    return m;
  }
  SvmModel m;
  m.box = j.at("box").get<double>();
  m.center = sized(j.at("center").get<std::vector<double>>(), dim, "center");
  m.scale = sized(j.at("scale").get<std::vector<double>>(), dim, "scale");
  for (const auto& s : j.at("machines")) {
    SvmMachine machine{s.at("positive").get<std::size_t>(), s.at("negative").get<std::size_t>(),
                       sized(s.at("w").get<std::vector<double>>(), dim, "w"), s.at("bias").get<double>(),
                       s.at("support_vectors").get<std::size_t>()};
    if (machine.positive >= classes || machine.negative >= classes)
      fail(Errc::parse_error, "SVM machine refers to an unknown class");
    m.machines.push_back(std::move(machine));
  }
  if (m.machines.size() != classes * (classes - 1) / 2)
    fail(Errc::parse_error, "SVM model needs one machine per class pair");
  return m;
}

}  // namespace

std::string model_to_json(const TrainedClassifier& clf) {
  json j;
  j["format"] = "lxh-classifier";
  j["version"] = kModelFormatVersion;
  j["method"] = std::string(to_string(clf.method()));
  j["taxonomy"] = std::string(to_string(clf.taxonomy()));
  j["config"] = std::string(1, clf.config().id);
  j["normalization"] = std::string(to_string(clf.config().norm));
  json channels = json::array();
  for (auto c : clf.config().channels) channels.push_back(std::string(to_string(c)));
  j["channels"] = channels;
  j["classes"] = labels_json(clf.classes());
  j["medians"] = clf.medians();
  json state;
  std::visit(StateWriter{state}, clf.state());
  j["state"] = state;
  // nlohmann writes doubles in shortest round-trip form
  return j.dump(1) + "\n";
}

TrainedClassifier model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("model JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "lxh-classifier") fail(Errc::parse_error, "not a classifier model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      fail(Errc::parse_error, "unsupported model version " + std::to_string(version));
    const Method method = parse_method(j.at("method").get<std::string>());
    const Taxonomy taxonomy = parse_taxonomy(j.at("taxonomy").get<std::string>());
    const auto id = j.at("config").get<std::string>();
    if (id.size() != 1) fail(Errc::parse_error, "config id must be one letter");
    FeatureConfig config = make_config(id[0], parse_norm(j.at("normalization").get<std::string>()));
    std::vector<Channel> channels;
    for (const auto& c : j.at("channels")) channels.push_back(parse_channel(c.get<std::string>()));
    if (channels != config.channels) fail(Errc::parse_error, "stored channels disagree with config " + id);
    auto classes = labels_from(j.at("classes"));
    if (classes.size() < 2) fail(Errc::parse_error, "model needs at least two classes");
    auto medians = j.at("medians").get<std::vector<double>>();
    if (medians.size() != config.dimension()) fail(Errc::parse_error, "medians have the wrong length");
    auto state = state_from(method, j.at("state"), config.dimension(), classes.size());
    return TrainedClassifier(method, std::move(config), taxonomy, std::move(classes), std::move(medians),
                             std::move(state));
  } catch (const json::exception& e) {
    fail(Errc::parse_error, std::string("model JSON: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedClassifier& clf) {
  csv::write_text(path, model_to_json(clf));
}

TrainedClassifier load_model(const std::filesystem::path& path) { return model_from_json(csv::read_text(path)); }

}  // namespace lxh

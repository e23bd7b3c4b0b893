#include "texbench/classifier.hpp"

#include <cmath>
#include <fstream>

#include "texbench/errors.hpp"

using nlohmann::json;

namespace texbench {
namespace {

class SvmClassifier final : public Model {
 public:
  explicit SvmClassifier(SvmModel m) : model_(std::move(m)) {}
  int predict(std::span<const double> x) const override { return model_.predict(x); }
  std::vector<int> predict_batch(const Matrix& x) const override { return model_.predict_batch(x); }
  std::size_t input_dim() const override { return model_.dim(); }

  json to_json() const override {
    json pairs = json::array();
    for (const auto& p : model_.pairs) {
      pairs.push_back({{"positive", p.positive},
                       {"negative", p.negative},
                       {"support", p.support},
                       {"coef", p.coef},
                       {"bias", p.bias},
                       {"converged", p.converged}});
    }
    json svs = json::array();
    for (std::size_t r = 0; r < model_.support_vectors.rows(); ++r) {
      const auto row = model_.support_vectors.row(r);
      svs.push_back(std::vector<double>(row.begin(), row.end()));
    }
    ClassifierSpec spec;
    spec.svm = model_.params;
    return {{"type", "svm"},
            {"params", texbench::to_json(spec)["svm"]},
            {"dim", model_.dim()},
            {"classes", model_.classes},
            {"support_vectors", svs},
            {"pairs", pairs}};
  }

  static std::unique_ptr<Model> from_json(const json& j) {
    SvmModel m;
    json spec = {{"kind", "svm"}, {"svm", j.at("params")}};
    m.params = classifier_spec_from_json(spec).svm;
    m.classes = j.at("classes").get<std::vector<int>>();
    m.support_vectors = Matrix(0, j.at("dim").get<std::size_t>());
    for (const auto& row : j.at("support_vectors")) {
      m.support_vectors.push_row(row.get<std::vector<double>>());
    }
    for (const auto& p : j.at("pairs")) {
      SvmModel::Pair pair;
      pair.positive = p.at("positive").get<int>();
      pair.negative = p.at("negative").get<int>();
      pair.support = p.at("support").get<std::vector<std::size_t>>();
      pair.coef = p.at("coef").get<std::vector<double>>();
      pair.bias = p.at("bias").get<double>();
      pair.converged = p.value("converged", true);
      m.pairs.push_back(std::move(pair));
    }
    return std::make_unique<SvmClassifier>(std::move(m));
  }

 private:
  SvmModel model_;
};

class TreeClassifier final : public Model {
 public:
  explicit TreeClassifier(TreeModel m) : model_(std::move(m)) {}
  int predict(std::span<const double> x) const override { return model_.predict(x); }
  std::size_t input_dim() const override { return model_.dim; }

  json to_json() const override {
    json nodes = json::array();
    for (const auto& n : model_.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
    }
    return {{"type", "tree"}, {"dim", model_.dim}, {"nodes", nodes}};
  }

  static std::unique_ptr<Model> from_json(const json& j) {
    TreeModel m;
    m.dim = j.at("dim").get<std::size_t>();
    for (const auto& n : j.at("nodes")) {
      TreeNode node;
      node.feature = n.at(0).get<int>();
      node.threshold = n.at(1).get<double>();
      node.left = n.at(2).get<int>();
      node.right = n.at(3).get<int>();
      node.label = n.at(4).get<int>();
      m.nodes.push_back(node);
    }
    return std::make_unique<TreeClassifier>(std::move(m));
  }

 private:
  TreeModel model_;
};

class MlpClassifier final : public Model {
 public:
  explicit MlpClassifier(MlpModel m) : model_(std::move(m)) {}
  int predict(std::span<const double> x) const override { return model_.predict(x); }
  std::size_t input_dim() const override { return model_.input_dim(); }

  json to_json() const override {
    std::vector<int> hidden;
    for (std::size_t l = 0; l + 1 < model_.layer_count(); ++l) {
      hidden.push_back(static_cast<int>(model_.weights()[l].cols()));
    }
    return {{"type", "mlp"},
            {"input_dim", model_.input_dim()},
            {"hidden", hidden},
            {"classes", model_.classes()},
            {"activation", activation_name(model_.activation())},
            {"epochs_run", model_.epochs_run},
            {"parameters", model_.parameters()}};
  }

  static std::unique_ptr<Model> from_json(const json& j) {
    const auto hidden = j.at("hidden").get<std::vector<int>>();
    MlpModel m(j.at("input_dim").get<std::size_t>(), hidden,
               j.at("classes").get<std::vector<int>>(),
               parse_activation(j.at("activation").get<std::string>()));
    m.set_parameters(j.at("parameters").get<std::vector<double>>());
    m.epochs_run = j.value("epochs_run", 0);
    return std::make_unique<MlpClassifier>(std::move(m));
  }

 private:
  MlpModel model_;
};

// z-scores inputs with training statistics before delegating.
class StandardizedModel final : public Model {
 public:
  StandardizedModel(std::vector<double> mean, std::vector<double> scale,
                    std::unique_ptr<Model> inner)
      : mean_(std::move(mean)), scale_(std::move(scale)), inner_(std::move(inner)) {}

  int predict(std::span<const double> x) const override {
    if (x.size() != mean_.size()) throw ParameterError("input dimension does not match the model");
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (x[i] - mean_[i]) / scale_[i];
    return inner_->predict(z);
  }
  std::vector<int> predict_batch(const Matrix& x) const override {
    return inner_->predict_batch(transform(x));
  }
  std::size_t input_dim() const override { return mean_.size(); }

  Matrix transform(const Matrix& x) const {
    if (x.cols() != mean_.size()) throw ParameterError("input dimension does not match the model");
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows(); ++r) {
      auto row = out.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean_[c]) / scale_[c];
    }
    return out;
  }

  json to_json() const override {
    return {{"type", "standardized"}, {"mean", mean_}, {"scale", scale_}, {"inner", inner_->to_json()}};
  }

  static std::unique_ptr<StandardizedModel> fit_statistics(const Matrix& x) {
    std::vector<double> mean(x.cols(), 0.0);
    std::vector<double> scale(x.cols(), 0.0);
    const double n = static_cast<double>(std::max<std::size_t>(x.rows(), 1));
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
    }
    for (double& m : mean) m /= n;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) scale[c] += (x(r, c) - mean[c]) * (x(r, c) - mean[c]);
    }
    for (double& s : scale) {
      s = std::sqrt(s / n);
      if (s == 0.0) s = 1.0;
    }
    return std::make_unique<StandardizedModel>(std::move(mean), std::move(scale), nullptr);
  }

  void set_inner(std::unique_ptr<Model> inner) { inner_ = std::move(inner); }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::unique_ptr<Model> inner_;
};

}  // namespace

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "svm") return ClassifierKind::svm;
  if (name == "tree" || name == "dt") return ClassifierKind::tree;
  if (name == "mlp" || name == "ann") return ClassifierKind::mlp;
  throw ParameterError("unknown classifier '" + std::string(name) + "' (expected svm|tree|mlp)");
}

std::string_view classifier_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::tree: return "tree";
    case ClassifierKind::mlp: return "mlp";
  }
  return "svm";
}

std::string ClassifierSpec::describe() const {
  std::string s;
  switch (kind) {
    case ClassifierKind::svm: s = svm.describe(); break;
    case ClassifierKind::tree: s = tree.describe(); break;
    case ClassifierKind::mlp: s = mlp.describe(); break;
  }
  if (standardize) s += ";standardize=1";
  return s;
}

ClassifierSpec reference_spec(ClassifierKind kind) {
  ClassifierSpec spec;
  spec.kind = kind;
  spec.svm.kernel = KernelType::rbf;
  spec.svm.c = 2.5;
  spec.svm.gamma = 1.5e-6;
  spec.mlp.hidden_layers = {300, 300};
  spec.mlp.learning_rate = 0.0005;
  return spec;
}

json to_json(const ClassifierSpec& spec) {
  json j = {{"kind", classifier_name(spec.kind)}, {"standardize", spec.standardize}};
  switch (spec.kind) {
    case ClassifierKind::svm:
      j["svm"] = {{"C", spec.svm.c},
                  {"gamma", spec.svm.gamma},
                  {"kernel", kernel_name(spec.svm.kernel)},
                  {"degree", spec.svm.degree},
                  {"coef0", spec.svm.coef0},
                  {"tol", spec.svm.tol},
                  {"max_passes", spec.svm.max_passes}};
      break;
    case ClassifierKind::tree:
      j["tree"] = {{"criterion", "gini"},
                   {"max_depth", spec.tree.max_depth ? json(*spec.tree.max_depth) : json(nullptr)},
                   {"min_samples_split", spec.tree.min_samples_split}};
      break;
    case ClassifierKind::mlp:
      j["mlp"] = {{"hidden_layers", spec.mlp.hidden_layers},
                  {"learning_rate", spec.mlp.learning_rate},
                  {"activation", activation_name(spec.mlp.activation)},
                  {"optimizer", "adam"},
                  {"beta1", spec.mlp.beta1},
                  {"beta2", spec.mlp.beta2},
                  {"epsilon", spec.mlp.epsilon},
                  {"batch_size", spec.mlp.batch_size},
                  {"max_epochs", spec.mlp.max_epochs},
                  {"validation_fraction", spec.mlp.validation_fraction},
                  {"patience", spec.mlp.patience},
                  {"tol", spec.mlp.tol},
                  {"init", "he_uniform"}};
      break;
  }
  return j;
}

ClassifierSpec classifier_spec_from_json(const json& j) {
  ClassifierSpec spec;
  spec.kind = parse_classifier(j.at("kind").get<std::string>());
  spec.standardize = j.value("standardize", false);
  if (j.contains("svm")) {
    const auto& s = j["svm"];
    spec.svm.c = s.value("C", spec.svm.c);
    spec.svm.gamma = s.value("gamma", spec.svm.gamma);
    spec.svm.kernel = parse_kernel(s.value("kernel", std::string("rbf")));
    spec.svm.degree = s.value("degree", spec.svm.degree);
    spec.svm.coef0 = s.value("coef0", spec.svm.coef0);
    spec.svm.tol = s.value("tol", spec.svm.tol);
    spec.svm.max_passes = s.value("max_passes", spec.svm.max_passes);
  }
  if (j.contains("tree")) {
    const auto& t = j["tree"];
    if (t.contains("max_depth") && !t["max_depth"].is_null()) {
      spec.tree.max_depth = t["max_depth"].get<int>();
    }
    spec.tree.min_samples_split = t.value("min_samples_split", spec.tree.min_samples_split);
  }
  if (j.contains("mlp")) {
    const auto& m = j["mlp"];
    spec.mlp.hidden_layers = m.value("hidden_layers", spec.mlp.hidden_layers);
    spec.mlp.learning_rate = m.value("learning_rate", spec.mlp.learning_rate);
    spec.mlp.activation = parse_activation(m.value("activation", std::string("relu")));
    spec.mlp.beta1 = m.value("beta1", spec.mlp.beta1);
    spec.mlp.beta2 = m.value("beta2", spec.mlp.beta2);
    spec.mlp.epsilon = m.value("epsilon", spec.mlp.epsilon);
    spec.mlp.batch_size = m.value("batch_size", spec.mlp.batch_size);
    spec.mlp.max_epochs = m.value("max_epochs", spec.mlp.max_epochs);
    spec.mlp.validation_fraction = m.value("validation_fraction", spec.mlp.validation_fraction);
    spec.mlp.patience = m.value("patience", spec.mlp.patience);
    spec.mlp.tol = m.value("tol", spec.mlp.tol);
  }
  return spec;
}

std::vector<int> Model::predict_batch(const Matrix& x) const {
  std::vector<int> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict(x.row(r)));
  return out;
}

std::unique_ptr<Model> train_classifier(const ClassifierSpec& spec, const Matrix& x,
                                        std::span<const int> y, std::uint64_t seed) {
  if (spec.standardize) {
    auto wrapper = StandardizedModel::fit_statistics(x);
    ClassifierSpec inner = spec;
    inner.standardize = false;
    wrapper->set_inner(train_classifier(inner, wrapper->transform(x), y, seed));
    return wrapper;
  }
  switch (spec.kind) {
    case ClassifierKind::svm:
      return std::make_unique<SvmClassifier>(train_svm(x, y, spec.svm));
    case ClassifierKind::tree: {
      TreeParams p = spec.tree;
      p.seed = seed;
      return std::make_unique<TreeClassifier>(train_tree(x, y, p));
    }
    case ClassifierKind::mlp: {
      MlpParams p = spec.mlp;
      p.seed = seed;
      return std::make_unique<MlpClassifier>(train_mlp(x, y, p));
    }
  }
  throw ParameterError("unknown classifier");
}

TrainFn make_trainer(const ClassifierSpec& spec) {
  return [spec](const Matrix& x, std::span<const int> y, std::uint64_t seed) {
    return train_classifier(spec, x, y, seed);
  };
}

std::unique_ptr<Model> model_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "svm") return SvmClassifier::from_json(j);
  if (type == "tree") return TreeClassifier::from_json(j);
  if (type == "mlp") return MlpClassifier::from_json(j);
  if (type == "standardized") {
    return std::make_unique<StandardizedModel>(j.at("mean").get<std::vector<double>>(),
                                               j.at("scale").get<std::vector<double>>(),
                                               model_from_json(j.at("inner")));
  }
  throw ParameterError("unknown model type '" + type + "'");
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << model.to_json().dump() << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open model file " + path.string());
  try {
    return model_from_json(json::parse(f));
  } catch (const json::exception& e) {
    throw IoError("invalid model file " + path.string() + ": " + e.what());
  }
}

}  // namespace texbench

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "texbench/matrix.hpp"
#include "texbench/mlp.hpp"
#include "texbench/svm.hpp"
#include "texbench/tree.hpp"

namespace texbench {

enum class ClassifierKind { svm, tree, mlp };

ClassifierKind parse_classifier(std::string_view name);
std::string_view classifier_name(ClassifierKind kind);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::svm;
  SvmParams svm;
  TreeParams tree;
  MlpParams mlp;
  bool standardize = false;  // z-score with training statistics

  std::string name() const { return std::string(classifier_name(kind)); }
  // Parameters of the selected classifier only, "key=value;..."
  std::string describe() const;
};

// Hyperparameters reported for the original study, for the given classifier.
ClassifierSpec reference_spec(ClassifierKind kind);

nlohmann::json to_json(const ClassifierSpec& spec);
ClassifierSpec classifier_spec_from_json(const nlohmann::json& j);

class Model {
 public:
  virtual ~Model() = default;
  virtual int predict(std::span<const double> x) const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual std::vector<int> predict_batch(const Matrix& x) const;
};

using TrainFn =
    std::function<std::unique_ptr<Model>(const Matrix& x, std::span<const int> y, std::uint64_t seed)>;

// Seed overrides the tree/mlp seed in `spec`.
std::unique_ptr<Model> train_classifier(const ClassifierSpec& spec, const Matrix& x,
                                        std::span<const int> y, std::uint64_t seed);
TrainFn make_trainer(const ClassifierSpec& spec);

void save_model(const std::filesystem::path& path, const Model& model);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);
std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

}  // namespace texbench

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "texbench/classifier.hpp"
#include "texbench/featstore.hpp"
#include "texbench/matrix.hpp"

namespace texbench {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // fold index per sample
  std::uint64_t seed = 0;
  bool stratified = false;

  std::size_t size() const noexcept { return assignment.size(); }
  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

// Seeded Fisher-Yates shuffle then round-robin fold assignment. When stratified
// the round robin runs class by class with a shared counter, so both per-class
// and overall fold sizes differ by at most one.
FoldPlan kfold_split(std::size_t n, std::span<const int> labels, int k, std::uint64_t seed,
                     bool stratified);

struct FoldResult {
  int fold = 0;
  double accuracy = 0.0;  // percent
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double train_ms = 0.0;
  double predict_ms = 0.0;
};

// Identifies the feature set and the user seed a run was started from.
struct EvalInfo {
  std::string extractor = "features";
  std::string extractor_params;
  std::string classifier = "custom";
  std::string classifier_params;
  std::size_t dim = 0;
  std::uint64_t seed = 42;
  std::vector<std::string> class_names;
};

struct EvalReport {
  EvalInfo info;
  int k = 0;
  bool stratified = false;
  std::vector<FoldResult> folds;
  double mean = 0.0;  // percent
  double std = 0.0;   // sample (n - 1) deviation, percent
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  nlohmann::json config;

  double min_accuracy() const;
  double max_accuracy() const;
  std::size_t confusion_total() const;
  double total_ms() const;
};

double mean_of(std::span<const double> values);
double sample_std(std::span<const double> values);

// Train on all other folds, test on fold i, for every fold. Classifier seeds are
// derived from info.seed and the fold index.
EvalReport cross_validate(const Matrix& x, std::span<const int> labels, const TrainFn& train,
                          const FoldPlan& plan, const EvalInfo& info);

// Everything needed to rerun an evaluation on a feature file.
struct EvalConfig {
  ClassifierSpec classifier;
  int k = 3;
  std::uint64_t seed = 42;
  bool stratified = true;
};

nlohmann::json to_json(const EvalConfig& config);
EvalConfig eval_config_from_json(const nlohmann::json& j);

// Labels encoded from features.labels, plan from derive_seed(seed, "folds").
// The report's config echo is to_json(config) plus the feature meta.
EvalReport run_evaluation(const FeatureMatrix& features, const EvalConfig& config);

// Rebuilds the run described by a config echo.
EvalReport replay_evaluation(const FeatureMatrix& features, const nlohmann::json& echo);

struct LearningCurve {
  std::vector<double> fractions;
  std::vector<std::size_t> train_sizes;  // smallest subset across folds
  std::vector<std::vector<double>> train_scores;  // [fraction][fold], percent
  std::vector<std::vector<double>> test_scores;
  std::vector<double> train_mean, train_std, test_mean, test_std;
};

// For each fraction, trains on a class-stratified subset of every fold's training
// split and scores on the subset and the held-out fold. Fraction 1 uses the full
// split in its original order.
LearningCurve learning_curve(const Matrix& x, std::span<const int> labels, const TrainFn& train,
                             const FoldPlan& plan, std::span<const double> fractions,
                             std::uint64_t seed);

}  // namespace texbench

#include "texbench/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include "texbench/errors.hpp"
#include "texbench/rng.hpp"

using nlohmann::json;

namespace texbench {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

double accuracy_percent(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i] ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

std::vector<int> gather(std::span<const int> labels, std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return out;
}

}  // namespace

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
  for (int f : assignment) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldPlan kfold_split(std::size_t n, std::span<const int> labels, int k, std::uint64_t seed,
                     bool stratified) {
  if (k < 2) throw ParameterError("k must be >= 2");
  if (n < static_cast<std::size_t>(k)) {
    throw ParameterError("cannot split " + std::to_string(n) + " samples into " +
                         std::to_string(k) + " folds");
  }
  if (stratified && labels.size() != n) {
    throw ParameterError("stratified split needs one label per sample");
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.assignment.assign(n, -1);
  Rng rng(seed);

  if (!stratified) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i = 0; i < n; ++i) plan.assignment[order[i]] = static_cast<int>(i % k);
    return plan;
  }

  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);
  std::size_t counter = 0;
  for (auto& [label, idx] : members) {
    if (idx.size() < static_cast<std::size_t>(k)) {
      throw ParameterError("class " + std::to_string(label) + " has " +
                           std::to_string(idx.size()) + " samples, fewer than k=" +
                           std::to_string(k));
    }
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t i : idx) plan.assignment[i] = static_cast<int>(counter++ % k);
  }
  return plan;
}

double EvalReport::min_accuracy() const {
  double m = 100.0;
  for (const auto& f : folds) m = std::min(m, f.accuracy);
  return m;
}

double EvalReport::max_accuracy() const {
  double m = 0.0;
  for (const auto& f : folds) m = std::max(m, f.accuracy);
  return m;
}

std::size_t EvalReport::confusion_total() const {
  std::size_t total = 0;
  for (const auto& row : confusion) total = std::accumulate(row.begin(), row.end(), total);
  return total;
}

double EvalReport::total_ms() const {
  double t = 0.0;
  for (const auto& f : folds) t += f.train_ms + f.predict_ms;
  return t;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

EvalReport cross_validate(const Matrix& x, std::span<const int> labels, const TrainFn& train,
                          const FoldPlan& plan, const EvalInfo& info) {
  if (x.rows() != labels.size()) throw ParameterError("features and labels are not aligned");
  if (plan.size() != x.rows()) throw ParameterError("fold plan does not cover the dataset");

  EvalReport report;
  report.info = info;
  report.info.dim = x.cols();
  report.k = plan.k;
  report.stratified = plan.stratified;

  int classes = static_cast<int>(info.class_names.size());
  for (int l : labels) classes = std::max(classes, l + 1);
  report.confusion.assign(static_cast<std::size_t>(classes),
                          std::vector<std::size_t>(static_cast<std::size_t>(classes), 0));

  std::vector<double> accuracies;
  for (int fold = 0; fold < plan.k; ++fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    const Matrix x_train = x.select_rows(train_idx);
    const Matrix x_test = x.select_rows(test_idx);
    const auto y_train = gather(labels, train_idx);
    const auto y_test = gather(labels, test_idx);

    FoldResult r;
    r.fold = fold;
    r.n_train = train_idx.size();
    r.n_test = test_idx.size();
    std::vector<int> predicted;
    try {
      auto start = Clock::now();
      const auto model = train(x_train, y_train, derive_seed(info.seed, "classifier",
                                                             static_cast<std::uint64_t>(fold)));
      r.train_ms = elapsed_ms(start);
      start = Clock::now();
      predicted = model->predict_batch(x_test);
      r.predict_ms = elapsed_ms(start);
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(fold + 1) + " failed: " + e.what());
    }
    r.accuracy = accuracy_percent(y_test, predicted);
    for (std::size_t i = 0; i < y_test.size(); ++i) {
      const int p = predicted[i];
      if (p >= 0 && p < classes) {
        ++report.confusion[static_cast<std::size_t>(y_test[i])][static_cast<std::size_t>(p)];
      }
    }
    accuracies.push_back(r.accuracy);
    report.folds.push_back(r);
  }
  report.mean = mean_of(accuracies);
  report.std = sample_std(accuracies);
  report.config = {{"extractor", info.extractor},
                   {"extractor_params", info.extractor_params},
                   {"classifier", info.classifier},
                   {"classifier_params", info.classifier_params},
                   {"k", plan.k},
                   {"seed", info.seed},
                   {"stratified", plan.stratified}};
  return report;
}

json to_json(const EvalConfig& config) {
  return {{"classifier", to_json(config.classifier)},
          {"k", config.k},
          {"seed", config.seed},
          {"stratified", config.stratified}};
}

EvalConfig eval_config_from_json(const json& j) {
  EvalConfig c;
  c.classifier = classifier_spec_from_json(j.at("classifier"));
  c.k = j.at("k").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.stratified = j.at("stratified").get<bool>();
  return c;
}

EvalReport run_evaluation(const FeatureMatrix& features, const EvalConfig& config) {
  const EncodedLabels enc = encode_labels(features.labels);
  const FoldPlan plan = kfold_split(features.size(), enc.ids, config.k,
                                    derive_seed(config.seed, "folds"), config.stratified);
  EvalInfo info;
  info.extractor = features.meta.extractor;
  info.extractor_params = features.meta.params;
  info.classifier = config.classifier.name();
  info.classifier_params = config.classifier.describe();
  info.seed = config.seed;
  info.class_names = enc.names;
  EvalReport report =
      cross_validate(features.values, enc.ids, make_trainer(config.classifier), plan, info);
  report.config = {{"eval", to_json(config)},
                   {"features",
                    {{"extractor", features.meta.extractor},
                     {"params", features.meta.params},
                     {"fingerprint", features.meta.fingerprint},
                     {"n", features.size()},
                     {"dim", features.dim()}}}};
  return report;
}

EvalReport replay_evaluation(const FeatureMatrix& features, const json& echo) {
  if (echo.contains("features")) {
    const auto& f = echo["features"];
    if (f.value("dim", features.dim()) != features.dim() ||
        f.value("n", features.size()) != features.size()) {
      throw ParameterError("feature file does not match the recorded run (n or dim differ)");
    }
    const std::string fp = f.value("fingerprint", std::string());
    if (!fp.empty() && !features.meta.fingerprint.empty() && fp != features.meta.fingerprint) {
      throw ParameterError("feature file comes from a different dataset than the recorded run");
    }
  }
  return run_evaluation(features, eval_config_from_json(echo.at("eval")));
}

LearningCurve learning_curve(const Matrix& x, std::span<const int> labels, const TrainFn& train,
                             const FoldPlan& plan, std::span<const double> fractions,
                             std::uint64_t seed) {
  if (x.rows() != labels.size() || plan.size() != x.rows()) {
    throw ParameterError("features, labels and fold plan are not aligned");
  }
  LearningCurve curve;
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double fraction = fractions[fi];
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw ParameterError("learning-curve fractions must be in (0, 1]");
    }
    std::vector<double> train_scores;
    std::vector<double> test_scores;
    std::size_t min_size = x.rows();
    for (int fold = 0; fold < plan.k; ++fold) {
      const auto train_idx = plan.train_indices(fold);
      std::map<int, std::vector<std::size_t>> members;
      for (std::size_t i : train_idx) members[labels[i]].push_back(i);
      const auto wanted =
          static_cast<std::size_t>(std::llround(fraction * static_cast<double>(train_idx.size())));
      if (wanted < members.size()) {
        throw ParameterError("training subset of " + std::to_string(wanted) +
                             " samples is smaller than the " + std::to_string(members.size()) +
                             " classes");
      }

      std::vector<std::size_t> subset;
      if (fraction >= 1.0) {
        subset = train_idx;
      } else {
        Rng rng(derive_seed(seed, "curve", fi * 1000 + static_cast<std::size_t>(fold)));
        for (auto& [label, idx] : members) {
          const auto take = std::max<std::size_t>(
              1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size()))));
          rng.shuffle(std::span<std::size_t>(idx));
          subset.insert(subset.end(), idx.begin(),
                        idx.begin() + static_cast<std::ptrdiff_t>(std::min(take, idx.size())));
        }
        std::sort(subset.begin(), subset.end());
      }
      min_size = std::min(min_size, subset.size());

      const auto test_idx = plan.test_indices(fold);
      const Matrix x_sub = x.select_rows(subset);
      const auto y_sub = gather(labels, subset);
      const auto model =
          train(x_sub, y_sub, derive_seed(seed, "classifier", static_cast<std::uint64_t>(fold)));
      train_scores.push_back(accuracy_percent(y_sub, model->predict_batch(x_sub)));
      test_scores.push_back(
          accuracy_percent(gather(labels, test_idx), model->predict_batch(x.select_rows(test_idx))));
    }
    curve.fractions.push_back(fraction);
    curve.train_sizes.push_back(min_size);
    curve.train_mean.push_back(mean_of(train_scores));
    curve.train_std.push_back(sample_std(train_scores));
    curve.test_mean.push_back(mean_of(test_scores));
    curve.test_std.push_back(sample_std(test_scores));
    curve.train_scores.push_back(std::move(train_scores));
    curve.test_scores.push_back(std::move(test_scores));
  }
  return curve;
}

}  // namespace texbench

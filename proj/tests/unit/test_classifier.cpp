#include <random>

#include "doctest.h"
#include "tempdir.hpp"
#include "texbench/classifier.hpp"
#include "texbench/errors.hpp"

using namespace texbench;

namespace {

Matrix toy(std::vector<int>& y, double scale = 1.0) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(0, 3);
  for (int i = 0; i < 90; ++i) {
    const int c = i % 3;
    x.push_row({scale * (n(rng) + 3.0 * c), n(rng) - 2.0 * c, 0.01 * n(rng)});
    y.push_back(c * 10);
  }
  return x;
}

ClassifierSpec small(ClassifierKind kind) {
  ClassifierSpec s = reference_spec(kind);
  s.svm.gamma = 0.2;
  s.mlp.hidden_layers = {12};
  s.mlp.learning_rate = 0.01;
  s.mlp.max_epochs = 60;
  return s;
}

}  // namespace

TEST_CASE("names and reference settings") {
  CHECK(parse_classifier("svm") == ClassifierKind::svm);
  CHECK(parse_classifier("tree") == ClassifierKind::tree);
  CHECK(parse_classifier("dt") == ClassifierKind::tree);
  CHECK(parse_classifier("mlp") == ClassifierKind::mlp);
  CHECK(parse_classifier("ann") == ClassifierKind::mlp);
  CHECK_THROWS_AS(parse_classifier("knn"), ParameterError);

  const auto svm = reference_spec(ClassifierKind::svm);
  CHECK(svm.svm.c == 2.5);
  CHECK(svm.svm.gamma == 1.5e-6);
  CHECK(svm.svm.kernel == KernelType::rbf);
  CHECK_FALSE(svm.standardize);
  CHECK(svm.describe() == "kernel=rbf;C=2.5;gamma=1.5e-06;tol=0.001");
  const auto mlp = reference_spec(ClassifierKind::mlp);
  CHECK(mlp.mlp.hidden_layers == std::vector<int>{300, 300});
  CHECK(mlp.mlp.learning_rate == 0.0005);
  CHECK_FALSE(reference_spec(ClassifierKind::tree).tree.max_depth.has_value());
}

TEST_CASE("spec survives a JSON round trip") {
  for (auto kind : {ClassifierKind::svm, ClassifierKind::tree, ClassifierKind::mlp}) {
    auto s = small(kind);
    s.standardize = kind == ClassifierKind::tree;
    s.tree.max_depth = 4;
    const auto back = classifier_spec_from_json(to_json(s));
    CHECK(back.describe() == s.describe());
    CHECK(to_json(back) == to_json(s));
  }
}

TEST_CASE("trained models serialize and reload with identical predictions") {
  std::vector<int> y;
  const auto x = toy(y);
  oracle::TempDir dir;
  for (auto kind : {ClassifierKind::svm, ClassifierKind::tree, ClassifierKind::mlp}) {
    for (bool standardize : {false, true}) {
      auto spec = small(kind);
      spec.standardize = standardize;
      const auto model = train_classifier(spec, x, y, 5);
      CHECK(model->input_dim() == 3);
      const auto path = dir / "model.json";
      save_model(path, *model);
      const auto back = load_model(path);
      CHECK(back->predict_batch(x) == model->predict_batch(x));
      std::size_t hits = 0;
      const auto pred = model->predict_batch(x);
      for (std::size_t i = 0; i < y.size(); ++i) hits += pred[i] == y[i];
      CHECK(hits >= 80);
    }
  }
  CHECK_THROWS_AS(load_model(dir / "absent.json"), IoError);
}

TEST_CASE("standardization makes the SVM insensitive to feature scale") {
  std::vector<int> y1, y2;
  const auto x = toy(y1);
  const auto big = toy(y2, 1000.0);
  auto spec = small(ClassifierKind::svm);
  spec.standardize = true;
  const auto a = train_classifier(spec, x, y1, 1);
  const auto b = train_classifier(spec, big, y2, 1);
  CHECK(a->predict_batch(x) == b->predict_batch(big));
}

TEST_CASE("trainer seeds only affect the MLP") {
  std::vector<int> y;
  const auto x = toy(y);
  const auto t = make_trainer(small(ClassifierKind::tree));
  CHECK(t(x, y, 1)->to_json() == t(x, y, 2)->to_json());
  const auto m = make_trainer(small(ClassifierKind::mlp));
  CHECK(m(x, y, 1)->to_json() == m(x, y, 1)->to_json());
  CHECK(m(x, y, 1)->to_json() != m(x, y, 2)->to_json());
}

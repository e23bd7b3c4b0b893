#include <cmath>
#include <random>

#include "doctest.h"
#include "suites.hpp"
#include "texbench/errors.hpp"
#include "texbench/mlp.hpp"

using namespace texbench;

TEST_CASE("layer shapes chain from input to classes") {
  const std::vector<int> hidden = {7, 5};
  MlpModel m(4, hidden, {0, 1, 2}, Activation::relu);
  m.init_he_uniform(1);
  REQUIRE(m.layer_count() == 3);
  CHECK(m.weights()[0].rows() == 4);
  CHECK(m.weights()[0].cols() == 7);
  CHECK(m.weights()[1].rows() == 7);
  CHECK(m.weights()[1].cols() == 5);
  CHECK(m.weights()[2].rows() == 5);
  CHECK(m.weights()[2].cols() == 3);
  CHECK(m.parameter_count() == 4 * 7 + 7 + 7 * 5 + 5 + 5 * 3 + 3);
}

TEST_CASE("zero weights give a uniform softmax and predict class 0") {
  const std::vector<int> hidden = {3};
  MlpModel m(2, hidden, {0, 1, 2, 3}, Activation::relu);
  m.set_parameters(std::vector<double>(m.parameter_count(), 0.0));
  const auto p = m.probabilities(std::vector<double>{5.0, -2.0});
  for (double v : p) CHECK(v == doctest::Approx(0.25));
  CHECK(m.predict(std::vector<double>{5.0, -2.0}) == 0);
}

TEST_CASE("softmax sums to one for extreme inputs") {
  const std::vector<int> hidden = {6};
  MlpModel m(3, hidden, {0, 1, 2}, Activation::tanh);
  m.init_he_uniform(7);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 50; ++i) {
    const auto p = m.probabilities(std::vector<double>{u(rng), u(rng), u(rng)});
    double s = 0.0;
    for (double v : p) {
      CHECK(std::isfinite(v));
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("analytic gradients match central differences over 20 seeds") {
  const auto r = oracle::mlp_gradient_suite(20, 1e-5, 1e-4);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("well separated blobs are learned") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(0, 2);
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const int c = i % 2;
    x.push_row({n(rng) + (c ? 4.0 : -4.0), n(rng) + (c ? 4.0 : -4.0)});
    y.push_back(c);
  }
  MlpParams p;
  p.hidden_layers = {16};
  p.learning_rate = 0.01;
  p.max_epochs = 200;
  const auto m = train_mlp(x, y, p);
  CHECK(m.epochs_run <= 200);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) hits += m.predict(x.row(i)) == y[i];
  CHECK(hits >= 198);
  const auto batch = m.predict_batch(x);
  for (std::size_t i = 0; i < x.rows(); ++i) CHECK(batch[i] == m.predict(x.row(i)));
}

TEST_CASE("tiny net overfits its training points") {
  const auto x = Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const std::vector<int> y = {3, 7, 7, 3};
  MlpParams p;
  p.hidden_layers = {16, 16};
  p.learning_rate = 0.01;
  p.validation_fraction = 0.0;
  p.max_epochs = 2000;
  p.batch_size = 4;
  const auto m = train_mlp(x, y, p);
  for (std::size_t i = 0; i < 4; ++i) CHECK(m.predict(x.row(i)) == y[i]);
}

TEST_CASE("training is bitwise deterministic for a seed") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(0, 3);
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    x.push_row({n(rng), n(rng), n(rng)});
    y.push_back(i % 3);
  }
  MlpParams p;
  p.hidden_layers = {8};
  p.max_epochs = 30;
  const auto a = train_mlp(x, y, p);
  const auto b = train_mlp(x, y, p);
  CHECK(a.parameters() == b.parameters());
  p.seed = 43;
  CHECK(train_mlp(x, y, p).parameters() != a.parameters());
  p.learning_rate = -1;
  CHECK_THROWS_AS(train_mlp(x, y, p), ParameterError);
}

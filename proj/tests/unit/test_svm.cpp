#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "suites.hpp"
#include "texbench/errors.hpp"
#include "texbench/svm.hpp"

using namespace texbench;

namespace {

std::size_t train_hits(const SvmModel& m, const Matrix& x, const std::vector<int>& y) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) hits += m.predict(x.row(i)) == y[i];
  return hits;
}

Matrix blobs(std::mt19937_64& rng, int classes, int per_class, int dim, double spread,
             std::vector<int>& y) {
  std::normal_distribution<double> n(0.0, spread);
  Matrix x(0, static_cast<std::size_t>(dim));
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<double> row(static_cast<std::size_t>(dim));
      for (int j = 0; j < dim; ++j) row[static_cast<std::size_t>(j)] = n(rng) + (j == c % dim ? 3.0 * (1 + c / dim) : 0.0);
      x.push_row(row);
      y.push_back(c);
    }
  }
  return x;
}

}  // namespace

TEST_CASE("rbf kernel") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  CHECK(rbf_kernel(a, a, 0.7) == 1.0);
  const std::vector<double> b = {1.0, 2.0, 3.0 + 1.0 / std::sqrt(0.25)};
  CHECK(rbf_kernel(a, b, 0.25) == doctest::Approx(0.3678794).epsilon(1e-7));
  CHECK(rbf_kernel(a, b, 1e-12) == doctest::Approx(1.0));
  CHECK_THROWS_AS(rbf_kernel(a, std::vector<double>{1.0}, 1.0), ParameterError);
}

TEST_CASE("linearly separable toy set with a linear kernel") {
  const auto x = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {3, 3}, {4, 3}, {3, 4}});
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  SvmParams p;
  p.kernel = KernelType::linear;
  p.c = 10;
  const auto m = train_svm(x, y, p);
  CHECK(train_hits(m, x, y) == 6);
  REQUIRE(m.pairs.size() == 1);
  // Two classes: the label is the sign of the only decision function.
  const std::vector<double> probe = {0.5, 0.2};
  CHECK((m.decision(0, probe) > 0 ? m.pairs[0].positive : m.pairs[0].negative) == m.predict(probe));
}

TEST_CASE("XOR is separable with an RBF kernel") {
  const auto x = Matrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> y = {0, 0, 1, 1};
  SvmParams p;
  p.gamma = 1.0;
  p.c = 10.0;
  const auto m = train_svm(x, y, p);
  CHECK(train_hits(m, x, y) == 4);
}

TEST_CASE("dual constraints and support vector bound hold per pair") {
  std::mt19937_64 rng(2);
  std::vector<int> y;
  const auto x = blobs(rng, 4, 15, 3, 1.2, y);
  SvmParams p;
  p.gamma = 0.3;
  p.c = 2.0;
  const auto m = train_svm(x, y, p);
  CHECK(m.pairs.size() == 6);
  CHECK(m.support_vectors.rows() <= x.rows());
  for (const auto& pair : m.pairs) {
    CHECK(pair.converged);
    double balance = 0.0;
    for (double c : pair.coef) {
      CHECK(std::abs(c) <= p.c + 1e-12);
      balance += c;
    }
    CHECK(std::abs(balance) < 1e-9);
    CHECK(pair.support.size() <= 30);
  }
}

TEST_CASE("binary subproblems satisfy KKT at tol 1e-3") {
  const auto r = oracle::svm_kkt_suite(10, 1e-3);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("one-vs-one votes agree with an independent vote count") {
  std::mt19937_64 rng(3);
  std::vector<int> y;
  const auto x = blobs(rng, 5, 12, 4, 2.0, y);
  SvmParams p;
  p.gamma = 0.2;
  p.c = 1.0;
  const auto m = train_svm(x, y, p);
  std::normal_distribution<double> n(0.0, 3.0);
  const auto batch_x = [&] {
    Matrix q(0, 4);
    for (int i = 0; i < 300; ++i) q.push_row({n(rng), n(rng), n(rng), n(rng)});
    return q;
  }();
  const auto batch = m.predict_batch(batch_x);
  for (std::size_t i = 0; i < batch_x.rows(); ++i) {
    CHECK(oracle::ovo_predict(m, batch_x.row(i)) == batch[i]);
    CHECK(m.predict(batch_x.row(i)) == batch[i]);
  }
  CHECK(train_hits(m, x, y) > 50);
}

TEST_CASE("vote ties go to the lowest class") {
  // Three classes arranged so that a far-away point gets one vote each.
  SvmModel m;
  m.params.kernel = KernelType::linear;
  m.classes = {0, 1, 2};
  m.support_vectors = Matrix::from_rows({{1.0}});
  // f(0,1) > 0 -> 0 ; f(0,2) < 0 -> 2 ; f(1,2) > 0 -> 1
  m.pairs = {{0, 1, {0}, {1.0}, 0.0, true}, {0, 2, {0}, {-1.0}, 0.0, true}, {1, 2, {0}, {1.0}, 0.0, true}};
  CHECK(m.predict(std::vector<double>{1.0}) == 0);
}

TEST_CASE("training is deterministic and rejects bad input") {
  std::mt19937_64 rng(4);
  std::vector<int> y;
  const auto x = blobs(rng, 3, 10, 2, 1.0, y);
  SvmParams p;
  p.gamma = 0.5;
  const auto a = train_svm(x, y, p);
  const auto b = train_svm(x, y, p);
  CHECK(a.support_vectors == b.support_vectors);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].support == b.pairs[i].support);
    CHECK(a.pairs[i].coef == b.pairs[i].coef);
  }
  CHECK_THROWS_AS(train_svm(x, std::vector<int>(y.size(), 1), p), ParameterError);
  Matrix bad = x;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(train_svm(bad, y, p), ParameterError);
  p.c = -1;
  CHECK_THROWS_AS(train_svm(x, y, p), ParameterError);
}

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "texbench/matrix.hpp"

namespace texbench {

enum class KernelType { rbf, linear, polynomial };

KernelType parse_kernel(std::string_view name);
std::string_view kernel_name(KernelType kernel);

struct SvmParams {
  double c = 1.0;
  double gamma = 1.0;
  KernelType kernel = KernelType::rbf;
  int degree = 3;       // polynomial only
  double coef0 = 0.0;   // polynomial only: (gamma x.z + coef0)^degree
  double tol = 1e-3;    // KKT tolerance
  int max_passes = 1000;  // iteration cap = max_passes * subproblem size

  void validate() const;
  std::string describe() const;
};

// exp(-gamma |x - z|^2)
double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma);
double kernel_value(const SvmParams& params, std::span<const double> x, std::span<const double> z);

// Gram matrix K(X_i, X_j).
Matrix kernel_matrix(const SvmParams& params, const Matrix& x);

struct BinarySvmSolution {
  std::vector<double> alpha;
  double bias = 0.0;  // f(x) = sum_i alpha_i y_i K(x_i, x) + bias
  bool converged = false;
  std::size_t iterations = 0;
};

// Soft-margin dual solved by SMO with second-order working-set selection.
// `gram` is the kernel matrix of the subproblem, labels are +1/-1.
BinarySvmSolution solve_binary_svm(const Matrix& gram, std::span<const int> labels, double c,
                                   double tol, std::size_t max_iterations);

struct SvmModel {
  struct Pair {
    int positive = 0;  // class voted for when the decision value is > 0
    int negative = 0;
    std::vector<std::size_t> support;  // rows of support_vectors
    std::vector<double> coef;          // alpha_i * y_i
    double bias = 0.0;
    bool converged = true;
  };

  SvmParams params;
  std::vector<int> classes;  // sorted distinct training labels
  Matrix support_vectors;
  std::vector<Pair> pairs;   // (i, j), i < j over classes, lexicographic

  std::size_t dim() const noexcept { return support_vectors.cols(); }
  double decision(std::size_t pair, std::span<const double> x) const;
  int predict(std::span<const double> x) const;
  std::vector<int> predict_batch(const Matrix& x) const;
};

// One-vs-one over every class pair.
SvmModel train_svm(const Matrix& x, std::span<const int> y, const SvmParams& params);
int predict_svm(const SvmModel& model, std::span<const double> x);

}  // namespace texbench

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "texbench/matrix.hpp"

namespace texbench {

struct TreeParams {
  std::optional<int> max_depth;  // unlimited when empty
  int min_samples_split = 2;
  // Kept for configuration parity. With lowest-index tie-breaking the grown tree
  // does not depend on the scan order, so the seed never changes the result.
  std::uint64_t seed = 0;

  void validate() const;
  std::string describe() const;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;  // leaf prediction (majority class)

  bool is_leaf() const noexcept { return feature < 0; }
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t dim = 0;

  int predict(std::span<const double> x) const;
  int depth() const;
  std::size_t leaf_count() const;
};

// 1 - sum (n_c / n)^2
double gini_impurity(std::span<const std::size_t> class_counts);

// Greedy CART: every feature, every midpoint between consecutive distinct values,
// maximal Gini decrease, ties to the lowest feature then the lowest threshold.
TreeModel train_tree(const Matrix& x, std::span<const int> y, const TreeParams& params);
int predict_tree(const TreeModel& model, std::span<const double> x);

}  // namespace texbench

#include "texbench/tree.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "texbench/errors.hpp"

namespace texbench {
namespace {

// Split quality as the exact fraction sum_c L_c^2 / n_L + sum_c R_c^2 / n_R,
// kept as numerator/denominator so ties compare exactly.
struct Score {
  __int128 num = -1;
  __int128 den = 1;

  bool better_than(const Score& o) const { return num * o.den > o.num * den; }
};

struct Work {
  std::vector<std::size_t> samples;
  int node = 0;
  int depth = 0;
};

class Builder {
 public:
  Builder(const Matrix& x, std::span<const int> y, const TreeParams& params)
      : x_(x), params_(params) {
    std::map<int, int> index;
    for (int label : y) index.emplace(label, 0);
    for (auto& [label, id] : index) {
      id = static_cast<int>(classes_.size());
      classes_.push_back(label);
    }
    dense_.reserve(y.size());
    for (int label : y) dense_.push_back(index.at(label));
  }

  TreeModel build() {
    TreeModel model;
    model.dim = x_.cols();
    model.nodes.emplace_back();
    std::vector<std::size_t> all(x_.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

    std::vector<Work> stack;
    stack.push_back({std::move(all), 0, 0});
    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      const auto counts = count(w.samples);
      model.nodes[static_cast<std::size_t>(w.node)].label = majority(counts);

      const bool pure =
          std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
      const bool depth_ok = !params_.max_depth || w.depth < *params_.max_depth;
      if (pure || !depth_ok ||
          w.samples.size() < static_cast<std::size_t>(params_.min_samples_split)) {
        continue;
      }
      int feature = -1;
      double threshold = 0.0;
      if (!best_split(w.samples, feature, threshold)) continue;

      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (std::size_t s : w.samples) {
        (x_(s, static_cast<std::size_t>(feature)) <= threshold ? left : right).push_back(s);
      }
      const int l = static_cast<int>(model.nodes.size());
      model.nodes.emplace_back();
      model.nodes.emplace_back();
      TreeNode& node = model.nodes[static_cast<std::size_t>(w.node)];
      node.feature = feature;
      node.threshold = threshold;
      node.left = l;
      node.right = l + 1;
      stack.push_back({std::move(right), l + 1, w.depth + 1});
      stack.push_back({std::move(left), l, w.depth + 1});
    }
    return model;
  }

 private:
  std::vector<std::size_t> count(const std::vector<std::size_t>& samples) const {
    std::vector<std::size_t> counts(classes_.size(), 0);
    for (std::size_t s : samples) ++counts[static_cast<std::size_t>(dense_[s])];
    return counts;
  }

  int majority(const std::vector<std::size_t>& counts) const {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
      if (counts[c] > counts[best]) best = c;
    }
    return classes_[best];
  }

  bool best_split(const std::vector<std::size_t>& samples, int& feature, double& threshold) const {
    const std::size_t n = samples.size();
    const auto total = count(samples);
    std::vector<std::pair<double, std::size_t>> order(n);
    std::vector<long long> left(classes_.size());
    std::vector<long long> right(classes_.size());
    Score best;
    bool found = false;

    for (std::size_t f = 0; f < x_.cols(); ++f) {
      for (std::size_t i = 0; i < n; ++i) order[i] = {x_(samples[i], f), samples[i]};
      std::sort(order.begin(), order.end());
      if (order.front().first == order.back().first) continue;

      std::fill(left.begin(), left.end(), 0);
      long long sq_left = 0;
      long long sq_right = 0;
      for (std::size_t c = 0; c < total.size(); ++c) {
        right[c] = static_cast<long long>(total[c]);
        sq_right += right[c] * right[c];
      }
      for (std::size_t p = 1; p < n; ++p) {
        const auto c = static_cast<std::size_t>(dense_[order[p - 1].second]);
        sq_left += 2 * left[c] + 1;
        sq_right -= 2 * right[c] - 1;
        ++left[c];
        --right[c];
        const double a = order[p - 1].first;
        const double b = order[p].first;
        if (a == b) continue;

        const auto nl = static_cast<__int128>(p);
        const auto nr = static_cast<__int128>(n - p);
        const Score s{sq_left * nr + sq_right * nl, nl * nr};
        if (!found || s.better_than(best)) {
          best = s;
          found = true;
          feature = static_cast<int>(f);
          threshold = a + (b - a) / 2.0;
          if (threshold >= b) threshold = a;
        }
      }
    }
    return found;
  }

  const Matrix& x_;
  TreeParams params_;
  std::vector<int> classes_;
  std::vector<int> dense_;
};

int depth_of(const TreeModel& m, int node) {
  const TreeNode& n = m.nodes[static_cast<std::size_t>(node)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_of(m, n.left), depth_of(m, n.right));
}

}  // namespace

void TreeParams::validate() const {
  if (min_samples_split < 2) throw ParameterError("min_samples_split must be >= 2");
  if (max_depth && *max_depth < 0) throw ParameterError("max_depth must be >= 0");
}

std::string TreeParams::describe() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "criterion=gini;max_depth=%s;min_samples_split=%d",
                max_depth ? std::to_string(*max_depth).c_str() : "none", min_samples_split);
  return buf;
}

double gini_impurity(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (auto c : class_counts) total += c;
  if (total == 0) throw ParameterError("Gini impurity of an empty node");
  double sum = 0.0;
  for (auto c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum += p * p;
  }
  return 1.0 - sum;
}

TreeModel train_tree(const Matrix& x, std::span<const int> y, const TreeParams& params) {
  params.validate();
  if (x.rows() == 0) throw ParameterError("tree training needs at least one sample");
  if (x.rows() != y.size()) throw ParameterError("feature rows and labels differ in length");
  if (!x.all_finite()) throw ParameterError("tree input contains non-finite features");
  return Builder(x, y, params).build();
}

int TreeModel::predict(std::span<const double> x) const {
  if (x.size() != dim) throw ParameterError("input dimension does not match the tree");
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                        : n.right);
  }
  return nodes[i].label;
}

int TreeModel::depth() const { return nodes.empty() ? 0 : depth_of(*this, 0); }

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int predict_tree(const TreeModel& model, std::span<const double> x) { return model.predict(x); }

}  // namespace texbench

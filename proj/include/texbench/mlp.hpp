#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "texbench/matrix.hpp"

namespace texbench {

enum class Activation { relu, tanh };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation activation);

struct MlpParams {
  std::vector<int> hidden_layers{300, 300};
  double learning_rate = 0.0005;
  Activation activation = Activation::relu;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;
  int max_epochs = 1000;
  double validation_fraction = 0.1;  // held out for early stopping
  int patience = 10;                 // epochs without validation improvement
  double tol = 1e-4;                 // minimum loss decrease that counts as improvement
  std::uint64_t seed = 42;

  void validate() const;
  std::string describe() const;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Fully connected network with softmax output. Weights of layer l map
// activations of width in_l to out_l: z = a W + b, W is in_l x out_l.
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(std::size_t input_dim, std::span<const int> hidden, std::vector<int> classes,
           Activation activation);

  void init_he_uniform(std::uint64_t seed);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  const std::vector<int>& classes() const noexcept { return classes_; }
  Activation activation() const noexcept { return activation_; }
  std::size_t layer_count() const noexcept { return weights_.size(); }

  std::vector<Eigen::MatrixXd>& weights() noexcept { return weights_; }
  const std::vector<Eigen::MatrixXd>& weights() const noexcept { return weights_; }
  std::vector<Eigen::RowVectorXd>& biases() noexcept { return biases_; }
  const std::vector<Eigen::RowVectorXd>& biases() const noexcept { return biases_; }

  // Class probabilities, one row per input row.
  RowMatrix forward(const Eigen::Ref<const RowMatrix>& x) const;
  std::vector<double> probabilities(std::span<const double> x) const;

  // Mean cross-entropy over the batch; `targets` are indices into classes().
  // Gradients share the layout of weights()/biases().
  double loss_and_gradient(const Eigen::Ref<const RowMatrix>& x, std::span<const int> targets,
                           std::vector<Eigen::MatrixXd>& weight_grads,
                           std::vector<Eigen::RowVectorXd>& bias_grads) const;
  double loss(const Eigen::Ref<const RowMatrix>& x, std::span<const int> targets) const;

  // Flattened parameter access (weights then bias, layer by layer).
  std::size_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);

  int predict(std::span<const double> x) const;
  std::vector<int> predict_batch(const Matrix& x) const;

  int epochs_run = 0;

 private:
  std::size_t input_dim_ = 0;
  std::vector<int> classes_;
  Activation activation_ = Activation::relu;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::RowVectorXd> biases_;
};

// Mini-batch Adam on softmax cross-entropy with early stopping on a held-out split.
MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpParams& params);
int predict_mlp(const MlpModel& model, std::span<const double> x);

}  // namespace texbench

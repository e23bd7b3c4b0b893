#include "texbench/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "texbench/errors.hpp"
#include "texbench/rng.hpp"

namespace texbench {
namespace {

void activate(Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::relu) {
    z = z.cwiseMax(0.0);
  } else {
    z = z.array().tanh().matrix();
  }
}

// Multiplies `grad` in place by the activation derivative, given the activated output.
void activation_backward(Eigen::MatrixXd& grad, const Eigen::MatrixXd& activated, Activation act) {
  if (act == Activation::relu) {
    grad = (activated.array() > 0.0).select(grad, 0.0);
  } else {
    grad = (grad.array() * (1.0 - activated.array().square())).matrix();
  }
}

// Row-wise log-softmax.
Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    const double lse = m + std::log((out.row(r).array() - m).exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation activation) {
  return activation == Activation::relu ? "relu" : "tanh";
}

void MlpParams::validate() const {
  if (!(learning_rate > 0.0)) throw ParameterError("MLP learning rate must be positive");
  for (int w : hidden_layers) {
    if (w < 1) throw ParameterError("MLP layer widths must be >= 1");
  }
  if (batch_size < 1) throw ParameterError("MLP batch size must be >= 1");
  if (max_epochs < 1) throw ParameterError("MLP max_epochs must be >= 1");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw ParameterError("MLP validation fraction must be in [0, 1)");
  }
  if (patience < 1) throw ParameterError("MLP patience must be >= 1");
}

std::string MlpParams::describe() const {
  std::ostringstream os;
  os << "hidden=";
  for (std::size_t i = 0; i < hidden_layers.size(); ++i) os << (i ? "x" : "") << hidden_layers[i];
  char buf[256];
  std::snprintf(buf, sizeof buf,
                ";lr=%.17g;activation=%s;optimizer=adam;beta1=%g;beta2=%g;eps=%g;batch=%d;"
                "max_epochs=%d;validation=%g;patience=%d;tol=%g",
                learning_rate, std::string(activation_name(activation)).c_str(), beta1, beta2,
                epsilon, batch_size, max_epochs, validation_fraction, patience, tol);
  os << buf;
  return os.str();
}

MlpModel::MlpModel(std::size_t input_dim, std::span<const int> hidden, std::vector<int> classes,
                   Activation activation)
    : input_dim_(input_dim), classes_(std::move(classes)), activation_(activation) {
  if (input_dim == 0) throw ParameterError("MLP input dimension must be >= 1");
  if (classes_.size() < 2) throw ParameterError("MLP needs at least two classes");
  std::size_t in = input_dim;
  std::vector<std::size_t> widths(hidden.begin(), hidden.end());
  widths.push_back(classes_.size());
  for (std::size_t out : widths) {
    if (out == 0) throw ParameterError("MLP layer widths must be >= 1");
    weights_.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(in),
                                             static_cast<Eigen::Index>(out)));
    biases_.push_back(Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(out)));
    in = out;
  }
}

void MlpModel::init_he_uniform(std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(weights_[l].rows()));
    for (Eigen::Index j = 0; j < weights_[l].cols(); ++j) {
      for (Eigen::Index i = 0; i < weights_[l].rows(); ++i) {
        weights_[l](i, j) = rng.uniform(-limit, limit);
      }
    }
    biases_[l].setZero();
  }
}

RowMatrix MlpModel::forward(const Eigen::Ref<const RowMatrix>& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw ParameterError("input dimension does not match the MLP");
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = a * weights_[l];
    z.rowwise() += biases_[l];
    if (l + 1 < weights_.size()) activate(z, activation_);
    a = std::move(z);
  }
  return log_softmax(a).array().exp().matrix();
}

std::vector<double> MlpModel::probabilities(std::span<const double> x) const {
  if (x.size() != input_dim_) throw ParameterError("input dimension does not match the MLP");
  const Eigen::Map<const RowMatrix> row(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  const RowMatrix p = forward(row);
  return {p.data(), p.data() + p.size()};
}

double MlpModel::loss_and_gradient(const Eigen::Ref<const RowMatrix>& x,
                                   std::span<const int> targets,
                                   std::vector<Eigen::MatrixXd>& weight_grads,
                                   std::vector<Eigen::RowVectorXd>& bias_grads) const {
  const auto batch = x.rows();
  if (static_cast<std::size_t>(batch) != targets.size() || batch == 0) {
    throw ParameterError("batch and target sizes differ");
  }
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw ParameterError("input dimension does not match the MLP");
  }
  const std::size_t layers = weights_.size();
  std::vector<Eigen::MatrixXd> acts;
  acts.reserve(layers + 1);
  acts.emplace_back(x);
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = acts.back() * weights_[l];
    z.rowwise() += biases_[l];
    if (l + 1 < layers) activate(z, activation_);
    acts.push_back(std::move(z));
  }
  const Eigen::MatrixXd logp = log_softmax(acts.back());
  double loss = 0.0;
  Eigen::MatrixXd delta = logp.array().exp().matrix();
  for (Eigen::Index r = 0; r < batch; ++r) {
    const auto t = static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)]);
    loss -= logp(r, t);
    delta(r, t) -= 1.0;
  }
  const double inv = 1.0 / static_cast<double>(batch);
  delta *= inv;

  weight_grads.resize(layers);
  bias_grads.resize(layers);
  for (std::size_t l = layers; l-- > 0;) {
    weight_grads[l].noalias() = acts[l].transpose() * delta;
    bias_grads[l] = delta.colwise().sum();
    if (l > 0) {
      Eigen::MatrixXd prev = delta * weights_[l].transpose();
      activation_backward(prev, acts[l], activation_);
      delta = std::move(prev);
    }
  }
  return loss * inv;
}

double MlpModel::loss(const Eigen::Ref<const RowMatrix>& x, std::span<const int> targets) const {
  const RowMatrix p = forward(x);
  double total = 0.0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const double pt = p(r, static_cast<Eigen::Index>(targets[static_cast<std::size_t>(r)]));
    total -= std::log(std::max(pt, std::numeric_limits<double>::min()));
  }
  return total / static_cast<double>(p.rows());
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
  }
  return n;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.insert(out.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
    out.insert(out.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
  }
  return out;
}

void MlpModel::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw ParameterError("parameter count mismatch");
  std::size_t k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(k), weights_[l].size(),
                weights_[l].data());
    k += static_cast<std::size_t>(weights_[l].size());
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(k), biases_[l].size(),
                biases_[l].data());
    k += static_cast<std::size_t>(biases_[l].size());
  }
}

int MlpModel::predict(std::span<const double> x) const {
  const auto p = probabilities(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return classes_[best];
}

std::vector<int> MlpModel::predict_batch(const Matrix& x) const {
  std::vector<int> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict(x.row(r)));
  return out;
}

MlpModel train_mlp(const Matrix& x, std::span<const int> y, const MlpParams& params) {
  params.validate();
  if (x.rows() != y.size()) throw ParameterError("feature rows and labels differ in length");
  if (x.rows() == 0) throw ParameterError("MLP training needs samples");
  if (!x.all_finite()) throw ParameterError("MLP input contains non-finite features");

  std::map<int, int> index;
  for (int label : y) index.emplace(label, 0);
  if (index.size() < 2) throw ParameterError("MLP training needs at least two classes");
  std::vector<int> classes;
  for (auto& [label, id] : index) {
    id = static_cast<int>(classes.size());
    classes.push_back(label);
  }
  std::vector<int> targets(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) targets[i] = index.at(y[i]);

  MlpModel model(x.cols(), params.hidden_layers, classes, params.activation);
  model.init_he_uniform(derive_seed(params.seed, "mlp-init"));

  std::vector<std::size_t> order(x.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng split_rng(derive_seed(params.seed, "mlp-split"));
  auto n_val = static_cast<std::size_t>(params.validation_fraction * static_cast<double>(x.rows()));
  if (n_val >= x.rows()) n_val = 0;
  if (n_val > 0) split_rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  auto gather = [&](const std::vector<std::size_t>& idx, RowMatrix& xs, std::vector<int>& ts) {
    xs.resize(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(x.cols()));
    ts.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto src = x.row(idx[r]);
      std::copy(src.begin(), src.end(), xs.row(static_cast<Eigen::Index>(r)).data());
      ts[r] = targets[idx[r]];
    }
  };
  RowMatrix monitor_x;
  std::vector<int> monitor_t;
  gather(n_val > 0 ? val_idx : train_idx, monitor_x, monitor_t);

  auto& w = model.weights();
  auto& b = model.biases();
  std::vector<Eigen::MatrixXd> mw, vw, gw;
  std::vector<Eigen::RowVectorXd> mb, vb, gb;
  for (std::size_t l = 0; l < w.size(); ++l) {
    mw.push_back(Eigen::MatrixXd::Zero(w[l].rows(), w[l].cols()));
    vw.push_back(mw.back());
    mb.push_back(Eigen::RowVectorXd::Zero(b[l].size()));
    vb.push_back(mb.back());
  }

  Rng epoch_rng(derive_seed(params.seed, "mlp-epochs"));
  RowMatrix bx;
  std::vector<int> bt;
  std::vector<std::size_t> batch_idx;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = model.parameters();
  int stale = 0;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
    epoch_rng.shuffle(std::span<std::size_t>(train_idx));
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(params.batch_size)) {
      const std::size_t end =
          std::min(train_idx.size(), start + static_cast<std::size_t>(params.batch_size));
      batch_idx.assign(train_idx.begin() + static_cast<std::ptrdiff_t>(start),
                       train_idx.begin() + static_cast<std::ptrdiff_t>(end));
      gather(batch_idx, bx, bt);
      model.loss_and_gradient(bx, bt, gw, gb);

      ++step;
      const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(step));
      const double lr = params.learning_rate * std::sqrt(c2) / c1;
      const double eps = params.epsilon * std::sqrt(c2);
      for (std::size_t l = 0; l < w.size(); ++l) {
        mw[l] = params.beta1 * mw[l] + (1.0 - params.beta1) * gw[l];
        vw[l] = params.beta2 * vw[l] + (1.0 - params.beta2) * gw[l].cwiseProduct(gw[l]);
        w[l].array() -= lr * mw[l].array() / (vw[l].array().sqrt() + eps);
        mb[l] = params.beta1 * mb[l] + (1.0 - params.beta1) * gb[l];
        vb[l] = params.beta2 * vb[l] + (1.0 - params.beta2) * gb[l].cwiseProduct(gb[l]);
        b[l].array() -= lr * mb[l].array() / (vb[l].array().sqrt() + eps);
      }
    }
    model.epochs_run = epoch + 1;

    const double loss = model.loss(monitor_x, monitor_t);
    if (loss < best_loss - params.tol) {
      best_loss = loss;
      stale = 0;
      if (n_val > 0) best_params = model.parameters();
    } else if (++stale >= params.patience) {
      break;
    }
  }
  if (n_val > 0) model.set_parameters(best_params);
  return model;
}

int predict_mlp(const MlpModel& model, std::span<const double> x) { return model.predict(x); }

}  // namespace texbench

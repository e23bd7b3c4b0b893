#include "texbench/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "texbench/errors.hpp"

namespace texbench {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;

constexpr double kTau = 1e-12;

ConstRowMap as_eigen(const Matrix& m) {
  return ConstRowMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                     static_cast<Eigen::Index>(m.cols()));
}

void check_dims(std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw ParameterError("kernel arguments differ in dimension: " + std::to_string(x.size()) +
                         " vs " + std::to_string(z.size()));
  }
}

// Kernel values between every row of a and every row of b.
RowMat cross_kernel(const SvmParams& p, const ConstRowMap& a, const ConstRowMap& b) {
  RowMat dots = a * b.transpose();
  switch (p.kernel) {
    case KernelType::linear:
      return dots;
    case KernelType::polynomial:
      return (p.gamma * dots.array() + p.coef0).pow(p.degree).matrix();
    case KernelType::rbf: {
      const Eigen::VectorXd na = a.rowwise().squaredNorm();
      const Eigen::RowVectorXd nb = b.rowwise().squaredNorm().transpose();
      for (Eigen::Index i = 0; i < dots.rows(); ++i) {
        for (Eigen::Index j = 0; j < dots.cols(); ++j) {
          const double d2 = std::max(0.0, na(i) + nb(j) - 2.0 * dots(i, j));
          dots(i, j) = std::exp(-p.gamma * d2);
        }
      }
      return dots;
    }
  }
  return dots;
}

}  // namespace

KernelType parse_kernel(std::string_view name) {
  if (name == "rbf") return KernelType::rbf;
  if (name == "linear") return KernelType::linear;
  if (name == "polynomial" || name == "poly") return KernelType::polynomial;
  throw ParameterError("unknown kernel '" + std::string(name) + "'");
}

std::string_view kernel_name(KernelType kernel) {
  switch (kernel) {
    case KernelType::rbf: return "rbf";
    case KernelType::linear: return "linear";
    case KernelType::polynomial: return "polynomial";
  }
  return "rbf";
}

void SvmParams::validate() const {
  if (!(c > 0.0)) throw ParameterError("SVM C must be positive");
  if (!(gamma > 0.0)) throw ParameterError("SVM gamma must be positive");
  if (!(tol > 0.0)) throw ParameterError("SVM tolerance must be positive");
  if (max_passes < 1) throw ParameterError("SVM max_passes must be >= 1");
  if (kernel == KernelType::polynomial && degree < 1) {
    throw ParameterError("polynomial degree must be >= 1");
  }
}

std::string SvmParams::describe() const {
  char buf[160];
  if (kernel == KernelType::polynomial) {
    std::snprintf(buf, sizeof buf, "kernel=polynomial;degree=%d;coef0=%.17g;C=%.17g;gamma=%.17g;tol=%.17g",
                  degree, coef0, c, gamma, tol);
  } else {
    std::snprintf(buf, sizeof buf, "kernel=%s;C=%.17g;gamma=%.17g;tol=%.17g",
                  std::string(kernel_name(kernel)).c_str(), c, gamma, tol);
  }
  return buf;
}

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  check_dims(x, z);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - z[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double kernel_value(const SvmParams& p, std::span<const double> x, std::span<const double> z) {
  check_dims(x, z);
  if (p.kernel == KernelType::rbf) return rbf_kernel(x, z, p.gamma);
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
  if (p.kernel == KernelType::linear) return dot;
  return std::pow(p.gamma * dot + p.coef0, p.degree);
}

Matrix kernel_matrix(const SvmParams& params, const Matrix& x) {
  const auto xm = as_eigen(x);
  RowMat k = cross_kernel(params, xm, xm);
  if (params.kernel == KernelType::rbf) k.diagonal().setOnes();
  Matrix out(x.rows(), x.rows());
  std::copy(k.data(), k.data() + k.size(), out.data().begin());
  return out;
}

BinarySvmSolution solve_binary_svm(const Matrix& gram, std::span<const int> labels, double c,
                                   double tol, std::size_t max_iterations) {
  const std::size_t n = labels.size();
  if (gram.rows() != n || gram.cols() != n) throw ParameterError("gram matrix size mismatch");
  for (int y : labels) {
    if (y != 1 && y != -1) throw ParameterError("binary SVM labels must be +1 or -1");
  }

  BinarySvmSolution sol;
  sol.alpha.assign(n, 0.0);
  auto& alpha = sol.alpha;
  // Gradient of 0.5 a'Qa - e'a with Q_ij = y_i y_j K_ij.
  std::vector<double> grad(n, -1.0);
  const auto y = [&](std::size_t i) { return static_cast<double>(labels[i]); };
  const auto in_up = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] < c) || (labels[t] == -1 && alpha[t] > 0.0);
  };
  const auto in_low = [&](std::size_t t) {
    return (labels[t] == 1 && alpha[t] > 0.0) || (labels[t] == -1 && alpha[t] < c);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();

  while (sol.iterations < max_iterations) {
    double gmax = -kInf;
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y(t) * grad[t] > gmax) {
        gmax = -y(t) * grad[t];
        i = t;
      }
    }
    double gmax2 = -kInf;
    double best = kInf;
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      gmax2 = std::max(gmax2, y(t) * grad[t]);
      if (i == n) continue;
      const double b = gmax + y(t) * grad[t];
      if (b > 0.0) {
        double a = gram(i, i) + gram(t, t) - 2.0 * gram(i, t);
        if (a <= 0.0) a = kTau;
        if (-(b * b) / a < best) {
          best = -(b * b) / a;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax + gmax2 < tol) {
      sol.converged = true;
      break;
    }

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
    if (quad <= 0.0) quad = kTau;
    if (labels[i] != labels[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y(t) * (y(i) * gram(t, i) * dai + y(j) * gram(t, j) * daj);
    }
    ++sol.iterations;
  }

  // Offset: average over free vectors, else the middle of the feasible interval.
  double ub = kInf;
  double lb = -kInf;
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y(t) * grad[t];
    if (alpha[t] >= c) {
      if (labels[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (labels[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho;
  if (n_free > 0) {
    rho = sum_free / static_cast<double>(n_free);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    rho = 0.5 * (ub + lb);
  } else {
    rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  }
  sol.bias = -rho;
  return sol;
}

SvmModel train_svm(const Matrix& x, std::span<const int> y, const SvmParams& params) {
  params.validate();
  if (x.rows() != y.size()) throw ParameterError("feature rows and labels differ in length");
  if (!x.all_finite()) throw ParameterError("SVM input contains non-finite features");

  SvmModel model;
  model.params = params;
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  if (members.size() < 2) throw ParameterError("SVM training needs at least two classes");
  for (const auto& [label, idx] : members) model.classes.push_back(label);

  const Matrix gram = kernel_matrix(params, x);
  std::vector<std::ptrdiff_t> sv_row(x.rows(), -1);
  std::vector<std::size_t> sv_source;

  for (std::size_t a = 0; a < model.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
      const auto& pos = members[model.classes[a]];
      const auto& neg = members[model.classes[b]];
      std::vector<std::size_t> idx;
      idx.reserve(pos.size() + neg.size());
      std::merge(pos.begin(), pos.end(), neg.begin(), neg.end(), std::back_inserter(idx));
      std::vector<int> sub_y(idx.size());
      Matrix sub(idx.size(), idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r) {
        sub_y[r] = y[idx[r]] == model.classes[a] ? 1 : -1;
        for (std::size_t s = 0; s < idx.size(); ++s) sub(r, s) = gram(idx[r], idx[s]);
      }
      const auto sol = solve_binary_svm(sub, sub_y, params.c, params.tol,
                                        static_cast<std::size_t>(params.max_passes) * idx.size());

      SvmModel::Pair pair;
      pair.positive = model.classes[a];
      pair.negative = model.classes[b];
      pair.bias = sol.bias;
      pair.converged = sol.converged;
      for (std::size_t r = 0; r < idx.size(); ++r) {
        if (sol.alpha[r] <= 0.0) continue;
        const std::size_t src = idx[r];
        if (sv_row[src] < 0) {
          sv_row[src] = static_cast<std::ptrdiff_t>(sv_source.size());
          sv_source.push_back(src);
        }
        pair.support.push_back(static_cast<std::size_t>(sv_row[src]));
        pair.coef.push_back(sol.alpha[r] * sub_y[r]);
      }
      model.pairs.push_back(std::move(pair));
    }
  }

  model.support_vectors = Matrix(0, x.cols());
  for (std::size_t src : sv_source) model.support_vectors.push_row(x.row(src));
  return model;
}

double SvmModel::decision(std::size_t pair, std::span<const double> x) const {
  if (x.size() != dim()) throw ParameterError("input dimension does not match the SVM model");
  const Pair& p = pairs.at(pair);
  double f = p.bias;
  for (std::size_t s = 0; s < p.support.size(); ++s) {
    f += p.coef[s] * kernel_value(params, support_vectors.row(p.support[s]), x);
  }
  return f;
}

int SvmModel::predict(std::span<const double> x) const {
  if (x.size() != dim()) throw ParameterError("input dimension does not match the SVM model");
  Matrix one(1, x.size());
  std::copy(x.begin(), x.end(), one.row(0).begin());
  return predict_batch(one).front();
}

std::vector<int> SvmModel::predict_batch(const Matrix& x) const {
  if (x.rows() == 0) return {};
  if (x.cols() != dim()) throw ParameterError("input dimension does not match the SVM model");
  const RowMat k = cross_kernel(params, as_eigen(x), as_eigen(support_vectors));
  std::vector<int> out(x.rows());
  std::vector<int> votes(classes.size());
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (const Pair& p : pairs) {
    const auto pos = std::lower_bound(classes.begin(), classes.end(), p.positive) - classes.begin();
    const auto neg = std::lower_bound(classes.begin(), classes.end(), p.negative) - classes.begin();
    slots.emplace_back(static_cast<std::size_t>(pos), static_cast<std::size_t>(neg));
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const Pair& p = pairs[q];
      double f = p.bias;
      for (std::size_t s = 0; s < p.support.size(); ++s) {
        f += p.coef[s] * k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p.support[s]));
      }
      ++votes[f > 0.0 ? slots[q].first : slots[q].second];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
      if (votes[c] > votes[best]) best = c;
    }
    out[r] = classes[best];
  }
  return out;
}

int predict_svm(const SvmModel& model, std::span<const double> x) { return model.predict(x); }

}  // namespace texbench

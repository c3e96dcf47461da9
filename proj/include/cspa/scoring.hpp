#ifndef CSPA_SCORING_HPP
#define CSPA_SCORING_HPP

// Per-class linear scoring and argmax prediction, plus the Gaussian-kernel
// feature expansion that turns the same linear learner into a nonlinear one.

#include "cspa/dataset.hpp"

namespace cspa {

// K weight vectors over a feature space, all-zero initialized. Class labels
// are 1-based throughout; row(c) addresses the weight vector of class c.
class WeightMatrix {
 public:
  WeightMatrix(int num_classes, Eigen::Index dimension)
      : w_(Eigen::MatrixXd::Zero(num_classes, dimension)) {
    if (num_classes < 2) {
      throw std::invalid_argument("WeightMatrix: need at least 2 classes");
    }
    if (dimension <= 0) {
      throw std::invalid_argument("WeightMatrix: dimension must be positive");
    }
  }

  int num_classes() const { return static_cast<int>(w_.rows()); }
  Eigen::Index dimension() const { return w_.cols(); }

  auto row(int label) { return w_.row(label - 1); }
  auto row(int label) const { return w_.row(label - 1); }

  Eigen::MatrixXd& matrix() { return w_; }
  const Eigen::MatrixXd& matrix() const { return w_; }

 private:
  Eigen::MatrixXd w_;
};

// Entry i-1 is the score w_i . x of class i.
inline Vector scores(const WeightMatrix& w, const Vector& x) {
  if (x.size() != w.dimension()) {
    throw std::invalid_argument("scores: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(w.dimension()) + ")");
  }
  return w.matrix() * x;
}

// Smallest class index attaining the maximum score.
inline int predict(const WeightMatrix& w, const Vector& x) {
  const Vector s = scores(w, x);
  int best = 0;
  for (int i = 1; i < s.size(); ++i) {
    if (s[i] > s[best]) best = i;
  }
  return best + 1;
}

// Explicit Gaussian-kernel feature map over a fixed support set B:
// entry j of expand(x) is exp(-||x - b_j||^2 / g), and the expanded vector
// is rescaled to unit norm so the downstream learner keeps ||x|| = R = 1.
class KernelExpander {
 public:
  // support: one anchor instance per row.
  KernelExpander(Eigen::MatrixXd support, double bandwidth)
      : support_(std::move(support)), bandwidth_(bandwidth) {
    if (support_.rows() == 0) {
      throw std::invalid_argument("KernelExpander: empty support set");
    }
    if (!(bandwidth_ > 0.0)) {
      throw std::invalid_argument("KernelExpander: bandwidth must be > 0");
    }
  }

  KernelExpander(const std::vector<Instance>& support, double bandwidth)
      : KernelExpander(stack(support), bandwidth) {}

  Eigen::Index support_size() const { return support_.rows(); }
  double bandwidth() const { return bandwidth_; }

  Vector expand(const Vector& x) const {
    if (x.size() != support_.cols()) {
      throw std::invalid_argument("KernelExpander: dimension mismatch");
    }
    Vector k = (-(support_.rowwise() - x.transpose()).rowwise().squaredNorm() /
                bandwidth_)
                   .array()
                   .exp();
    // Gaussian entries are strictly positive, so the norm never vanishes.
    return k / k.norm();
  }

 private:
  static Eigen::MatrixXd stack(const std::vector<Instance>& support) {
    if (support.empty()) {
      throw std::invalid_argument("KernelExpander: empty support set");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(support.size()),
                      support.front().features.size());
    for (std::size_t i = 0; i < support.size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) = support[i].features.transpose();
    }
    return m;
  }

  Eigen::MatrixXd support_;
  double bandwidth_;
};

}  // namespace cspa

#endif  // CSPA_SCORING_HPP

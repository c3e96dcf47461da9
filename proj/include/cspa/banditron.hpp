#ifndef CSPA_BANDITRON_HPP
#define CSPA_BANDITRON_HPP

// Banditron baseline: epsilon-greedy exploration over the argmax
// prediction with an unbiased perceptron-style update.

#include "cspa/learner.hpp"

#include <random>

namespace cspa {

struct BanditronConfig {
  double gamma = 0.0;  // exploration rate, in [0, 1)
  int num_classes = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (gamma < 0.0 || gamma >= 1.0) {
      throw std::invalid_argument(
          "BanditronConfig: gamma must be in [0, 1), got " +
          std::to_string(gamma));
    }
    if (num_classes < 2) {
      throw std::invalid_argument("BanditronConfig: num_classes must be >= 2");
    }
  }
};

class Banditron {
 public:
  Banditron(const BanditronConfig& cfg, Eigen::Index dimension)
      : w_(cfg.num_classes, dimension), gamma_(cfg.gamma), rng_(cfg.seed) {
    cfg.validate();
  }

  // P(i) = (1 - gamma) * [i == predicted] + gamma / K; entry i-1 holds P(i).
  static Vector sampling_distribution(int num_classes, int predicted,
                                      double gamma) {
    Vector p = Vector::Constant(num_classes, gamma / num_classes);
    p[predicted - 1] += 1.0 - gamma;
    return p;
  }

  // Row r of the update is x * ([feedback & r==proposed]/p_proposed -
  // [r==predicted]); in expectation over the sampling this equals the
  // full-information perceptron update.
  static void apply_update(WeightMatrix& w, const Vector& x, int predicted,
                           int proposed, bool feedback, double p_proposed) {
    w.row(predicted) -= x.transpose();
    if (feedback) w.row(proposed) += (1.0 / p_proposed) * x.transpose();
  }

  template <typename FeedbackOracle>
  StepOutcome step(const Vector& x, FeedbackOracle&& feedback) {
    if (x.squaredNorm() == 0.0) {
      throw std::invalid_argument("Banditron::step: zero instance");
    }
    StepOutcome out;
    out.predicted = predict(w_, x);
    const Vector p =
        sampling_distribution(w_.num_classes(), out.predicted, gamma_);
    out.proposed = sample(p);
    out.correct = feedback(out.proposed);
    apply_update(w_, x, out.predicted, out.proposed, out.correct,
                 p[out.proposed - 1]);
    return out;
  }

  const WeightMatrix& weights() const { return w_; }

 private:
  int sample(const Vector& p) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    double cum = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      cum += p[i];
      if (u < cum) return i + 1;
    }
    return static_cast<int>(p.size());  // guard against rounding at u ~ 1
  }

  WeightMatrix w_;
  double gamma_;
  std::mt19937_64 rng_;
};

}  // namespace cspa

#endif  // CSPA_BANDITRON_HPP

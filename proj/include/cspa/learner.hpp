#ifndef CSPA_LEARNER_HPP
#define CSPA_LEARNER_HPP

// The CSPA learner: complementary-label loss and closed-form update for
// wrong proposals, support-class passive-aggressive update for correct
// ones, and the per-round step that ties them together.
//
// The learner proposes its argmax prediction every round and sees only a
// correct/incorrect bit. On an incorrect round the proposal acts as a
// complementary label: its score is pushed below the runner-up by a
// minimal-change update that leaves all other pairwise margins untouched.
// On a correct round the margin violations against the true class are
// repaired across the support classes.

#include "cspa/scoring.hpp"

#include <numeric>

namespace cspa {

struct CspaConfig {
  double beta = 1.0;  // step-size knob, in (0, 1]
  int num_classes = 0;

  void validate() const {
    if (!(beta > 0.0) || beta > 1.0) {
      throw std::invalid_argument("CspaConfig: beta must be in (0, 1], got " +
                                  std::to_string(beta));
    }
    if (num_classes < 3) {
      throw std::invalid_argument("CspaConfig: num_classes must be >= 3");
    }
  }
};

enum class UpdateKind { none, complementary, spa };

// Per-round record. For CSPA proposed == predicted always; Banditron may
// propose an exploratory label instead.
struct StepOutcome {
  int predicted = 0;
  int proposed = 0;
  bool correct = false;
  double loss = 0.0;
  UpdateKind update_kind = UpdateKind::none;
  int support_size = 0;
};

// Minimum margin between the proposed (known-wrong) class and the rest:
// min_{i != proposed} (1 - w_i.x + w_proposed.x). When proposed is the
// argmax this is >= 1.
inline double complementary_loss(const WeightMatrix& w, const Vector& x,
                                 int proposed) {
  if (w.num_classes() < 2) {
    throw std::invalid_argument("complementary_loss: need >= 2 classes");
  }
  const Vector s = scores(w, x);
  double runner_up = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i) {
    if (i + 1 == proposed) continue;
    runner_up = std::max(runner_up, s[i]);
  }
  return 1.0 - runner_up + s[proposed - 1];
}

// Closed-form minimizer of the minimal-change problem: demotes the proposed
// class by (K-1)/K * beta*loss/||x||^2 along x and promotes every other
// class by 1/K of the same quantity, cutting the complementary loss to
// (1-beta)*loss while preserving all margins among the other classes.
// Returns the pre-update loss. No-op when the loss is not positive.
inline double complementary_update(WeightMatrix& w, const Vector& x,
                                   int proposed, double beta) {
  const double nx2 = x.squaredNorm();
  if (nx2 == 0.0) {
    throw std::invalid_argument("complementary_update: zero instance");
  }
  const double loss = complementary_loss(w, x, proposed);
  if (loss <= 0.0) return loss;
  const int k = w.num_classes();
  const double promote = beta * loss / (k * nx2);
  const double demote = (k - 1) * promote;
  for (int c = 1; c <= k; ++c) {
    if (c == proposed) {
      w.row(c) -= demote * x.transpose();
    } else {
      w.row(c) += promote * x.transpose();
    }
  }
  return loss;
}

// Per-class hinge losses against the true class: entry c-1 holds
// max(1 + w_c.x - w_ytrue.x, 0) for c != ytrue and 0 at ytrue.
struct SpaLosses {
  Vector per_class;
  double max_loss = 0.0;
};

inline SpaLosses spa_losses(const WeightMatrix& w, const Vector& x,
                            int ytrue) {
  const Vector s = scores(w, x);
  SpaLosses out;
  out.per_class = Vector::Zero(s.size());
  for (int i = 0; i < s.size(); ++i) {
    if (i + 1 == ytrue) continue;
    out.per_class[i] = std::max(1.0 + s[i] - s[ytrue - 1], 0.0);
    out.max_loss = std::max(out.max_loss, out.per_class[i]);
  }
  return out;
}

// Number of leading entries of a descending loss sequence that belong to
// the support set: position k (1-based) is included iff the sum of the
// previous entries is < k times entry k. The predicate is prefix-monotone
// for a descending sequence, so the scan stops at the first failure.
inline int support_prefix_length(const std::vector<double>& sorted_desc) {
  double prefix = 0.0;
  int len = 0;
  for (std::size_t k = 0; k < sorted_desc.size(); ++k) {
    if (prefix < static_cast<double>(k + 1) * sorted_desc[k]) {
      prefix += sorted_desc[k];
      ++len;
    } else {
      break;
    }
  }
  return len;
}

// Classes whose weights a correct round updates, ordered by descending
// loss (ties broken by ascending class index).
inline std::vector<int> support_set(const SpaLosses& losses, int ytrue) {
  std::vector<int> order;
  order.reserve(losses.per_class.size());
  for (int c = 1; c <= losses.per_class.size(); ++c) {
    if (c != ytrue) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return losses.per_class[a - 1] > losses.per_class[b - 1];
  });
  std::vector<double> sorted;
  sorted.reserve(order.size());
  for (int c : order) sorted.push_back(losses.per_class[c - 1]);
  order.resize(support_prefix_length(sorted));
  return order;
}

struct SpaUpdateInfo {
  double loss = 0.0;     // max per-class hinge loss
  int support_size = 0;  // |S_t|
};

// Support-class passive-aggressive update for a correct proposal: raises
// the true class by sum_{j in S} l_j/(|S|+1) along x and lowers each
// support class c by l_c - sum_{j in S} l_j/(|S|+1). No-op when every
// margin is satisfied.
inline SpaUpdateInfo spa_update(WeightMatrix& w, const Vector& x, int ytrue) {
  if (x.squaredNorm() == 0.0) {
    throw std::invalid_argument("spa_update: zero instance");
  }
  const SpaLosses losses = spa_losses(w, x, ytrue);
  const std::vector<int> support = support_set(losses, ytrue);
  if (!support.empty()) {
    double total = 0.0;
    for (int c : support) total += losses.per_class[c - 1];
    const double share = total / static_cast<double>(support.size() + 1);
    w.row(ytrue) += share * x.transpose();
    for (int c : support) {
      w.row(c) -= (losses.per_class[c - 1] - share) * x.transpose();
    }
  }
  return {losses.max_loss, static_cast<int>(support.size())};
}

// One full round: predict, propose the prediction, query the feedback
// oracle with the proposal only, and dispatch to the matching update.
// The oracle is any callable int -> bool; the learner never sees the true
// label itself.
template <typename FeedbackOracle>
StepOutcome step(WeightMatrix& w, const Vector& x, FeedbackOracle&& feedback,
                 const CspaConfig& cfg) {
  cfg.validate();
  if (cfg.num_classes != w.num_classes()) {
    throw std::invalid_argument("step: config/weight class count mismatch");
  }
  StepOutcome out;
  out.predicted = predict(w, x);
  out.proposed = out.predicted;
  out.correct = feedback(out.proposed);
  if (!out.correct) {
    out.loss = complementary_update(w, x, out.proposed, cfg.beta);
    out.update_kind = UpdateKind::complementary;
    if (out.loss < 1.0) {
      throw std::logic_error("step: complementary loss below 1 on a mistake");
    }
  } else {
    const SpaUpdateInfo info = spa_update(w, x, out.proposed);
    out.loss = info.loss;
    out.support_size = info.support_size;
    out.update_kind =
        info.support_size > 0 ? UpdateKind::spa : UpdateKind::none;
    if (out.loss < 0.0 || out.loss > 1.0) {
      throw std::logic_error("step: correct-round loss outside [0, 1]");
    }
  }
  return out;
}

// Convenience oracle wrapping a plain true label.
struct LabelOracle {
  int label;
  bool operator()(int proposed) const { return proposed == label; }
};

}  // namespace cspa

#endif  // CSPA_LEARNER_HPP

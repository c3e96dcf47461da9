#ifndef CSPA_THEORY_HPP
#define CSPA_THEORY_HPP

// Cumulative-square-loss bound evaluation and empirical verification:
// comparator condition number alpha, comparator hinge loss, the bound's
// right-hand side, and a full-run audit that re-steps the learner to check
// the telescoping identity and the per-round lower bound behind the proof.

#include "cspa/learner.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace cspa {

// max over instances t and classes y' != y_t of
//   sum_{y'' not in {y_t, y'}} (u_{y''}.x_t - u_{y'}.x_t)
// = max_t ( sum_{i != y_t} s_i - (K-1) * min_{y' != y_t} s_{y'} ).
inline double alpha_of(const Eigen::MatrixXd& u, const Dataset& ds) {
  const int k = static_cast<int>(u.rows());
  double alpha = 0.0;
  for (const Instance& inst : ds.instances) {
    const Vector s = u * inst.features;
    double wrong_sum = 0.0;
    double wrong_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      if (i + 1 == inst.label) continue;
      wrong_sum += s[i];
      wrong_min = std::min(wrong_min, s[i]);
    }
    alpha = std::max(alpha, wrong_sum - (k - 1) * wrong_min);
  }
  return alpha;
}

// Multiclass hinge loss of the reference vectors at one instance:
// max_{i != ytrue} max(1 + u_i.x - u_ytrue.x, 0).
inline double comparator_loss(const Eigen::MatrixXd& u, const Vector& x,
                              int ytrue) {
  const Vector s = u * x;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < s.size(); ++i) {
    if (i + 1 == ytrue) continue;
    worst = std::max(worst, s[i]);
  }
  return std::max(1.0 + worst - s[ytrue - 1], 0.0);
}

// Right-hand side of the cumulative square loss bound:
//   ( K(K-1)/(1-a)^2 * sqrt(sum l*^2) +
//     R*sqrt(K(K-1))/(1-a) * sqrt(sum ||u_i||^2) )^2.
inline double theorem_bound(const Eigen::MatrixXd& u, double alpha,
                            const std::vector<double>& comparator_losses,
                            double radius, int k) {
  if (!(alpha >= 0.0) || alpha >= 1.0) {
    throw std::invalid_argument("theorem_bound: alpha must be in [0, 1)");
  }
  if (k < 3) throw std::invalid_argument("theorem_bound: K must be >= 3");
  double sq = 0.0;
  for (double l : comparator_losses) sq += l * l;
  const double kk1 = static_cast<double>(k) * (k - 1);
  const double term1 = kk1 / ((1.0 - alpha) * (1.0 - alpha)) * std::sqrt(sq);
  const double term2 =
      radius * std::sqrt(kk1) / (1.0 - alpha) * std::sqrt(u.squaredNorm());
  return (term1 + term2) * (term1 + term2);
}

// Reference weight vectors paired with their condition number on a stream.
struct Comparator {
  Eigen::MatrixXd u;
  double alpha = 0.0;
};

inline Comparator make_comparator(Eigen::MatrixXd u, const Dataset& ds) {
  Comparator c;
  c.alpha = alpha_of(u, ds);
  c.u = std::move(u);
  return c;
}

struct BoundReport {
  double sum_sq_loss = 0.0;         // sum of l_t^2 over the run
  double comparator_sq_loss = 0.0;  // sum of (l*_t)^2
  long long mistakes = 0;
  double alpha = 0.0;
  double beta_used = 0.0;
  // Bound comparison applies only when beta == (1-alpha)/(K-1) and alpha < 1.
  bool beta_matches_theorem = false;
  double bound_rhs = std::numeric_limits<double>::quiet_NaN();
  bool bound_holds = false;
  bool mistakes_within_loss = false;
  double telescoping_error = 0.0;
  bool telescoping_ok = false;
  // Per-round lower bound on the potential drop for complementary rounds,
  // audited when the theorem's beta is in use.
  bool complementary_audit_ok = true;
  long long complementary_rounds = 0;

  std::string to_text() const {
    std::ostringstream out;
    out.precision(12);
    out << "sum_sq_loss " << sum_sq_loss << '\n'
        << "comparator_sq_loss " << comparator_sq_loss << '\n'
        << "mistakes " << mistakes << '\n'
        << "alpha " << alpha << '\n'
        << "beta_used " << beta_used << '\n'
        << "beta_matches_theorem " << (beta_matches_theorem ? 1 : 0) << '\n'
        << "bound_rhs " << bound_rhs << '\n'
        << "bound_holds " << (bound_holds ? 1 : 0) << '\n'
        << "mistakes_within_loss " << (mistakes_within_loss ? 1 : 0) << '\n'
        << "telescoping_error " << telescoping_error << '\n'
        << "telescoping_ok " << (telescoping_ok ? 1 : 0) << '\n'
        << "complementary_audit_ok " << (complementary_audit_ok ? 1 : 0)
        << '\n'
        << "complementary_rounds " << complementary_rounds << '\n';
    return out.str();
  }
};

// Re-steps a CSPA run over ds (which must be the exact streamed sequence)
// and audits it against the reference vectors u: cumulative square loss vs
// the bound, mistake count, the telescoping identity on the potential
// Delta_t = sum_i (||w_{i,t} - u_i||^2 - ||w_{i,t+1} - u_i||^2), and the
// per-round complementary-case lower bound
//   Delta_t >= beta*gamma/(K R^2) * l_t^2 - 2 beta l_t l*_t / (K R^2),
// gamma = 2(1-alpha) - (K-1)beta.
inline BoundReport verify_run(const std::vector<StepOutcome>& outcomes,
                              const Eigen::MatrixXd& u, const Dataset& ds,
                              double beta) {
  if (outcomes.size() != ds.size()) {
    throw std::invalid_argument("verify_run: outcomes/dataset length mismatch");
  }
  const int k = ds.num_classes;
  if (u.rows() != k || u.cols() != ds.dimension) {
    throw std::invalid_argument("verify_run: comparator shape mismatch");
  }

  BoundReport report;
  report.alpha = alpha_of(u, ds);
  report.beta_used = beta;
  report.beta_matches_theorem =
      report.alpha < 1.0 &&
      std::abs(beta - (1.0 - report.alpha) / (k - 1)) <= 1e-12;

  const double radius =
      ds.instances.empty() ? 1.0 : ds.instances.front().features.norm();
  const double r2 = radius * radius;
  const double gamma = 2.0 * (1.0 - report.alpha) - (k - 1) * beta;

  WeightMatrix w(k, std::max<Eigen::Index>(ds.dimension, 1));
  const CspaConfig cfg{beta, k};
  double delta_sum = 0.0;
  const double initial_potential = u.squaredNorm();  // w_1 = 0

  for (std::size_t t = 0; t < ds.size(); ++t) {
    const Instance& inst = ds.instances[t];
    const double before = (w.matrix() - u).squaredNorm();
    const StepOutcome out = step(w, inst.features, LabelOracle{inst.label}, cfg);
    if (out.proposed != outcomes[t].proposed ||
        out.correct != outcomes[t].correct ||
        std::abs(out.loss - outcomes[t].loss) > 1e-9) {
      throw std::runtime_error(
          "verify_run: outcomes diverge from the re-run at round " +
          std::to_string(t + 1));
    }
    const double after = (w.matrix() - u).squaredNorm();
    const double delta = before - after;
    delta_sum += delta;

    const double comp = comparator_loss(u, inst.features, inst.label);
    report.sum_sq_loss += out.loss * out.loss;
    report.comparator_sq_loss += comp * comp;
    if (!out.correct) {
      ++report.mistakes;
      ++report.complementary_rounds;
      if (report.beta_matches_theorem) {
        const double lower = beta * gamma / (k * r2) * out.loss * out.loss -
                             2.0 * beta * out.loss * comp / (k * r2);
        if (delta < lower - 1e-6) report.complementary_audit_ok = false;
      }
    }
  }

  const double final_potential = (w.matrix() - u).squaredNorm();
  report.telescoping_error =
      std::abs(delta_sum - (initial_potential - final_potential));
  report.telescoping_ok = report.telescoping_error <= 1e-6;
  report.mistakes_within_loss =
      static_cast<double>(report.mistakes) <= report.sum_sq_loss + 1e-9;

  if (report.beta_matches_theorem) {
    std::vector<double> comp_losses;
    comp_losses.reserve(ds.size());
    for (const Instance& inst : ds.instances) {
      comp_losses.push_back(comparator_loss(u, inst.features, inst.label));
    }
    report.bound_rhs = theorem_bound(u, report.alpha, comp_losses, radius, k);
    report.bound_holds = report.sum_sq_loss <= report.bound_rhs + 1e-9;
  }
  return report;
}

}  // namespace cspa

#endif  // CSPA_THEORY_HPP

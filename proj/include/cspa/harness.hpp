#ifndef CSPA_HARNESS_HPP
#define CSPA_HARNESS_HPP

// Experiment runner: single trials, hyperparameter sweeps over named grid
// presets, noise studies, and CSV emission of per-window metrics.

#include "cspa/banditron.hpp"
#include "cspa/theory.hpp"

#include <fstream>
#include <functional>
#include <optional>

namespace cspa {

// Running and windowed correct-proposal ratios over one trial.
struct TrialMetrics {
  long long cumulative_correct = 0;
  long long rounds = 0;
  std::vector<double> windowed;           // per-window correct ratio
  std::vector<long long> window_ends;     // round index at each window end
  std::vector<double> cumulative_ratios;  // cumulative ratio at window end
  double final_ratio = 0.0;
};

enum class Algo { cspa, banditron };

inline const char* algo_name(Algo a) {
  return a == Algo::cspa ? "cspa" : "banditron";
}

struct SyntheticSpec {
  int n_per_class = 1000;
  double sigma = 0.5;
};

struct KernelSpec {
  std::vector<double> bandwidth_grid;  // Gaussian kernel g candidates
  int support_size = 700;
};

struct ExperimentSpec {
  Algo algo = Algo::cspa;
  std::string dataset_path;  // empty -> synthetic four-Gaussian data
  SyntheticSpec synthetic;
  int num_classes = 4;
  std::optional<KernelSpec> kernel;
  std::vector<double> param_grid;  // beta (cspa) or gamma (banditron)
  int trials = 1;
  std::uint64_t base_seed = 0;
  double noise_sigma = 0.0;
  int window = 100;
  std::string dataset_name;

  void validate() const {
    if (param_grid.empty()) {
      throw std::invalid_argument("ExperimentSpec: empty hyperparameter grid");
    }
    if (trials < 1) {
      throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
    }
    if (window < 1) {
      throw std::invalid_argument("ExperimentSpec: window must be >= 1");
    }
    if (kernel && kernel->bandwidth_grid.empty()) {
      throw std::invalid_argument("ExperimentSpec: empty kernel grid");
    }
    if (kernel && kernel->support_size < 1) {
      throw std::invalid_argument("ExperimentSpec: support size must be >= 1");
    }
  }
};

// Grid presets for hyperparameter selection.
namespace grids {

inline std::vector<double> cspa_beta_linear(int num_classes) {
  return {0.1, 0.2, 0.3, 0.4, 0.5,
          0.6, 0.7, 0.8, 0.9, 1.0 / (2.0 * (num_classes - 1))};
}

inline std::vector<double> banditron_gamma_linear() {
  return {0.001, 0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
}

inline std::vector<double> cspa_beta_kernel(int num_classes) {
  return {0.1, 0.3, 0.5, 0.7, 1.0 / (2.0 * (num_classes - 1))};
}

inline std::vector<double> banditron_gamma_kernel() {
  return {0.001, 0.025, 0.1, 0.3, 0.4, 0.6};
}

inline std::vector<double> kernel_bandwidths() {
  return {0.01, 0.1, 1.0, 10.0, 100.0};
}

}  // namespace grids

inline Dataset load_experiment_dataset(const ExperimentSpec& spec) {
  if (spec.dataset_path.empty()) {
    return gen_four_gaussians(spec.synthetic.n_per_class, spec.synthetic.sigma,
                              spec.base_seed);
  }
  std::ifstream in(spec.dataset_path);
  if (!in) {
    throw std::runtime_error("cannot open dataset file: " + spec.dataset_path);
  }
  std::string name = spec.dataset_name.empty()
                         ? spec.dataset_path
                         : spec.dataset_name;
  return parse_libsvm(in, spec.num_classes, std::move(name));
}

namespace detail {

// Streams one prepared trial: shuffle -> optional noise -> normalize ->
// optional kernel expansion against the first |B| shuffled instances ->
// one online pass.
inline TrialMetrics run_prepared_trial(const Dataset& base,
                                       const ExperimentSpec& spec,
                                       double param, double kernel_g,
                                       int trial_index) {
  const std::uint64_t trial_seed =
      spec.base_seed + static_cast<std::uint64_t>(trial_index);
  Dataset ds = shuffle(base, trial_seed);
  if (spec.noise_sigma > 0.0) {
    ds = add_feature_noise(std::move(ds), spec.noise_sigma,
                           splitmix64(trial_seed));
  }
  ds = normalize(std::move(ds));

  if (spec.kernel) {
    const auto support_size = std::min<std::size_t>(
        static_cast<std::size_t>(spec.kernel->support_size), ds.size());
    std::vector<Instance> anchors(ds.instances.begin(),
                                  ds.instances.begin() +
                                      static_cast<std::ptrdiff_t>(support_size));
    const KernelExpander expander(anchors, kernel_g);
    for (Instance& inst : ds.instances) {
      inst.features = expander.expand(inst.features);
    }
    ds.dimension = expander.support_size();
  }

  const int k = ds.num_classes;
  WeightMatrix weights(k, ds.dimension);
  const CspaConfig cspa_cfg{param, k};
  std::optional<Banditron> banditron;
  if (spec.algo == Algo::banditron) {
    banditron.emplace(
        BanditronConfig{param, k, splitmix64(trial_seed ^ 0x9e3779b9ULL)},
        ds.dimension);
  } else {
    cspa_cfg.validate();
  }

  TrialMetrics metrics;
  long long window_correct = 0;
  long long window_rounds = 0;
  for (const Instance& inst : ds.instances) {
    const LabelOracle oracle{inst.label};
    const StepOutcome out =
        spec.algo == Algo::cspa
            ? step(weights, inst.features, oracle, cspa_cfg)
            : banditron->step(inst.features, oracle);
    ++metrics.rounds;
    ++window_rounds;
    if (out.proposed == inst.label) {
      ++metrics.cumulative_correct;
      ++window_correct;
    }
    if (window_rounds == spec.window ||
        metrics.rounds == static_cast<long long>(ds.size())) {
      metrics.windowed.push_back(static_cast<double>(window_correct) /
                                 static_cast<double>(window_rounds));
      metrics.window_ends.push_back(metrics.rounds);
      metrics.cumulative_ratios.push_back(
          static_cast<double>(metrics.cumulative_correct) /
          static_cast<double>(metrics.rounds));
      window_correct = 0;
      window_rounds = 0;
    }
  }
  metrics.final_ratio =
      metrics.rounds == 0
          ? 0.0
          : static_cast<double>(metrics.cumulative_correct) /
                static_cast<double>(metrics.rounds);
  return metrics;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

// Runs trial number trial_index of a single-point spec (one hyperparameter
// value, and one kernel bandwidth when kernel mode is on).
inline TrialMetrics run_trial(const ExperimentSpec& spec, int trial_index) {
  spec.validate();
  if (spec.param_grid.size() != 1 ||
      (spec.kernel && spec.kernel->bandwidth_grid.size() != 1)) {
    throw std::invalid_argument("run_trial: spec must hold exactly one "
                                "hyperparameter value (use sweep for grids)");
  }
  const Dataset base = load_experiment_dataset(spec);
  return detail::run_prepared_trial(
      base, spec, spec.param_grid.front(),
      spec.kernel ? spec.kernel->bandwidth_grid.front() : 0.0, trial_index);
}

struct SweepRow {
  double kernel_g = 0.0;  // 0 in linear mode
  double param = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  bool best = false;
  std::vector<TrialMetrics> per_trial;
};

// Full grid x trials protocol; the row with the best mean final ratio is
// marked (first such row on ties).
inline std::vector<SweepRow> sweep(const ExperimentSpec& spec) {
  spec.validate();
  const Dataset base = load_experiment_dataset(spec);
  const std::vector<double> g_grid =
      spec.kernel ? spec.kernel->bandwidth_grid : std::vector<double>{0.0};

  std::vector<SweepRow> rows;
  for (double g : g_grid) {
    for (double param : spec.param_grid) {
      SweepRow row;
      row.kernel_g = g;
      row.param = param;
      std::vector<double> finals;
      for (int t = 0; t < spec.trials; ++t) {
        row.per_trial.push_back(
            detail::run_prepared_trial(base, spec, param, g, t));
        finals.push_back(row.per_trial.back().final_ratio);
      }
      row.mean = detail::mean_of(finals);
      row.stddev = detail::stddev_of(finals);
      rows.push_back(std::move(row));
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean > rows[best].mean) best = i;
  }
  if (!rows.empty()) rows[best].best = true;
  return rows;
}

struct NoiseStudyRow {
  double sigma = 0.0;
  double beta = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  bool guaranteed_range = false;  // beta < 1/(K-1)
};

// Mean final ratio over trials for every (sigma, beta) pair. CSPA only.
inline std::vector<NoiseStudyRow> noise_study(const ExperimentSpec& spec,
                                              const std::vector<double>& sigmas,
                                              const std::vector<double>& betas) {
  if (spec.algo != Algo::cspa) {
    throw std::invalid_argument("noise_study: CSPA only");
  }
  ExperimentSpec point = spec;
  point.kernel.reset();
  std::vector<NoiseStudyRow> rows;
  const Dataset base = load_experiment_dataset(spec);
  for (double sigma : sigmas) {
    point.noise_sigma = sigma;
    for (double beta : betas) {
      std::vector<double> finals;
      for (int t = 0; t < spec.trials; ++t) {
        finals.push_back(
            detail::run_prepared_trial(base, point, beta, 0.0, t).final_ratio);
      }
      NoiseStudyRow row;
      row.sigma = sigma;
      row.beta = beta;
      row.mean = detail::mean_of(finals);
      row.stddev = detail::stddev_of(finals);
      row.guaranteed_range = beta < 1.0 / (base.num_classes - 1);
      rows.push_back(row);
    }
  }
  return rows;
}

struct TrialRecord {
  std::string algo;
  std::string dataset;
  double param = 0.0;
  int trial = 0;
  TrialMetrics metrics;
};

namespace detail {

inline std::string format_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// One row per window per trial: algo,dataset,param,trial,round,window_ratio,
// cum_ratio. Values carry 6 significant digits.
inline std::string emit_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "algo,dataset,param,trial,round,window_ratio,cum_ratio\n";
  for (const TrialRecord& rec : records) {
    for (std::size_t wi = 0; wi < rec.metrics.windowed.size(); ++wi) {
      out << rec.algo << ',' << rec.dataset << ','
          << detail::format_sig6(rec.param) << ',' << rec.trial << ','
          << rec.metrics.window_ends[wi] << ','
          << detail::format_sig6(rec.metrics.windowed[wi]) << ','
          << detail::format_sig6(rec.metrics.cumulative_ratios[wi]) << '\n';
    }
  }
  return out.str();
}

// One row per (sigma, beta) with the convergence-guarantee flag.
inline std::string emit_noise_csv(const std::vector<NoiseStudyRow>& rows) {
  std::ostringstream out;
  out << "sigma,beta,mean_ratio,stddev,guaranteed_range\n";
  for (const NoiseStudyRow& row : rows) {
    out << detail::format_sig6(row.sigma) << ','
        << detail::format_sig6(row.beta) << ','
        << detail::format_sig6(row.mean) << ','
        << detail::format_sig6(row.stddev) << ','
        << (row.guaranteed_range ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace cspa

#endif  // CSPA_HARNESS_HPP

// Command-line experiment runner: single runs, hyperparameter sweeps,
// noise studies, synthetic data generation, and bound verification.

#include "cspa/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

struct CommonOpts {
  std::string algo = "cspa";
  std::string data;
  int classes = 4;
  std::string beta;
  std::string gamma;
  std::string kernel_g;
  int support_size = 700;
  int trials = 1;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  int window = 100;
  std::string out;
  int n_per_class = 1000;
  double gen_sigma = 0.5;

  void attach(CLI::App* cmd, bool with_algo = true) {
    if (with_algo) {
      cmd->add_option("--algo", algo, "learner: cspa or banditron")
          ->check(CLI::IsMember({"cspa", "banditron"}));
    }
    cmd->add_option("--data", data, "LIBSVM dataset path (omit for synthetic)");
    cmd->add_option("--classes", classes, "number of classes K");
    cmd->add_option("--beta", beta, "CSPA beta value, comma grid, or 'preset'");
    cmd->add_option("--gamma", gamma,
                    "Banditron gamma value, comma grid, or 'preset'");
    cmd->add_option("--kernel-g", kernel_g,
                    "Gaussian kernel bandwidth(s); enables kernel mode");
    cmd->add_option("--support-size", support_size,
                    "kernel support set size |B|");
    cmd->add_option("--trials", trials, "number of trials");
    cmd->add_option("--seed", seed, "base seed; trial t shuffles with seed+t");
    cmd->add_option("--sigma", sigma, "feature noise standard deviation");
    cmd->add_option("--window", window, "metric window length");
    cmd->add_option("--out", out, "CSV output path (default: stdout)");
    cmd->add_option("--n-per-class", n_per_class,
                    "synthetic samples per class");
    cmd->add_option("--gen-sigma", gen_sigma,
                    "synthetic per-axis standard deviation");
  }

  cspa::ExperimentSpec to_spec(bool kernel_preset_grid) const {
    cspa::ExperimentSpec spec;
    spec.algo = algo == "banditron" ? cspa::Algo::banditron : cspa::Algo::cspa;
    spec.dataset_path = data;
    spec.synthetic = {n_per_class, gen_sigma};
    spec.num_classes = data.empty() ? 4 : classes;
    spec.trials = trials;
    spec.base_seed = seed;
    spec.noise_sigma = sigma;
    spec.window = window;

    const bool kernel_mode = !kernel_g.empty();
    if (kernel_mode) {
      cspa::KernelSpec ks;
      ks.support_size = support_size;
      ks.bandwidth_grid = kernel_g == "preset"
                              ? cspa::grids::kernel_bandwidths()
                              : parse_grid(kernel_g);
      spec.kernel = std::move(ks);
    }

    const std::string& param =
        spec.algo == cspa::Algo::cspa ? beta : gamma;
    if (param.empty()) {
      throw std::runtime_error(spec.algo == cspa::Algo::cspa
                                   ? "missing --beta"
                                   : "missing --gamma");
    }
    if (param == "preset") {
      if (spec.algo == cspa::Algo::cspa) {
        spec.param_grid = kernel_mode
                              ? cspa::grids::cspa_beta_kernel(spec.num_classes)
                              : cspa::grids::cspa_beta_linear(spec.num_classes);
      } else {
        spec.param_grid = kernel_mode
                              ? cspa::grids::banditron_gamma_kernel()
                              : cspa::grids::banditron_gamma_linear();
      }
    } else {
      spec.param_grid = parse_grid(param);
    }
    (void)kernel_preset_grid;
    return spec;
  }
};

std::string dataset_label(const cspa::ExperimentSpec& spec) {
  if (!spec.dataset_name.empty()) return spec.dataset_name;
  if (spec.dataset_path.empty()) return "four-gaussians";
  const auto slash = spec.dataset_path.find_last_of('/');
  return slash == std::string::npos ? spec.dataset_path
                                    : spec.dataset_path.substr(slash + 1);
}

int cmd_run(const CommonOpts& opts) {
  cspa::ExperimentSpec spec = opts.to_spec(false);
  if (spec.param_grid.size() != 1) {
    throw std::runtime_error("run expects a single hyperparameter value");
  }
  std::vector<cspa::TrialRecord> records;
  for (int t = 0; t < spec.trials; ++t) {
    cspa::TrialRecord rec;
    rec.algo = cspa::algo_name(spec.algo);
    rec.dataset = dataset_label(spec);
    rec.param = spec.param_grid.front();
    rec.trial = t;
    rec.metrics = cspa::run_trial(spec, t);
    std::cerr << "trial " << t << ": final ratio "
              << rec.metrics.final_ratio << " over " << rec.metrics.rounds
              << " rounds\n";
    records.push_back(std::move(rec));
  }
  write_output(opts.out, cspa::emit_csv(records));
  return 0;
}

int cmd_sweep(const CommonOpts& opts) {
  cspa::ExperimentSpec spec = opts.to_spec(true);
  const auto rows = cspa::sweep(spec);
  std::vector<cspa::TrialRecord> records;
  for (const auto& row : rows) {
    std::cerr << (spec.kernel ? "g=" + std::to_string(row.kernel_g) + " " : "")
              << "param=" << row.param << ": mean " << row.mean << " stddev "
              << row.stddev << (row.best ? "  <- best" : "") << "\n";
    for (std::size_t t = 0; t < row.per_trial.size(); ++t) {
      cspa::TrialRecord rec;
      rec.algo = cspa::algo_name(spec.algo);
      rec.dataset = dataset_label(spec);
      rec.param = row.param;
      rec.trial = static_cast<int>(t);
      rec.metrics = row.per_trial[t];
      records.push_back(std::move(rec));
    }
  }
  write_output(opts.out, cspa::emit_csv(records));
  return 0;
}

int cmd_noise_study(const CommonOpts& opts, const std::string& sigmas_text,
                    const std::string& betas_text) {
  CommonOpts filled = opts;
  if (filled.beta.empty()) filled.beta = "0.25";  // --betas drives the grid
  cspa::ExperimentSpec spec = filled.to_spec(false);
  spec.algo = cspa::Algo::cspa;
  const auto sigmas = parse_grid(sigmas_text);
  const auto betas =
      betas_text == "preset"
          ? cspa::grids::cspa_beta_linear(spec.num_classes)
          : parse_grid(betas_text);
  const auto rows = cspa::noise_study(spec, sigmas, betas);
  write_output(opts.out, cspa::emit_noise_csv(rows));
  return 0;
}

int cmd_gen(int n_per_class, double sigma, std::uint64_t seed,
            const std::string& out) {
  const cspa::Dataset ds = cspa::gen_four_gaussians(n_per_class, sigma, seed);
  std::ostringstream text;
  cspa::serialize_libsvm(ds, text);
  write_output(out, text.str());
  return 0;
}

// Builds the proportional-to-centers comparator on a synthetic stream,
// scales it for zero hinge loss, runs CSPA, and prints the bound report.
int cmd_verify_bound(int n_per_class, double sigma, std::uint64_t seed,
                     double beta, bool theorem_beta) {
  cspa::Dataset ds = cspa::gen_four_gaussians(n_per_class, sigma, seed);
  ds = cspa::normalize(cspa::shuffle(std::move(ds), seed));
  const int k = ds.num_classes;

  Eigen::MatrixXd centers(4, 2);
  centers << 1, 1, 1, -1, -1, 1, -1, -1;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& inst : ds.instances) {
    const Eigen::VectorXd s = centers * inst.features;
    for (int i = 0; i < k; ++i) {
      if (i + 1 == inst.label) continue;
      min_margin = std::min(min_margin, s[inst.label - 1] - s[i]);
    }
  }
  if (min_margin <= 0.0) {
    std::cerr << "stream is not separable by the class centers; "
                 "decrease --gen-sigma\n";
    return 1;
  }
  const Eigen::MatrixXd u = centers / min_margin;
  const cspa::Comparator comparator = cspa::make_comparator(u, ds);
  std::cerr << "comparator alpha = " << comparator.alpha << "\n";

  double run_beta = beta;
  if (theorem_beta) {
    if (comparator.alpha >= 1.0) {
      std::cerr << "theorem beta requires alpha < 1, got "
                << comparator.alpha << "\n";
      return 1;
    }
    run_beta = (1.0 - comparator.alpha) / (k - 1);
  }

  cspa::WeightMatrix w(k, ds.dimension);
  const cspa::CspaConfig cfg{run_beta, k};
  std::vector<cspa::StepOutcome> outcomes;
  outcomes.reserve(ds.size());
  for (const auto& inst : ds.instances) {
    outcomes.push_back(
        cspa::step(w, inst.features, cspa::LabelOracle{inst.label}, cfg));
  }
  const cspa::BoundReport report =
      cspa::verify_run(outcomes, comparator.u, ds, run_beta);
  std::cout << report.to_text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CSPA online partial-feedback classification harness"};
  app.require_subcommand(1);

  CommonOpts run_opts, sweep_opts, noise_opts;
  std::string sigmas_text, betas_text = "preset";

  CLI::App* run = app.add_subcommand("run", "single hyperparameter run");
  run_opts.attach(run);

  CLI::App* sw = app.add_subcommand("sweep", "grid sweep with trial means");
  sweep_opts.attach(sw);

  CLI::App* ns = app.add_subcommand(
      "noise-study", "sigma x beta grid of mean ratios (CSPA)");
  noise_opts.attach(ns, false);
  ns->add_option("--sigmas", sigmas_text, "comma list of noise sigmas")
      ->required();
  ns->add_option("--betas", betas_text, "comma list of betas or 'preset'");

  int gen_n = 1000;
  double gen_sigma = 0.5;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen =
      app.add_subcommand("gen", "write synthetic four-Gaussian data (LIBSVM)");
  gen->add_option("--n-per-class", gen_n, "samples per class");
  gen->add_option("--sigma", gen_sigma, "per-axis standard deviation");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  int vb_n = 1000;
  double vb_sigma = 0.05;
  std::uint64_t vb_seed = 0;
  double vb_beta = 0.25;
  bool vb_theorem = false;
  CLI::App* vb = app.add_subcommand(
      "verify-bound", "bound report for a synthetic CSPA run");
  vb->add_option("--n-per-class", vb_n, "samples per class");
  vb->add_option("--gen-sigma", vb_sigma, "per-axis standard deviation");
  vb->add_option("--seed", vb_seed, "shuffle/generator seed");
  vb->add_option("--beta", vb_beta, "CSPA beta");
  vb->add_flag("--theorem-beta", vb_theorem,
               "use beta = (1-alpha)/(K-1) from the comparator");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sw->parsed()) return cmd_sweep(sweep_opts);
    if (ns->parsed()) return cmd_noise_study(noise_opts, sigmas_text,
                                             betas_text);
    if (gen->parsed()) return cmd_gen(gen_n, gen_sigma, gen_seed, gen_out);
    if (vb->parsed())
      return cmd_verify_bound(vb_n, vb_sigma, vb_seed, vb_beta, vb_theorem);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

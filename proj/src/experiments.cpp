#include <algorithm>
#include <cmath>
#include <sstream>

#include "biaslearn/booldim.hpp"
#include "biaslearn/cli.hpp"
#include "biaslearn/format.hpp"
#include "cli_util.hpp"

namespace biaslearn::cli {
namespace {

constexpr const char* kNotReached = "not-reached";

// Mean true error of the trained heads on their training tasks, fresh data.
double multitask_test_error(const net::MultiTaskNet& trained,
                            const std::vector<env::Task>& tasks,
                            int mc_samples, std::uint64_t seed) {
  double total = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto err = env::task_error(
        tasks[i],
        [&](const Eigen::VectorXd& x) {
          return net::net_forward(trained, static_cast<int>(i), x);
        },
        env::LossId::Squared, mc_samples,
        mix_seed(seed, {static_cast<std::uint64_t>(i)}));
    total += err.value;
  }
  return total / static_cast<double>(tasks.size());
}

}  // namespace

Artifacts cmd_curve(const Config& cfg, const RunOptions& opts) {
  const auto e = environment_from_config(cfg);
  const auto arch = arch_from_config(cfg);
  const auto base_train = train_config_from(cfg);
  const std::uint64_t seed0 = opts.seed_override.value_or(
      static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 0)));
  const int restarts =
      static_cast<int>(cfg.get_int("experiment", "restarts", 1));
  const int mc = static_cast<int>(cfg.get_int("experiment", "mc_samples", 4000));

  double tau;
  if (cfg.has("experiment", "tau")) {
    tau = cfg.get_double("experiment", "tau");
  } else if (const auto bayes = e.known_bayes_mse()) {
    tau = 1.5 * *bayes;
  } else {
    throw ConfigError(
        "tau is required when the environment's Bayes error is unknown");
  }
  // tau = 1 is allowed as a vacuous target (squared loss never exceeds 1).
  if (tau <= 0.0 || tau > 1.0) throw ConfigError("tau must lie in (0,1]");

  auto ns = cfg.get_ints("sweep", "n");
  auto ms = cfg.get_ints("sweep", "m");
  auto seeds = cfg.get_ints("sweep", "seeds");
  if (ns.empty() || ms.empty() || seeds.empty())
    throw ConfigError("sweep lists must be nonempty");
  if (!std::is_sorted(ns.begin(), ns.end()) ||
      !std::is_sorted(ms.begin(), ms.end()))
    throw ConfigError("sweep lists must be sorted ascending");

  struct Cell {
    long long n, seed;
    std::string m_star = kNotReached;
    double train_loss = 0.0;
    double test_err = 0.0;
  };
  std::vector<Cell> cells;
  for (long long n : ns)
    for (long long s : seeds) cells.push_back({n, s});

  parallel_for(static_cast<int>(cells.size()), opts.threads, [&](int ci) {
    Cell& cell = cells[ci];
    for (long long m : ms) {
      const std::uint64_t cell_seed = mix_seed(
          seed0, {1, static_cast<std::uint64_t>(cell.n),
                  static_cast<std::uint64_t>(m),
                  static_cast<std::uint64_t>(cell.seed)});
      const auto [sample, tasks] =
          env::sample_nm(e, static_cast<int>(cell.n), static_cast<int>(m),
                         cell_seed);
      train::TrainConfig tc = base_train;
      tc.seed = mix_seed(cell_seed, {2});
      const auto [trained, trace] =
          train::train_multitask_restarts(sample, arch, tc, restarts);
      cell.train_loss = trace.final_loss;
      cell.test_err =
          multitask_test_error(trained, tasks, mc, mix_seed(cell_seed, {3}));
      if (cell.test_err <= tau) {
        cell.m_star = std::to_string(m);
        break;
      }
    }
  });

  int unreached = 0;
  std::ostringstream csv;
  csv << "n,seed,m_star,final_train_loss,test_err\n";
  for (const auto& c : cells) {
    csv << c.n << ',' << c.seed << ',' << c.m_star << ','
        << fmt_double(c.train_loss) << ',' << fmt_double(c.test_err) << '\n';
    if (c.m_star == kNotReached) ++unreached;
  }
  std::ostringstream gp;
  gp << "# gnuplot script for the learning-curve artifact\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'n tasks'\nset ylabel 'm_star'\n"
     << "plot '%CSV%' using 1:3 with points\n";
  Artifacts out = {{"curve.csv", csv.str()},
                   {"curve.gp", gp.str()},
                   {"env.txt", env::env_to_text(e)}};
  if (unreached > 0)
    out.emplace_back("curve_warnings.txt",
                     std::to_string(unreached) +
                         " cell(s) never reached tau; m_star = not-reached\n");
  return out;
}

Artifacts cmd_transfer(const Config& cfg, const RunOptions& opts) {
  const auto e = environment_from_config(cfg);
  const auto arch = arch_from_config(cfg);
  const auto base_train = train_config_from(cfg);
  const std::uint64_t seed0 = opts.seed_override.value_or(
      static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 0)));
  const int restarts =
      static_cast<int>(cfg.get_int("experiment", "restarts", 1));
  const int mc = static_cast<int>(cfg.get_int("experiment", "mc_samples", 4000));
  const int trials = static_cast<int>(cfg.get_int("experiment", "trials", 20));
  const std::string feature_source =
      cfg.get_str("experiment", "features", "learnt");

  auto ns = cfg.get_ints("sweep", "n");
  auto m_novels = cfg.get_ints("sweep", "m_novel");
  if (ns.empty() || m_novels.empty())
    throw ConfigError("sweep lists must be nonempty");
  const int m_train = static_cast<int>(cfg.get_int(
      "experiment", "m_train",
      cfg.has("sweep", "m") ? cfg.get_ints("sweep", "m").back() : 40));

  struct Row {
    long long n, m_novel, trial;
    double err_transfer = 0.0, err_scratch = 0.0;
  };
  std::vector<Row> rows;

  for (long long n : ns) {
    // Features for this n: either learnt on an (n, m_train)-sample or the
    // environment's planted map.
    net::FeatureWeights features;
    if (feature_source == "oracle") {
      if (!e.shared_features())
        throw ConfigError("features = oracle needs a shared-feature env");
      features = *e.shared_features();
    } else if (feature_source == "learnt") {
      const std::uint64_t fseed =
          mix_seed(seed0, {11, static_cast<std::uint64_t>(n)});
      const auto [sample, tasks] =
          env::sample_nm(e, static_cast<int>(n), m_train, fseed);
      train::TrainConfig tc = base_train;
      tc.seed = mix_seed(fseed, {2});
      features = train::train_multitask_restarts(sample, arch, tc, restarts)
                     .first.features;
    } else {
      throw ConfigError("features must be 'learnt' or 'oracle'");
    }

    struct CellSpec {
      long long m_novel, trial;
    };
    std::vector<CellSpec> specs;
    for (long long mn : m_novels)
      for (int t = 0; t < trials; ++t) specs.push_back({mn, t});
    std::vector<Row> block(specs.size());

    parallel_for(static_cast<int>(specs.size()), opts.threads, [&](int i) {
      const auto [m_novel, trial] = specs[i];
      const std::uint64_t ts =
          mix_seed(seed0, {12, static_cast<std::uint64_t>(n),
                           static_cast<std::uint64_t>(m_novel),
                           static_cast<std::uint64_t>(trial)});
      const env::Task task = env::sample_task(e, mix_seed(ts, {1}));
      const TrainingSet z = env::sample_training_set(
          task, static_cast<int>(m_novel), mix_seed(ts, {2}));

      train::TrainConfig tc = base_train;
      tc.seed = mix_seed(ts, {3});
      const auto [head, htrace] = train::train_head_frozen(features, z, tc);
      const double err_t =
          env::task_error(
              task,
              [&](const Eigen::VectorXd& x) {
                return net::head_forward(features, head, x);
              },
              env::LossId::Squared, mc, mix_seed(ts, {4}))
              .value;

      // From-scratch arm: the whole net trained on the same novel data.
      NMSample single;
      single.n = 1;
      single.m = static_cast<int>(m_novel);
      single.rows = {z};
      single.task_ids = {0};
      train::TrainConfig sc = base_train;
      sc.seed = mix_seed(ts, {5});
      const auto [scratch, strace] =
          train::train_multitask_restarts(single, arch, sc, restarts);
      const double err_s =
          env::task_error(
              task,
              [&](const Eigen::VectorXd& x) {
                return net::net_forward(scratch, 0, x);
              },
              env::LossId::Squared, mc, mix_seed(ts, {6}))
              .value;
      block[i] = Row{n, m_novel, trial, err_t, err_s};
    });
    rows.insert(rows.end(), block.begin(), block.end());
  }

  std::ostringstream csv;
  csv << "n,m_novel,trial,err_transfer,err_scratch\n";
  for (const auto& r : rows)
    csv << r.n << ',' << r.m_novel << ',' << r.trial << ','
        << fmt_double(r.err_transfer) << ',' << fmt_double(r.err_scratch)
        << '\n';
  std::ostringstream gp;
  gp << "# gnuplot script for the transfer artifact\n"
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'm_novel'\nset ylabel 'test error'\n"
     << "plot '%CSV%' using 2:4 with points, '' using 2:5 with points\n";
  return {{"transfer.csv", csv.str()},
          {"transfer.gp", gp.str()},
          {"env.txt", env::env_to_text(e)}};
}

// ---------------------------------------------------------------------------
// Hard-instance experiment: exhaustive ERM over H^n on the Appendix-style
// biased environment.

namespace {

struct ErmResult {
  std::vector<booldim::FuncVec> chosen;  // one function per task row
};

int point_index(const Eigen::VectorXd& x) {
  return static_cast<int>(std::lround(x(0)));
}

// Exhaustive ERM: every space, every per-row function; rows decouple within
// a space. Ties keep the first space / first function in enumeration order.
ErmResult exhaustive_erm(const booldim::BooleanFamily& fam,
                         const NMSample& sample) {
  ErmResult best;
  long long best_mistakes = -1;
  for (const auto& space : fam.spaces) {
    long long mistakes = 0;
    std::vector<booldim::FuncVec> pick(sample.n);
    for (int i = 0; i < sample.n; ++i) {
      long long row_best = -1;
      for (const auto& f : space.functions) {
        long long wrong = 0;
        for (const auto& [x, y] : sample.rows[i])
          if (f[point_index(x)] != static_cast<int>(y)) ++wrong;
        if (row_best < 0 || wrong < row_best) {
          row_best = wrong;
          pick[i] = f;
        }
      }
      mistakes += row_best;
    }
    if (best_mistakes < 0 || mistakes < best_mistakes) {
      best_mistakes = mistakes;
      best.chosen = std::move(pick);
    }
  }
  return best;
}

double true_error(const env::HardInstance& inst,
                  const std::vector<booldim::FuncVec>& chosen) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
    const auto& f = chosen[i];
    total += env::task_error(
                 inst.tasks[i],
                 [&](const Eigen::VectorXd& x) {
                   return static_cast<double>(f[point_index(x)]);
                 },
                 env::LossId::Discrete, 0, 0)
                 .value;
  }
  return total / static_cast<double>(inst.tasks.size());
}

}  // namespace

Artifacts cmd_hard(const Config& cfg, const RunOptions& opts) {
  const auto fam = family_from_config(cfg);
  const int n = static_cast<int>(cfg.get_int("experiment", "n"));
  const double beta = cfg.get_double("experiment", "beta");
  const double eps = cfg.get_double("experiment", "epsilon", 0.05);
  const int trials = static_cast<int>(cfg.get_int("experiment", "trials", 200));
  const std::uint64_t seed0 = opts.seed_override.value_or(
      static_cast<std::uint64_t>(cfg.get_int("experiment", "seed", 0)));
  auto ms = cfg.get_ints("sweep", "m");
  if (ms.empty()) throw ConfigError("sweep m list must be nonempty");

  booldim::EnumCaps caps;
  caps.max_n = std::max(caps.max_n, n);
  const int d = booldim::dhn(fam, n, std::min(fam.domain_size, caps.max_m), caps);
  if (d == 0)
    throw ConfigError("family shatters no (n, m) matrix; no hard instance");
  const auto witness = booldim::find_shattered_matrix(fam, n, d, caps);

  // Domain point j embeds as the 1-d vector [j].
  std::vector<std::vector<Eigen::VectorXd>> points;
  for (const auto& row : *witness) {
    std::vector<Eigen::VectorXd> prow;
    for (int idx : row) {
      Eigen::VectorXd p(1);
      p(0) = static_cast<double>(idx);
      prow.push_back(std::move(p));
    }
    points.push_back(std::move(prow));
  }
  const double opt = (1.0 - beta) / 2.0;

  struct Row {
    long long m, trial;
    double er = 0.0, excess = 0.0;
  };
  struct CellSpec {
    long long m;
    int trial;
  };
  std::vector<CellSpec> specs;
  for (long long m : ms)
    for (int t = 0; t < trials; ++t) specs.push_back({m, t});
  std::vector<Row> rows(specs.size());

  parallel_for(static_cast<int>(specs.size()), opts.threads, [&](int i) {
    const auto [m, trial] = specs[i];
    const std::uint64_t ts =
        mix_seed(seed0, {21, static_cast<std::uint64_t>(m),
                         static_cast<std::uint64_t>(trial)});
    const auto inst = env::make_hard_boolean_env(points, beta, mix_seed(ts, {1}));
    ErmResult erm;
    if (m == 0) {
      // No data: ERM picks arbitrarily (first function of the first space).
      erm.chosen.assign(n, fam.spaces.front().functions.front());
    } else {
      const auto envh = env::Environment::hard_boolean(inst);
      const auto [sample, tasks] =
          env::sample_nm(envh, n, static_cast<int>(m), mix_seed(ts, {2}));
      erm = exhaustive_erm(fam, sample);
    }
    const double er = true_error(inst, erm.chosen);
    rows[i] = Row{m, trial, er, er - opt};
  });

  std::ostringstream csv;
  csv << "m,trial,er_erm,opt,excess,pr_excess_gt_eps\n";
  for (const auto& r : rows)
    csv << r.m << ',' << r.trial << ',' << fmt_double(r.er) << ','
        << fmt_double(opt) << ',' << fmt_double(r.excess) << ",\n";
  for (long long m : ms) {
    int over = 0, count = 0;
    for (const auto& r : rows)
      if (r.m == m) {
        ++count;
        if (r.excess > eps) ++over;
      }
    csv << m << ",summary,,,,"
        << fmt_double(static_cast<double>(over) / count) << '\n';
  }
  return {{"hard.csv", csv.str()}};
}

}  // namespace biaslearn::cli

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "biaslearn/env.hpp"
#include "biaslearn/format.hpp"

using namespace biaslearn;
namespace be = biaslearn::env;

namespace {

Eigen::VectorXd pt1(double x) {
  Eigen::VectorXd p(1);
  p(0) = x;
  return p;
}

be::Task point_mass_task(double x, double y) {
  return be::Task::finite_support(1, {{pt1(x), y, 1.0}},
                                  be::LabelSpace::UnitInterval);
}

}  // namespace

TEST_CASE("task invariants are enforced") {
  CHECK_THROWS_AS(be::Task::finite_support(
                      1, {{pt1(0), 0.5, 0.6}, {pt1(1), 0.5, 0.5}},
                      be::LabelSpace::UnitInterval),
                  std::invalid_argument);
  CHECK_THROWS_AS(be::Task::finite_support(1, {{pt1(0), 1.5, 1.0}},
                                           be::LabelSpace::UnitInterval),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      be::Task::finite_support(1, {{pt1(0), 0.5, 1.0}}, be::LabelSpace::Sign),
      std::invalid_argument);
  CHECK_THROWS_AS(be::Task::finite_support(
                      1, {{pt1(0), 1.0, -0.25}, {pt1(1), 1.0, 1.25}},
                      be::LabelSpace::UnitInterval),
                  std::invalid_argument);
}

TEST_CASE("sample_task: point-mass mixture returns that task") {
  const auto task = point_mass_task(0.25, 0.75);
  const auto e = be::Environment::finite_mixture({{task, 1.0}});
  for (std::uint64_t s : {0ull, 1ull, 77ull}) {
    const auto t = be::sample_task(e, s);
    CHECK(t.support().front().y == 0.75);
  }
}

TEST_CASE("sample_task: mixture frequencies land in the binomial interval") {
  const auto a = point_mass_task(0.0, 0.0);
  const auto b = point_mass_task(1.0, 1.0);
  const auto e = be::Environment::finite_mixture({{a, 0.5}, {b, 0.5}});
  int count_a = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s)
    if (be::sample_task(e, s).support().front().y == 0.0) ++count_a;
  const double freq = static_cast<double>(count_a) / trials;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("sample_task: chi-square goodness of fit at significance 0.001") {
  const auto e = be::Environment::finite_mixture(
      {{point_mass_task(0.0, 0.0), 0.2},
       {point_mass_task(1.0, 0.5), 0.3},
       {point_mass_task(2.0, 1.0), 0.5}});
  const int trials = 10000;
  int counts[3] = {0, 0, 0};
  for (int s = 0; s < trials; ++s) {
    const double y = be::sample_task(e, s).support().front().y;
    ++counts[y == 0.0 ? 0 : (y == 0.5 ? 1 : 2)];
  }
  const double expected[3] = {2000, 3000, 5000};
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = counts[i] - expected[i];
    chi2 += d * d / expected[i];
  }
  CHECK(chi2 < 13.816);  // chi-square(2 dof) critical value at 0.001
}

TEST_CASE("shared-feature environment: determinism and task structure") {
  const auto e1 = be::make_shared_feature_env(4, 3, 2, 1.0, 0.1, 42);
  const auto e2 = be::make_shared_feature_env(4, 3, 2, 1.0, 0.1, 42);
  CHECK(e1.shared_features()->u == e2.shared_features()->u);
  CHECK(e1.shared_features()->v == e2.shared_features()->v);

  const auto task = be::sample_task(e1, 7);
  CHECK(task.kind() == be::Task::Kind::SharedFeatureGenerative);
  // Tasks reference the environment's planted feature map.
  CHECK(task.true_features().get() == e1.shared_features().get());
  CHECK(e1.known_bayes_mse() == doctest::Approx(0.01));
}

TEST_CASE("shared-feature tasks: noiseless labels have zero Bayes error") {
  const auto e = be::make_shared_feature_env(3, 2, 2, 1.0, 0.0, 5);
  const auto task = be::sample_task(e, 3);
  const auto err = be::task_error(
      task, [&](const Eigen::VectorXd& x) { return task.clean_label(x); },
      be::LossId::Squared, 2000, 11);
  CHECK(err.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("shared-feature tasks: Bayes MSE equals noise variance (MC)") {
  // Heads bounded by 0.5 keep clean labels well inside [0,1], so clipping
  // is negligible and the conditional mean is the clean label.
  const auto e = be::make_shared_feature_env(8, 4, 2, 0.5, 0.05, 9);
  const int mc = 200000;
  for (std::uint64_t ts : {1ull, 2ull, 3ull}) {
    const auto task = be::sample_task(e, ts);
    const auto err = be::task_error(
        task, [&](const Eigen::VectorXd& x) { return task.clean_label(x); },
        be::LossId::Squared, mc, 123 + ts);
    CHECK(std::abs(err.value - 0.0025) <= 3.0 * err.std_error);
  }
}

TEST_CASE("sample_nm: shape, determinism, degenerate case") {
  const auto task = point_mass_task(0.5, 0.25);
  const auto e = be::Environment::finite_mixture({{task, 1.0}});
  const auto [s1, tasks1] = be::sample_nm(e, 3, 5, 99);
  CHECK(s1.n == 3);
  CHECK(s1.m == 5);
  CHECK(s1.rows.size() == 3);
  for (const auto& row : s1.rows) {
    CHECK(row.size() == 5);
    for (const auto& [x, y] : row) {
      CHECK(x(0) == 0.5);
      CHECK(y == 0.25);
    }
  }
  const auto [s2, tasks2] = be::sample_nm(e, 3, 5, 99);
  CHECK(nmsample_to_csv(s1) == nmsample_to_csv(s2));

  const auto eg = be::make_shared_feature_env(2, 2, 1, 1.0, 0.05, 4);
  const auto [g1, gt1] = be::sample_nm(eg, 2, 3, 123);
  const auto [g2, gt2] = be::sample_nm(eg, 2, 3, 123);
  CHECK(nmsample_to_csv(g1) == nmsample_to_csv(g2));
  CHECK_THROWS_AS(be::sample_nm(eg, 0, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(be::sample_nm(eg, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("sample_nm: rows of a symmetric mixture are uncorrelated") {
  const auto a = point_mass_task(0.0, 0.0);
  const auto b = point_mass_task(1.0, 1.0);
  const auto e = be::Environment::finite_mixture({{a, 0.5}, {b, 0.5}});
  const int trials = 4000;
  double sum0 = 0, sum1 = 0, sum01 = 0;
  for (int t = 0; t < trials; ++t) {
    const auto [s, tasks] = be::sample_nm(e, 2, 1, 5000 + t);
    const double y0 = s.rows[0][0].second;
    const double y1 = s.rows[1][0].second;
    sum0 += y0;
    sum1 += y1;
    sum01 += y0 * y1;
  }
  const double m0 = sum0 / trials, m1 = sum1 / trials;
  const double cov = sum01 / trials - m0 * m1;
  const double corr = cov / (0.5 * 0.5);  // both labels are Bernoulli(1/2)
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("hard-boolean environment: masses and optimal error") {
  const std::vector<std::vector<Eigen::VectorXd>> x = {
      {pt1(0), pt1(1), pt1(2)}, {pt1(0), pt1(1), pt1(2)}};
  const auto inst = be::make_hard_boolean_env(x, 0.4, 77);
  REQUIRE(inst.tasks.size() == 2);
  for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
    const auto& task = inst.tasks[i];
    double total = 0.0;
    for (const auto& atom : task.support()) {
      total += atom.p;
      const bool heavy = atom.p > 1.0 / 6.0;
      CHECK(atom.p ==
            doctest::Approx(heavy ? 1.4 / 6.0 : 0.6 / 6.0).epsilon(1e-15));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    // Marginal mass of each column point is exactly 1/d.
    for (int j = 0; j < 3; ++j) {
      double marginal = 0.0;
      for (const auto& atom : task.support())
        if (atom.x(0) == static_cast<double>(j)) marginal += atom.p;
      CHECK(marginal == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    // The Bayes sign predictor attains (1 - beta) / 2 exactly.
    const auto err = be::task_error(
        task,
        [&](const Eigen::VectorXd& p) {
          return static_cast<double>(
              inst.optimal_signs[i][static_cast<int>(p(0))]);
        },
        be::LossId::Discrete, 0, 0);
    CHECK(err.value == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(err.std_error == 0.0);
  }
  CHECK_THROWS_AS(be::make_hard_boolean_env(x, 1.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(be::make_hard_boolean_env(x, 0.0, 0), std::invalid_argument);
}

TEST_CASE("task_error: worked cases") {
  // Perfect predictor on a finite-support task.
  const auto task = be::Task::finite_support(
      1, {{pt1(0), 0.2, 0.5}, {pt1(1), 0.8, 0.5}}, be::LabelSpace::UnitInterval);
  const auto perfect = be::task_error(
      task, [](const Eigen::VectorXd& x) { return x(0) < 0.5 ? 0.2 : 0.8; },
      be::LossId::Squared, 0, 0);
  CHECK(perfect.value == 0.0);
  CHECK(perfect.std_error == 0.0);

  // Uniform 2-point task with labels 0 and 1, constant predictor 0.5.
  const auto two = be::Task::finite_support(
      1, {{pt1(0), 0.0, 0.5}, {pt1(1), 1.0, 0.5}}, be::LabelSpace::UnitInterval);
  const auto half = be::task_error(
      two, [](const Eigen::VectorXd&) { return 0.5; }, be::LossId::Squared, 0,
      0);
  CHECK(half.value == doctest::Approx(0.25).epsilon(1e-15));

  // Loss / label-space mismatch is an argument error.
  CHECK_THROWS_AS(be::task_error(
                      two, [](const Eigen::VectorXd&) { return 1.0; },
                      be::LossId::Discrete, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("environment text records round-trip") {
  const auto shared = be::make_shared_feature_env(3, 2, 2, 0.8, 0.07, 13);
  const auto shared2 = be::env_from_text(be::env_to_text(shared));
  CHECK(shared2.kind() == be::Environment::Kind::SharedFeature);
  CHECK(shared2.shared_features()->u == shared.shared_features()->u);
  CHECK(shared2.shared_features()->v == shared.shared_features()->v);
  CHECK(shared2.noise_std() == shared.noise_std());
  CHECK(be::env_to_text(shared2) == be::env_to_text(shared));

  const auto mix = be::Environment::finite_mixture(
      {{point_mass_task(0.125, 0.375), 0.25},
       {point_mass_task(1.0, 1.0), 0.75}},
      5);
  const auto mix2 = be::env_from_text(be::env_to_text(mix));
  CHECK(be::env_to_text(mix2) == be::env_to_text(mix));
  // Reloaded environments sample identically.
  const auto [sa, ta] = be::sample_nm(mix, 2, 4, 3);
  const auto [sb, tb] = be::sample_nm(mix2, 2, 4, 3);
  CHECK(nmsample_to_csv(sa) == nmsample_to_csv(sb));

  const std::vector<std::vector<Eigen::VectorXd>> x = {{pt1(0), pt1(1)},
                                                       {pt1(0), pt1(1)}};
  const auto hard = be::Environment::hard_boolean(
      be::make_hard_boolean_env(x, 0.4, 9), 2);
  const auto hard2 = be::env_from_text(be::env_to_text(hard));
  CHECK(be::env_to_text(hard2) == be::env_to_text(hard));
  for (std::size_t i = 0; i < hard.hard().tasks.size(); ++i)
    CHECK(hard2.hard().optimal_signs[i] == hard.hard().optimal_signs[i]);

  CHECK_THROWS_AS(be::env_from_text("nonsense"), std::invalid_argument);
}

TEST_CASE("nmsample CSV has the documented columns") {
  const auto task = point_mass_task(0.5, 0.25);
  const auto e = be::Environment::finite_mixture({{task, 1.0}});
  const auto [s, tasks] = be::sample_nm(e, 2, 2, 1);
  const std::string csv = nmsample_to_csv(s);
  CHECK(csv.substr(0, csv.find('\n')) == "task_id,example_id,x_1,y");
  CHECK(csv.find("0,0,0.5,0.25") != std::string::npos);
}

TEST_CASE("hard instance: exhaustive search over H^n attains exactly the "
          "optimal error") {
  // Self-consistency of the dimension oracle with the hard construction:
  // the best tuple from the shattering family achieves (1 - beta) / 2.
  const std::vector<std::vector<Eigen::VectorXd>> x = {{pt1(0), pt1(1)},
                                                       {pt1(0), pt1(1)}};
  const auto inst = be::make_hard_boolean_env(x, 0.4, 5);
  // Full class on 2 points: all 4 sign vectors.
  const std::int8_t funcs[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  double best = 1.0;
  for (const auto& f0 : funcs)
    for (const auto& f1 : funcs) {
      double avg = 0.0;
      for (int i = 0; i < 2; ++i) {
        const auto& f = i == 0 ? f0 : f1;
        avg += 0.5 * be::task_error(
                         inst.tasks[i],
                         [&](const Eigen::VectorXd& p) {
                           return static_cast<double>(
                               f[static_cast<int>(p(0))]);
                         },
                         be::LossId::Discrete, 0, 0)
                         .value;
      }
      best = std::min(best, avg);
    }
  CHECK(best == 0.3);
}

TEST_CASE("hard environment: resampling is bit-identical") {
  const std::vector<std::vector<Eigen::VectorXd>> x = {{pt1(0), pt1(1)},
                                                       {pt1(0), pt1(1)}};
  const auto e = be::Environment::hard_boolean(
      be::make_hard_boolean_env(x, 0.4, 3), 1);
  const auto [a, ta] = be::sample_nm(e, 2, 6, 44);
  const auto [b, tb] = be::sample_nm(e, 2, 6, 44);
  CHECK(nmsample_to_csv(a) == nmsample_to_csv(b));
  CHECK_THROWS_AS(be::sample_nm(e, 3, 6, 44), std::invalid_argument);
}

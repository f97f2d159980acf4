#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <vector>
#include <sstream>
#include <string>

#include "biaslearn/cli.hpp"
#include "biaslearn/config.hpp"

using namespace biaslearn;
namespace bc = biaslearn::cli;

namespace {

const std::string kTinyCurve = R"(
[experiment]
kind = curve
seed = 4
tau = 0.9
mc_samples = 400
[environment]
kind = shared-feature
d = 2
l = 2
k = 1
noise_std = 0.05
env_seed = 3
[architecture]
d = 2
l = 2
k = 1
[train]
max_epochs = 40
[sweep]
n = 1 2
m = 2 4
seeds = 1 2
)";

const std::string kTinyHard = R"(
[experiment]
kind = hard
n = 2
beta = 0.4
epsilon = 0.05
trials = 10
seed = 2
[family]
preset = full
domain = 2
[sweep]
m = 0 1
)";

std::string artifact(const bc::Artifacts& a, const std::string& name) {
  for (const auto& [n, content] : a)
    if (n == name) return content;
  throw std::runtime_error("missing artifact " + name);
}

}  // namespace

TEST_CASE("config parser: sections, lists, comments, errors") {
  const auto cfg = Config::parse(
      "[a]\nx = 1 2 3  # comment\nname = hello\n[b]\ny = 4.5\n");
  CHECK(cfg.get_ints("a", "x") == std::vector<long long>{1, 2, 3});
  CHECK(cfg.get_str("a", "name") == "hello");
  CHECK(cfg.get_double("b", "y") == 4.5);
  CHECK(cfg.get_double("b", "missing", 7.0) == 7.0);
  CHECK_THROWS_AS(cfg.get_str("a", "missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x = 1\n"), ConfigError);       // no section
  CHECK_THROWS_AS(Config::parse("[a]\nbad line\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[unterminated\n"), ConfigError);
}

TEST_CASE("cmd_curve: deterministic artifacts across reruns and threads") {
  const auto cfg = Config::parse(kTinyCurve);
  bc::RunOptions one;
  one.threads = 1;
  bc::RunOptions eight;
  eight.threads = 8;
  const auto a = bc::cmd_curve(cfg, one);
  const auto b = bc::cmd_curve(cfg, one);
  const auto c = bc::cmd_curve(cfg, eight);
  CHECK(artifact(a, "curve.csv") == artifact(b, "curve.csv"));
  CHECK(artifact(a, "curve.csv") == artifact(c, "curve.csv"));
  const std::string csv = artifact(a, "curve.csv");
  CHECK(csv.substr(0, csv.find('\n')) ==
        "n,seed,m_star,final_train_loss,test_err");
  // tau = 0.9 is vacuous for squared loss on [0,1]: every cell stops at the
  // smallest sweep m.
  CHECK(csv.find("1,1,2,") != std::string::npos);
}

TEST_CASE("cmd_curve: unreachable tau produces sentinels and a warning") {
  auto text = kTinyCurve;
  text.replace(text.find("tau = 0.9"), 9, "tau = 1e-9");
  const auto cfg = Config::parse(text);
  const auto arts = bc::cmd_curve(cfg, {});
  const std::string csv = artifact(arts, "curve.csv");
  CHECK(csv.find("not-reached") != std::string::npos);
  CHECK(artifact(arts, "curve_warnings.txt").find("not-reached") !=
        std::string::npos);
}

TEST_CASE("cmd_transfer: deterministic and well-formed") {
  const std::string text = R"(
[experiment]
kind = transfer
seed = 6
trials = 3
m_train = 6
mc_samples = 300
features = oracle
[environment]
kind = shared-feature
d = 2
l = 2
k = 1
noise_std = 0.05
env_seed = 3
[architecture]
d = 2
l = 2
k = 1
[train]
max_epochs = 60
[sweep]
n = 2
m_novel = 4 8
)";
  const auto cfg = Config::parse(text);
  bc::RunOptions eight;
  eight.threads = 8;
  const auto a = bc::cmd_transfer(cfg, {});
  const auto b = bc::cmd_transfer(cfg, eight);
  CHECK(artifact(a, "transfer.csv") == artifact(b, "transfer.csv"));
  const std::string csv = artifact(a, "transfer.csv");
  CHECK(csv.substr(0, csv.find('\n')) ==
        "n,m_novel,trial,err_transfer,err_scratch");
  // 2 m_novel values x 3 trials + header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("cmd_bounds: grid evaluation, error rows, empty grid") {
  const std::string text = R"(
[experiment]
kind = bounds
[bounds]
calculators = thm8_sizes thm15_dhn_upper thm16_dhn_lower
eps = 0.1
delta = 0.01
k = 2
W = 100
n = 1 10 100
b = 2
d = 3
l = 3
)";
  const auto cfg = Config::parse(text);
  const auto arts = bc::cmd_bounds(cfg, {});
  const std::string csv = artifact(arts, "bounds.csv");
  CHECK(csv.substr(0, csv.find('\n')) ==
        "name,inputs,values,vacuous,flags,error");
  // thm8 m_min nonincreasing over the n grid.
  std::vector<double> mmins;
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("thm8_sizes", 0) != 0) continue;
    const auto pos = line.find("m_min=");
    REQUIRE(pos != std::string::npos);
    mmins.push_back(std::stod(line.substr(pos + 6)));
  }
  REQUIRE(mmins.size() == 3);
  CHECK(mmins[0] > mmins[1]);
  CHECK(mmins[1] > mmins[2]);

  // d = 2 violates thm16's precondition: reported per-row, run continues.
  const std::string err_text = R"(
[experiment]
kind = bounds
[bounds]
calculators = thm16_dhn_lower
d = 2
l = 3
k = 2
n = 1
)";
  const auto errs = bc::cmd_bounds(Config::parse(err_text), {});
  CHECK(artifact(errs, "bounds.csv").find("thm16 requires d >= 3") !=
        std::string::npos);

  // Empty calculator list: header-only CSV.
  const auto empty = bc::cmd_bounds(
      Config::parse("[experiment]\nkind = bounds\n[bounds]\n"), {});
  CHECK(artifact(empty, "bounds.csv") ==
        "name,inputs,values,vacuous,flags,error\n");
}

TEST_CASE("cmd_dim: constants family report") {
  const std::string text = R"(
[experiment]
kind = dim
[family]
preset = constants
domain = 3
[dim]
n = 1 2 3
m = 1 2 3
)";
  const auto arts = bc::cmd_dim(Config::parse(text), {});
  const std::string csv = artifact(arts, "dim.csv");
  for (int n = 1; n <= 3; ++n)
    CHECK(csv.find("dhn,," + std::to_string(n) + ",,1,") != std::string::npos);
  CHECK(csv.find("fail") == std::string::npos);
  CHECK(csv.find("lemma10,,1,,,pass") != std::string::npos);
}

TEST_CASE("cmd_hard: opt column and determinism") {
  const auto cfg = Config::parse(kTinyHard);
  bc::RunOptions eight;
  eight.threads = 8;
  const auto a = bc::cmd_hard(cfg, {});
  const auto b = bc::cmd_hard(cfg, eight);
  CHECK(artifact(a, "hard.csv") == artifact(b, "hard.csv"));
  const std::string csv = artifact(a, "hard.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "m,trial,er_erm,opt,excess,pr_excess_gt_eps");
  int data_rows = 0;
  while (std::getline(lines, line)) {
    if (line.find("summary") != std::string::npos) continue;
    ++data_rows;
    // opt column is exactly 0.3 on every row.
    std::size_t c1 = line.find(',');
    c1 = line.find(',', c1 + 1);
    const std::size_t c2 = line.find(',', c1 + 1);
    const std::size_t c3 = line.find(',', c2 + 1);
    CHECK(line.substr(c2 + 1, c3 - c2 - 1) == "0.3");
  }
  CHECK(data_rows == 20);  // 2 m values x 10 trials
}

TEST_CASE("run: exit codes for config errors") {
  CHECK(bc::run({"bounds", "--config", "/nonexistent/x.cfg"}) ==
        bc::kExitConfigError);
}

TEST_CASE("cmd_hard: m = 0 mean excess is beta/2 within 3 stderr") {
  const std::string text = R"(
[experiment]
kind = hard
n = 2
beta = 0.4
epsilon = 0.05
trials = 200
seed = 9
[family]
preset = full
domain = 2
[sweep]
m = 0
)";
  const auto arts = bc::cmd_hard(Config::parse(text), {});
  std::istringstream lines(artifact(arts, "hard.csv"));
  std::string line;
  std::getline(lines, line);
  std::vector<double> excess;
  while (std::getline(lines, line)) {
    if (line.find("summary") != std::string::npos) continue;
    const auto last = line.find_last_of(',');
    const auto prev = line.find_last_of(',', last - 1);
    excess.push_back(std::stod(line.substr(prev + 1, last - prev - 1)));
  }
  REQUIRE(excess.size() == 200);
  double sum = 0, sum2 = 0;
  for (double v : excess) {
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / excess.size();
  const double se = std::sqrt((sum2 - excess.size() * mean * mean) /
                              (excess.size() - 1) / excess.size());
  // Random sign agreement: half the cells wrong in expectation.
  CHECK(std::abs(mean - 0.2) <= 3.0 * se);
}

TEST_CASE("cmd_transfer: mean err_transfer nonincreasing in m_novel") {
  const std::string text = R"(
[experiment]
kind = transfer
seed = 8
trials = 30
m_train = 10
mc_samples = 2000
features = oracle
[environment]
kind = shared-feature
d = 4
l = 3
k = 2
head_bound = 4
noise_std = 0.05
env_seed = 21
feature_scale = 2
[architecture]
d = 4
l = 3
k = 2
[train]
max_epochs = 800
[sweep]
n = 2
m_novel = 5 10 20 40
)";
  const auto arts = bc::cmd_transfer(Config::parse(text), {});
  std::istringstream lines(artifact(arts, "transfer.csv"));
  std::string line;
  std::getline(lines, line);
  std::map<int, std::vector<double>> by_m;
  while (std::getline(lines, line)) {
    std::vector<std::string> cols;
    std::istringstream ls(line);
    std::string col;
    while (std::getline(ls, col, ',')) cols.push_back(col);
    by_m[std::stoi(cols[1])].push_back(std::stod(cols[3]));
  }
  double prev_mean = 1e9, prev_se = 0.0;
  for (const auto& [m, v] : by_m) {
    double sum = 0, sum2 = 0;
    for (double x : v) {
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / v.size();
    const double se =
        std::sqrt((sum2 - v.size() * mean * mean) / (v.size() - 1) / v.size());
    CHECK(mean <= prev_mean + 3.0 * std::sqrt(se * se + prev_se * prev_se));
    prev_mean = mean;
    prev_se = se;
  }
}

TEST_CASE("run: resource caps exit with code 3") {
  const std::string cfg_path = "/tmp/biaslearn_test_capdim.cfg";
  {
    std::ofstream out(cfg_path);
    out << "[experiment]\nkind = dim\n[family]\npreset = constants\n"
           "domain = 7\n[dim]\nn = 1\nm = 1\n";
  }
  CHECK(bc::run({"dim", "--config", cfg_path, "--out",
                 "/tmp/biaslearn_test_capdim"}) == bc::kExitResourceCap);
}

TEST_CASE("cmd_curve: tau = 1 is a vacuous target, m_star = smallest m") {
  auto text = kTinyCurve;
  text.replace(text.find("tau = 0.9"), 9, "tau = 1");
  text.replace(text.find("n = 1 2"), 7, "n = 2");
  text.replace(text.find("m = 2 4"), 7, "m = 4");
  text.replace(text.find("seeds = 1 2"), 11, "seeds = 1");
  const auto arts = bc::cmd_curve(Config::parse(text), {});
  const std::string csv = artifact(arts, "curve.csv");
  CHECK(csv.find("2,1,4,") != std::string::npos);
}

TEST_CASE("run: malformed family file exits with the config-error code") {
  const std::string fam_path = "/tmp/biaslearn_test_badfam.txt";
  const std::string cfg_path = "/tmp/biaslearn_test_badfam.cfg";
  {
    std::ofstream fam(fam_path);
    fam << "domain 3\n+1 bogus +1\n";
    std::ofstream cfg(cfg_path);
    cfg << "[experiment]\nkind = dim\n[family]\nfile = " << fam_path
        << "\n[dim]\nn = 1\nm = 1\n";
  }
  CHECK(bc::run({"dim", "--config", cfg_path, "--out",
                 "/tmp/biaslearn_test_badfam"}) == bc::kExitConfigError);
}

TEST_CASE("cmd_dim: threshold family from config") {
  const std::string text = R"(
[experiment]
kind = dim
[family]
kind = threshold
d = 1
l = 1
k = 1
points = -1 0 1
[dim]
n = 1 2
m = 1 2 3
)";
  const auto arts = bc::cmd_dim(Config::parse(text), {});
  const std::string csv = artifact(arts, "dim.csv");
  CHECK(csv.find("fail") == std::string::npos);
  CHECK(csv.find("dhn,,1,,") != std::string::npos);
  // Exhaustive for d <= 2, so no subfamily note.
  CHECK(csv.find("subfamily") == std::string::npos);
}

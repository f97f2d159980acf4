#include "biaslearn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace biaslearn::bounds {
namespace {

constexpr double kE = 2.718281828459045235;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

long long to_ceiling(double x) {
  require(std::isfinite(x), "bound value is not finite");
  return static_cast<long long>(std::ceil(x));
}

// delta outside (0,1) is computed anyway but flagged: at the boundary the
// confidence statement is vacuous, beyond it the log term just goes negative.
void check_delta(double delta, BoundReport& r) {
  require(delta > 0.0, "delta must be positive");
  if (delta >= 1.0) r.flags.push_back("vacuous-delta");
  if (delta > 1.0) r.flags.push_back("invalid-delta");
}

void check_caps(const CapacityInputs& caps) {
  require(caps.log_cap_hstar >= 0.0 && caps.log_cap_hln >= 0.0 &&
              caps.log_cap_hl >= 0.0,
          "log-capacities must be nonnegative");
  require(caps.n >= 1, "caps.n must be >= 1");
}

}  // namespace

double BoundReport::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw std::out_of_range("no value named " + key);
}

bool BoundReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

double dnu(double nu, double x, double y) {
  require(nu > 0.0, "nu must be positive");
  require(x >= 0.0 && y >= 0.0, "dnu arguments must be nonnegative");
  return std::abs(x - y) / (x + y + nu);
}

BoundReport thm26_sizes(double alpha, double nu, double delta,
                        const CapacityInputs& caps) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  require(nu > 0.0, "nu must be positive");
  check_caps(caps);
  BoundReport r;
  r.name = "thm26_sizes";
  r.inputs = {{"alpha", alpha}, {"nu", nu}, {"delta", delta},
              {"log_cap_hstar", caps.log_cap_hstar},
              {"log_cap_hln", caps.log_cap_hln},
              {"n", static_cast<double>(caps.n)}};
  check_delta(delta, r);
  const double a2nu = alpha * alpha * nu;
  const double floor_term = 8.0 / a2nu;
  const double n_log = std::log(8.0) + caps.log_cap_hstar - std::log(delta);
  const double m_log = std::log(8.0) + caps.log_cap_hln - std::log(delta);
  const double n_min = std::max(32.0 / a2nu * n_log, floor_term);
  const double m_min = std::max(32.0 / (a2nu * caps.n) * m_log, floor_term);
  r.values = {{"n_min", static_cast<double>(to_ceiling(n_min))},
              {"m_min", static_cast<double>(to_ceiling(m_min))}};
  return r;
}

BoundReport thm2_sizes(double eps, double delta, const CapacityInputs& caps) {
  require(eps > 0.0 && eps < 1.0 + 1e-15, "eps must lie in (0,1]");
  check_caps(caps);
  BoundReport r;
  r.name = "thm2_sizes";
  r.inputs = {{"eps", eps}, {"delta", delta},
              {"log_cap_hstar", caps.log_cap_hstar},
              {"log_cap_hln", caps.log_cap_hln},
              {"n", static_cast<double>(caps.n)}};
  check_delta(delta, r);
  const double e2 = eps * eps;
  const double n_log = std::log(8.0) + caps.log_cap_hstar - std::log(delta);
  const double m_log = std::log(8.0) + caps.log_cap_hln - std::log(delta);
  const double n_min = std::max(256.0 / e2 * n_log, 64.0 / e2);
  const double m_min = std::max(256.0 / (caps.n * e2) * m_log, 64.0 / e2);
  r.values = {{"n_min", static_cast<double>(to_ceiling(n_min))},
              {"m_min", static_cast<double>(to_ceiling(m_min))}};
  return r;
}

long long thm3_m(double eps, double delta, double log_cap_hl,
                 BoundReport* report) {
  require(eps > 0.0 && eps < 1.0 + 1e-15, "eps must lie in (0,1]");
  require(log_cap_hl >= 0.0, "log-capacity must be nonnegative");
  BoundReport r;
  r.name = "thm3_m";
  r.inputs = {{"eps", eps}, {"delta", delta}, {"log_cap_hl", log_cap_hl}};
  check_delta(delta, r);
  const double e2 = eps * eps;
  const double m_log = std::log(4.0) + log_cap_hl - std::log(delta);
  const long long m = to_ceiling(std::max(64.0 / e2 * m_log, 16.0 / e2));
  r.values = {{"m_min", static_cast<double>(m)}};
  if (report) *report = r;
  return m;
}

long long thm4_m(double eps, double delta, int n, double log_cap_hln,
                 BoundReport* report) {
  require(eps > 0.0 && eps < 1.0 + 1e-15, "eps must lie in (0,1]");
  require(n >= 1, "n must be >= 1");
  require(log_cap_hln >= 0.0, "log-capacity must be nonnegative");
  BoundReport r;
  r.name = "thm4_m";
  r.inputs = {{"eps", eps}, {"delta", delta}, {"n", static_cast<double>(n)},
              {"log_cap_hln", log_cap_hln}};
  check_delta(delta, r);
  const double e2 = eps * eps;
  const double m_log = std::log(4.0) + log_cap_hln - std::log(delta);
  const long long m = to_ceiling(std::max(64.0 / (n * e2) * m_log, 16.0 / e2));
  r.values = {{"m_min", static_cast<double>(m)}};
  if (report) *report = r;
  return m;
}

NnCapacityLogs nn_capacity_logs(double eps, int k, int n, long long W,
                                double b) {
  require(b > 0.0, "Lipschitz product b must be positive");
  require(eps > 0.0, "eps must be positive");
  require(k >= 0 && n >= 1 && W >= 0, "k >= 0, n >= 1, W >= 0 required");
  const double kappa = 4.0 * kE * b;
  const double kappa_p = 4.0 * kE * b * b;
  NnCapacityLogs out{};
  double hln = 2.0 * (static_cast<double>(k + 1) * n + static_cast<double>(W)) *
               std::log(kappa / eps);
  double hstar = 2.0 * static_cast<double>(W) * std::log(kappa_p / eps);
  if (hln < 0.0) {
    hln = 0.0;
    out.clamped_hln = true;
  }
  if (hstar < 0.0) {
    hstar = 0.0;
    out.clamped_hstar = true;
  }
  out.log_cap_hln = hln;
  out.log_cap_hstar = hstar;
  return out;
}

BoundReport thm8_sizes(double eps, double delta, int k, long long W, int n,
                       double b) {
  require(eps > 0.0 && eps < 1.0 + 1e-15, "eps must lie in (0,1]");
  require(n >= 1, "n must be >= 1");
  const NnCapacityLogs logs = nn_capacity_logs(eps / 32.0, k, n, W, b);
  CapacityInputs caps;
  caps.log_cap_hstar = logs.log_cap_hstar;
  caps.log_cap_hln = logs.log_cap_hln;
  caps.n = n;
  BoundReport r = thm2_sizes(eps, delta, caps);
  r.name = "thm8_sizes";
  r.inputs = {{"eps", eps}, {"delta", delta}, {"k", static_cast<double>(k)},
              {"W", static_cast<double>(W)}, {"n", static_cast<double>(n)},
              {"b", b}};
  if (logs.clamped_hln || logs.clamped_hstar) r.flags.push_back("eps>=kappa");
  r.flags.push_back("constants-via-thm26");
  return r;
}

BoundReport thm12_prob(double eps, int n, int m, double growth_2m) {
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0,1]");
  require(growth_2m >= 1.0, "growth value must be >= 1");
  require(n >= 1 && m >= 1, "n, m must be >= 1");
  BoundReport r;
  r.name = "thm12_prob";
  r.inputs = {{"eps", eps}, {"n", static_cast<double>(n)},
              {"m", static_cast<double>(m)}, {"growth_2m", growth_2m}};
  const double p =
      4.0 * growth_2m *
      std::exp(-eps * eps * static_cast<double>(n) * m / 64.0);
  r.values = {{"prob", p}};
  r.vacuous = p >= 1.0;
  return r;
}

long long cor13_m(double eps, double delta, int n, int dhn,
                  BoundReport* report) {
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0,1]");
  require(n >= 1, "n must be >= 1");
  require(dhn >= 1, "dhn must be >= 1");
  BoundReport r;
  r.name = "cor13_m";
  r.inputs = {{"eps", eps}, {"delta", delta}, {"n", static_cast<double>(n)},
              {"dhn", static_cast<double>(dhn)}};
  check_delta(delta, r);
  const double v = 88.0 / (eps * eps) *
                   (2.0 * dhn * std::log(22.0 / eps) +
                    std::log(4.0 / delta) / static_cast<double>(n));
  const long long m = to_ceiling(v);
  r.values = {{"m_min", static_cast<double>(m)}};
  if (report) *report = r;
  return m;
}

double thm14_m_lower(double eps, double delta, int n, int dhn) {
  require(eps > 0.0 && eps < 1.0 / 64.0, "thm14 requires 0 < eps < 1/64");
  require(delta > 0.0 && delta < 1.0 / 64.0, "thm14 requires 0 < delta < 1/64");
  require(n >= 1, "n must be >= 1");
  require(dhn >= 1, "dhn must be >= 1");
  return (static_cast<double>(dhn) / 616.0 +
          (1.0 - eps * eps) *
              std::log(1.0 / (8.0 * delta * (1.0 - 2.0 * delta))) / n) /
         (eps * eps);
}

double thm15_dhn_upper(int d, int l, int k, int n) {
  require(d >= 1 && l >= 1 && k >= 1 && n >= 1, "d, l, k, n must be >= 1");
  const double W = static_cast<double>(parameter_count(d, l, k));
  return 2.0 * (W / n + k + 1) * std::log2(2.0 * kE * (k + l + 1));
}

double thm16_dhn_lower(int d, int l, int k, int n) {
  require(n >= 1, "n must be >= 1");
  require(d >= 3, "thm16 requires d >= 3");
  require(l >= k, "thm16 requires l >= k");
  require(k >= 1 && k <= d, "thm16 requires 1 <= k <= d");
  const auto W = static_cast<long long>(parameter_count(d, l, k));
  return 0.5 * static_cast<double>(W / (2 * n) + k + 1);
}

BoundReport realizable_sizes(double eps, double delta, double alpha,
                             const CapacityInputs& caps) {
  require(eps > 0.0, "eps must be positive");
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  check_caps(caps);
  BoundReport r;
  r.name = "realizable_sizes";
  r.inputs = {{"eps", eps}, {"delta", delta}, {"alpha", alpha},
              {"log_cap_hstar", caps.log_cap_hstar},
              {"log_cap_hln", caps.log_cap_hln},
              {"n", static_cast<double>(caps.n)}};
  check_delta(delta, r);
  const double denom = alpha * (1.0 - alpha) * eps;
  const double n_log = std::log(8.0) + caps.log_cap_hstar - std::log(delta);
  const double m_log = std::log(8.0) + caps.log_cap_hln - std::log(delta);
  const double n_min = std::max(32.0 / denom * n_log, 8.0 / denom);
  const double m_min = std::max(32.0 / (denom * caps.n) * m_log, 8.0 / denom);
  r.values = {{"n_min", static_cast<double>(to_ceiling(n_min))},
              {"m_min", static_cast<double>(to_ceiling(m_min))}};
  return r;
}

double lemma30_bound(long long m, double beta) {
  require(m >= 0, "m must be >= 0");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
  const double x = std::exp(-static_cast<double>(m) * beta * beta /
                            (1.0 - beta * beta));
  return 0.25 * (1.0 - std::sqrt(1.0 - x));
}

std::pair<long long, double> sauer(int m, int d) {
  require(m >= 0 && d >= 0, "m, d must be >= 0");
  // Exact binomial sum sum_{i=0}^{d} C(m, i).
  long long sum = 0;
  long long binom = 1;  // C(m, 0)
  for (int i = 0; i <= std::min(m, d); ++i) {
    sum += binom;
    binom = binom * (m - i) / (i + 1);
  }
  double upper = std::numeric_limits<double>::quiet_NaN();
  if (d >= 1 && m >= d)
    upper = std::pow(kE * m / static_cast<double>(d), static_cast<double>(d));
  return {sum, upper};
}

double bad_task_prob(double er_upper, double gamma) {
  require(er_upper >= 0.0, "error upper bound must be >= 0");
  require(gamma > 0.0, "gamma must be positive");
  return std::min(1.0, er_upper / gamma);
}

std::uint64_t parameter_count(int d, int l, int k) {
  require(d >= 1 && l >= 1 && k >= 1, "d, l, k must be >= 1");
  return static_cast<std::uint64_t>(l) * (d + 1) +
         static_cast<std::uint64_t>(k) * (l + 1);
}

}  // namespace biaslearn::bounds

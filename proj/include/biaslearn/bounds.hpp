#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace biaslearn::bounds {

// Log-capacity inputs for the sample-size calculators. Capacities of
// real-valued classes have no computable general oracle, so callers supply
// the natural-log capacity values (already evaluated at the argument each
// theorem prescribes). All log-capacities must be >= 0.
struct CapacityInputs {
  double log_cap_hstar = 0.0;  // log C(., H*)
  double log_cap_hln = 0.0;    // log C(., H_l^n)
  double log_cap_hl = 0.0;     // log C(., H_l)
  int n = 1;                   // task count entering the m bounds
};

struct BoundReport {
  std::string name;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> values;
  bool vacuous = false;               // probability bound >= 1
  std::vector<std::string> flags;     // e.g. "vacuous-delta", "eps>=kappa"

  double value(const std::string& key) const;
  bool has_flag(const std::string& f) const;
};

// Relative-deviation metric d_nu[x, y] = |x - y| / (x + y + nu) on R+.
double dnu(double nu, double x, double y);

// n and m lower bounds of the general uniform-convergence theorem,
// parameterized by (alpha, nu). Capacities are taken at alpha*nu/16.
BoundReport thm26_sizes(double alpha, double nu, double delta,
                        const CapacityInputs& caps);

// (eps, delta) specialization: alpha = eps/4, nu = 2, capacities at eps/32.
BoundReport thm2_sizes(double eps, double delta, const CapacityInputs& caps);

// Single-task sample size with a learnt hypothesis space; capacity at eps/16.
long long thm3_m(double eps, double delta, double log_cap_hl,
                 BoundReport* report = nullptr);

// n-task joint learning sample size; capacity at eps/16.
long long thm4_m(double eps, double delta, int n, double log_cap_hln,
                 BoundReport* report = nullptr);

// Neural-network capacity logs with kappa = 4eb, kappa' = 4eb^2 where b is
// the Lipschitz product of the feature/output classes. Negative bounds are
// clamped to zero and flagged.
struct NnCapacityLogs {
  double log_cap_hln;
  double log_cap_hstar;
  bool clamped_hln = false;
  bool clamped_hstar = false;
};
NnCapacityLogs nn_capacity_logs(double eps, int k, int n, long long W, double b);

// Fully instantiated (n, m) sizes for the sigmoid feature-learning family.
BoundReport thm8_sizes(double eps, double delta, int k, long long W, int n,
                       double b);

// Deviation-probability bound for Boolean families: 4 Pi exp(-eps^2 n m / 64).
BoundReport thm12_prob(double eps, int n, int m, double growth_2m);

// Examples-per-task upper bound from the Boolean dimension d_H(n).
long long cor13_m(double eps, double delta, int n, int dhn,
                  BoundReport* report = nullptr);

// Lower-bound threshold: training with m below this value fails on some
// environment. Valid only for 0 < eps < 1/64, 0 < delta < 1/64.
double thm14_m_lower(double eps, double delta, int n, int dhn);

// Upper / lower bounds on d_H(n) for linear threshold feature networks.
double thm15_dhn_upper(int d, int l, int k, int n);
double thm16_dhn_lower(int d, int l, int k, int n);

// Realizable-case (n, m) sizes (1/eps scaling); capacities at (1-alpha)eps/16.
// alpha = 1/2 maximizes alpha(1-alpha) and is the default.
BoundReport realizable_sizes(double eps, double delta, double alpha,
                             const CapacityInputs& caps);
inline BoundReport realizable_sizes(double eps, double delta,
                                    const CapacityInputs& caps) {
  return realizable_sizes(eps, delta, 0.5, caps);
}

// Misidentification probability floor from Slud's inequality.
double lemma30_bound(long long m, double beta);

// Sauer's lemma: exact binomial sum and the (em/d)^d upper form.
std::pair<long long, double> sauer(int m, int d);

// Markov tail on the probability of drawing a task with inf error >= gamma.
double bad_task_prob(double er_upper, double gamma);

std::uint64_t parameter_count(int d, int l, int k);

}  // namespace biaslearn::bounds

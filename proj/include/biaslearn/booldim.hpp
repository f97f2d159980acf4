#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace biaslearn::booldim {

// A Boolean function on a finite ordered domain, one +1/-1 entry per point.
using FuncVec = std::vector<std::int8_t>;

// Thrown when an enumeration would exceed the configured caps. Never a
// silent truncation.
class ResourceCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumCaps {
  int max_domain = 6;
  int max_n = 3;
  int max_m = 4;
  // Guard on enumerated candidate behaviors in threshold-family search.
  long long max_behaviors = 500000;
};

struct BooleanClass {
  int domain_size = 0;
  std::vector<FuncVec> functions;  // sorted, unique, nonempty
};

struct BooleanFamily {
  int domain_size = 0;
  std::vector<BooleanClass> spaces;
  // Set when produced by randomized weight search: dimensions computed from
  // it are lower estimates for the full threshold family.
  bool subfamily = false;
};

// Validating constructors.
BooleanClass make_class(int domain_size, std::vector<FuncVec> functions);
BooleanFamily make_family(std::vector<BooleanClass> spaces);

// Worked small classes used throughout the tests.
BooleanClass constants_class(int domain_size);
BooleanClass full_class(int domain_size);
BooleanClass singleton_class(int domain_size, std::int8_t sign);

// H|x for a point tuple (repetitions allowed), deduplicated.
std::set<FuncVec> restrict_class(const BooleanClass& cls,
                                 const std::vector<int>& xs);

// Exact VC dimension by exhaustive subset search.
int vcdim(const BooleanClass& cls, const EnumCaps& caps = {});

// Growth function Pi_H(m): max over m-tuples (with repetition) of |H|x|.
long long growth_single(const BooleanClass& cls, int m,
                        const EnumCaps& caps = {});

// Family restriction to an n x m matrix of domain points: the exact set of
// sign matrices realizable with all n row functions from one member space.
std::set<std::vector<FuncVec>> family_restrict(
    const BooleanFamily& fam, const std::vector<std::vector<int>>& x,
    const EnumCaps& caps = {});

// Multi-task growth function Pi_H(n, m), exact.
long long growth_family(const BooleanFamily& fam, int n, int m,
                        const EnumCaps& caps = {});

// d_H(n) by scanning m = 1..m_cap; 0 when no m >= 1 is shattered.
int dhn(const BooleanFamily& fam, int n, int m_cap, const EnumCaps& caps = {});

// A witness matrix (rows of point indices) shattered by the family, if any.
std::optional<std::vector<std::vector<int>>> find_shattered_matrix(
    const BooleanFamily& fam, int n, int m, const EnumCaps& caps = {});

// (dbar, dunder) = (VCdim of the deduplicated union, max VCdim of a member).
std::pair<int, int> family_dims(const BooleanFamily& fam,
                                const EnumCaps& caps = {});

// Lemma checks used by the dim report and the oracle suites. Both return
// true when the inequality holds (lemma11 is vacuous for dhn = 0).
bool lemma10_holds(const BooleanFamily& fam, int n, const EnumCaps& caps = {});
bool lemma11_holds(const BooleanFamily& fam, int n, int m,
                   const EnumCaps& caps = {});

// All sign patterns realizable on the given points by a single linear
// threshold unit sgn(w.x + b) with sgn(0) = +1. Exact: a pattern s is
// realizable iff the origin is outside conv{s_i (p_i, 1)} (Gordan), which
// enumerates exactly the cells of the homogeneous hyperplane arrangement.
std::vector<FuncVec> threshold_dichotomies(
    const std::vector<Eigen::VectorXd>& points);

struct ThresholdEnumOptions {
  EnumCaps caps;
  long long random_samples = 20000;  // d >= 3 randomized search budget
  std::uint64_t seed = 0;
};

// The linear-threshold-network family of the given architecture restricted
// to the domain points: one space per distinct feature-map behavior, whose
// functions are all thresholded head behaviors on that feature output.
// Exhaustive for d <= 2; randomized weight search (certified subfamily) for
// d >= 3.
BooleanFamily enumerate_threshold_family(int d, int l, int k,
                                         const std::vector<Eigen::VectorXd>& points,
                                         const ThresholdEnumOptions& opts = {});

// Plain-text family format: "domain <q>" header, one +1/-1 row per function,
// spaces separated by blank lines.
std::string family_to_text(const BooleanFamily& fam);
BooleanFamily family_from_text(const std::string& text);

}  // namespace biaslearn::booldim

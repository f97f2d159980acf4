#include "biaslearn/booldim.hpp"

#include "biaslearn/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace biaslearn::booldim {
namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_caps(const BooleanFamily& fam, int n, int m, const EnumCaps& caps) {
  if (fam.domain_size > caps.max_domain || fam.domain_size > 16)
    throw ResourceCapError("domain size " + std::to_string(fam.domain_size) +
                           " exceeds cap " +
                           std::to_string(std::min(caps.max_domain, 16)));
  if (n > caps.max_n)
    throw ResourceCapError("n = " + std::to_string(n) + " exceeds cap " +
                           std::to_string(caps.max_n));
  if (m > caps.max_m || m > 5)
    throw ResourceCapError("m = " + std::to_string(m) + " exceeds cap " +
                           std::to_string(std::min(caps.max_m, 5)));
  if (static_cast<long long>(n) * m > 62)
    throw ResourceCapError("n*m too large for exact sign-matrix counting");
}

// Function vector as a bitmask: bit p set iff the function is +1 at point p.
std::uint32_t to_mask(const FuncVec& f) {
  std::uint32_t mask = 0;
  for (std::size_t p = 0; p < f.size(); ++p)
    if (f[p] > 0) mask |= 1u << p;
  return mask;
}

FuncVec from_mask(std::uint32_t mask, int q) {
  FuncVec f(q);
  for (int p = 0; p < q; ++p) f[p] = (mask >> p) & 1u ? 1 : -1;
  return f;
}

std::vector<std::uint32_t> class_masks(const BooleanClass& cls) {
  std::vector<std::uint32_t> masks;
  masks.reserve(cls.functions.size());
  for (const auto& f : cls.functions) masks.push_back(to_mask(f));
  return masks;
}

// All nondecreasing m-tuples over {0..q-1}. Within-row order and row order
// never change |H|x|, so canonical tuples suffice for maxima and witnesses.
// Memoized: the tables are tiny and requested millions of times by
// exhaustive family sweeps.
const std::vector<std::vector<int>>& sorted_tuples(int q, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>,
                  std::unique_ptr<std::vector<std::vector<int>>>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{q, m}];
  if (!slot) {
    slot = std::make_unique<std::vector<std::vector<int>>>();
    std::vector<int> cur(m);
    auto rec = [&](auto&& self, int pos, int lo) -> void {
      if (pos == m) {
        slot->push_back(cur);
        return;
      }
      for (int p = lo; p < q; ++p) {
        cur[pos] = p;
        self(self, pos + 1, p);
      }
    };
    if (m == 0)
      slot->push_back({});
    else
      rec(rec, 0, 0);
  }
  return *slot;
}

// Restriction of one function mask to a tuple: the m-bit pattern index.
std::uint32_t pattern_of(std::uint32_t fmask, const std::vector<int>& tuple) {
  std::uint32_t pat = 0;
  for (std::size_t j = 0; j < tuple.size(); ++j)
    if ((fmask >> tuple[j]) & 1u) pat |= 1u << j;
  return pat;
}

// Pattern-set bitmask (over 2^m patterns) of a space on a tuple.
std::uint32_t restriction_set(const std::vector<std::uint32_t>& masks,
                              const std::vector<int>& tuple) {
  std::uint32_t set = 0;
  for (std::uint32_t f : masks) set |= 1u << pattern_of(f, tuple);
  return set;
}

struct FamilyTables {
  int q = 0;
  int spaces = 0;
  const std::vector<std::vector<int>>* tuples = nullptr;  // sorted m-tuples
  // sets[t * spaces + s] = pattern-set bitmask of space s on tuple t
  std::vector<std::uint32_t> sets;
};

FamilyTables build_tables(const BooleanFamily& fam, int m) {
  FamilyTables tb;
  tb.q = fam.domain_size;
  tb.spaces = static_cast<int>(fam.spaces.size());
  tb.tuples = &sorted_tuples(tb.q, m);
  tb.sets.resize(tb.tuples->size() * tb.spaces);
  std::vector<std::uint32_t> masks;
  for (int s = 0; s < tb.spaces; ++s) {
    masks.clear();
    for (const auto& f : fam.spaces[s].functions) masks.push_back(to_mask(f));
    for (std::size_t t = 0; t < tb.tuples->size(); ++t)
      tb.sets[t * tb.spaces + s] = restriction_set(masks, (*tb.tuples)[t]);
  }
  return tb;
}

// Visit every canonical matrix (nondecreasing tuple indices across rows).
template <typename Fn>
void for_each_matrix(std::size_t tuple_count, int n, Fn&& fn) {
  std::vector<int> rows(n);
  auto rec = [&](auto&& self, int pos, int lo) -> bool {
    if (pos == n) return fn(rows);
    for (int t = lo; t < static_cast<int>(tuple_count); ++t) {
      rows[pos] = t;
      if (!self(self, pos + 1, t)) return false;
    }
    return true;
  };
  rec(rec, 0, 0);
}

// |union over spaces of products of per-row pattern sets| by inclusion-
// exclusion: the intersection of product sets is the product of per-row
// intersections.
long long count_matrix(const FamilyTables& tb, const std::vector<int>& rows) {
  const int s = tb.spaces;
  const int n = static_cast<int>(rows.size());
  long long total = 0;
  for (std::uint32_t sub = 1; sub < (1u << s); ++sub) {
    long long prod = 1;
    for (int i = 0; i < n && prod > 0; ++i) {
      const std::uint32_t* row_sets = &tb.sets[rows[i] * s];
      std::uint32_t inter = 0xFFFFFFFFu;
      for (std::uint32_t rest = sub; rest != 0; rest &= rest - 1)
        inter &= row_sets[std::countr_zero(rest)];
      prod *= std::popcount(inter);
    }
    total += (std::popcount(sub) % 2 == 1) ? prod : -prod;
  }
  return total;
}

int vcdim_masks(const std::vector<std::uint32_t>& masks, int q) {
  int best = 0;
  int pts[16];
  for (std::uint32_t sub = 1; sub < (1u << q); ++sub) {
    const int size = std::popcount(sub);
    if (size <= best) continue;
    if ((1ull << size) > masks.size()) continue;  // too few functions to shatter
    // Project every function onto the subset's points.
    int np = 0;
    for (int p = 0; p < q; ++p)
      if ((sub >> p) & 1u) pts[np++] = p;
    if (size <= 6) {
      std::uint64_t seen = 0;
      for (std::uint32_t f : masks) {
        std::uint32_t pat = 0;
        for (int j = 0; j < np; ++j)
          if ((f >> pts[j]) & 1u) pat |= 1u << j;
        seen |= 1ull << pat;
      }
      if (std::popcount(seen) == (1 << size)) best = size;
    } else {
      std::vector<std::uint64_t> seen(((1u << size) + 63) / 64, 0);
      int count = 0;
      for (std::uint32_t f : masks) {
        std::uint32_t pat = 0;
        for (int j = 0; j < np; ++j)
          if ((f >> pts[j]) & 1u) pat |= 1u << j;
        if (!((seen[pat >> 6] >> (pat & 63)) & 1ull)) {
          seen[pat >> 6] |= 1ull << (pat & 63);
          ++count;
        }
      }
      if (count == (1 << size)) best = size;
    }
  }
  return best;
}

}  // namespace

BooleanClass make_class(int domain_size, std::vector<FuncVec> functions) {
  require(domain_size >= 1, "domain must be nonempty");
  require(!functions.empty(), "class must be nonempty");
  for (const auto& f : functions) {
    require(static_cast<int>(f.size()) == domain_size,
            "function length must equal domain size");
    for (auto v : f) require(v == 1 || v == -1, "entries must be +1 or -1");
  }
  std::sort(functions.begin(), functions.end());
  functions.erase(std::unique(functions.begin(), functions.end()),
                  functions.end());
  return BooleanClass{domain_size, std::move(functions)};
}

BooleanFamily make_family(std::vector<BooleanClass> spaces) {
  require(!spaces.empty(), "family must be nonempty");
  const int q = spaces.front().domain_size;
  for (const auto& sp : spaces)
    require(sp.domain_size == q, "all spaces must share the domain");
  return BooleanFamily{q, std::move(spaces), false};
}

BooleanClass constants_class(int q) {
  return make_class(q, {FuncVec(q, 1), FuncVec(q, -1)});
}

BooleanClass full_class(int q) {
  require(q <= 16, "full class only built for small domains");
  std::vector<FuncVec> fs;
  for (std::uint32_t mask = 0; mask < (1u << q); ++mask)
    fs.push_back(from_mask(mask, q));
  return make_class(q, std::move(fs));
}

BooleanClass singleton_class(int q, std::int8_t sign) {
  return make_class(q, {FuncVec(q, sign)});
}

std::set<FuncVec> restrict_class(const BooleanClass& cls,
                                 const std::vector<int>& xs) {
  for (int p : xs)
    require(p >= 0 && p < cls.domain_size, "point outside the domain");
  std::set<FuncVec> out;
  for (const auto& f : cls.functions) {
    FuncVec pat(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) pat[j] = f[xs[j]];
    out.insert(std::move(pat));
  }
  return out;
}

int vcdim(const BooleanClass& cls, const EnumCaps& caps) {
  if (cls.domain_size > caps.max_domain || cls.domain_size > 16)
    throw ResourceCapError("domain size exceeds cap in vcdim");
  return vcdim_masks(class_masks(cls), cls.domain_size);
}

long long growth_single(const BooleanClass& cls, int m, const EnumCaps& caps) {
  require(m >= 0, "m must be >= 0");
  if (cls.domain_size > caps.max_domain || cls.domain_size > 16 ||
      m > caps.max_m || m > 5)
    throw ResourceCapError("growth_single arguments exceed caps");
  if (m == 0) return 1;
  const auto masks = class_masks(cls);
  long long best = 0;
  for (const auto& t : sorted_tuples(cls.domain_size, m))
    best = std::max<long long>(best, std::popcount(restriction_set(masks, t)));
  return best;
}

std::set<std::vector<FuncVec>> family_restrict(
    const BooleanFamily& fam, const std::vector<std::vector<int>>& x,
    const EnumCaps& caps) {
  require(!x.empty(), "matrix must have at least one row");
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(x.front().size());
  for (const auto& row : x) {
    require(static_cast<int>(row.size()) == m, "ragged matrix");
    for (int p : row)
      require(p >= 0 && p < fam.domain_size, "point outside the domain");
  }
  check_caps(fam, n, m, caps);

  std::set<std::vector<FuncVec>> out;
  for (const auto& sp : fam.spaces) {
    // Per-row restriction sets; their cartesian product is H|x.
    std::vector<std::vector<FuncVec>> row_sets;
    for (const auto& row : x) {
      auto s = restrict_class(sp, row);
      row_sets.emplace_back(s.begin(), s.end());
    }
    std::vector<FuncVec> mat(n);
    auto rec = [&](auto&& self, int i) -> void {
      if (i == n) {
        out.insert(mat);
        return;
      }
      for (const auto& pat : row_sets[i]) {
        mat[i] = pat;
        self(self, i + 1);
      }
    };
    rec(rec, 0);
  }
  return out;
}

long long growth_family(const BooleanFamily& fam, int n, int m,
                        const EnumCaps& caps) {
  require(n >= 1 && m >= 1, "n, m must be >= 1");
  require(fam.spaces.size() <= 16,
          "growth_family supports at most 16 spaces");
  check_caps(fam, n, m, caps);
  const FamilyTables tb = build_tables(fam, m);
  long long best = 0;
  for_each_matrix(tb.tuples->size(), n, [&](const std::vector<int>& rows) {
    best = std::max(best, count_matrix(tb, rows));
    return true;
  });
  return best;
}

std::optional<std::vector<std::vector<int>>> find_shattered_matrix(
    const BooleanFamily& fam, int n, int m, const EnumCaps& caps) {
  require(n >= 1 && m >= 1, "n, m must be >= 1");
  require(fam.spaces.size() <= 16,
          "shattering search supports at most 16 spaces");
  check_caps(fam, n, m, caps);
  const FamilyTables tb = build_tables(fam, m);
  const long long full = 1LL << (n * m);
  const std::uint32_t full_row =
      (m == 5) ? 0xFFFFFFFFu : ((1u << (1 << m)) - 1u);

  // A shattered matrix can only use tuples whose union restriction is full.
  std::vector<int> candidates;
  for (std::size_t t = 0; t < tb.tuples->size(); ++t) {
    std::uint32_t u = 0;
    for (int s = 0; s < tb.spaces; ++s) u |= tb.sets[t * tb.spaces + s];
    if (u == full_row) candidates.push_back(static_cast<int>(t));
  }

  std::optional<std::vector<std::vector<int>>> witness;
  std::vector<int> real_rows(n);
  for_each_matrix(candidates.size(), n, [&](const std::vector<int>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      real_rows[i] = candidates[rows[i]];
    if (count_matrix(tb, real_rows) == full) {
      std::vector<std::vector<int>> w;
      for (int t : real_rows) w.push_back((*tb.tuples)[t]);
      witness = std::move(w);
      return false;  // stop
    }
    return true;
  });
  return witness;
}

int dhn(const BooleanFamily& fam, int n, int m_cap, const EnumCaps& caps) {
  require(m_cap >= 1, "m_cap must be >= 1");
  int best = 0;
  for (int m = 1; m <= m_cap; ++m) {
    if (find_shattered_matrix(fam, n, m, caps).has_value())
      best = m;
    else
      break;  // shattering is monotone in m
  }
  return best;
}

std::pair<int, int> family_dims(const BooleanFamily& fam,
                                const EnumCaps& caps) {
  if (fam.domain_size > caps.max_domain || fam.domain_size > 16)
    throw ResourceCapError("domain size exceeds cap in family_dims");
  std::vector<std::uint32_t> union_masks;
  int dunder = 0;
  for (const auto& sp : fam.spaces) {
    auto masks = class_masks(sp);
    dunder = std::max(dunder, vcdim_masks(masks, fam.domain_size));
    union_masks.insert(union_masks.end(), masks.begin(), masks.end());
  }
  std::sort(union_masks.begin(), union_masks.end());
  union_masks.erase(std::unique(union_masks.begin(), union_masks.end()),
                    union_masks.end());
  const int dbar = vcdim_masks(union_masks, fam.domain_size);
  return {dbar, dunder};
}

namespace {

// Exact d_H(n): scanning to the domain size is exact because a shattered
// row needs distinct points. When the pattern-mask ceiling truncates the
// scan before the value is pinned down, refuse rather than mislead.
int dhn_exact(const BooleanFamily& fam, int n, const EnumCaps& caps) {
  EnumCaps wide = caps;
  wide.max_m = std::max(wide.max_m, std::min(fam.domain_size, 5));
  const int cap = std::min(fam.domain_size, 5);
  const int d = dhn(fam, n, cap, wide);
  if (d == cap && cap < fam.domain_size)
    throw ResourceCapError("d_H(n) may exceed the exact scanning ceiling");
  return d;
}

}  // namespace

bool lemma10_holds(const BooleanFamily& fam, int n, const EnumCaps& caps) {
  const auto [dbar, dunder] = family_dims(fam, caps);
  return dhn_exact(fam, n, caps) >= std::max(dbar / n, dunder);
}

bool lemma11_holds(const BooleanFamily& fam, int n, int m,
                   const EnumCaps& caps) {
  const int d = dhn_exact(fam, n, caps);
  if (d == 0) return true;  // exponent degenerates; nothing to check
  if (m < std::max(d, 1)) return true;
  const long long growth = growth_family(fam, n, m, caps);
  const double bound = std::pow(2.718281828459045235 * m / d,
                                static_cast<double>(n) * d);
  return static_cast<double>(growth) <= bound * (1.0 + 1e-12);
}

// ---------------------------------------------------------------------------
// Linear threshold enumeration.

namespace {

// Is the origin inside conv(V)? By Caratheodory it suffices to find an
// affinely independent subset whose (unique) barycentric solve is
// nonnegative, so scanning all subsets with a least-squares solve decides
// membership up to the tolerance.
bool origin_in_convex_hull(const std::vector<Eigen::VectorXd>& v) {
  const int q = static_cast<int>(v.size());
  const int e = static_cast<int>(v.front().size());
  double scale = 1.0;
  for (const auto& p : v) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  const double tol = 1e-9 * scale;
  for (std::uint32_t sub = 1; sub < (1u << q); ++sub) {
    const int size = std::popcount(sub);
    Eigen::MatrixXd a(e + 1, size);
    int col = 0;
    for (int i = 0; i < q; ++i)
      if ((sub >> i) & 1u) {
        a.col(col).head(e) = v[i];
        a(e, col) = 1.0;
        ++col;
      }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(e + 1);
    rhs(e) = 1.0;
    Eigen::VectorXd lambda = a.colPivHouseholderQr().solve(rhs);
    if ((a * lambda - rhs).lpNorm<Eigen::Infinity>() > tol) continue;
    if (lambda.minCoeff() >= -tol) return true;
  }
  return false;
}

std::vector<Eigen::VectorXd> homogenize(
    const std::vector<Eigen::VectorXd>& points) {
  std::vector<Eigen::VectorXd> v;
  v.reserve(points.size());
  for (const auto& p : points) {
    Eigen::VectorXd h(p.size() + 1);
    h.head(p.size()) = p;
    h(p.size()) = 1.0;
    v.push_back(std::move(h));
  }
  return v;
}

std::int8_t hard_sign(double x) { return x >= 0.0 ? 1 : -1; }

}  // namespace

std::vector<FuncVec> threshold_dichotomies(
    const std::vector<Eigen::VectorXd>& points) {
  require(!points.empty(), "need at least one point");
  require(points.size() <= 16, "too many points for dichotomy enumeration");
  const int q = static_cast<int>(points.size());
  const auto hom = homogenize(points);
  std::vector<FuncVec> out;
  for (std::uint32_t s = 0; s < (1u << q); ++s) {
    std::vector<Eigen::VectorXd> signed_pts(hom);
    for (int i = 0; i < q; ++i)
      if (!((s >> i) & 1u)) signed_pts[i] = -signed_pts[i];
    if (!origin_in_convex_hull(signed_pts)) out.push_back(from_mask(s, q));
  }
  return out;
}

namespace {

// Behaviors of one layer: for every unit-behavior tuple over `unit`, the
// matrix of outputs (q points -> width-sized sign vectors), as columns.
using Behavior = std::vector<FuncVec>;  // width entries, each of length q

std::vector<Eigen::VectorXd> behavior_images(const Behavior& b, int q) {
  std::vector<Eigen::VectorXd> imgs(q, Eigen::VectorXd(b.size()));
  for (std::size_t u = 0; u < b.size(); ++u)
    for (int p = 0; p < q; ++p) imgs[p](u) = b[u][p];
  return imgs;
}

std::string behavior_key(const Behavior& b) {
  std::string key;
  for (const auto& f : b)
    for (auto v : f) key.push_back(v > 0 ? '+' : '-');
  return key;
}

}  // namespace

BooleanFamily enumerate_threshold_family(int d, int l, int k,
                                         const std::vector<Eigen::VectorXd>& points,
                                         const ThresholdEnumOptions& opts) {
  require(d >= 1 && l >= 1 && k >= 1, "d, l, k must be >= 1");
  require(!points.empty(), "need domain points");
  for (const auto& p : points)
    require(static_cast<int>(p.size()) == d, "point dimension mismatch");
  if (static_cast<int>(points.size()) > opts.caps.max_domain)
    throw ResourceCapError("domain size exceeds cap");
  const int q = static_cast<int>(points.size());

  // Distinct feature-map behaviors on the domain.
  std::map<std::string, Behavior> phi_behaviors;
  long long budget = opts.caps.max_behaviors;
  auto charge = [&budget](long long units) {
    budget -= units;
    if (budget < 0)
      throw ResourceCapError(
          "threshold enumeration exceeds the behavior budget");
  };

  if (d <= 2) {
    const auto t1 = threshold_dichotomies(points);
    // All l-tuples of first-layer unit behaviors.
    std::vector<std::size_t> idx(l, 0);
    // Cache second-layer dichotomies per first-layer behavior image.
    std::map<std::string, std::vector<FuncVec>> t2_cache;
    while (true) {
      charge(1);
      Behavior h(l);
      for (int u = 0; u < l; ++u) h[u] = t1[idx[u]];
      const auto imgs = behavior_images(h, q);
      auto [it, fresh] = t2_cache.try_emplace(behavior_key(h));
      if (fresh) it->second = threshold_dichotomies(imgs);
      const auto& t2 = it->second;
      std::vector<std::size_t> jdx(k, 0);
      while (true) {
        charge(1);
        Behavior phi(k);
        for (int u = 0; u < k; ++u) phi[u] = t2[jdx[u]];
        phi_behaviors.try_emplace(behavior_key(phi), phi);
        int pos = k - 1;
        while (pos >= 0 && ++jdx[pos] == t2.size()) jdx[pos--] = 0;
        if (pos < 0) break;
      }
      int pos = l - 1;
      while (pos >= 0 && ++idx[pos] == t1.size()) idx[pos--] = 0;
      if (pos < 0) break;
    }
  } else {
    SplitRng rng(opts.seed);
    const double scales[] = {0.25, 1.0, 4.0, 16.0};
    for (long long s = 0; s < opts.random_samples; ++s) {
      const double scale = scales[s % 4];
      Eigen::MatrixXd u(l, d + 1), v(k, l + 1);
      for (int i = 0; i < l; ++i)
        for (int j = 0; j <= d; ++j) u(i, j) = rng.normal() * scale;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j <= l; ++j) v(i, j) = rng.normal() * scale;
      Behavior phi(k, FuncVec(q));
      for (int p = 0; p < q; ++p) {
        Eigen::VectorXd x1(d + 1);
        x1.head(d) = points[p];
        x1(d) = 1.0;
        Eigen::VectorXd h1 = (u * x1).unaryExpr(
            [](double z) { return z >= 0.0 ? 1.0 : -1.0; });
        Eigen::VectorXd h1a(l + 1);
        h1a.head(l) = h1;
        h1a(l) = 1.0;
        Eigen::VectorXd h2 = v * h1a;
        for (int i = 0; i < k; ++i) phi[i][p] = hard_sign(h2(i));
      }
      phi_behaviors.try_emplace(behavior_key(phi), phi);
    }
  }

  // One space per feature behavior: all thresholded head behaviors on the
  // feature outputs. Deduplicate identical spaces.
  std::set<std::vector<FuncVec>> seen;
  std::vector<BooleanClass> spaces;
  for (const auto& [key, phi] : phi_behaviors) {
    charge(1);
    const auto imgs = behavior_images(phi, q);
    auto funcs = threshold_dichotomies(imgs);
    auto cls = make_class(q, std::move(funcs));
    if (seen.insert(cls.functions).second) spaces.push_back(std::move(cls));
  }
  BooleanFamily fam = make_family(std::move(spaces));
  fam.subfamily = d > 2;
  return fam;
}

// ---------------------------------------------------------------------------
// Plain-text serialization.

std::string family_to_text(const BooleanFamily& fam) {
  std::ostringstream out;
  out << "domain " << fam.domain_size << "\n";
  for (std::size_t s = 0; s < fam.spaces.size(); ++s) {
    if (s > 0) out << "\n";
    for (const auto& f : fam.spaces[s].functions) {
      for (std::size_t p = 0; p < f.size(); ++p) {
        if (p > 0) out << ' ';
        out << (f[p] > 0 ? "+1" : "-1");
      }
      out << "\n";
    }
  }
  return out.str();
}

BooleanFamily family_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto fail = [&line_no](const std::string& msg) {
    throw std::invalid_argument("family parse error at line " +
                                std::to_string(line_no) + ": " + msg);
  };

  int q = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word != "domain") fail("expected 'domain <size>' header");
    if (!(ls >> q) || q < 1) fail("bad domain size");
    break;
  }
  if (q < 0) fail("missing domain header");

  std::vector<BooleanClass> spaces;
  std::vector<FuncVec> current;
  auto flush = [&]() {
    if (!current.empty()) {
      spaces.push_back(make_class(q, std::move(current)));
      current.clear();
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream ls(line);
    FuncVec f;
    std::string tok;
    while (ls >> tok) {
      if (tok == "+1")
        f.push_back(1);
      else if (tok == "-1")
        f.push_back(-1);
      else
        fail("expected +1 or -1, got '" + tok + "'");
    }
    if (static_cast<int>(f.size()) != q)
      fail("function has " + std::to_string(f.size()) + " entries, domain is " +
           std::to_string(q));
    current.push_back(std::move(f));
  }
  flush();
  if (spaces.empty()) fail("family has no spaces");
  return make_family(std::move(spaces));
}

}  // namespace biaslearn::booldim

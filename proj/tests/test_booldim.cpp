#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "biaslearn/booldim.hpp"
#include "biaslearn/bounds.hpp"

using namespace biaslearn;
namespace bl = biaslearn::booldim;

namespace {

bl::BooleanFamily two_singleton(int q) {
  return bl::make_family(
      {bl::singleton_class(q, 1), bl::singleton_class(q, -1)});
}

Eigen::VectorXd pt1(double x) {
  Eigen::VectorXd p(1);
  p(0) = x;
  return p;
}

}  // namespace

TEST_CASE("restrict_class: worked cases") {
  const auto full2 = bl::full_class(2);
  CHECK(bl::restrict_class(full2, {0, 1}).size() == 4);
  const auto consts = bl::constants_class(3);
  const auto r = bl::restrict_class(consts, {0, 2});
  CHECK(r.size() == 2);
  CHECK(r.count({1, 1}) == 1);
  CHECK(r.count({-1, -1}) == 1);
  // Empty tuple restricts to the single empty vector.
  CHECK(bl::restrict_class(consts, {}).size() == 1);
  CHECK_THROWS_AS(bl::restrict_class(consts, {3}), std::invalid_argument);
}

TEST_CASE("vcdim: worked cases") {
  CHECK(bl::vcdim(bl::constants_class(3)) == 1);
  CHECK(bl::vcdim(bl::singleton_class(3, 1)) == 0);
  CHECK(bl::vcdim(bl::full_class(2)) == 2);
  CHECK(bl::vcdim(bl::full_class(4)) == 4);
  bl::EnumCaps small;
  small.max_domain = 2;
  CHECK_THROWS_AS(bl::vcdim(bl::constants_class(3), small),
                  bl::ResourceCapError);
}

TEST_CASE("growth_single: worked cases and Sauer consistency") {
  CHECK(bl::growth_single(bl::full_class(2), 2) == 4);
  for (int m = 1; m <= 4; ++m)
    CHECK(bl::growth_single(bl::constants_class(3), m) == 2);
  // Pi_H(m) <= binomial sum at d = vcdim for a few explicit classes.
  const auto classes = {bl::constants_class(3), bl::full_class(3),
                        bl::make_class(3, {{1, 1, -1}, {1, -1, 1}, {-1, 1, 1},
                                           {1, 1, 1}})};
  for (const auto& cls : classes) {
    const int d = bl::vcdim(cls);
    for (int m = std::max(1, d); m <= 4; ++m)
      CHECK(bl::growth_single(cls, m) <=
            bounds::sauer(m, d).first);
  }
}

TEST_CASE("family_restrict: worked cases") {
  const auto full2 = bl::make_family({bl::full_class(2)});
  CHECK(bl::family_restrict(full2, {{0, 1}}).size() == 4);

  const auto two = two_singleton(2);
  CHECK(bl::family_restrict(two, {{0, 1}, {1, 0}}).size() == 2);

  const auto consts = bl::make_family({bl::constants_class(2)});
  // n = 2, m = 1: rows pick h_1, h_2 independently -> 4 matrices.
  CHECK(bl::family_restrict(consts, {{0}, {1}}).size() == 4);

  // Adding a space never shrinks the restriction.
  const auto merged = bl::make_family(
      {bl::constants_class(2), bl::full_class(2)});
  CHECK(bl::family_restrict(merged, {{0}, {1}}).size() >=
        bl::family_restrict(consts, {{0}, {1}}).size());
}

TEST_CASE("growth_family: worked cases") {
  const auto two = two_singleton(3);
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m)
      CHECK(bl::growth_family(two, n, m) == 2);

  const auto consts = bl::make_family({bl::constants_class(3)});
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 3; ++m) {
      CHECK(bl::growth_family(consts, n, m) == (1 << n));
      CHECK(bl::growth_family(consts, n, m) <= (1LL << (n * m)));
    }
}

TEST_CASE("dhn: worked families") {
  const auto full2 = bl::make_family({bl::full_class(2)});
  for (int n = 1; n <= 3; ++n) CHECK(bl::dhn(full2, n, 2) == 2);

  const auto consts = bl::make_family({bl::constants_class(3)});
  for (int n = 1; n <= 3; ++n) CHECK(bl::dhn(consts, n, 3) == 1);

  const auto two = two_singleton(3);
  CHECK(bl::dhn(two, 1, 3) == 1);
  CHECK(bl::dhn(two, 2, 3) == 0);
}

TEST_CASE("family_dims: worked families") {
  const auto two = two_singleton(3);
  const auto [dbar, dunder] = bl::family_dims(two);
  CHECK(dbar == 1);
  CHECK(dunder == 0);

  const auto single = bl::make_family({bl::full_class(2)});
  const auto [b2, u2] = bl::family_dims(single);
  CHECK(b2 == u2);
}

TEST_CASE("lemma checks on the worked families") {
  for (const auto& fam :
       {two_singleton(3), bl::make_family({bl::constants_class(3)}),
        bl::make_family({bl::full_class(3)}),
        bl::make_family({bl::constants_class(3), bl::full_class(3)})}) {
    for (int n = 1; n <= 3; ++n) {
      CHECK(bl::lemma10_holds(fam, n));
      for (int m = 1; m <= 4; ++m) CHECK(bl::lemma11_holds(fam, n, m));
    }
  }
}

TEST_CASE("find_shattered_matrix: witness is genuinely shattered") {
  const auto full2 = bl::make_family({bl::full_class(2)});
  const auto w = bl::find_shattered_matrix(full2, 2, 2);
  REQUIRE(w.has_value());
  CHECK(bl::family_restrict(full2, *w).size() == 16);
  CHECK_FALSE(bl::find_shattered_matrix(two_singleton(2), 2, 1).has_value());
}

TEST_CASE("threshold_dichotomies: 1-d threshold patterns") {
  const std::vector<Eigen::VectorXd> pts = {pt1(-1.0), pt1(0.0), pt1(1.0)};
  const auto dichos = bl::threshold_dichotomies(pts);
  // Exactly the monotone step patterns: 2 cut positions x 2 signs + 2
  // constants = 6.
  CHECK(dichos.size() == 6);
  for (const auto& f : dichos) {
    // Monotone in one direction or the other: sign changes at most once.
    int changes = 0;
    for (int i = 1; i < 3; ++i) changes += f[i] != f[i - 1];
    CHECK(changes <= 1);
  }
}

TEST_CASE("threshold_dichotomies: XOR is not linearly separable") {
  std::vector<Eigen::VectorXd> sq(4, Eigen::VectorXd(2));
  sq[0] << -1, -1;
  sq[1] << -1, 1;
  sq[2] << 1, -1;
  sq[3] << 1, 1;
  const auto dichos = bl::threshold_dichotomies(sq);
  // 2 points in the plane realize 14 of 16 dichotomies; XOR patterns fail.
  CHECK(dichos.size() == 14);
  for (const auto& f : dichos) {
    const bool is_xor = (f[0] == f[3] && f[1] == f[2] && f[0] != f[1]);
    CHECK_FALSE(is_xor);
  }
}

TEST_CASE("enumerate_threshold_family: d=1 l=1 k=1 on collinear points") {
  const std::vector<Eigen::VectorXd> pts = {pt1(-1.0), pt1(0.0), pt1(1.0)};
  const auto fam = bl::enumerate_threshold_family(1, 1, 1, pts);
  CHECK_FALSE(fam.subfamily);
  CHECK_FALSE(fam.spaces.empty());
  for (const auto& sp : fam.spaces)
    for (const auto& f : sp.functions) {
      int changes = 0;
      for (int i = 1; i < 3; ++i) changes += f[i] != f[i - 1];
      CHECK(changes <= 1);  // threshold-monotone patterns only
    }
  CHECK(bl::dhn(fam, 1, 3) >= 1);
  const auto [dbar, dunder] = bl::family_dims(fam);
  CHECK(dbar >= dunder);
  for (int n = 1; n <= 2; ++n)
    CHECK(bl::dhn(fam, n, 3) <= bounds::thm15_dhn_upper(1, 1, 1, n));
}

TEST_CASE("enumerate_threshold_family: randomized subfamily for d >= 3") {
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd p(3);
    p << (i & 1 ? 1.0 : -1.0), (i & 2 ? 1.0 : -1.0), (i == 0 ? 0.5 : -0.5);
    pts.push_back(p);
  }
  bl::ThresholdEnumOptions opts;
  opts.random_samples = 500;
  opts.seed = 5;
  const auto fam = bl::enumerate_threshold_family(3, 2, 1, pts, opts);
  CHECK(fam.subfamily);
  const auto [dbar, dunder] = bl::family_dims(fam);
  CHECK(dbar >= dunder);
  for (int n = 1; n <= 2; ++n)
    CHECK(bl::dhn(fam, n, 4) <= bounds::thm15_dhn_upper(3, 2, 1, n));
}

TEST_CASE("family text round-trip and parse errors") {
  const auto fam = bl::make_family(
      {bl::constants_class(3),
       bl::make_class(3, {{1, -1, 1}, {-1, -1, 1}})});
  const std::string text = bl::family_to_text(fam);
  const auto back = bl::family_from_text(text);
  CHECK(back.domain_size == 3);
  REQUIRE(back.spaces.size() == 2);
  CHECK(back.spaces[0].functions == fam.spaces[0].functions);
  CHECK(back.spaces[1].functions == fam.spaces[1].functions);

  CHECK_THROWS_WITH_AS(bl::family_from_text("domain 3\n+1 +1\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(bl::family_from_text("domain 3\n+1 0 +1\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(bl::family_from_text("bogus\n"), std::invalid_argument);
}

TEST_CASE("resource caps surface as errors, never truncation") {
  const auto fam = bl::make_family({bl::constants_class(3)});
  bl::EnumCaps caps;
  caps.max_n = 2;
  CHECK_THROWS_AS(bl::growth_family(fam, 3, 2, caps), bl::ResourceCapError);
  caps = {};
  caps.max_m = 2;
  CHECK_THROWS_AS(bl::growth_family(fam, 2, 3, caps), bl::ResourceCapError);
}

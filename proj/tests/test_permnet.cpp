#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "netinf/permnet.hpp"
#include "test_helpers.hpp"

using namespace netinf;
using netinf::testing::PanelBuilder;

namespace {

// path graph a - b - c - d with traits y = (1, 1, 0, 0), everyone an FP
CohortPanel path_panel() {
  PanelBuilder b;
  b.person("a").person("b").person("c").person("d");
  b.exam("a", 1, 1).exam("b", 1, 1).exam("c", 1, 0).exam("d", 1, 0);
  b.tie(1, "a", "b").tie(1, "b", "c").tie(1, "c", "d");
  return b.build();
}

// exact enumeration oracle for the path fixture: mean q1 over all
// assignments of two trait-positive persons to the four nodes
double exact_perm_mean_k1(const CohortPanel& panel) {
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  const auto pairs = degree_pairs(panel, 1, 1);
  double total = 0.0;
  int computable = 0;
  for (int first = 0; first < 4; ++first) {
    for (int second = first + 1; second < 4; ++second) {
      std::set<std::string> positive{ids[static_cast<std::size_t>(first)],
                                     ids[static_cast<std::size_t>(second)]};
      long num = 0, den = 0;
      for (const auto& [i, j] : pairs) {
        if (positive.count(j)) {
          ++den;
          if (positive.count(i)) ++num;
        }
      }
      if (den > 0) {
        total += static_cast<double>(num) / static_cast<double>(den);
        ++computable;
      }
    }
  }
  return total / computable;
}

}  // namespace

TEST_CASE("degree_pairs on the path graph") {
  const CohortPanel panel = path_panel();
  CHECK(degree_pairs(panel, 1, 1).size() == 6);

  const auto k3 = degree_pairs(panel, 1, 3);
  REQUIRE(k3.size() == 2);
  CHECK(k3[0] == std::make_pair(std::string("a"), std::string("d")));
  CHECK(k3[1] == std::make_pair(std::string("d"), std::string("a")));

  CHECK(degree_pairs(panel, 1, 4).empty());  // beyond the diameter
  CHECK_THROWS_AS(degree_pairs(panel, 99, 1), PanelError);
}

TEST_CASE("degree_pairs ignores direction unless asked not to") {
  PanelBuilder b;
  b.person("a").person("b", false);
  b.exam("a", 1, 1).exam("b", 1, 1);
  b.tie(1, "a", "b");
  const CohortPanel panel = b.build();
  CHECK(degree_pairs(panel, 1, 1, /*directed=*/false).size() == 1);   // (a, b)
  CHECK(degree_pairs(panel, 1, 1, /*directed=*/true).size() == 1);    // a -> b

  PanelBuilder b2;
  b2.person("a", false).person("b");
  b2.exam("a", 1, 1).exam("b", 1, 1);
  b2.tie(1, "a", "b");
  const CohortPanel p2 = b2.build();
  CHECK(degree_pairs(p2, 1, 1, false).size() == 1);  // (b, a) via the merged graph
  CHECK(degree_pairs(p2, 1, 1, true).empty());       // no directed path b -> a
}

TEST_CASE("degree_association on the path fixture is 2/3") {
  const CohortPanel panel = path_panel();
  CHECK(degree_association(panel, 1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("degree_association edge cases") {
  PanelBuilder all1;
  all1.person("a").person("b").person("c");
  all1.exam("a", 1, 1).exam("b", 1, 1).exam("c", 1, 1);
  all1.tie(1, "a", "b").tie(1, "b", "c");
  const CohortPanel p1 = all1.build();
  CHECK(degree_association(p1, 1, 1) == 1.0);
  CHECK(degree_association(p1, 1, 2) == 1.0);

  PanelBuilder all0;
  all0.person("a").person("b");
  all0.exam("a", 1, 0).exam("b", 1, 0);
  all0.tie(1, "a", "b");
  CHECK_THROWS_AS(degree_association(all0.build(), 1, 1), NotComputable);
}

TEST_CASE("permutation preserves the trait multiset and matches exact enumeration") {
  const CohortPanel panel = path_panel();
  const double exact = exact_perm_mean_k1(panel);
  CHECK(exact == doctest::Approx(11.0 / 36.0).epsilon(1e-12));

  PermTestOptions opt;
  opt.max_k = 3;
  opt.n_perms = 20000;
  opt.seed = 4;
  const auto results = permutation_test(panel, 1, opt);
  REQUIRE(!results.empty());
  const DegreeAssociation& k1 = results.front();
  CHECK(k1.degree == 1);
  CHECK(k1.observed == doctest::Approx(2.0 / 3.0));
  CHECK(k1.n_pairs == 6);

  // Monte Carlo mean within 3 MC standard errors of the exact value;
  // replicate q's take values {0, 1/2, 2/3} with sd 0.3106
  const double mc_se = 0.3106 / std::sqrt(20000.0);
  CHECK(std::fabs(k1.perm_mean - 11.0 / 36.0) < 3.0 * mc_se);
  CHECK(k1.rel_increase ==
        doctest::Approx((2.0 / 3.0) / k1.perm_mean - 1.0).epsilon(1e-12));
  CHECK(k1.rel_increase == doctest::Approx(24.0 / 11.0 - 1.0).epsilon(0.05));
}

TEST_CASE("rel_increase is invariant under person relabeling") {
  PermTestOptions opt;
  opt.max_k = 2;
  opt.n_perms = 3000;
  opt.seed = 9;

  const CohortPanel panel = path_panel();
  const auto base = permutation_test(panel, 1, opt);

  PanelBuilder b;  // same graph, ids permuted (a->w, b->x, c->y, d->z)
  b.person("w").person("x").person("y").person("z");
  b.exam("w", 1, 1).exam("x", 1, 1).exam("y", 1, 0).exam("z", 1, 0);
  b.tie(1, "w", "x").tie(1, "x", "y").tie(1, "y", "z");
  const auto renamed = permutation_test(b.build(), 1, opt);

  REQUIRE(base.size() == renamed.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].observed == renamed[i].observed);
    CHECK(base[i].perm_mean == renamed[i].perm_mean);
    CHECK(base[i].rel_increase == renamed[i].rel_increase);
  }
}

TEST_CASE("edgeless graph has no computable degree") {
  PanelBuilder b;
  b.person("a").person("b");
  b.exam("a", 1, 1).exam("b", 1, 0);
  const CohortPanel panel = b.build();
  PermTestOptions opt;
  opt.max_k = 2;
  opt.n_perms = 10;
  CHECK(permutation_test(panel, 1, opt).empty());
  CHECK_THROWS_AS(degree_association(panel, 1, 1), NotComputable);
}

TEST_CASE("count traits are dichotomized at the configured threshold") {
  PanelBuilder b;
  b.kind = TraitKind::Count0to7;
  b.person("a").person("b");
  b.exam("a", 1, 5).exam("b", 1, 2);  // at threshold 3: a positive, b not
  b.tie(1, "a", "b");
  const CohortPanel panel = b.build();
  // pairs with positive alter: (b, a); b's trait is below threshold -> q = 0
  CHECK(degree_association(panel, 1, 1, 3.0) == 0.0);
  // threshold 2 makes both positive -> q = 1
  CHECK(degree_association(panel, 1, 1, 2.0) == 1.0);
}

TEST_CASE("exams absent at the wave drop the person from the graph") {
  PanelBuilder b;
  b.person("a").person("b").person("c");
  b.exam("a", 1, 1).exam("b", 1, 1);  // c unexamined at wave 1
  b.tie(1, "a", "b").tie(1, "b", "c");
  const CohortPanel panel = b.build();
  CHECK(degree_pairs(panel, 1, 1).size() == 2);  // only (a,b) and (b,a)
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "aztac/geometry.hpp"

using namespace aztac;

TEST_CASE("shape validation") {
  ModelShape odd{0.5, 3, 0}, big_m{0.5, 4, 2}, bad_a{1.5, 4, 0}, ok{0.5, 4, 1};
  CHECK_THROWS_AS(odd.validate(), invalid_shape);
  CHECK_THROWS_AS(big_m.validate(), invalid_shape);
  CHECK_THROWS_AS(bad_a.validate(), invalid_shape);
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("region construction invariants") {
  Region r20 = Region::double_diamond({0.5, 2, 0});
  // every even oblique line carries 2n+2m+1 = 5 black sites
  for (int r = 1; r <= 2; ++r) {
    int ell = 2 * r;
    auto [top, bottom] = r20.virtual_sites(ell);
    CHECK(static_cast<int>(r20.line_cells(ell).size() + top.size() +
                           bottom.size()) == 5);
  }
  // total cells = 2 cells(AZ_2) - overlap, counted directly
  Region az2 = Region::single_diamond(2);
  CHECK(az2.cell_count() == 12);
  std::set<Cell> a_cells(az2.cells().begin(), az2.cells().end());
  // B = A + (2m, -(2m+1)) = A + (0, -1); a cell lies in both diamonds iff
  // it is in A and its preimage under the shift is too
  int overlap = 0;
  for (const Cell& c : a_cells)
    if (a_cells.count({c.i, c.j + 1})) ++overlap;
  CHECK(r20.cell_count() == 2 * 12 - overlap);

  Region r41 = Region::double_diamond({0.5, 4, 1});
  for (int r = 1; r <= 4; ++r) {
    int ell = 2 * r;
    auto [top, bottom] = r41.virtual_sites(ell);
    int total = static_cast<int>(r41.line_cells(ell).size() + top.size() +
                                 bottom.size());
    CHECK(total == 11);  // positions -5..5
  }
}

TEST_CASE("enumeration counts and stream stability") {
  Region az1 = Region::single_diamond(1);
  long c1 = enumerate_tilings(az1, [](const Tiling&) {});
  CHECK(c1 == 2);
  Region az2 = Region::single_diamond(2);
  long c2 = enumerate_tilings(az2, [](const Tiling&) {});
  CHECK(c2 == 8);
  Region r20 = Region::double_diamond({0.5, 2, 0});
  std::set<std::string> forward, backward;
  long cf = enumerate_tilings(r20, [&](const Tiling& t) {
    forward.insert(t.serialize());
  });
  long cb = enumerate_tilings(
      r20, [&](const Tiling& t) { backward.insert(t.serialize()); },
      100000000L, true);
  CHECK(cf == cb);
  CHECK(forward == backward);
  CHECK(cf == 13);
}

TEST_CASE("enumeration budget guard") {
  Region r41 = Region::double_diamond({0.5, 4, 1});
  CHECK_THROWS_AS(enumerate_tilings(r41, [](const Tiling&) {}, 10),
                  budget_exceeded);
}

TEST_CASE("tiling weights") {
  Region az1 = Region::single_diamond(1);
  std::vector<double> weights;
  enumerate_tilings(az1, [&](const Tiling& t) {
    weights.push_back(tiling_weight(t, 0.5));
  });
  std::sort(weights.begin(), weights.end());
  CHECK(weights[0] == doctest::Approx(0.25));  // two vertical dominoes
  CHECK(weights[1] == doctest::Approx(1.0));   // all horizontal
  // a = 1: every tiling has weight 1
  Region r20 = Region::double_diamond({0.5, 2, 0});
  enumerate_tilings(r20, [&](const Tiling& t) {
    CHECK(tiling_weight(t, 1.0) == 1.0);
  });
}

TEST_CASE("particle invariants on every tiling of (2,0) and (4,1)") {
  for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 0}, {4, 1}}) {
    Region rg = Region::double_diamond({0.5, n, m});
    double z = 0.0;
    enumerate_tilings(rg, [&](const Tiling& t) {
      z += tiling_weight(t, 0.5);
      ParticleConfig pc = particles(t);
      for (int r = 0; r <= n; ++r) {
        CHECK(static_cast<int>(pc.blue_dots[r].size()) == 2 * n);
        CHECK(static_cast<int>(pc.red_dots[r].size()) == 2 * m + 1);
      }
      // blue dots coincide with black squares covered by S or W dominoes
      int ell = n;  // middle even axis
      for (const Cell& c : rg.line_cells(ell)) {
        bool is_blue = t.blue_class_at(rg.index_of(c));
        bool in_set = std::binary_search(pc.blue_dots[ell / 2].begin(),
                                         pc.blue_dots[ell / 2].end(),
                                         rg.y_of(c));
        CHECK(is_blue == in_set);
      }
    });
    CHECK(z > 0.0);
  }
}

TEST_CASE("normalized weights sum to one") {
  Region rg = Region::double_diamond({0.5, 2, 0});
  double z = 0.0;
  enumerate_tilings(rg, [&](const Tiling& t) { z += tiling_weight(t, 0.5); });
  double total = 0.0;
  enumerate_tilings(rg, [&](const Tiling& t) {
    total += tiling_weight(t, 0.5) / z;
  });
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("height fields and level lines") {
  Region rg = Region::double_diamond({0.5, 2, 0});
  const int n = 2, m = 0;
  std::vector<std::vector<int>> boundary_profiles;
  enumerate_tilings(rg, [&](const Tiling& t) {
    HeightField h = height_field(t, HeightKind::h, 0);
    HeightField h2 = height_field(t, HeightKind::h, 1);
    CHECK(h.values == h2.values);  // the two integration orders agree
    for (int ell = 0; ell <= 2 * n + 1; ++ell) {
      CHECK(h.values[ell].front() == 0);      // top edge
      CHECK(h.values[ell].back() == 2 * n);   // bottom edge
    }
    HeightField ht = height_field(t, HeightKind::h_tilde);
    for (int ell = 0; ell <= 2 * n + 1; ++ell) {
      CHECK(ht.values[ell].front() == 2 * m + 1);
      CHECK(ht.values[ell].back() == 0);
    }
    // boundary profile (values on the first axis) is tiling-independent
    boundary_profiles.push_back(h.values[0]);

    auto outliers = level_lines(t, HeightKind::h);
    CHECK(outliers.size() == 2 * n);
    auto inliers = level_lines(t, HeightKind::h_tilde);
    CHECK(inliers.size() == 2 * m + 1);
    // pairwise vertex-disjoint: positions strictly decrease down the stack
    for (size_t ell = 0; ell < outliers[0].size(); ++ell)
      for (size_t k = 1; k < outliers.size(); ++k)
        CHECK(outliers[k - 1][ell] > outliers[k][ell]);
    // each outlier path carries n+1 dots and n+1 circles
    CHECK(outliers[0].size() == 2 * n + 2);
  });
  for (size_t i = 1; i < boundary_profiles.size(); ++i)
    CHECK(boundary_profiles[i] == boundary_profiles[0]);
}

TEST_CASE("empirical correlation basics") {
  Region rg = Region::double_diamond({0.5, 2, 0});
  CHECK(empirical_correlation(rg, 0.5, 1, {}) == doctest::Approx(1.0));
  // rotation symmetry: dots on Y_{2r} at x vs circles on Y_{2(n-r)+1} at -x
  const int n = 2;
  int r = 1;
  double z = 0.0, dots_at = 0.0, circ_at = 0.0;
  const int x = 1;
  enumerate_tilings(rg, [&](const Tiling& t) {
    double w = tiling_weight(t, 1.0);
    z += w;
    ParticleConfig pc = particles(t);
    if (std::binary_search(pc.blue_dots[r].begin(), pc.blue_dots[r].end(), x))
      dots_at += w;
    int rr = n - r + 1;  // axis 2(n-r)+1 has odd index rr
    if (std::binary_search(pc.blue_circles[rr].begin(),
                           pc.blue_circles[rr].end(), -x))
      circ_at += w;
  });
  CHECK(dots_at / z == doctest::Approx(circ_at / z).epsilon(1e-12));
}

TEST_CASE("tiling serialization round trip and validation") {
  Region rg = Region::double_diamond({0.5, 2, 0});
  std::vector<Tiling> all;
  enumerate_tilings(rg, [&](const Tiling& t) { all.push_back(t); });
  for (const Tiling& t : all) {
    Tiling back = Tiling::deserialize(&rg, t.serialize());
    CHECK(back == t);
  }
  CHECK_THROWS(Tiling::deserialize(&rg, "# double n=2 m=0\n0 0 H S\n"));
}

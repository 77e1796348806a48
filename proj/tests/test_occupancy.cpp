#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ocmsim/occupancy.hpp"

using namespace ocmsim;

namespace {

// Gamma-function forms evaluated with the standard library.
double total_gamma(double m, int n) { return std::exp(std::lgamma(m + n) - std::lgamma(n + 1.0) - std::lgamma(m)); }
double spa_gamma(double m, int n) {
  return std::exp(std::lgamma(m + 1.0) - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0));
}

}  // namespace

TEST_CASE("closed-form examples") {
  CHECK(c_total(5, 2) == 15);
  CHECK(c_npa(5, 2) == 5);
  CHECK(c_spa(5, 2) == 10);
  CHECK(c_pnr(5, 2) == 15);
  for (int n = 1; n <= 6; ++n) {
    CHECK(c_total(1, n) == 1);
    CHECK(c_npa(1, n) == 1);
  }
  for (int m = 1; m <= 9; ++m) {
    CHECK(c_total(m, 1) == static_cast<Count>(m));
    CHECK(c_npa(m, 1) == static_cast<Count>(m));
    CHECK(c_spa(m, m) == 1);
  }
  CHECK(c_spa(3, 4) == 0);
  CHECK_THROWS_AS(c_total(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(c_spa(3, 0), std::invalid_argument);
}

TEST_CASE("enumeration by hand") {
  auto const p = enumerate_occupancies(2, 2);
  REQUIRE(p.size() == 3);
  CHECK(p[0].pixels == std::vector<std::int64_t>{0, 0});
  CHECK(p[1].pixels == std::vector<std::int64_t>{0, 1});
  CHECK(p[2].pixels == std::vector<std::int64_t>{1, 1});
  CHECK(p[0].tag == OccupancyTag::all_same);
  CHECK(p[1].tag == OccupancyTag::all_distinct);
  CHECK(p[2].tag == OccupancyTag::all_same);
  CHECK(enumerate_occupancies(3, 3).size() == 10);
  CHECK_THROWS_AS(enumerate_occupancies(1000, 6), std::length_error);
}

TEST_CASE("closed forms equal enumeration for M <= 8, N <= 4") {
  for (int m = 1; m <= 8; ++m) {
    for (int n = 1; n <= 4; ++n) {
      auto const patterns = enumerate_occupancies(m, n);
      std::set<std::vector<std::int64_t>> unique;
      Count same = 0, distinct = 0;
      for (auto const& p : patterns) {
        unique.insert(p.pixels);
        std::set<std::int64_t> pixels(p.pixels.begin(), p.pixels.end());
        same += pixels.size() == 1;
        distinct += static_cast<int>(pixels.size()) == n;
      }
      CAPTURE(m);
      CAPTURE(n);
      CHECK(unique.size() == patterns.size());
      CHECK(patterns.size() == c_total(m, n));
      CHECK(patterns.size() == c_pnr(m, n));
      CHECK(same == c_npa(m, n));
      CHECK(distinct == c_spa(m, n));
      if (n == 1) {
        // A lone photon is both co-located and spread out.
        CHECK(c_npa(m, n) == c_total(m, n));
        CHECK(c_spa(m, n) == c_total(m, n));
      } else {
        CHECK(c_npa(m, n) + c_spa(m, n) <= c_total(m, n));
        if (m == 1) CHECK(c_npa(m, n) + c_spa(m, n) == c_total(m, n));
      }
    }
  }
}

TEST_CASE("Gamma extensions agree with integer counts") {
  for (int n = 1; n <= 4; ++n) {
    for (int m = n; m <= 20; ++m) {
      double const md = m;
      CAPTURE(m);
      CAPTURE(n);
      CHECK(c_total_real(md, n) == doctest::Approx(static_cast<double>(c_total(m, n))).epsilon(1e-12));
      CHECK(c_spa_real(md, n) == doctest::Approx(static_cast<double>(c_spa(m, n))).epsilon(1e-12));
      CHECK(c_total_real(md, n) == doctest::Approx(total_gamma(md, n)).epsilon(1e-11));
      double const integer_ratio = static_cast<double>(c_pnr(m, n)) / static_cast<double>(c_npa(m, n));
      CHECK(efficiency_ratio(md, n, OccupancyScheme::pnr, OccupancyScheme::npa) ==
            doctest::Approx(integer_ratio).epsilon(1e-12));
      double const spa_ratio = static_cast<double>(c_spa(m, n)) / static_cast<double>(c_pnr(m, n));
      CHECK(efficiency_ratio(md, n, OccupancyScheme::spa, OccupancyScheme::pnr) ==
            doctest::Approx(spa_ratio).epsilon(1e-12));
    }
  }
  CHECK(c_spa_real(5.6, 2) == doctest::Approx(spa_gamma(5.6, 2)).epsilon(1e-12));
  CHECK_THROWS_AS(c_spa_real(0.5, 2), std::domain_error);
}

TEST_CASE("ratio arithmetic at M = 5.6") {
  CHECK(efficiency_ratio(5.6, 2, OccupancyScheme::pnr, OccupancyScheme::npa) == doctest::Approx(3.3).epsilon(1e-12));
  CHECK(efficiency_ratio(5.6, 2, OccupancyScheme::pnr_composite, OccupancyScheme::npa, 0.5) ==
        doctest::Approx(5.6).epsilon(1e-12));
  CHECK_THROWS_AS(efficiency_ratio(5.6, 3, OccupancyScheme::pnr_composite, OccupancyScheme::npa, 0.5),
                  std::domain_error);
  CHECK_THROWS_AS(efficiency_ratio(5.6, 2, OccupancyScheme::pnr, OccupancyScheme::npa, 0.0), std::domain_error);
}

TEST_CASE("SPA to PNR ratio tends to one") {
  double prev = 0.0;
  for (int m = 2; m <= 10000; m = m < 100 ? m + 1 : m * 2) {
    double const r = efficiency_ratio(m, 2, OccupancyScheme::spa, OccupancyScheme::pnr);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(efficiency_ratio(1e4, 2, OccupancyScheme::spa, OccupancyScheme::pnr) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("acceptance probabilities") {
  for (auto model : {PlacementModel::multiset_uniform, PlacementModel::placement_uniform})
    CHECK(acceptance_probability(OccupancyScheme::pnr, 4, 3, model) == 1.0);
  CHECK(acceptance_probability(OccupancyScheme::npa, 5, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(acceptance_probability(OccupancyScheme::npa, 5, 2, PlacementModel::placement_uniform) ==
        doctest::Approx(0.2));
  CHECK(acceptance_probability(OccupancyScheme::spa, 2, 2) == doctest::Approx(1.0 / 3.0));

  // Ordered placements by brute force.
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 3; ++n) {
      int total = 0, same = 0, distinct = 0;
      std::vector<int> x(static_cast<std::size_t>(n), 0);
      for (;;) {
        ++total;
        std::set<int> s(x.begin(), x.end());
        same += s.size() == 1;
        distinct += static_cast<int>(s.size()) == n;
        int i = 0;
        while (i < n && ++x[static_cast<std::size_t>(i)] == m) x[static_cast<std::size_t>(i++)] = 0;
        if (i == n) break;
      }
      CHECK(acceptance_probability(OccupancyScheme::npa, m, n, PlacementModel::placement_uniform) ==
            doctest::Approx(static_cast<double>(same) / total));
      CHECK(acceptance_probability(OccupancyScheme::spa, m, n, PlacementModel::placement_uniform) ==
            doctest::Approx(static_cast<double>(distinct) / total));
    }
  }
}

TEST_CASE("acceptance monotonicity in M") {
  for (int n = 2; n <= 4; ++n) {
    for (auto model : {PlacementModel::multiset_uniform, PlacementModel::placement_uniform}) {
      double prev_spa = -1.0, prev_npa = 2.0;
      for (int m = 1; m <= 30; ++m) {
        double const spa = acceptance_probability(OccupancyScheme::spa, m, n, model);
        CHECK(spa >= prev_spa);
        prev_spa = spa;
        if (model == PlacementModel::placement_uniform) {
          double const npa = acceptance_probability(OccupancyScheme::npa, m, n, model);
          CHECK(npa <= prev_npa);
          prev_npa = npa;
        }
      }
    }
  }
}

TEST_CASE("overflow is reported") {
  CHECK_THROWS_AS(c_total(1'000'000'000, 40), CountOverflow);
  CHECK(c_total(30, 5) == 278256);
  CHECK(c_spa(64, 32) == 1832624140942590534ULL);
  CHECK_THROWS_AS(c_spa(68, 34), CountOverflow);
}

TEST_CASE("report contents") {
  auto const r = make_occupancy_report(5, 2, 0.5, PlacementModel::multiset_uniform);
  REQUIRE(r.c_total);
  CHECK(*r.c_total == 15);
  CHECK(*r.c_npa == 5);
  CHECK(*r.c_spa == 10);
  CHECK(*r.c_pnr == 15);
  REQUIRE(r.oracle_verified);
  CHECK(*r.oracle_verified);

  auto const real = make_occupancy_report(5.6, 2, 0.5, PlacementModel::multiset_uniform);
  CHECK_FALSE(real.c_total);
  CHECK(real.ratios.at("PNR/NPA") == doctest::Approx(3.3));
  CHECK(real.ratios.at("PNR_COMPOSITE/NPA_with_coupler") == doctest::Approx(5.6));

  auto const single = make_occupancy_report(1, 3, 0.5, PlacementModel::multiset_uniform);
  CHECK(*single.c_total == 1);
  CHECK(*single.c_npa == 1);
  CHECK(*single.c_pnr == 1);
  CHECK(*single.oracle_verified);
  CHECK(parse_occupancy_scheme("PNR_COMPOSITE") == OccupancyScheme::pnr_composite);
  CHECK_THROWS_AS(parse_placement_model("uniformish"), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ocmsim/rng.hpp"
#include "ocmsim/state.hpp"

using namespace ocmsim;
using std::numbers::pi;

namespace {

// Unnormalized joint density at positions x (same prefactor as the QL density).
double joint_density(NoonStateSpec const& spec, std::vector<double> const& x) {
  int const n = spec.photon_number();
  double const dk = spec.envelope_bandwidth();
  double sum = 0.0, sq = 0.0;
  for (double v : x) {
    sum += v;
    sq += v * v;
  }
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f * std::pow(spec.intensity_scale() * dk / pi, n) * std::exp(-dk * dk * sq) *
         (1.0 + std::cos(2.0 * spec.fringe_wavevector() * sum));
}

}  // namespace

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(NoonStateSpec(0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoonStateSpec(2, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(NoonStateSpec(2, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoonStateSpec(2, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK(NoonStateSpec(2, 10.0, 1.0).in_orthogonality_regime());
  CHECK_FALSE(NoonStateSpec(2, 4.0, 1.0).in_orthogonality_regime());
}

TEST_CASE("QL density examples") {
  NoonStateSpec const spec(2, 1.0, 0.1);
  CHECK(eval_ql_density(spec, pi / 4) == doctest::Approx(0.0).epsilon(1e-14));
  NoonStateSpec const single(1, 3.7, 0.4);
  CHECK(eval_ql_density(single, 0.0) == doctest::Approx(2.0 * 0.4 / pi).epsilon(1e-14));
  CHECK_THROWS_AS(eval_ql_density(spec, std::nan("")), std::invalid_argument);
}

TEST_CASE("centroid density null and closed-form integral") {
  NoonStateSpec const spec(2, 1.0, 0.1);
  CHECK(eval_centroid_density(spec, pi / 4) == doctest::Approx(0.0).epsilon(1e-14));

  for (auto const& s : {NoonStateSpec(2, 10.0, 1.0), NoonStateSpec(3, 2.0, 1.5), NoonStateSpec(4, 1.0, 0.7, 1.3)}) {
    double const reach = 8.0 / (std::sqrt(s.photon_number()) * s.envelope_bandwidth());
    double quad = 0.0;
    for (int i = 0; i < 200; ++i) {
      double const a = -reach + 2.0 * reach * i / 200;
      quad += oracle::integrate([&](double x) { return eval_centroid_density(s, x); }, a, a + reach / 100);
    }
    CHECK(centroid_density_integral(s) == doctest::Approx(quad).epsilon(1e-10));
  }
}

TEST_CASE("centroid density is the relative-coordinate marginal of the joint density") {
  SUBCASE("N = 2") {
    NoonStateSpec const spec(2, 3.0, 1.2);
    for (double X : {0.0, 0.1, -0.37, 0.8}) {
      double const m = oracle::integrate([&](double xi) { return joint_density(spec, {X + xi, X - xi}); }, -8, 8);
      CHECK(eval_centroid_density(spec, X) == doctest::Approx(m).epsilon(1e-9));
    }
  }
  SUBCASE("N = 3") {
    NoonStateSpec const spec(3, 2.0, 1.0);
    for (double X : {0.0, 0.21}) {
      double const m = oracle::integrate(
          [&](double a) {
            return oracle::integrate([&](double b) { return joint_density(spec, {X + a, X + b, X - a - b}); }, -7, 7);
          },
          -7, 7);
      CHECK(eval_centroid_density(spec, X) == doctest::Approx(m).epsilon(1e-8));
    }
  }
}

TEST_CASE("density ratio") {
  CHECK(density_ratio(NoonStateSpec(1, 2.0, 0.3), 0.7) == doctest::Approx(1.0));
  CHECK(density_ratio(NoonStateSpec(2, 2.0, 1.0), std::sqrt(pi)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  NoonStateSpec const spec(2, 10.0, 1.0);
  double const dx = 0.01;
  double const expected = std::sqrt(pi) / dx / std::sqrt(2.0);
  CHECK(density_ratio(spec, dx) == doctest::Approx(expected).epsilon(1e-12));
  double const direct = eval_centroid_density(spec, 0.0) * dx / (eval_ql_density(spec, 0.0) * dx * dx);
  CHECK(density_ratio(spec, dx) == doctest::Approx(direct).epsilon(1e-12));
  CHECK_THROWS_AS(density_ratio(spec, 0.0), std::invalid_argument);
}

TEST_CASE("classical fringe period") {
  NoonStateSpec const spec(2, pi / 0.69, 1.0);
  CHECK(spec.with_photon_number(1).fringe_period() == doctest::Approx(0.69));
  CHECK(spec.fringe_period() == doctest::Approx(0.345));
  double const envelope_at_period = std::exp(-0.69 * 0.69);
  CHECK(eval_classical_fringe(spec, 0.69) == doctest::Approx(eval_classical_fringe(spec, 0.0) * envelope_at_period));
  CHECK(eval_classical_fringe(spec, 0.345) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("arrival event coordinates") {
  PhotonArrivalEvent const e({1.0, 2.0, 6.0});
  CHECK(e.photon_number() == 3);
  CHECK(e.centroid() == doctest::Approx(3.0));
  CHECK(e.relatives()[0] == doctest::Approx(-2.0));
  CHECK(e.relatives()[2] == doctest::Approx(3.0));
  CHECK_THROWS_AS(PhotonArrivalEvent({}), std::invalid_argument);
}

TEST_CASE("sampler determinism") {
  NoonStateSpec const spec(3, 5.0, 1.0);
  RngStream a(11, 4), b(11, 4);
  for (int i = 0; i < 100; ++i) {
    auto const ea = sample_event(spec, a);
    auto const eb = sample_event(spec, b);
    REQUIRE(std::vector<double>(ea.positions().begin(), ea.positions().end()) ==
            std::vector<double>(eb.positions().begin(), eb.positions().end()));
  }
}

TEST_CASE("sampler centroid mean and relative variance") {
  NoonStateSpec const spec(2, 10.0, 1.0);
  int const n = 1'000'000;
  double sx = 0, sxx = 0, sr = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(123, static_cast<std::uint64_t>(i));
    auto const e = sample_event(spec, rng);
    sx += e.centroid();
    sxx += e.centroid() * e.centroid();
    sr += e.relatives()[0] * e.relatives()[0];
  }
  double const mean = sx / n;
  double const var = sxx / n - mean * mean;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(var / n));
  CHECK(sr / n == doctest::Approx(0.5 * (1.0 - 0.5)).epsilon(0.01));

  // Second moment of the normalized centroid density by quadrature.
  auto density = [&](double x) { return eval_centroid_density(spec, x); };
  double const z = oracle::integrate(density, -6, 6);
  double const m2 = oracle::integrate([&](double x) { return x * x * density(x); }, -6, 6) / z;
  CHECK(var == doctest::Approx(m2).epsilon(0.01));
}

TEST_CASE("sampler chi-square for N = 3") {
  NoonStateSpec const spec(3, 4.0, 1.5);
  int const n = 200'000, bins = 100;
  double const hi = 4.0 / (std::sqrt(3.0) * 1.5);
  std::vector<std::uint64_t> counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    RngStream rng(77, static_cast<std::uint64_t>(i));
    double const x = sample_event(spec, rng).centroid();
    if (x >= -hi && x < hi) ++counts[static_cast<std::size_t>((x + hi) / (2 * hi) * bins)];
  }
  auto const p = oracle::centroid_bin_probabilities(spec, -hi, hi, bins);
  auto const result = oracle::chi_square(counts, p, n);
  CHECK(result.p_value > 0.01);
}

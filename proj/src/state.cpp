#include "ocmsim/state.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ocmsim {
namespace {

using std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_finite(double x, char const* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

double fringe_factor(NoonStateSpec const& spec, double x) {
  return 1.0 + std::cos(2.0 * spec.photon_number() * spec.fringe_wavevector() * x);
}

double envelope(NoonStateSpec const& spec, double x) {
  double const dk = spec.envelope_bandwidth();
  return std::exp(-spec.photon_number() * dk * dk * x * x);
}

}  // namespace

NoonStateSpec::NoonStateSpec(int photon_number, double fringe_wavevector,
                             double envelope_bandwidth, double intensity_scale)
    : photon_number_(photon_number),
      fringe_wavevector_(fringe_wavevector),
      envelope_bandwidth_(envelope_bandwidth),
      intensity_scale_(intensity_scale) {
  if (photon_number < 1) throw std::invalid_argument("photon number must be >= 1");
  if (!(fringe_wavevector > 0.0) || !std::isfinite(fringe_wavevector))
    throw std::invalid_argument("fringe wavevector must be positive");
  if (!(envelope_bandwidth > 0.0) || !std::isfinite(envelope_bandwidth))
    throw std::invalid_argument("envelope bandwidth must be positive");
  if (!(intensity_scale > 0.0) || !std::isfinite(intensity_scale))
    throw std::invalid_argument("intensity scale must be positive");
}

bool NoonStateSpec::in_orthogonality_regime() const noexcept {
  return fringe_wavevector_ >= 10.0 * envelope_bandwidth_;
}

double NoonStateSpec::fringe_period() const noexcept {
  return pi / (photon_number_ * fringe_wavevector_);
}

NoonStateSpec NoonStateSpec::with_photon_number(int photon_number) const {
  return NoonStateSpec(photon_number, fringe_wavevector_, envelope_bandwidth_, intensity_scale_);
}

PhotonArrivalEvent::PhotonArrivalEvent(std::vector<double> positions)
    : positions_(std::move(positions)) {
  if (positions_.empty()) throw std::invalid_argument("event needs at least one photon");
  centroid_ = std::accumulate(positions_.begin(), positions_.end(), 0.0) /
              static_cast<double>(positions_.size());
  relatives_.reserve(positions_.size());
  for (double x : positions_) relatives_.push_back(x - centroid_);
}

double eval_ql_density(NoonStateSpec const& spec, double x) {
  require_finite(x, "position");
  int const n = spec.photon_number();
  double const prefactor = factorial(n) *
                           std::pow(spec.intensity_scale() * spec.envelope_bandwidth() / pi, n);
  return prefactor * envelope(spec, x) * fringe_factor(spec, x);
}

double eval_centroid_density(NoonStateSpec const& spec, double centroid) {
  require_finite(centroid, "centroid");
  int const n = spec.photon_number();
  double const prefactor = factorial(n) * std::pow(spec.intensity_scale(), n) *
                           spec.envelope_bandwidth() / std::sqrt(n * std::pow(pi, n + 1));
  return prefactor * envelope(spec, centroid) * fringe_factor(spec, centroid);
}

double centroid_density_integral(NoonStateSpec const& spec) {
  // ∫ exp(-a X²)[1 + cos(b X)] dX = sqrt(pi/a) [1 + exp(-b²/4a)]
  int const n = spec.photon_number();
  double const dk = spec.envelope_bandwidth();
  double const k0 = spec.fringe_wavevector();
  double const a = n * dk * dk;
  double const b = 2.0 * n * k0;
  double const prefactor = factorial(n) * std::pow(spec.intensity_scale(), n) * dk /
                           std::sqrt(n * std::pow(pi, n + 1));
  return prefactor * std::sqrt(pi / a) * (1.0 + std::exp(-b * b / (4.0 * a)));
}

double density_ratio(NoonStateSpec const& spec, double pixel_size) {
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
    throw std::invalid_argument("pixel size must be positive");
  int const n = spec.photon_number();
  return std::pow(std::sqrt(pi) / (spec.envelope_bandwidth() * pixel_size), n - 1) /
         std::sqrt(static_cast<double>(n));
}

double eval_classical_fringe(NoonStateSpec const& spec, double x) {
  return eval_ql_density(spec.with_photon_number(1), x);
}

PhotonArrivalEvent sample_event(NoonStateSpec const& spec, RngStream& rng) {
  int const n = spec.photon_number();
  double const dk = spec.envelope_bandwidth();
  double const relative_sd = 1.0 / (std::sqrt(2.0) * dk);
  double const centroid_sd = 1.0 / (std::sqrt(2.0 * n) * dk);
  double const fringe_k = 2.0 * n * spec.fringe_wavevector();

  std::vector<double> positions(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (auto& g : positions) {
    g = relative_sd * rng.normal();
    mean += g;
  }
  mean /= n;

  double centroid = 0.0;
  int proposals = 0;
  for (;;) {
    if (++proposals > kMaxCentroidProposals)
      throw std::logic_error("centroid rejection sampler exceeded proposal bound");
    centroid = centroid_sd * rng.normal();
    double const weight = 0.5 * (1.0 + std::cos(fringe_k * centroid));
    if (rng.uniform() < weight) break;
  }

  for (auto& x : positions) x = centroid + (x - mean);
  return PhotonArrivalEvent(std::move(positions));
}

}  // namespace ocmsim

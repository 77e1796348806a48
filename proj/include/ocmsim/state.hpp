#pragma once

#include <span>
#include <vector>

#include "ocmsim/rng.hpp"

namespace ocmsim {

/*!
 * N-photon N00N state on the detector plane.
 *
 * Two modes with mean transverse wavevectors +kappa0 and -kappa0 and a
 * Gaussian wavevector profile of width delta_kappa. Lengths are millimetres
 * throughout, so wavevectors are rad/mm.
 */
class NoonStateSpec {
 public:
  //! Throws std::invalid_argument unless N >= 1, kappa0 > 0, delta_kappa > 0.
  NoonStateSpec(int photon_number, double fringe_wavevector, double envelope_bandwidth,
                double intensity_scale = 1.0);

  int photon_number() const noexcept { return photon_number_; }
  double fringe_wavevector() const noexcept { return fringe_wavevector_; }
  double envelope_bandwidth() const noexcept { return envelope_bandwidth_; }
  double intensity_scale() const noexcept { return intensity_scale_; }

  //! Mode orthogonality needs kappa0 >> delta_kappa; cutoff is a factor 10.
  bool in_orthogonality_regime() const noexcept;

  //! pi / (N kappa0), shared by the QL and centroid densities.
  double fringe_period() const noexcept;

  //! Same kappa0, delta_kappa and scale with a different photon number.
  NoonStateSpec with_photon_number(int photon_number) const;

  friend bool operator==(NoonStateSpec const&, NoonStateSpec const&) = default;

 private:
  int photon_number_;
  double fringe_wavevector_;
  double envelope_bandwidth_;
  double intensity_scale_;
};

//! One sampled arrival of N photons, with centroid X and relatives xi = x - X.
class PhotonArrivalEvent {
 public:
  explicit PhotonArrivalEvent(std::vector<double> positions);

  std::span<double const> positions() const noexcept { return positions_; }
  std::span<double const> relatives() const noexcept { return relatives_; }
  double centroid() const noexcept { return centroid_; }
  int photon_number() const noexcept { return static_cast<int>(positions_.size()); }

 private:
  std::vector<double> positions_;
  std::vector<double> relatives_;
  double centroid_ = 0.0;
};

//! <: I(x)^N :>, the N-photon absorption density at a single point.
double eval_ql_density(NoonStateSpec const& spec, double x);

//! Marginal density of the optical centroid, integrated over xi_1..xi_{N-1}.
double eval_centroid_density(NoonStateSpec const& spec, double centroid);

//! Closed-form integral of eval_centroid_density over the real line.
double centroid_density_integral(NoonStateSpec const& spec);

//! P_M dx / (P_C dx^N) for pixel size dx; independent of position.
double density_ratio(NoonStateSpec const& spec, double pixel_size);

//! Single-photon (N = 1) fringe with the spec's kappa0 and delta_kappa.
double eval_classical_fringe(NoonStateSpec const& spec, double x);

//! Upper bound on rejection proposals for one centroid draw.
inline constexpr int kMaxCentroidProposals = 10000;

/*!
 * Draw one event from the joint density
 *   p(x) ∝ exp(-dk² Σ x_n²) [1 + cos(2 N k0 X)].
 *
 * Since Σ x_n² = N X² + Σ xi_n², the relatives are an isotropic Gaussian
 * projected onto Σ xi = 0 and X is a Gaussian thinned by the fringe factor.
 */
PhotonArrivalEvent sample_event(NoonStateSpec const& spec, RngStream& rng);

}  // namespace ocmsim

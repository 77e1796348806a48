#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "ocmsim/histogram.hpp"

namespace ocmsim {

/*!
 * Gaussian-windowed fringe
 *   f(x) = A exp(-(x - x0)² / w²) [1 + V cos(2 pi (x - x0) / period + phase)].
 */
struct FringeModel {
  double amplitude = 0.0;
  double width = 0.0;
  double visibility = 0.0;
  double period = 0.0;
  double phase = 0.0;
  double center = 0.0;

  double operator()(double x) const noexcept;
};

struct FringeFit {
  FringeModel parameters;
  //! One standard error per parameter (zero for the centre when held fixed).
  FringeModel standard_errors;
  double amplitude_visibility_covariance = 0.0;
  //! Poisson-weighted chi-square per degree of freedom.
  double residual = 0.0;
  bool converged = false;
  bool center_free = false;
  int iterations = 0;
};

class FitError : public std::runtime_error {
 public:
  enum class Kind { insufficient_data, ambiguous_period };
  FitError(Kind kind, std::string const& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct FitOptions {
  std::optional<FringeModel> initial_guess;
  //! Unset: free the centre only when the count-weighted mean is > 1 bin from 0.
  std::optional<bool> free_center;
  //! Eight phase starts, keep the lowest chi-square.
  bool multi_start = false;
  int max_iterations = 500;
  double tolerance = 1e-8;
};

//! Period from the dominant peak of the envelope-subtracted Fourier spectrum.
double estimate_period(Histogram const& hist);

/*!
 * Weighted Levenberg-Marquardt fit of FringeModel to bin centres.
 *
 * Weights are 1 / max(count, 1). Visibility is boxed to [0, 1], amplitude,
 * width and period to positive values; proposals outside the box are
 * projected. Throws FitError for fewer than 8 non-empty bins, spans under
 * two periods or an ambiguous spectrum. Non-convergence is reported through
 * FringeFit::converged with the best parameters found.
 */
FringeFit fit_fringe(Histogram const& hist, FitOptions const& options = {});

//! Same fit on uniformly spaced samples (bin centres); values need not be integers.
FringeFit fit_fringe_samples(std::span<double const> x, std::span<double const> y,
                             FitOptions const& options = {});

struct RatioEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

//! period_ref / period_test. Both fits must be converged.
RatioEstimate enhancement_ratio(FringeFit const& reference, FringeFit const& test);

//! Fringe amplitude A V per generated event of run a over run b.
RatioEstimate amplitude_ratio(Histogram const& hist_a, Histogram const& hist_b,
                              FringeFit const& fit_a, FringeFit const& fit_b);

}  // namespace ocmsim

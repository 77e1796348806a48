#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ocmsim/detectors.hpp"
#include "ocmsim/fringe_fit.hpp"
#include "ocmsim/state.hpp"

namespace ocmsim {

/*!
 * Laboratory parameters of the two-photon fringe experiment. Lengths in mm.
 *
 * wavelength, beam angle, cladding and coincidence window are carried as
 * metadata; the fringe wavevector comes from the measured classical period.
 */
struct ExperimentConfig {
  double wavelength_nm = 800.0;
  double beam_angle_deg = 0.033;
  double classical_period = 0.69;
  double correlation_diameter = 0.5;
  double fiber_core = 0.0625;
  double fiber_cladding = 0.125;
  double scan_step = 0.05;
  double scan_half_range = 1.0;
  std::vector<double> separations{0.125, 0.25, 0.375, 0.5, 0.625};
  double coincidence_window_ns = 7.0;
  double pair_generation_probability = 1.0;
  double coupler_split = 0.5;
  //! Defaults to correlation_diameter / 5.6.
  std::optional<double> pixel_size;
  std::uint64_t events_per_run = 1'000'000;

  double effective_pixel_size() const;
  //! Correlation diameter in units of the pixel size.
  double effective_pixel_count() const;
};

//! Throws std::invalid_argument on non-positive lengths or separations that
//! are not whole multiples of the cladding diameter.
void validate(ExperimentConfig const& config);

//! Pixel count M quoted for the experiment.
inline constexpr double kExperimentPixelCount = 5.6;

/*!
 * N = 2 state for the experiment: kappa0 = pi / classical_period and
 * delta_kappa = 2 / (sqrt(N) * correlation_diameter).
 */
NoonStateSpec derive_spec(ExperimentConfig const& config);

//! One-line statement of the envelope convention used by derive_spec.
std::string envelope_convention();

struct Scenario {
  std::string name;
  NoonStateSpec spec;
  DetectionScheme scheme;
};

//! CLASSICAL, QL, OCM and OCM_PNR_COMPOSITE, all sharing kappa0 and delta_kappa.
std::vector<Scenario> paper_scenarios(ExperimentConfig const& config);

struct ScenarioResult {
  std::string name;
  int photon_number = 0;
  Histogram histogram;
  RunStats stats;
  std::optional<FringeFit> fit;
  std::string fit_error;
};

struct NamedRatio {
  std::string name;
  RatioEstimate estimate;
  bool available = false;
  std::string note;
};

struct PredictionRow {
  std::string name;
  double predicted = 0.0;
  std::optional<RatioEstimate> simulated;
};

struct ArrayStatistics {
  double pixel_size = 0.0;
  double pixel_count_m = 0.0;
  std::uint64_t events = 0;
  double rate_ql_mpa = 0.0;
  double rate_ocm_sp = 0.0;
  double rate_ocm_pnr = 0.0;
  //! Fraction of on-array events with both photons in one pixel.
  double same_pixel_fraction = 0.0;
  double same_pixel_fraction_error = 0.0;
  double predicted_multiset = 0.0;
  double predicted_placement = 0.0;
};

struct ComparisonReport {
  ExperimentConfig config;
  std::uint64_t master_seed = 0;
  NoonStateSpec spec{2, 1.0, 1.0};
  bool orthogonality_regime = false;
  std::vector<ScenarioResult> scenarios;
  std::vector<NamedRatio> period_ratios;
  std::vector<NamedRatio> amplitude_ratios;
  std::vector<PredictionRow> predictions;
  ArrayStatistics array_statistics;

  ScenarioResult const* find(std::string const& name) const;
};

/*!
 * Run the four scenarios with substreams of `master_seed`, fit each
 * histogram and assemble period, amplitude and prediction tables, plus
 * pixel-array acceptance statistics at the configured pixel size.
 */
ComparisonReport run_comparison(ExperimentConfig const& config, std::uint64_t master_seed,
                                unsigned workers = 1);

}  // namespace ocmsim

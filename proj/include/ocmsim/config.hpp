#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ocmsim/detectors.hpp"
#include "ocmsim/replication.hpp"
#include "ocmsim/state.hpp"

namespace ocmsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/*!
 * Parsed run configuration.
 *
 *   [experiment]  wavelength_nm, beam_angle_deg, classical_period_mm,
 *                 correlation_diameter_mm, fiber_core_um, fiber_cladding_um,
 *                 scan_step_um, scan_half_range_mm, separations_um (comma list),
 *                 coincidence_window_ns, pair_generation_probability,
 *                 coupler_split, pixel_size_um, events_per_run
 *   [state]       photon_number, fringe_wavevector_per_mm,
 *                 envelope_bandwidth_per_mm, intensity_scale
 *   [array]       pixel_size_um, pixel_count, origin_mm, quantum_efficiency
 *
 * Every section is optional. Unknown sections or keys are errors.
 */
struct RunConfig {
  ExperimentConfig experiment;
  std::optional<NoonStateSpec> state;
  std::optional<DetectorArray> array;
  //! Hex SHA-256 of the canonical form.
  std::string digest;

  //! The [state] override when present, else derive_spec(experiment).
  NoonStateSpec spec() const;
  //! The [array] section when present, else a centred array of the
  //! effective pixel size spanning +-5 envelope widths of `spec`.
  DetectorArray detector_array(NoonStateSpec const& spec) const;
};

//! Throws ConfigError on syntax errors, unknown keys and invalid values.
RunConfig parse_config(std::string const& text);
RunConfig load_config(std::filesystem::path const& path);

//! Sorted "section.key=value" lines; insensitive to key order and whitespace.
std::string canonical_config(std::string const& text);
std::string sha256_hex(std::string const& data);

}  // namespace ocmsim

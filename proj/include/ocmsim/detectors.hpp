#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "ocmsim/histogram.hpp"
#include "ocmsim/rng.hpp"
#include "ocmsim/state.hpp"

namespace ocmsim {

//! Linear pixel array; pixel i covers [origin + i*size, origin + (i+1)*size).
class DetectorArray {
 public:
  DetectorArray(double pixel_size, std::int64_t pixel_count, double origin,
                double quantum_efficiency = 1.0);

  //! Array of `pixel_count` pixels centred on x = 0.
  static DetectorArray centered(double pixel_size, std::int64_t pixel_count);

  double pixel_size() const noexcept { return pixel_size_; }
  std::int64_t pixel_count() const noexcept { return pixel_count_; }
  double origin() const noexcept { return origin_; }
  double quantum_efficiency() const noexcept { return quantum_efficiency_; }
  double upper_edge() const noexcept { return origin_ + pixel_size_ * static_cast<double>(pixel_count_); }

  std::optional<std::int64_t> pixel_of(double x) const noexcept;
  double pixel_center(std::int64_t pixel) const noexcept;

 private:
  double pixel_size_;
  std::int64_t pixel_count_;
  double origin_;
  double quantum_efficiency_;
};

//! Centred array of `pixel_size` pixels spanning +-5 / (sqrt(N) dk), wide
//! enough to catch nearly every N-photon arrival.
DetectorArray covering_array(NoonStateSpec const& spec, double pixel_size);

//! Multi-photon absorption emulated by a 1xN coupler feeding N detectors.
struct QlMpa {
  double coupler_split = 0.5;
};
//! Non-resolving single-photon array.
struct OcmSp {};
//! Photon-number-resolving array.
struct OcmPnr {};
//! Two apertures scanned together at each separation; zero separation is the
//! single-fiber coupler case.
struct FiberPair {
  std::vector<double> separations;
  double aperture_width = 0.0625;
  double scan_step = 0.05;
  bool include_zero_separation_coupler = false;
  double scan_half_range = 1.0;
  double coupler_split = 0.5;
};
//! One scanned aperture counting single photons (N = 1 reference fringe).
struct ApertureScan {
  double aperture_width = 0.0625;
  double scan_step = 0.05;
  double scan_half_range = 1.0;
};

using DetectionScheme = std::variant<QlMpa, OcmSp, OcmPnr, FiberPair, ApertureScan>;

//! Throws std::invalid_argument on out-of-range fields.
void validate(DetectionScheme const& scheme);
std::string_view scheme_name(DetectionScheme const& scheme);
bool is_scanned(DetectionScheme const& scheme) noexcept;

//! Probability that an N-photon bunch leaves a 1xN coupler through distinct ports.
double coupler_pass_probability(double coupler_split, int photon_number);

enum class RejectionReason {
  none,
  not_colocated,
  collision_non_pnr,
  outside_array,
  coupler_loss,
  no_pair_in_apertures,
  detector_inefficiency,
};
std::string_view to_string(RejectionReason reason) noexcept;

struct PixelHits {
  std::map<std::int64_t, int> counts;
  int outside = 0;
};

struct DetectionRecord {
  bool accepted = false;
  std::map<std::int64_t, int> pixel_hits;
  std::optional<double> centroid_estimate;
  RejectionReason rejection_reason = RejectionReason::none;
};

PixelHits assign_pixels(DetectorArray const& array, PhotonArrivalEvent const& event);

//! Pixel-array protocols (QL_MPA, OCM_SP, OCM_PNR). The stream is drawn from
//! only for coupler splitting and sub-unit quantum efficiency.
DetectionRecord detect(DetectionScheme const& scheme, DetectorArray const& array,
                       PhotonArrivalEvent const& event, RngStream& rng);

//! Apply the pixel protocol to precomputed hits.
DetectionRecord detect_hits(DetectionScheme const& scheme, DetectorArray const& array,
                            PixelHits const& hits, int photon_number, RngStream& rng);

/*!
 * Photon-pair acceptance for apertures at scan_position -/+ separation/2.
 *
 * Separation zero is the single-aperture coupler case: both photons in the
 * aperture and a coupler pass. Throws std::invalid_argument unless N = 2.
 */
DetectionRecord detect_fiber_pair(FiberPair const& scheme, PhotonArrivalEvent const& event,
                                  double scan_position, double separation, RngStream& rng);

bool in_aperture(double x, double center, double width) noexcept;

struct RunStats {
  std::uint64_t generated = 0;
  std::uint64_t configurations = 1;
  std::uint64_t accepted = 0;
  std::map<RejectionReason, std::uint64_t> rejections;

  std::uint64_t trials() const noexcept { return generated * configurations; }
  double acceptance_rate() const noexcept;
  //! Binomial standard error of acceptance_rate.
  double acceptance_standard_error() const noexcept;
};

struct RunResult {
  Histogram histogram;
  RunStats stats;
};

//! Scan positions (k - K) * step for k = 0..2K, K = round(half_range / step).
std::vector<double> scan_positions(double scan_step, double scan_half_range);

/*!
 * Generate n_events from `spec`, detect each with `scheme`, bin the centroid
 * estimates. Event i always uses RngStream(master_seed, i), so output does not
 * depend on `workers`.
 */
RunResult simulate_run(NoonStateSpec const& spec, DetectionScheme const& scheme,
                       DetectorArray const& array, std::uint64_t n_events,
                       std::uint64_t master_seed, unsigned workers = 1);

//! Scanned schemes only (FIBER_PAIR, APERTURE_SCAN).
RunResult simulate_run(NoonStateSpec const& spec, DetectionScheme const& scheme,
                       std::uint64_t n_events, std::uint64_t master_seed, unsigned workers = 1);

}  // namespace ocmsim
